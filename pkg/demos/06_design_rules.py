"""From a traffic assumption to a minimum device requirement.

Chains the coincidence error model into the sensing-margin model: pick an
error target, find the coincidence tolerance that meets it, then find the
device on/off ratio (and minimum off-resistance) that lets the comparator
actually tolerate that many simultaneous off-cells.
"""

from memrouter import design_rules


def main():
    for n_rows, t_pw in ((1024, 1e-6), (4096, 1e-6), (4096, 1e-8)):
        rep = design_rules(n_rows=n_rows, t_pw=t_pw, p_target=1e-10,
                           r_on=10e3)
        print(f"{n_rows} rows, {t_pw * 1e9:.0f} ns pulses, target 1e-10:")
        print(f"  mean concurrency lambda     = {rep.lam:.3f}")
        print(f"  required tolerance m        = {rep.m_tol}")
        print(f"  effective-ratio target      = {rep.k_eff_target:.1f}")
        print(f"  required device ratio k     = {rep.k_required:.1f}")
        print(f"  minimum r_off               = {rep.r_off_min / 1e3:.0f} kohm")
        print()
    print("Shorter pulses relax the device requirement dramatically: the")
    print("coincidence window shrinks, so fewer overlaps must be tolerated.")


if __name__ == "__main__":
    main()

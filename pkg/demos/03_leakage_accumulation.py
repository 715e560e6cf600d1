"""Off-state leakage piling up when many inputs fire at once.

With every cell in the high-resistance state, each simultaneously active
word line still pushes a small sneak current into the sense line. Enough
coincident inputs and the sum crosses the comparator threshold even though
no cell is programmed on.
"""

from memrouter import (ChannelConfig, DeviceParams, TransistorParams,
                       calibrate_fet_leak, i_cc_leak)


def cfg_for(r_off):
    per_fet, _ = calibrate_fet_leak(total_leak=10e-9, n_fets=256, v_read=0.2)
    return ChannelConfig(
        n_rows=1024, r_line=2.5, v_read=0.2, i_ref=6e-6,
        device=DeviceParams(r_on=10e3, r_off=r_off),
        transistor=TransistorParams(r_t=1.7e3, i_leak_per_fet=per_fet),
    )


def main():
    per_fet, r_fet = calibrate_fet_leak(10e-9, 256, 0.2)
    print(f"FET leakage calibration: {per_fet * 1e12:.4f} pA per device "
          f"({r_fet / 1e9:.2f} Gohm off-resistance)\n")

    print("accumulated off-current vs number of simultaneous inputs")
    print(f"{'r_off':>8} {'n_si':>5} {'I_leak (nA)':>12} {'ratio':>7} "
          f"{'cells (nA)':>11} {'fets (nA)':>10}")
    for r_off in (1e6, 10e6, 100e6):
        for n_si in (1, 10, 50):
            rep = i_cc_leak(cfg_for(r_off), n_si)
            print(f"{r_off / 1e6:>6.0f}M {n_si:>5} "
                  f"{rep.i_cc_leak * 1e9:>12.3f} {rep.ratio:>7.3f} "
                  f"{rep.i_cells * 1e9:>11.3f} {rep.i_fets * 1e9:>10.3f}")
    print("\nAt low r_off the memristor sneak paths dominate; past ~100 Mohm")
    print("the transistor off-leakage takes over and sets the floor.")


if __name__ == "__main__":
    main()

"""How line and transistor parasitics erode the memristor on/off ratio.

A single on-cell sources a read current toward the sense comparator. Every
ohm of shared line and access-transistor resistance eats into the contrast
between the on-state and off-state read currents, shrinking the window the
comparator threshold must sit in.
"""

from memrouter import (ChannelConfig, DeviceParams, TransistorParams,
                       effective_onoff_ratio, i_sl_single_on,
                       required_device_ratio)


def cfg_for(n_rows, r_line=2.5):
    return ChannelConfig(
        n_rows=n_rows, r_line=r_line, v_read=0.2, i_ref=6e-6,
        device=DeviceParams(r_on=10e3, r_off=200e3),
        transistor=TransistorParams(r_t=1.7e3),
    )


def main():
    print("device ratio k = 20 (10 kohm / 200 kohm), r = 2.5 ohm/segment,")
    print("R_T = 1.7 kohm, V_read = 0.2 V\n")
    print(f"{'rows':>6} {'I_on (uA)':>10} {'k_eff':>8} {'margin k_eff/k':>15}")
    for n in (64, 256, 1024, 4096):
        cfg = cfg_for(n)
        rep = effective_onoff_ratio(cfg)
        i_on = i_sl_single_on(cfg)
        print(f"{n:>6} {i_on * 1e6:>10.3f} {rep.k_eff:>8.3f} "
              f"{rep.k_eff / rep.k:>15.3f}")

    print("\nTo keep an effective ratio of 10 at 4096 rows, the device must")
    k, r_off_min = required_device_ratio(10.0, cfg_for(4096))
    print(f"provide k >= {k:.1f}, i.e. r_off >= {r_off_min / 1e3:.0f} kohm.")


if __name__ == "__main__":
    main()

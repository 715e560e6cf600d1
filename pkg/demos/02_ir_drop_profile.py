"""Voltage sag along the sense line of a loaded channel.

Solves the full resistive ladder for a channel with several conducting rows
and prints the per-node IR drop: how much of the 0.2 V read voltage is lost
in the wiring before the current reaches the comparator.
"""

import numpy as np

from memrouter import (ChannelConfig, DeviceParams, TransistorParams,
                       ir_drop_profile, make_instance, solve_channel)


def main():
    cfg = ChannelConfig(
        n_rows=64, r_line=10.0, v_read=0.2, i_ref=6e-6,
        device=DeviceParams(r_on=10e3, r_off=200e3),
        transistor=TransistorParams(r_t=1.7e3),
    )
    on_rows = [0, 10, 20, 40, 63]
    inst = make_instance(cfg, on_rows=on_rows, active_rows=on_rows)
    sol = solve_channel(inst)
    drop = ir_drop_profile(inst)

    print(f"5 conducting rows on a 64-row channel, r = {cfg.r_line} ohm")
    print(f"sense-line current: {sol.i_sl * 1e6:.3f} uA\n")
    print(f"{'row':>4} {'V_node (mV)':>12} {'I_branch (uA)':>14} "
          f"{'IR drop (mV)':>13}")
    for i in np.r_[0:5, 30:33, 60:64]:
        print(f"{i:>4} {sol.node_voltages[i] * 1e3:>12.4f} "
              f"{sol.branch_currents[i] * 1e6:>14.4f} "
              f"{drop[i] * 1e3:>13.4f}")
    print("\nIdle rows lose voltage only through their sense-line node, so")
    print("their drop shrinks toward the comparator; conducting rows add")
    print("their own word-line run loss on top (visible at row 63).")


if __name__ == "__main__":
    main()

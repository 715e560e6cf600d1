"""Event-driven emulation of the router: multicast and a failure mode.

First a clean multicast: one input word line programmed to three output
channels fires a single pulse and all three comparators trip. Then the
failure case: with every cell off, nine coincident pulses push enough
accumulated off-current into the sense lines to fire every comparator.
"""

from memrouter import demo_fig2_setup, emulate, error_fig3_setup


def main():
    cfg, matrix, trains = demo_fig2_setup()
    trace = emulate(matrix, trains, cfg, mode="ideal")
    fired = sorted({ev.channel for ev in trace.events if ev.output_fired})
    print("multicast: input 10 programmed to channels 20, 64 and 100")
    print(f"  channels fired: {fired}")
    print(f"  errors: {trace.error_count}\n")

    cfg3, matrix3, trains3 = error_fig3_setup()
    fail = emulate(matrix3, trains3, cfg3, mode="ideal")
    print("failure: 9 coincident pulses, all cells off (250 kohm)")
    ev = fail.events[0]
    print(f"  sense current per channel: {ev.i_sl * 1e6:.3f} uA "
          f"(threshold 6 uA)")
    print(f"  errors: {fail.error_count} "
          f"({len(fail.events)} channels falsely fired)")


if __name__ == "__main__":
    main()

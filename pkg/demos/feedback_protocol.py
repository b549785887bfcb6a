"""Walk through the limited-feedback selection procedure on one realization.

Prints the probe/feedback/training schedule and the bit and slot budget for
a few array sizes. Selecting one of N antennas needs only ceil(log2 N) bits,
so the whole procedure for a (3,3) system costs 4 feedback bits.
"""

from relaysim import (
    RngStream,
    SystemConfig,
    draw_realization,
    feedback_budget,
    simulate_feedback_sequence,
)

cfg = SystemConfig(3, 3, 2)
ch = draw_realization(cfg, RngStream(99))

print(f"selection procedure for N_S={cfg.n_s}, N_R={cfg.n_r}, N_D={cfg.n_d}:")
for event in simulate_feedback_sequence(cfg, ch):
    extra = "" if event.bits is None else f"  ({event.bits} bits)"
    print(f"  {event.kind:<22} antenna={event.antenna}{extra}")

print()
print(f"{'(N_S, N_R)':>12} {'bits':>5} {'est slots':>10} {'training':>9} {'total':>6}")
for n_s, n_r in [(1, 1), (2, 2), (3, 3), (4, 4), (8, 8)]:
    b = feedback_budget(SystemConfig(n_s, n_r, 1))
    print(f"{str((n_s, n_r)):>12} {b.total_feedback_bits:>5} "
          f"{b.snr_estimation_slots:>10} {b.training_slots:>9} {b.total_slots:>6}")

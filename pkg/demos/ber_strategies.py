"""BER of the different transmission strategies on a 3x3x3 system.

Sweeps the mean direct-link SNR with the relay links held 2 dB stronger,
the usual picture for a relay standing between source and destination.
Expected ordering at moderate SNR: relay filter <= MMSE selection <= MRC
selection <= direct-only, with fixed-antenna far behind.
"""

from relaysim import config_from_mean_snrs_db, run_ber

SWEEP_DB = [0.0, 2.0, 4.0, 6.0, 8.0]
TRIALS = 200_000
STRATEGIES = ["optimal-relay-filter", "mmse-receiver", "mrc-receiver",
              "direct-only", "fixed-antenna"]

print(f"{'snr_db':>7} " + " ".join(f"{s:>20}" for s in STRATEGIES))
for db in SWEEP_DB:
    cfg = config_from_mean_snrs_db(3, 3, 3, sd_db=db, sr_db=db + 2.0, rd_db=db + 2.0)
    row = []
    for strategy in STRATEGIES:
        p = run_ber(cfg, strategy, [0.0], TRIALS, seed=42, threads=4)[0]
        row.append(f"{p.ber:>20.3e}")
    print(f"{db:>7g} " + " ".join(row))

"""BER and outage Monte Carlo engines, confidence intervals, diversity fits.

Trials are processed in fixed-size chunks; chunk c of sweep point p draws all
its randomness from the Philox substream (seed, p * 2^32 + c).  Chunk
boundaries never depend on the worker count, and per-chunk integer counts are
summed in chunk order, so results are bit-identical for any number of threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .channel import SystemConfig
from .errors import InsufficientStatisticsError, InvalidParameterError
from .numerics import RngStream, dominant_singular_pair_batch
from .selection import STRATEGIES, gamma_srd, mrc_post_snr

CHUNK = 1 << 14
_POINT_STRIDE = 1 << 32  # substream indices per sweep point


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    strategy: str
    trials: int
    bit_errors: int
    ber: float
    ci_low: float
    ci_high: float

    @property
    def value(self) -> float:
        return self.ber

    @property
    def errors(self) -> int:
        return self.bit_errors


@dataclass(frozen=True)
class OutagePoint:
    snr_db: float
    strategy: str
    gamma0: float
    trials: int
    outage_count: int
    p_out: float
    ci_low: float
    ci_high: float

    @property
    def value(self) -> float:
        return self.p_out

    @property
    def errors(self) -> int:
        return self.outage_count


@dataclass(frozen=True)
class DiversityFit:
    """Log-log slope estimates of a probability-vs-SNR curve."""

    snr_db: np.ndarray
    values: np.ndarray
    local_slopes: np.ndarray  # between consecutive points, decades/decade
    ls_slope: float           # least-squares slope over the window
    order_estimate: int


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def diversity_order(n_s: int, n_r: int, n_d: int) -> int:
    """Full diversity order of the selection scheme: N_S*N_D + N_R*min(N_S, N_D)."""
    if min(n_s, n_r, n_d) < 1:
        raise InvalidParameterError("antenna counts must be >= 1")
    return n_s * n_d + n_r * min(n_s, n_d)


# ---------------------------------------------------------------------------
# chunk kernels
# ---------------------------------------------------------------------------

def _draw_channels(gen, n: int, cfg: SystemConfig):
    """Fixed draw order shared by both engines: h_sd, h_sr, h_rd."""

    def cgauss(shape, lam):
        re = gen.standard_normal(shape)
        im = gen.standard_normal(shape)
        return math.sqrt(lam / 2.0) * (re + 1j * im)

    h_sd = cgauss((n, cfg.n_d, cfg.n_s), cfg.lambda_sd)
    h_sr = cgauss((n, cfg.n_r, cfg.n_s), cfg.lambda_sr)
    h_rd = cgauss((n, cfg.n_d, cfg.n_r), cfg.lambda_rd)
    return h_sd, h_sr, h_rd


def _selected_gamma(cfg: SystemConfig, strategy: str, g_sd, g_sr, g_rd, h_rd):
    """Per-trial post-SNR of the selected configuration (closed forms)."""
    if strategy == "direct-only":
        return g_sd.max(axis=1)
    if strategy == "mmse-receiver":
        rd_best = g_rd.max(axis=1)
        return (g_sd + gamma_srd(g_sr, rd_best[:, None])).max(axis=1)
    if strategy == "mrc-receiver":
        grid = mrc_post_snr(g_sd[:, :, None], g_sr[:, :, None], g_rd[:, None, :])
        return grid.reshape(grid.shape[0], -1).max(axis=1)
    if strategy == "optimal-relay-filter":
        sigma, _ = dominant_singular_pair_batch(h_rd)
        g_lam = cfg.snr * sigma * sigma
        return (g_sd + gamma_srd(g_sr, g_lam[:, None])).max(axis=1)
    if strategy == "fixed-antenna":
        return g_sd[:, 0] + gamma_srd(g_sr[:, 0], g_rd[:, 0])
    raise InvalidParameterError(f"unknown strategy {strategy!r} (choose from {STRATEGIES})")


def _outage_chunk(cfg: SystemConfig, strategy: str, gamma0: float,
                  stream: RngStream, n: int) -> int:
    gen = stream.generator()
    h_sd, h_sr, h_rd = _draw_channels(gen, n, cfg)
    g_sd = cfg.snr * np.sum(np.abs(h_sd) ** 2, axis=1)
    g_sr = cfg.snr * np.sum(np.abs(h_sr) ** 2, axis=1)
    g_rd = cfg.snr * np.sum(np.abs(h_rd) ** 2, axis=1)
    gamma = _selected_gamma(cfg, strategy, g_sd, g_sr, g_rd, h_rd)
    return int(np.count_nonzero(gamma < gamma0))


def _ber_chunk(cfg: SystemConfig, strategy: str, stream: RngStream, n: int) -> int:
    """Simulate n one-symbol blocks through the two-slot chain; count errors."""
    gen = stream.generator()
    es = cfg.snr
    h_sd, h_sr, h_rd = _draw_channels(gen, n, cfg)
    bits = gen.integers(0, 2, n)

    def cgauss(shape):
        return (gen.standard_normal(shape) + 1j * gen.standard_normal(shape)) / math.sqrt(2.0)

    n_r = cgauss((n, cfg.n_r))
    n_d1 = cgauss((n, cfg.n_d))
    n_d2 = cgauss((n, cfg.n_d))

    s = (1.0 - 2.0 * bits) * math.sqrt(es)
    g_sd = es * np.sum(np.abs(h_sd) ** 2, axis=1)
    g_sr = es * np.sum(np.abs(h_sr) ** 2, axis=1)
    g_rd = es * np.sum(np.abs(h_rd) ** 2, axis=1)
    rows = np.arange(n)

    if strategy == "direct-only":
        i = np.argmax(g_sd, axis=1)
        h_i = h_sd[rows, :, i]
        y1 = h_i * s[:, None] + n_d1
        stat = np.real(np.einsum("ti,ti->t", h_i.conj(), y1))
        return int(np.count_nonzero((stat < 0) != bits.astype(bool)))

    v_filter = None
    if strategy == "mmse-receiver":
        k = np.argmax(g_rd, axis=1)
        i = np.argmax(g_sd + gamma_srd(g_sr, g_rd[rows, k][:, None]), axis=1)
        receiver = "mmse"
    elif strategy == "mrc-receiver":
        grid = mrc_post_snr(g_sd[:, :, None], g_sr[:, :, None], g_rd[:, None, :])
        flat = np.argmax(grid.reshape(n, -1), axis=1)
        i, k = np.unravel_index(flat, (cfg.n_s, cfg.n_r))
        receiver = "mrc"
    elif strategy == "fixed-antenna":
        i = np.zeros(n, dtype=int)
        k = np.zeros(n, dtype=int)
        receiver = "mmse"
    elif strategy == "optimal-relay-filter":
        sigma, v_filter = dominant_singular_pair_batch(h_rd)
        g_lam = es * sigma * sigma
        i = np.argmax(g_sd + gamma_srd(g_sr, g_lam[:, None]), axis=1)
        k = None
        receiver = "mmse"
    else:
        raise InvalidParameterError(f"unknown strategy {strategy!r} (choose from {STRATEGIES})")

    h_sd_i = h_sd[rows, :, i]
    h_sr_i = h_sr[rows, :, i]
    if v_filter is None:
        r_vec = h_rd[rows, :, k]
    else:
        r_vec = np.einsum("tdr,tr->td", h_rd, v_filter)

    g = np.sum(np.abs(h_sr_i) ** 2, axis=1)
    g = np.maximum(g, 1e-300)  # measure-zero guard
    alpha = 1.0 / np.sqrt(g * g + g / es)

    # relay: matched-filter combine, rescale, retransmit along r_vec
    y_r = h_sr_i * s[:, None] + n_r
    s_relay = alpha * np.einsum("tr,tr->t", h_sr_i.conj(), y_r)
    y1 = h_sd_i * s[:, None] + n_d1
    y2 = r_vec * s_relay[:, None] + n_d2

    a = np.sqrt(g) / np.sqrt(g + 1.0 / es)
    w1 = h_sd_i
    if receiver == "mrc":
        w2 = a[:, None] * r_vec
    else:
        c = 1.0 / (g + 1.0 / es)
        w2 = (a / (1.0 + c * np.sum(np.abs(r_vec) ** 2, axis=1)))[:, None] * r_vec
    stat = np.real(np.einsum("ti,ti->t", w1.conj(), y1) +
                   np.einsum("ti,ti->t", w2.conj(), y2))
    return int(np.count_nonzero((stat < 0) != bits.astype(bool)))


# ---------------------------------------------------------------------------
# engines
# ---------------------------------------------------------------------------

def _run_point(kernel, trials: int, seed: int, point_index: int, threads: int,
               early_stop_errors: int | None) -> tuple[int, int]:
    """Run one sweep point chunk by chunk; returns (count, trials_used)."""
    n_chunks = (trials + CHUNK - 1) // CHUNK
    sizes = [min(CHUNK, trials - c * CHUNK) for c in range(n_chunks)]
    streams = [RngStream(seed, point_index * _POINT_STRIDE + c) for c in range(n_chunks)]

    def run(c):
        return kernel(streams[c], sizes[c])

    total = 0
    used = 0
    if threads <= 1:
        results = map(run, range(n_chunks))
    else:
        pool = ThreadPoolExecutor(max_workers=threads)
        results = pool.map(run, range(n_chunks))
    try:
        for c, count in enumerate(results):
            total += count
            used += sizes[c]
            if early_stop_errors is not None and total >= early_stop_errors:
                break
    finally:
        if threads > 1:
            pool.shutdown(wait=False, cancel_futures=True)
    return total, used


def run_ber_points(points: Sequence[tuple[float, SystemConfig]], strategy: str,
                   trials_per_point: int, seed: int, threads: int = 1,
                   early_stop_errors: int | None = None) -> list[BerPoint]:
    """BER sweep over arbitrary (label_db, config) points.

    Per trial: draw a fading block, run the selection rule with perfect CSI,
    push one BPSK symbol through the two-slot chain, filter, detect.
    """
    if trials_per_point < 1:
        raise InvalidParameterError("trials_per_point must be >= 1")
    if strategy not in STRATEGIES:
        raise InvalidParameterError(f"unknown strategy {strategy!r} (choose from {STRATEGIES})")
    out = []
    for p, (db, cfg) in enumerate(points):
        kernel = lambda stream, n: _ber_chunk(cfg, strategy, stream, n)
        errors, used = _run_point(kernel, trials_per_point, seed, p, threads, early_stop_errors)
        lo, hi = wilson_interval(errors, used)
        out.append(BerPoint(snr_db=float(db), strategy=strategy, trials=used,
                            bit_errors=errors, ber=errors / used, ci_low=lo, ci_high=hi))
    return out


def run_ber(cfg: SystemConfig, strategy: str, snr_sweep_db: Sequence[float],
            trials_per_point: int, seed: int, threads: int = 1,
            early_stop_errors: int | None = None) -> list[BerPoint]:
    """BER sweep where each point scales the transmit SNR of all links."""
    points = [(db, cfg.with_snr(10.0 ** (db / 10.0))) for db in snr_sweep_db]
    return run_ber_points(points, strategy, trials_per_point, seed, threads, early_stop_errors)


def run_outage_points(points: Sequence[tuple[float, SystemConfig]], strategy: str,
                      gamma0: float, trials_per_point: int, seed: int,
                      threads: int = 1,
                      early_stop_errors: int | None = None) -> list[OutagePoint]:
    """Outage sweep over arbitrary (label_db, config) points.

    Outage is evaluated on the closed-form post-SNR of the selected strategy;
    no symbols are simulated.
    """
    if gamma0 <= 0 or not math.isfinite(gamma0):
        raise InvalidParameterError(f"gamma0 must be finite and > 0, got {gamma0}")
    if trials_per_point < 1:
        raise InvalidParameterError("trials_per_point must be >= 1")
    if strategy not in STRATEGIES:
        raise InvalidParameterError(f"unknown strategy {strategy!r} (choose from {STRATEGIES})")
    out = []
    for p, (db, cfg) in enumerate(points):
        kernel = lambda stream, n: _outage_chunk(cfg, strategy, gamma0, stream, n)
        count, used = _run_point(kernel, trials_per_point, seed, p, threads, early_stop_errors)
        lo, hi = wilson_interval(count, used)
        out.append(OutagePoint(snr_db=float(db), strategy=strategy, gamma0=gamma0,
                               trials=used, outage_count=count, p_out=count / used,
                               ci_low=lo, ci_high=hi))
    return out


def run_outage(cfg: SystemConfig, strategy: str, gamma0: float,
               snr_sweep_db: Sequence[float], trials_per_point: int, seed: int,
               threads: int = 1,
               early_stop_errors: int | None = None) -> list[OutagePoint]:
    """Outage sweep where each point scales the transmit SNR of all links."""
    points = [(db, cfg.with_snr(10.0 ** (db / 10.0))) for db in snr_sweep_db]
    return run_outage_points(points, strategy, gamma0, trials_per_point, seed, threads,
                             early_stop_errors)


def fit_diversity(points: Sequence, window: tuple[float, float] | None = None) -> DiversityFit:
    """Slope of log10(probability) vs log10(SNR) from a sweep.

    ``points`` are BerPoint/OutagePoint (or anything with .snr_db and .value).
    ``window`` restricts the fit to points whose probability lies inside
    [lo, hi].  Slopes are reported as positive diversity orders.
    """
    sel = list(points)
    if window is not None:
        lo, hi = window
        if lo <= 0:
            raise InvalidParameterError("window bounds must be positive")
        sel = [p for p in sel if lo <= p.value <= hi]
    if len(sel) < 2:
        raise InsufficientStatisticsError("need at least 2 points with probabilities in the window")
    for p in sel:
        if p.value <= 0.0:
            raise InsufficientStatisticsError(
                f"zero probability at snr_db={p.snr_db}: increase trials or shrink the window")
    snr_db = np.array([p.snr_db for p in sel], dtype=float)
    vals = np.array([p.value for p in sel], dtype=float)
    x = snr_db / 10.0  # log10 of linear SNR
    y = np.log10(vals)
    local = -(np.diff(y) / np.diff(x))
    ls = -float(np.polyfit(x, y, 1)[0])
    return DiversityFit(snr_db=snr_db, values=vals, local_slopes=local,
                        ls_slope=ls, order_estimate=int(round(ls)))

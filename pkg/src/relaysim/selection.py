"""Closed-form post-SNRs and the antenna-selection rules.

All SNR formulas accept scalars or numpy arrays (broadcasting).  Antenna
indices are 0-based.  Argmax ties break toward the lowest index so that runs
are deterministic; under continuous fading ties have probability zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import LinkSnrs
from .errors import InvalidParameterError

STRATEGIES = (
    "mmse-receiver",
    "mrc-receiver",
    "optimal-relay-filter",
    "direct-only",
    "fixed-antenna",
)


@dataclass(frozen=True)
class SelectionDecision:
    """Outcome of a selection rule: chosen antennas and the predicted SNR."""

    strategy: str
    source_antenna: int
    relay_antenna: int | None
    predicted_post_snr: float


def gamma_srd(gamma_sr, gamma_rd):
    """Effective SNR of the two-hop relayed path.

    gamma_sr * gamma_rd / (gamma_sr + gamma_rd + 1); never exceeds either hop.
    """
    gamma_sr = np.asarray(gamma_sr, dtype=float)
    gamma_rd = np.asarray(gamma_rd, dtype=float)
    out = gamma_sr * gamma_rd / (gamma_sr + gamma_rd + 1.0)
    return out if out.ndim else float(out)


def mmse_post_snr(gamma_sd, gamma_sr, gamma_rd):
    """Post-SNR of the MMSE receiver: direct SNR plus the relayed-path SNR."""
    out = np.asarray(gamma_sd, dtype=float) + gamma_srd(gamma_sr, gamma_rd)
    return out if out.ndim else float(out)


def mrc_post_snr(gamma_sd, gamma_sr, gamma_rd):
    """Post-SNR of the (suboptimal) MRC receiver w = h under the colored
    relay noise, derived directly from the stacked observation model:

        (g_sd*(g_sr+1) + g_sr*g_rd)^2
        -----------------------------------------
        g_sd*(g_sr+1)^2 + g_sr*g_rd*(g_sr+1+g_rd)

    Validated against the numerical MRC filter to 1e-9 relative (see the
    receiver module tests); see also :func:`mrc_post_snr_variant`.
    """
    a = np.asarray(gamma_sd, dtype=float)
    b = np.asarray(gamma_sr, dtype=float)
    c = np.asarray(gamma_rd, dtype=float)
    num = (a * (b + 1.0) + b * c) ** 2
    den = a * (b + 1.0) ** 2 + b * c * (b + 1.0 + c)
    out = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return out if out.ndim else float(out)


def mrc_post_snr_variant(gamma_sd, gamma_sr, gamma_rd):
    """Alternative MRC closed form with an extra direct-SNR factor inside the
    numerator.  It agrees with :func:`mrc_post_snr` only when gamma_sd == 1
    and disagrees with the numerical MRC filter otherwise; it is retained so
    the discrepancy can be demonstrated (docs/mrc_closed_form_check.md).
    """
    a = np.asarray(gamma_sd, dtype=float)
    b = np.asarray(gamma_sr, dtype=float)
    c = np.asarray(gamma_rd, dtype=float)
    num = a * (b + 1.0) ** 2 + b * c * (2.0 * (b + 1.0) + b * c)
    den = a * (b + 1.0) ** 2 + b * c * (b + 1.0 + c)
    out = np.where(den > 0, a * num / np.where(den > 0, den, 1.0), 0.0)
    return out if out.ndim else float(out)


def relaying_harmful(gamma_sd, gamma_sr, gamma_rd):
    """True when MRC combining of the relayed slot lowers the SNR below the
    direct link: the first hop is weaker than the direct link while the
    second hop is strong enough to dominate the combiner with amplified
    noise.  Both inequalities are strict.
    """
    a = np.asarray(gamma_sd, dtype=float)
    b = np.asarray(gamma_sr, dtype=float)
    c = np.asarray(gamma_rd, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        threshold = a * (b + 1.0) / (a - b)
    out = (b < a) & (c > threshold)
    return out if out.ndim else bool(out)


def select_relay_antenna(snrs: LinkSnrs) -> int:
    """Relay transmit antenna maximizing gamma_rd (independent of the source
    choice under the MMSE receiver)."""
    return int(np.argmax(snrs.gamma_rd))


def select_source_antenna(snrs: LinkSnrs, k_o: int, receiver: str = "mmse") -> SelectionDecision:
    """Source antenna maximizing the destination post-SNR.

    Under the MMSE receiver the relay antenna k_o may be fixed beforehand and
    only the source index is searched.  Under MRC the selection does not
    decouple, so the full (i, k) grid is searched and k_o is ignored.
    """
    if receiver == "mmse":
        if not (0 <= k_o < snrs.gamma_rd.shape[0]):
            raise InvalidParameterError(f"relay antenna {k_o} out of range")
        snr_per_i = mmse_post_snr(snrs.gamma_sd, snrs.gamma_sr, snrs.gamma_rd[k_o])
        snr_per_i = np.atleast_1d(snr_per_i)
        i_o = int(np.argmax(snr_per_i))
        return SelectionDecision("mmse-receiver", i_o, k_o, float(snr_per_i[i_o]))
    if receiver == "mrc":
        grid = mrc_post_snr(snrs.gamma_sd[:, None], snrs.gamma_sr[:, None],
                            snrs.gamma_rd[None, :])
        grid = np.atleast_2d(grid)
        i_o, k_best = np.unravel_index(np.argmax(grid), grid.shape)
        return SelectionDecision("mrc-receiver", int(i_o), int(k_best),
                                 float(grid[i_o, k_best]))
    raise InvalidParameterError(f"unknown receiver {receiver!r} (use 'mmse' or 'mrc')")

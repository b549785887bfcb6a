"""Relay-side processing.

The relay receives on all antennas, combines with a matched filter, rescales
to its power constraint, and retransmits either on one selected antenna or
through the rank-one SVD filter.  The two-slot observation at the destination
is summarized by a stacked equivalent channel with spatially colored noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, SystemConfig
from .errors import DegenerateInputError, InvalidParameterError
from .numerics import dominant_singular_pair


@dataclass(frozen=True)
class EquivalentChannel:
    """Stacked two-slot model y = h s + n for one (source, relay) choice.

    h: length 2*N_D effective channel; the top half is the direct link, the
    bottom half the relayed path scaled by the first-hop quality.
    r_n: 2*N_D x 2*N_D Hermitian noise covariance; identity in the first
    slot, identity plus a rank-one term from the amplified relay noise in
    the second.
    relay_antenna is None when the relay applies the SVD filter instead of
    transmitting on a single antenna.
    """

    h: np.ndarray
    r_n: np.ndarray
    source_antenna: int
    relay_antenna: int | None


@dataclass(frozen=True)
class RelayFilter:
    """Rank-one relay filter W = v (h_sr)^H scaled to the power constraint.

    lambda_rd is the squared top singular value of H_RD; it plays the role
    of the selected-antenna channel power in the post-SNR closed forms.
    """

    w_relay: np.ndarray
    v: np.ndarray
    lambda_rd: float
    source_antenna: int


def relay_gain(g: float, snr: float) -> float:
    """Amplification that holds the relay's expected transmit power at E_s.

    g is the received channel power ||h_sr^(i)||^2.  alpha = 1/sqrt(g^2 + g/snr).
    """
    if not math.isfinite(snr) or snr <= 0:
        raise InvalidParameterError(f"snr must be finite and > 0, got {snr}")
    if g < 0 or not math.isfinite(g):
        raise InvalidParameterError(f"channel power must be finite and >= 0, got {g}")
    if g == 0:
        raise DegenerateInputError("relay receives nothing (zero source-relay channel)")
    return 1.0 / math.sqrt(g * g + g / snr)


def _assemble(h_sd_col: np.ndarray, g: float, r_vec: np.ndarray, snr: float,
              source_antenna: int, relay_antenna: int | None) -> EquivalentChannel:
    """Build the stacked channel/covariance for a relayed path vector r_vec."""
    n_d = h_sd_col.shape[0]
    a = math.sqrt(g) / math.sqrt(g + 1.0 / snr)
    c = 1.0 / (g + 1.0 / snr)
    h = np.concatenate([h_sd_col, a * r_vec])
    r_n = np.eye(2 * n_d, dtype=complex)
    r_n[n_d:, n_d:] += c * np.outer(r_vec, r_vec.conj())
    return EquivalentChannel(h=h, r_n=r_n, source_antenna=source_antenna,
                             relay_antenna=relay_antenna)


def equivalent_channel(cfg: SystemConfig, ch: ChannelRealization,
                       i: int, k: int) -> EquivalentChannel:
    """Equivalent channel for source antenna i relaying through antenna k."""
    if not (0 <= i < cfg.n_s) or not (0 <= k < cfg.n_r):
        raise InvalidParameterError(f"antenna indices out of range: i={i}, k={k}")
    g = float(np.sum(np.abs(ch.h_sr[:, i]) ** 2))
    if g == 0:
        raise DegenerateInputError("zero source-relay channel for antenna %d" % i)
    return _assemble(ch.h_sd[:, i], g, ch.h_rd[:, k], cfg.snr, i, k)


def equivalent_channel_with_filter(cfg: SystemConfig, ch: ChannelRealization,
                                   rf: RelayFilter) -> EquivalentChannel:
    """Equivalent channel when the relay applies the rank-one SVD filter.

    The relayed path vector becomes H_RD v, whose squared norm is lambda_rd.
    """
    i = rf.source_antenna
    g = float(np.sum(np.abs(ch.h_sr[:, i]) ** 2))
    if g == 0:
        raise DegenerateInputError("zero source-relay channel for antenna %d" % i)
    return _assemble(ch.h_sd[:, i], g, ch.h_rd @ rf.v, cfg.snr, i, None)


def optimal_relay_filter(ch: ChannelRealization, i_o: int, snr: float) -> RelayFilter:
    """SNR-optimal rank-one relay filter: beamform along the top right
    singular vector of H_RD after matched-filtering the first hop."""
    g = float(np.sum(np.abs(ch.h_sr[:, i_o]) ** 2))
    if g == 0:
        raise DegenerateInputError("zero source-relay channel for antenna %d" % i_o)
    sigma, v = dominant_singular_pair(ch.h_rd)  # raises on zero H_RD
    alpha = relay_gain(g, snr)
    w = alpha * np.outer(v, ch.h_sr[:, i_o].conj())
    return RelayFilter(w_relay=w, v=v, lambda_rd=sigma * sigma, source_antenna=i_o)

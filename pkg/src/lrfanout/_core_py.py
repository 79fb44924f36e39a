"""Numpy fallback for the compiled core.

Same call signatures and semantics as the Cython module ``_core``; pairwise
loops are blocked so peak memory stays bounded for large clusters.
"""
from __future__ import annotations

import numpy as np

COMPILED = False

_BLOCK_ENTRIES = 1 << 24  # pair entries materialized per block


def strength_sums_1d(cluster_x: np.ndarray, target_x: np.ndarray, powtab: np.ndarray) -> np.ndarray:
    """Per-target sum of powtab[|x_t - x_c|] over all cluster coordinates."""
    nc = cluster_x.shape[0]
    nt = target_x.shape[0]
    out = np.empty(nt, dtype=np.float64)
    step = max(1, _BLOCK_ENTRIES // max(nc, 1))
    for lo in range(0, nt, step):
        hi = min(nt, lo + step)
        d = np.abs(target_x[lo:hi, None] - cluster_x[None, :])
        out[lo:hi] = powtab[d].sum(axis=1)
    return out


def strength_sums_nd(cluster: np.ndarray, target: np.ndarray, powtab_sq: np.ndarray) -> np.ndarray:
    """Per-target sum of powtab_sq[squared distance] over all cluster sites."""
    nc = cluster.shape[0]
    nt = target.shape[0]
    out = np.empty(nt, dtype=np.float64)
    step = max(1, _BLOCK_ENTRIES // max(nc, 1))
    for lo in range(0, nt, step):
        hi = min(nt, lo + step)
        d = target[lo:hi, None, :] - cluster[None, :, :]
        sq = np.einsum("tcd,tcd->tc", d, d)
        out[lo:hi] = powtab_sq[sq].sum(axis=1)
    return out


def min_sqdist_nd(points: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Minimum squared distance from each candidate to the point set."""
    npt = points.shape[0]
    nc = candidates.shape[0]
    out = np.empty(nc, dtype=np.int64)
    step = max(1, _BLOCK_ENTRIES // max(npt, 1))
    for lo in range(0, nc, step):
        hi = min(nc, lo + step)
        d = candidates[lo:hi, None, :] - points[None, :, :]
        sq = np.einsum("tcd,tcd->tc", d, d)
        out[lo:hi] = sq.min(axis=1)
    return out


def apply_ctrl_x(
    amps: np.ndarray,
    ctrl_shifts: np.ndarray,
    strengths: np.ndarray,
    target_shift: int,
    duration: float,
    phase_shift: int,
) -> None:
    """In-place exp(-i t sum_i h_i |1><1|_i X_target) on batched amplitudes.

    ``amps`` has shape (2**n, batch); bit positions are shifts from the least
    significant bit.  When ``phase_shift`` >= 0 the diag(1, i) correction is
    applied on that bit afterwards.
    """
    dim = amps.shape[0]
    half = dim >> 1
    g = np.arange(half, dtype=np.int64)
    tk = np.int64(1) << target_shift
    i0 = ((g >> target_shift) << (target_shift + 1)) | (g & (tk - 1))
    i1 = i0 | tk
    theta = np.zeros(half, dtype=np.float64)
    for s, h in zip(ctrl_shifts, strengths):
        theta += h * ((i0 >> s) & 1)
    theta *= duration
    c = np.cos(theta)[:, None]
    ms = (-1j * np.sin(theta))[:, None]
    a0 = amps[i0, :]
    a1 = amps[i1, :]
    amps[i0, :] = c * a0 + ms * a1
    amps[i1, :] = ms * a0 + c * a1
    if phase_shift >= 0:
        idx = np.arange(dim, dtype=np.int64)
        on = ((idx >> phase_shift) & 1).astype(bool)
        amps[on, :] *= 1j

"""Exact and approximate quantum Fourier transform unitaries, the closed
form of the conjugated Z operator on the first qubit, and the
Hadamard-QFT state-transfer unitary.

Bit convention everywhere: qubit 0 is the most significant bit of the
basis index (y = y_1 2^(n-1) + ... + y_n).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import CapacityError, ParameterError
from .simulator import UNITARY_QUBIT_CAP, operator_norm


@dataclass(frozen=True)
class FourierSpec:
    """Qubit count plus approximation band (band == n means exact)."""

    n: int
    band: int

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"need at least one qubit, got n={self.n}")
        if not 1 <= self.band <= self.n:
            raise ParameterError(f"band must lie in 1..{self.n}, got {self.band}")

    @property
    def omega(self) -> complex:
        return cmath.exp(2j * math.pi / (1 << self.n))

    @property
    def exact(self) -> bool:
        return self.band == self.n


def _check_cap(n: int) -> None:
    if n > UNITARY_QUBIT_CAP:
        raise CapacityError(f"{n} qubits exceeds the dense cap {UNITARY_QUBIT_CAP}")


def qft_unitary(n: int) -> np.ndarray:
    """Entry (y, z) = omega^(y z) / sqrt(2^n) with omega = exp(2 pi i / 2^n)."""
    _check_cap(n)
    dim = 1 << n
    idx = np.arange(dim, dtype=np.int64)
    # reduce the exponent mod 2^n before exponentiating to keep full precision
    phases = np.outer(idx, idx) % dim
    return np.exp(2j * math.pi * phases / dim) / math.sqrt(dim)


def _hadamard_rows(u: np.ndarray, n: int, qubit: int) -> None:
    shift = n - 1 - qubit
    dim = u.shape[0]
    half = dim >> 1
    g = np.arange(half, dtype=np.int64)
    tk = np.int64(1) << shift
    i0 = ((g >> shift) << (shift + 1)) | (g & (tk - 1))
    i1 = i0 | tk
    a0 = u[i0, :]
    a1 = u[i1, :]
    inv = 1.0 / math.sqrt(2.0)
    u[i0, :] = (a0 + a1) * inv
    u[i1, :] = (a0 - a1) * inv


def _controlled_phase_rows(u: np.ndarray, n: int, qa: int, qb: int, angle: float) -> None:
    dim = u.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    sa, sb = n - 1 - qa, n - 1 - qb
    on = ((idx >> sa) & 1).astype(bool) & ((idx >> sb) & 1).astype(bool)
    u[on, :] *= cmath.exp(1j * angle)


def _swap_rows(u: np.ndarray, n: int, qa: int, qb: int) -> None:
    dim = u.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    sa, sb = n - 1 - qa, n - 1 - qb
    ba = (idx >> sa) & 1
    bb = (idx >> sb) & 1
    differ = ba != bb
    swapped = idx ^ ((np.int64(1) << sa) | (np.int64(1) << sb))
    perm = np.where(differ, swapped, idx)
    u[:, :] = u[perm, :]


def _qft_circuit(n: int, band: int) -> np.ndarray:
    """Hadamard + controlled-rotation circuit, dropping every rotation of
    angle below 2 pi / 2^band, with the final qubit-reversal swaps."""
    dim = 1 << n
    u = np.eye(dim, dtype=complex)
    for i in range(n):
        _hadamard_rows(u, n, i)
        for m in range(2, n - i + 1):
            if m > band:
                break
            _controlled_phase_rows(u, n, i, i + m - 1, 2.0 * math.pi / (1 << m))
    for i in range(n // 2):
        _swap_rows(u, n, i, n - 1 - i)
    return u


def aqft_unitary(n: int, band: int) -> tuple[np.ndarray, float]:
    """Approximate QFT for the given band and its realized operator-norm
    error against the exact transform."""
    spec = FourierSpec(n, band)
    _check_cap(n)
    u = _qft_circuit(n, spec.band)
    eps = operator_norm(qft_unitary(n) - u)
    return u, eps


def z1prime_element(n: int, z: int, x: int) -> complex:
    """Closed-form entry (z, x) of the QFT-conjugated Z on qubit 1.

    Zero on the diagonal and for even x-z; otherwise
    2^(2-n) / (1 - omega^(x-z)).
    """
    dim = 1 << n
    if not (0 <= z < dim and 0 <= x < dim):
        raise IndexError(f"indices must lie in 0..{dim - 1}")
    delta = x - z
    if delta % 2 == 0:
        return 0.0 + 0.0j
    w = cmath.exp(2j * math.pi * (delta % dim) / dim)
    return (2.0 ** (2 - n)) / (1.0 - w)


def z1prime_matrix(n: int) -> np.ndarray:
    """Dense matrix of z1prime_element values (Hermitian, eigenvalues +-1)."""
    _check_cap(n)
    dim = 1 << n
    z = np.arange(dim, dtype=np.int64)[:, None]
    x = np.arange(dim, dtype=np.int64)[None, :]
    delta = x - z
    w = np.exp(2j * math.pi * (delta % dim) / dim)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = (2.0 ** (2 - n)) / (1.0 - w)
    return np.where(delta % 2 == 1, vals, 0.0)


def state_transfer_unitary(n: int) -> np.ndarray:
    """V = H^(tensor n) . QFT, which moves qubit 1 into slot n against a
    |0...0> background."""
    _check_cap(n)
    u = qft_unitary(n)
    for q in range(n):
        _hadamard_rows(u, n, q)
    return u

"""Pauli-basis operator analysis: decompositions, Frobenius weights, the
distant-region projector, spreading reports for the exact/approximate QFT
and the fanout, and placement-dependent output correlations.

Normalization convention: ||O||_F^2 = Tr(O^dag O) / 2^n, which equals the
Euclidean norm of the Pauli coefficient vector (Parseval).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import CapacityError, ParameterError
from .lattice import _interleaved_order
from .qft import aqft_unitary, qft_unitary
from .simulator import UNITARY_QUBIT_CAP, ideal_fanout

PAULI_ENUM_CAP = 8
COEFF_PRUNE = 1e-14

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_LETTERS = "IXYZ"
# _TRACE_BASIS[p, a, b] = P_p[b, a]: contracting (a, b) of an operator tensor
# with this computes Tr(P_p O) one qubit at a time.
_TRACE_BASIS = np.stack([_PAULI[c].T for c in _LETTERS])
_KRON_BASIS = np.stack([_PAULI[c] for c in _LETTERS])


def _check_square(op: np.ndarray, n: int) -> np.ndarray:
    op = np.asarray(op, dtype=complex)
    dim = 1 << n
    if op.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix, got shape {op.shape}")
    return op


@dataclass(frozen=True)
class PauliDecomposition:
    """Sparse map from Pauli strings (e.g. "ZX") to complex coefficients."""

    n: int
    terms: dict

    def weight(self) -> float:
        return float(math.fsum(abs(c) ** 2 for c in self.terms.values()))

    def restricted_weight(self, sites) -> float:
        """Weight on strings acting nontrivially somewhere in `sites`."""
        sites = list(sites)
        return float(
            math.fsum(
                abs(c) ** 2
                for s, c in self.terms.items()
                if any(s[q] != "I" for q in sites)
            )
        )

    def reconstruct(self) -> np.ndarray:
        coeffs = np.zeros((4,) * self.n, dtype=complex)
        for s, c in self.terms.items():
            coeffs[tuple(_LETTERS.index(ch) for ch in s)] = c
        t = coeffs
        for _ in range(self.n):
            t = np.tensordot(t, _KRON_BASIS, axes=([0], [0]))
        # axes now (a_1, b_1, ..., a_n, b_n); gather rows then columns
        perm = list(range(0, 2 * self.n, 2)) + list(range(1, 2 * self.n, 2))
        return t.transpose(perm).reshape(1 << self.n, 1 << self.n)


def decompose(op: np.ndarray, n: int) -> PauliDecomposition:
    """Full Pauli decomposition, c_P = Tr(P O) / 2^n, via per-qubit
    contraction (4^n coefficients in O(n 4^n) work)."""
    op = _check_square(op, n)
    if n > PAULI_ENUM_CAP:
        raise CapacityError(f"{n} qubits exceeds the enumeration cap {PAULI_ENUM_CAP}")
    t = op.reshape((2,) * (2 * n))
    for k in range(n):
        t = np.tensordot(t, _TRACE_BASIS, axes=([0, n - k], [1, 2]))
    coeffs = t / (1 << n)
    flat = coeffs.reshape(-1)
    terms = {}
    digits = np.arange(1 << (2 * n), dtype=np.int64)
    keep = np.nonzero(np.abs(flat) > COEFF_PRUNE)[0]
    for idx in keep:
        s = ""
        v = int(digits[idx])
        for q in range(n):
            s = _LETTERS[v & 3] + s
            v >>= 2
        terms[s] = complex(flat[idx])
    return PauliDecomposition(n=n, terms=terms)


def frobenius_weight(op: np.ndarray, n: int) -> float:
    """Tr(O^dag O) / 2^n."""
    op = _check_square(op, n)
    return float(np.vdot(op, op).real) / (1 << n)


@dataclass(frozen=True)
class Region:
    """Set of qubit slots at chain distance >= radius from the reference."""

    sites: frozenset
    reference: int = 0
    radius: float = 0.0

    @classmethod
    def from_chain(cls, n: int, radius: float, reference: int = 0) -> "Region":
        sites = frozenset(q for q in range(n) if abs(q - reference) >= radius)
        return cls(sites=sites, reference=reference, radius=radius)

    @classmethod
    def of(cls, sites) -> "Region":
        sites = frozenset(int(q) for q in sites)
        return cls(sites=sites)


def _partial_trace(op: np.ndarray, n: int, qubits) -> np.ndarray:
    t = op.reshape((2,) * (2 * n))
    remaining = n
    for q in sorted(qubits, reverse=True):
        t = np.trace(t, axis1=q, axis2=remaining + q)
        remaining -= 1
    dim = 1 << remaining
    return t.reshape(dim, dim)


def qr_weight(op: np.ndarray, region: Region, n: int, method: str = "auto") -> float:
    """Squared weight of the component acting nontrivially in the region.

    "enumerate" sums |c_P|^2 over qualifying strings of the decomposition;
    "partial-trace" subtracts the weight of the region-trivial component
    Tr_B(O) (x) I_B / 2^|B|.  The two agree to rounding.
    """
    op = _check_square(op, n)
    sites = sorted(int(q) for q in region.sites)
    if not sites:
        raise ParameterError("empty region")
    if any(not 0 <= q < n for q in sites):
        raise ParameterError(f"region sites must lie in 0..{n - 1}")
    if method == "auto":
        method = "partial-trace"
    if method == "enumerate":
        return decompose(op, n).restricted_weight(sites)
    if method != "partial-trace":
        raise ParameterError(f"unknown qr_weight method {method!r}")
    if n > UNITARY_QUBIT_CAP:
        raise CapacityError(f"{n} qubits exceeds the dense cap {UNITARY_QUBIT_CAP}")
    total = frobenius_weight(op, n)
    reduced = _partial_trace(op, n, sites)
    trivial = float(np.vdot(reduced, reduced).real) / (1 << (n + len(sites)))
    return total - trivial


def z_on_first(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    return np.diag(1.0 - 2.0 * ((idx >> (n - 1)) & 1)).astype(complex)


def x_on_first(n: int) -> np.ndarray:
    dim = 1 << n
    idx = np.arange(dim, dtype=np.int64)
    flipped = idx ^ (np.int64(1) << (n - 1))
    u = np.zeros((dim, dim), dtype=complex)
    u[flipped, idx] = 1.0
    return u


@dataclass(frozen=True)
class SpreadReport:
    kind: str  # "qft-exact" | "aqft" | "fanout"
    n: int
    band: int | None
    region_distance: float
    epsilon: float
    weight: float
    bound: float
    passed: bool


def verify_lemma(n: int) -> SpreadReport:
    """Weight of the QFT-conjugated Z_1 on the last qubit; the closed form
    puts all of it there, so the measured weight must be 1."""
    if not 1 <= n <= PAULI_ENUM_CAP:
        raise ParameterError(f"lemma check supports 1..{PAULI_ENUM_CAP} qubits, got {n}")
    u = qft_unitary(n)
    conj = u.conj().T @ z_on_first(n) @ u
    weight = qr_weight(conj, Region.of([n - 1]), n)
    return SpreadReport(
        kind="qft-exact",
        n=n,
        band=None,
        region_distance=float(n - 1),
        epsilon=0.0,
        weight=weight,
        bound=1.0 - 1e-10,
        passed=weight >= 1.0 - 1e-10,
    )


def aqft_spread(n: int, band: int) -> SpreadReport:
    """Spreading witness for the approximate QFT: the conjugated Z_1 keeps
    weight at least 1 - 2 eps on the last qubit, with eps measured."""
    if not 2 <= n <= PAULI_ENUM_CAP:
        raise ParameterError(f"AQFT spreading supports 2..{PAULI_ENUM_CAP} qubits, got {n}")
    approx, eps = aqft_unitary(n, band)
    conj = approx.conj().T @ z_on_first(n) @ approx
    weight = qr_weight(conj, Region.of([n - 1]), n)
    bound = 1.0 - 2.0 * eps - 1e-10
    return SpreadReport(
        kind="aqft",
        n=n,
        band=band,
        region_distance=float(n - 1),
        epsilon=eps,
        weight=weight,
        bound=bound,
        passed=weight >= bound,
    )


def fanout_spread(n: int) -> SpreadReport:
    """Fanout variant: conjugating X_1 through the ideal fanout yields the
    all-X string, so the weight at the last qubit is exactly 1."""
    if not 1 <= n <= PAULI_ENUM_CAP:
        raise ParameterError(f"fanout spreading supports 1..{PAULI_ENUM_CAP} qubits, got {n}")
    f = ideal_fanout(n)
    conj = f.conj().T @ x_on_first(n) @ f
    weight = qr_weight(conj, Region.of([n - 1]), n)
    return SpreadReport(
        kind="fanout",
        n=n,
        band=None,
        region_distance=float(n - 1),
        epsilon=0.0,
        weight=weight,
        bound=1.0 - 1e-12,
        passed=weight >= 1.0 - 1e-12,
    )


def _position_of_logical(n: int, placement: str) -> np.ndarray:
    if placement == "canonical":
        return np.arange(n, dtype=np.int64)
    if placement == "interleaved":
        pos_to_logical = _interleaved_order(n)
        out = np.empty(n, dtype=np.int64)
        out[pos_to_logical] = np.arange(n, dtype=np.int64)
        return out
    raise ParameterError(f"unknown placement {placement!r}")


def placement_correlation(n: int, placement: str, qubit_states=None) -> list[tuple[int, float]]:
    """Connected ZZ correlations of the QFT output, grouped by chain distance.

    The product input is given per logical qubit as (amp0, amp1) pairs
    (|0> for every qubit when omitted); the returned profile holds the
    maximum |<Z_i Z_j> - <Z_i><Z_j>| over position pairs at each distance.
    """
    if n > UNITARY_QUBIT_CAP:
        raise CapacityError(f"{n} qubits exceeds the dense cap {UNITARY_QUBIT_CAP}")
    if qubit_states is None:
        qubit_states = [(1.0, 0.0)] * n
    qubit_states = np.asarray(qubit_states, dtype=complex)
    if qubit_states.shape != (n, 2):
        raise ParameterError(f"need {n} single-qubit states, got shape {qubit_states.shape}")
    psi = np.array([1.0], dtype=complex)
    for pair in qubit_states:
        psi = np.kron(psi, pair / np.linalg.norm(pair))
    out = qft_unitary(n) @ psi
    probs = np.abs(out) ** 2
    idx = np.arange(1 << n, dtype=np.int64)
    signs = np.empty((1 << n, n), dtype=np.float64)
    for q in range(n):
        signs[:, q] = 1.0 - 2.0 * ((idx >> (n - 1 - q)) & 1)
    ez = probs @ signs
    ezz = signs.T @ (probs[:, None] * signs)
    conn = np.abs(ezz - np.outer(ez, ez))
    pos = _position_of_logical(n, placement)
    profile = {}
    for a in range(n):
        for b in range(a + 1, n):
            d = int(abs(pos[a] - pos[b]))
            profile[d] = max(profile.get(d, 0.0), float(conn[a, b]))
    return sorted(profile.items())


def profile_to_csv(profile) -> str:
    """Correlation profile as CSV with 17-significant-digit magnitudes."""
    lines = ["distance,correlation"]
    lines += [f"{int(d)},{c:.17g}" for d, c in profile]
    return "\n".join(lines) + "\n"

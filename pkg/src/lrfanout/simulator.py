"""Exact dense state-vector simulation of pulse schedules.

Amplitude ordering is most-significant-qubit-first: qubit 0 owns the top
bit of the basis index.  Controlled-X pulses evolve the exact exponential
exp(-i t sum_i h_i |1><1|_i X_target); the phase-correction flag applies
diag(1, i) on the designated control afterwards, which turns a completed
pulse into a true CNOT on the correlated subspace the protocols populate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .exceptions import CapacityError
from .schedule import ProtocolSchedule, Pulse

STATE_QUBIT_CAP = 24
UNITARY_QUBIT_CAP = 12

_SQ2 = 1.0 / math.sqrt(2.0)
_LOCAL_GATES = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
    "h": np.array([[1, 1], [1, -1]], dtype=complex) * _SQ2,
}


@dataclass
class StateVector:
    """n qubits, 2**n complex amplitudes, unit norm."""

    n: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.amps.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} amplitudes, got {self.amps.shape}")
        norm = np.linalg.norm(self.amps)
        assert abs(norm - 1.0) < 1e-10, f"state norm drifted to {norm}"

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())


def zero_state(n: int) -> StateVector:
    if n > STATE_QUBIT_CAP:
        raise CapacityError(f"{n} qubits exceeds the state cap {STATE_QUBIT_CAP}")
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    return StateVector(n, amps)


def basis_state(n: int, index: int) -> StateVector:
    if n > STATE_QUBIT_CAP:
        raise CapacityError(f"{n} qubits exceeds the state cap {STATE_QUBIT_CAP}")
    amps = np.zeros(1 << n, dtype=complex)
    amps[index] = 1.0
    return StateVector(n, amps)


def product_state(single_qubit_amps) -> StateVector:
    """Tensor product of per-qubit (a, b) amplitude pairs, qubit 0 first."""
    amps = np.array([1.0], dtype=complex)
    count = 0
    for pair in single_qubit_amps:
        pair = np.asarray(pair, dtype=complex)
        pair = pair / np.linalg.norm(pair)
        amps = np.kron(amps, pair)
        count += 1
    if count > STATE_QUBIT_CAP:
        raise CapacityError(f"{count} qubits exceeds the state cap {STATE_QUBIT_CAP}")
    return StateVector(count, amps)


def _shift(n: int, site: int) -> int:
    if not 0 <= site < n:
        raise IndexError(f"site {site} out of range for {n} qubits")
    return n - 1 - site


def _apply_local_batched(amps: np.ndarray, gate: str, tshift: int) -> None:
    m = _LOCAL_GATES[gate]
    dim = amps.shape[0]
    half = dim >> 1
    g = np.arange(half, dtype=np.int64)
    tk = np.int64(1) << tshift
    i0 = ((g >> tshift) << (tshift + 1)) | (g & (tk - 1))
    i1 = i0 | tk
    a0 = amps[i0, :]
    a1 = amps[i1, :]
    amps[i0, :] = m[0, 0] * a0 + m[0, 1] * a1
    amps[i1, :] = m[1, 0] * a0 + m[1, 1] * a1


def _apply_pulse_batched(amps: np.ndarray, pulse: Pulse, n: int) -> None:
    """In-place pulse application on (2**n, batch) amplitudes."""
    if pulse.kind == "local":
        _apply_local_batched(amps, pulse.gate, _shift(n, pulse.target))
        return
    tshift = _shift(n, pulse.target)
    cshifts = np.asarray([_shift(n, int(s)) for s in pulse.control_sites], dtype=np.int64)
    pshift = _shift(n, pulse.designated_control) if pulse.phase_fix else -1
    kernels.apply_ctrl_x(
        amps,
        cshifts,
        np.ascontiguousarray(pulse.control_strengths),
        tshift,
        pulse.duration,
        pshift,
    )


def apply_pulse(state: StateVector, pulse: Pulse) -> StateVector:
    """Apply one pulse exactly; returns a new state."""
    amps = np.ascontiguousarray(state.amps.reshape(-1, 1).copy())
    _apply_pulse_batched(amps, pulse, state.n)
    return StateVector(state.n, amps.reshape(-1))


def run_schedule(state: StateVector, schedule: ProtocolSchedule) -> StateVector:
    """Apply all layers in order; within a layer pulses commute, so the
    fixed iteration order is just a determinism convention."""
    amps = np.ascontiguousarray(state.amps.reshape(-1, 1).copy())
    for layer in schedule.layers:
        for pulse in layer.pulses:
            _apply_pulse_batched(amps, pulse, state.n)
    return StateVector(state.n, amps.reshape(-1))


def schedule_unitary(schedule: ProtocolSchedule, n: int) -> np.ndarray:
    """Dense unitary of a schedule, built by evolving all basis states."""
    if n > UNITARY_QUBIT_CAP:
        raise CapacityError(f"{n} qubits exceeds the unitary cap {UNITARY_QUBIT_CAP}")
    dim = 1 << n
    u = np.eye(dim, dtype=complex)
    for layer in schedule.layers:
        for pulse in layer.pulses:
            _apply_pulse_batched(u, pulse, n)
    return u


def ideal_fanout(n: int) -> np.ndarray:
    """Permutation unitary flipping qubits 2..n iff qubit 1 is |1>."""
    if n < 1:
        raise ValueError("fanout needs at least one qubit")
    if n > UNITARY_QUBIT_CAP:
        raise CapacityError(f"{n} qubits exceeds the unitary cap {UNITARY_QUBIT_CAP}")
    dim = 1 << n
    idx = np.arange(dim, dtype=np.int64)
    msb = np.int64(1) << (n - 1)
    flip_mask = msb - 1  # all target bits
    out = np.where(idx & msb, idx ^ flip_mask, idx)
    u = np.zeros((dim, dim), dtype=complex)
    u[out, idx] = 1.0
    return u


def state_fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2; equals 1 iff the states match up to global phase."""
    if a.n != b.n:
        raise ValueError(f"qubit count mismatch: {a.n} vs {b.n}")
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)


def operator_norm(a: np.ndarray) -> float:
    """Spectral norm (largest singular value)."""
    return float(np.linalg.svd(a, compute_uv=False)[0])


def phase_aligned_error(u: np.ndarray, ref: np.ndarray) -> float:
    """Operator-norm distance between u and ref after removing the global
    phase that maximizes overlap."""
    tr = np.trace(ref.conj().T @ u)
    phase = tr / abs(tr) if abs(tr) > 0 else 1.0
    return operator_norm(u / phase - ref)


def restrict_to_zero(u: np.ndarray, n_total: int, kept_qubits) -> np.ndarray:
    """Block of u on basis states where all non-kept qubits are |0>.

    Rows/columns are ordered by the kept qubits' bits, preserving their
    given order (most significant first).
    """
    kept = list(kept_qubits)
    m = len(kept)
    shifts = [n_total - 1 - q for q in kept]
    patterns = np.arange(1 << m, dtype=np.int64)
    idx = np.zeros(1 << m, dtype=np.int64)
    for pos, s in enumerate(shifts):
        bit = (patterns >> (m - 1 - pos)) & 1
        idx |= bit << s
    return u[np.ix_(idx, idx)]


def ancilla_zero_probability(state: StateVector, ancilla_qubits) -> float:
    """Probability that every listed qubit measures 0; for pure states this
    is the fidelity of the ancilla reduced state with |0...0>."""
    mask = np.int64(0)
    for q in ancilla_qubits:
        mask |= np.int64(1) << _shift(state.n, int(q))
    idx = np.arange(1 << state.n, dtype=np.int64)
    sel = (idx & mask) == 0
    return float(np.sum(np.abs(state.amps[sel]) ** 2))


def dump_state(state: StateVector, stream) -> None:
    """index, real, imaginary per line, 17 significant digits."""
    for i, a in enumerate(state.amps):
        stream.write(f"{i} {a.real:.17g} {a.imag:.17g}\n")


def dump_matrix(u: np.ndarray, stream) -> None:
    """row, column, real, imaginary per line, 17 significant digits."""
    rows, cols = u.shape
    for i in range(rows):
        for j in range(cols):
            a = u[i, j]
            stream.write(f"{i} {j} {a.real:.17g} {a.imag:.17g}\n")

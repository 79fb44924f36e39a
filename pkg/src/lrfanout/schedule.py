"""Timed Hamiltonian pulses, parallel layers, and makespan accounting.

A controlled-X pulse evolves sum_i h_i |1><1|_i X_target for a fixed
duration; completed pulses satisfy duration * sum(h_i) = pi/2 and carry a
phase-correction flag (diag(1, i) on the first control) so they act as true
CNOTs on the correlated subspace the protocols populate.  Strengths always
saturate the power-law cap h = 1/r**alpha.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import PulseError
from .lattice import LatticeLayout

LOCAL_GATES = ("x", "s", "sdg", "h")
LOCAL_GATE_DURATION = math.pi / 2


def interaction_strengths(sqdists: np.ndarray, alpha: float) -> np.ndarray:
    """Power-law couplings 1/r**alpha from exact squared distances."""
    return np.power(sqdists.astype(np.float64), -alpha / 2.0)


def power_table_1d(max_dist: int, alpha: float) -> np.ndarray:
    """powtab[d] = d**-alpha for d = 0..max_dist (entry 0 is unused)."""
    d = np.arange(max_dist + 1, dtype=np.int64)
    tab = np.empty(max_dist + 1, dtype=np.float64)
    tab[0] = 0.0
    tab[1:] = interaction_strengths(d[1:] * d[1:], alpha)
    return tab


def power_table_sq(max_sqdist: int, alpha: float) -> np.ndarray:
    """powtab[s] = s**(-alpha/2) for squared distances s = 0..max_sqdist."""
    s = np.arange(max_sqdist + 1, dtype=np.int64)
    tab = np.empty(max_sqdist + 1, dtype=np.float64)
    tab[0] = 0.0
    tab[1:] = interaction_strengths(s[1:], alpha)
    return tab


@dataclass(frozen=True, eq=False)
class Pulse:
    """One timed interaction term.

    kind "cx": controls (site, strength) drive an X rotation on the target.
    kind "local": a named single-qubit gate, modeled with duration pi/2.
    """

    kind: str
    control_sites: np.ndarray = field(repr=False)  # int64, sorted ascending
    control_strengths: np.ndarray = field(repr=False)  # float64, same order
    target: int
    duration: float
    phase_fix: bool
    gate: str | None = None

    def __post_init__(self):
        if self.kind not in ("cx", "local"):
            raise PulseError(f"unknown pulse kind {self.kind!r}")
        if self.kind == "cx":
            if self.control_sites.shape[0] == 0:
                raise PulseError("controlled-X pulse needs at least one control")
            if self.target in self.control_sites:
                raise PulseError(f"target {self.target} appears in the control set")
        else:
            if self.gate not in LOCAL_GATES:
                raise PulseError(f"unknown local gate {self.gate!r}")
            if self.control_sites.shape[0] != 0:
                raise PulseError("local gates take no controls")
        if self.duration < 0:
            raise PulseError("pulse duration must be nonnegative")

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(int(s) for s in self.control_sites) + (self.target,)

    @property
    def designated_control(self) -> int:
        """Control carrying the diag(1, i) phase correction (lowest site)."""
        return int(self.control_sites[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pulse):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.target == other.target
            and self.duration == other.duration
            and self.phase_fix == other.phase_fix
            and self.gate == other.gate
            and np.array_equal(self.control_sites, other.control_sites)
            and np.array_equal(self.control_strengths, other.control_strengths)
        )


def multicontrol_pulse(controls, target: int, layout: LatticeLayout, alpha: float) -> Pulse:
    """Completed controlled-X pulse with every coupling at the power-law cap.

    Each control i couples at h_i = 1/r_i**alpha; the duration is
    pi / (2 sum_i h_i) so the collective rotation completes.
    """
    sites = np.asarray(sorted(int(c) for c in controls), dtype=np.int64)
    if sites.shape[0] == 0:
        raise PulseError("empty control set")
    if np.unique(sites).shape[0] != sites.shape[0]:
        raise PulseError("duplicate control sites")
    if target in sites:
        raise PulseError(f"target {target} appears in the control set")
    diff = layout.coords[sites] - layout.coords[target]
    sq = np.einsum("cd,cd->c", diff, diff)
    strengths = interaction_strengths(sq, alpha)
    duration = math.pi / (2.0 * math.fsum(strengths))
    return Pulse(
        kind="cx",
        control_sites=sites,
        control_strengths=strengths,
        target=int(target),
        duration=duration,
        phase_fix=True,
    )


def cnot_pulse(control: int, target: int, layout: LatticeLayout, alpha: float) -> Pulse:
    """Single-control completed pulse: h = 1/r**alpha, duration pi r**alpha / 2."""
    if control == target:
        raise PulseError("control and target must differ")
    return multicontrol_pulse([control], target, layout, alpha)


def local_pulse(gate: str, target: int) -> Pulse:
    """Named single-qubit gate modeled as a duration-pi/2 pulse."""
    return Pulse(
        kind="local",
        control_sites=np.empty(0, dtype=np.int64),
        control_strengths=np.empty(0, dtype=np.float64),
        target=int(target),
        duration=LOCAL_GATE_DURATION,
        phase_fix=False,
        gate=gate,
    )


class ScheduleLayer:
    """Pulses that run concurrently; all pairs must commute.

    Commutation holds when targets are pairwise distinct and no pulse's
    target is another pulse's control (control terms are diagonal and
    commute freely with each other).
    """

    __slots__ = ("pulses", "duration", "local")

    def __init__(self, pulses, local: bool = False):
        pulses = tuple(pulses)
        if not pulses:
            raise PulseError("empty schedule layer")
        targets = [p.target for p in pulses]
        if len(set(targets)) != len(targets):
            raise PulseError("two pulses in one layer share a target")
        target_set = set(targets)
        for p in pulses:
            if p.kind == "cx" and not target_set.isdisjoint(int(s) for s in p.control_sites):
                raise PulseError("a pulse target is another pulse's control in the same layer")
        self.pulses = pulses
        self.duration = max(p.duration for p in pulses)
        self.local = local

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScheduleLayer):
            return NotImplemented
        return self.pulses == other.pulses and self.local == other.local

    def __repr__(self) -> str:
        return f"ScheduleLayer({len(self.pulses)} pulses, duration={self.duration:.6g}, local={self.local})"


class ProtocolSchedule:
    """Ordered layers plus metadata; makespans use exact (fsum) accumulation."""

    __slots__ = ("layers", "metadata")

    def __init__(self, layers, metadata: dict | None = None):
        self.layers = tuple(layers)
        self.metadata = dict(metadata or {})

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    @property
    def makespan(self) -> float:
        return math.fsum(layer.duration for layer in self.layers)

    @property
    def makespan_net(self) -> float:
        """Makespan excluding layers flagged as local bookkeeping steps."""
        return math.fsum(layer.duration for layer in self.layers if not layer.local)

    def concat(self, other: "ProtocolSchedule") -> "ProtocolSchedule":
        return ProtocolSchedule(self.layers + other.layers, self.metadata)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProtocolSchedule):
            return NotImplemented
        return self.layers == other.layers

    def __repr__(self) -> str:
        return f"ProtocolSchedule({self.n_layers} layers, makespan={self.makespan:.6g})"


def makespan(schedule: ProtocolSchedule) -> float:
    """Total wall-clock duration: sum over layers of the longest pulse."""
    return schedule.makespan


@dataclass(frozen=True)
class Violation:
    pulse_index: int
    pair: tuple[int, int]
    strength: float
    cap: float


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]


def validate_powerlaw(
    schedule: ProtocolSchedule,
    layout: LatticeLayout,
    alpha: float,
    rel_tol: float = 1e-12,
) -> ValidationReport:
    """Check every control strength against the 1/r**alpha cap.

    Violations are collected into the report, never raised.
    """
    violations: list[Violation] = []
    index = 0
    for layer in schedule.layers:
        for pulse in layer.pulses:
            if pulse.kind == "cx":
                diff = layout.coords[pulse.control_sites] - layout.coords[pulse.target]
                sq = np.einsum("cd,cd->c", diff, diff)
                caps = interaction_strengths(sq, alpha)
                bad = pulse.control_strengths > caps * (1.0 + rel_tol)
                for k in np.nonzero(bad)[0]:
                    violations.append(
                        Violation(
                            pulse_index=index,
                            pair=(int(pulse.control_sites[k]), pulse.target),
                            strength=float(pulse.control_strengths[k]),
                            cap=float(caps[k]),
                        )
                    )
            index += 1
    return ValidationReport(ok=not violations, violations=tuple(violations))


def serialize_schedule(schedule: ProtocolSchedule) -> str:
    """Line-oriented text: layer_index kind target controls duration phase_flag.

    Controls are comma-joined site:strength pairs ("-" when empty); floats
    carry 17 significant digits so parsing is exact.
    """
    lines = []
    for li, layer in enumerate(schedule.layers):
        for p in layer.pulses:
            if p.kind == "cx":
                ctrl = ",".join(
                    f"{int(s)}:{h:.17g}"
                    for s, h in zip(p.control_sites, p.control_strengths)
                )
                kind = "cx"
            else:
                ctrl = "-"
                kind = p.gate
            lines.append(f"{li} {kind} {p.target} {ctrl} {p.duration:.17g} {int(p.phase_fix)}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_schedule(text: str) -> ProtocolSchedule:
    """Inverse of serialize_schedule.  Layer locality flags are not encoded
    in the text format, so reloaded schedules have local=False throughout."""
    by_layer: dict[int, list[Pulse]] = {}
    for raw in text.splitlines():
        raw = raw.strip()
        if not raw:
            continue
        parts = raw.split()
        if len(parts) != 6:
            raise PulseError(f"malformed schedule line: {raw!r}")
        li, kind, target, ctrl, duration, flag = parts
        if kind == "cx":
            sites = []
            strengths = []
            for item in ctrl.split(","):
                s, h = item.split(":")
                sites.append(int(s))
                strengths.append(float(h))
            pulse = Pulse(
                kind="cx",
                control_sites=np.asarray(sites, dtype=np.int64),
                control_strengths=np.asarray(strengths, dtype=np.float64),
                target=int(target),
                duration=float(duration),
                phase_fix=bool(int(flag)),
            )
        else:
            pulse = Pulse(
                kind="local",
                control_sites=np.empty(0, dtype=np.int64),
                control_strengths=np.empty(0, dtype=np.float64),
                target=int(target),
                duration=float(duration),
                phase_fix=bool(int(flag)),
                gate=kind,
            )
        by_layer.setdefault(int(li), []).append(pulse)
    layers = [ScheduleLayer(by_layer[k]) for k in sorted(by_layer)]
    return ProtocolSchedule(layers)

"""Broadcast and fanout schedule synthesis under power-law couplings.

The broadcast planner grows a correlated cluster from the root in doubling
rounds: the m cluster members collectively drive each of the m nearest
unclaimed sites, so the collective coupling sum sets each round's duration.
Above alpha = D+1 a nearest-neighbour cascade is planned as well and the
faster of the two is kept.

Plans store the claim order and per-round durations as flat arrays, which
keeps million-site planning cheap; dense pulse schedules are materialized on
demand for simulation-scale instances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .bounds import ScalingRegime, broadcast_time_regime
from .exceptions import CapacityError, ParameterError, RootError, TrivialFanoutError
from .lattice import LatticeLayout, QubitAssignment
from .schedule import (
    ProtocolSchedule,
    ScheduleLayer,
    cnot_pulse,
    interaction_strengths,
    multicontrol_pulse,
    power_table_1d,
    power_table_sq,
)

# Participant count above which uniform 1D chains switch to the O(1)-per-
# round window arithmetic instead of the pairwise kernel.
WINDOWED_MIN = 2048
# Pulse control entries allowed in a materialized schedule.
MATERIALIZE_ENTRY_CAP = 2_000_000


class RoundInfo(NamedTuple):
    cluster_size: int
    n_targets: int
    max_target_distance: float
    layer_duration: float


@dataclass(frozen=True)
class BroadcastPlan:
    """Round structure and timing of one broadcast, without dense pulses."""

    layout: LatticeLayout
    alpha: float
    strategy: str  # "doubling" | "cascade"
    method: str  # "direct" | "windowed"
    participants: np.ndarray = field(repr=False)  # sorted site ids
    root_site: int = 0
    claim_order: np.ndarray = field(default=None, repr=False)  # sites, root first
    round_sizes: np.ndarray = field(default=None, repr=False)
    layer_durations: np.ndarray = field(default=None, repr=False)
    max_target_distances: np.ndarray = field(default=None, repr=False)

    @property
    def n_participants(self) -> int:
        return int(self.participants.shape[0])

    @property
    def n_rounds(self) -> int:
        return int(self.round_sizes.shape[0])

    @property
    def makespan(self) -> float:
        return math.fsum(self.layer_durations.tolist())

    def rounds(self) -> list[RoundInfo]:
        out = []
        csize = 1
        for r in range(self.n_rounds):
            out.append(
                RoundInfo(
                    cluster_size=csize,
                    n_targets=int(self.round_sizes[r]),
                    max_target_distance=float(self.max_target_distances[r]),
                    layer_duration=float(self.layer_durations[r]),
                )
            )
            csize += int(self.round_sizes[r])
        return out

    def check_rounds(self) -> list[str]:
        """Structural invariants; returns a list of violations (empty = ok)."""
        problems = []
        if self.claim_order.shape[0] != self.n_participants:
            problems.append("claim order length != participant count")
        if self.claim_order.shape[0] and int(self.claim_order[0]) != self.root_site:
            problems.append("claim order does not start at the root")
        if not np.array_equal(np.sort(self.claim_order), self.participants):
            problems.append("claim order is not a permutation of the participants")
        if int(self.round_sizes.sum()) != self.n_participants - 1:
            problems.append("round sizes do not cover the participants")
        if np.any(self.round_sizes < 1):
            problems.append("empty round")
        csize = 1 + np.concatenate(([0], np.cumsum(self.round_sizes[:-1])))
        if np.any(self.round_sizes > csize):
            problems.append("a round more than doubles the cluster")
        return problems

    def round_summary(self) -> dict:
        return {
            "protocol": "broadcast",
            "strategy": self.strategy,
            "alpha": self.alpha,
            "n": self.n_participants,
            "rounds": [
                {
                    "cluster_size": r.cluster_size,
                    "max_target_distance": r.max_target_distance,
                    "layer_duration": r.layer_duration,
                }
                for r in self.rounds()
            ],
            "makespan_net": self.makespan,
            "makespan_gross": self.makespan,
        }

    def _entry_count(self) -> int:
        csize = 1 + np.concatenate(([0], np.cumsum(self.round_sizes[:-1])))
        if self.strategy == "cascade":
            return int(self.round_sizes.sum())
        return int((csize * self.round_sizes).sum())

    def to_schedule(self) -> ProtocolSchedule:
        """Materialize pulse layers.  Only direct-method plans under the
        control-entry cap can be expanded into dense pulses."""
        if self.method != "direct":
            raise CapacityError(
                "windowed plans are summary-only; re-plan with method='direct' to materialize"
            )
        if self._entry_count() > MATERIALIZE_ENTRY_CAP:
            raise CapacityError(
                f"{self._entry_count()} control entries exceed the materialization cap"
            )
        layers = []
        offset = 1
        for size in self.round_sizes:
            cluster = self.claim_order[:offset]
            targets = self.claim_order[offset : offset + int(size)]
            if self.strategy == "doubling":
                pulses = [multicontrol_pulse(cluster, int(t), self.layout, self.alpha) for t in targets]
            else:
                drivers = _nearest_drivers(self.layout, cluster, targets)
                pulses = [
                    cnot_pulse(int(c), int(t), self.layout, self.alpha)
                    for c, t in zip(drivers, targets)
                ]
            layers.append(ScheduleLayer(pulses))
            offset += int(size)
        return ProtocolSchedule(
            layers,
            metadata={
                "protocol": "broadcast",
                "strategy": self.strategy,
                "alpha": self.alpha,
                "root_site": self.root_site,
            },
        )


def _nearest_drivers(layout: LatticeLayout, cluster: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """For each target, the nearest cluster site (ties to the lowest id)."""
    csorted = np.sort(cluster)
    diff = layout.coords[targets][:, None, :] - layout.coords[csorted][None, :, :]
    sq = np.einsum("tcd,tcd->tc", diff, diff)
    return csorted[np.argmin(sq, axis=1)]


def _uniform_1d_positions(layout: LatticeLayout, sites: np.ndarray):
    """(positions, spacing) when participants form a uniform 1D chain, else None."""
    if layout.dimension != 1:
        return None
    xs = layout.coords[sites, 0]
    if xs.shape[0] < 2:
        return xs, 1
    gaps = np.diff(xs)
    if np.any(gaps != gaps[0]):
        return None
    return xs, int(gaps[0])


def _doubling_direct(layout, sites, root_site, alpha) -> BroadcastPlan:
    k = sites.shape[0]
    coords = layout.coords[sites]
    one_d = layout.dimension == 1
    if one_d:
        xs = coords[:, 0].copy()
        powtab = power_table_1d(int(xs.max() - xs.min()), alpha)
    else:
        powtab = power_table_sq(layout.max_sqdist(), alpha)
    root_pos = int(np.nonzero(sites == root_site)[0][0])
    claimed = np.empty(k, dtype=np.int64)  # positions into `sites`
    claimed[0] = root_pos
    n_claimed = 1
    unclaimed = np.delete(np.arange(k, dtype=np.int64), root_pos)
    sizes, durations, maxdists = [], [], []
    while unclaimed.shape[0]:
        m = n_claimed
        sqd = kernels.min_sqdist_nd(
            np.ascontiguousarray(coords[claimed[:m]]),
            np.ascontiguousarray(coords[unclaimed]),
        )
        take = min(m, unclaimed.shape[0])
        order = np.lexsort((sites[unclaimed], sqd))[:take]
        targets = unclaimed[order]
        if one_d:
            sums = kernels.strength_sums_1d(
                np.ascontiguousarray(xs[claimed[:m]]), np.ascontiguousarray(xs[targets]), powtab
            )
        else:
            sums = kernels.strength_sums_nd(
                np.ascontiguousarray(coords[claimed[:m]]),
                np.ascontiguousarray(coords[targets]),
                powtab,
            )
        durations.append(float(np.max(math.pi / (2.0 * sums))))
        maxdists.append(float(math.sqrt(float(sqd[order].max()))))
        sizes.append(take)
        claimed[n_claimed : n_claimed + take] = targets
        n_claimed += take
        keep = np.ones(unclaimed.shape[0], dtype=bool)
        keep[order] = False
        unclaimed = unclaimed[keep]
    return BroadcastPlan(
        layout=layout,
        alpha=alpha,
        strategy="doubling",
        method="direct",
        participants=np.sort(sites),
        root_site=int(root_site),
        claim_order=sites[claimed],
        round_sizes=np.asarray(sizes, dtype=np.int64),
        layer_durations=np.asarray(durations, dtype=np.float64),
        max_target_distances=np.asarray(maxdists, dtype=np.float64),
    )


def _split_take(take: int, left: int, right: int) -> tuple[int, int]:
    """Nearest-first split of `take` claims between the two 1D frontiers.

    Candidates alternate left/right by distance with ties going left (lower
    site id); a side that runs out hands the remainder to the other.
    """
    both = min(left, right)
    if take <= 2 * both:
        return (take + 1) // 2, take // 2
    if left > right:
        return take - right, right
    return left, take - left


def _interleave(left_sites: np.ndarray, right_sites: np.ndarray) -> np.ndarray:
    t_l, t_r = left_sites.shape[0], right_sites.shape[0]
    out = np.empty(t_l + t_r, dtype=np.int64)
    na = min(t_l, t_r)
    out[0 : 2 * na : 2] = left_sites[:na]
    out[1 : 2 * na : 2] = right_sites[:na]
    out[2 * na :] = left_sites[na:] if t_l > na else right_sites[na:]
    return out


def _doubling_windowed(layout, sites, root_site, alpha) -> BroadcastPlan:
    """Uniform 1D chains: the weakest-coupled target in each round is the
    farthest one, so one contiguous window sum per round fixes the layer
    duration and planning is linear in the chain length."""
    xs_sorted = np.sort(sites)  # 1D row-major: site id == coordinate order
    k = xs_sorted.shape[0]
    xs = layout.coords[xs_sorted, 0]
    spacing = int(xs[1] - xs[0]) if k > 1 else 1
    powseq = np.zeros(k, dtype=np.float64)
    if k > 1:
        steps = np.arange(1, k, dtype=np.int64) * spacing
        powseq[1:] = interaction_strengths(steps * steps, alpha)
    p0 = int(np.nonzero(xs_sorted == root_site)[0][0])
    lo = hi = p0
    claim_chunks = [np.asarray([root_site], dtype=np.int64)]
    sizes, durations, maxdists = [], [], []
    while (hi - lo + 1) < k:
        m = hi - lo + 1
        left, right = lo, k - 1 - hi
        take = min(m, left + right)
        t_l, t_r = _split_take(take, left, right)
        i_max = max(t_l, t_r)
        window = float(powseq[i_max : i_max + m].sum())
        durations.append(math.pi / (2.0 * window))
        maxdists.append(float(i_max * spacing))
        sizes.append(take)
        left_sites = xs_sorted[lo - t_l : lo][::-1]
        right_sites = xs_sorted[hi + 1 : hi + 1 + t_r]
        claim_chunks.append(_interleave(left_sites, right_sites))
        lo -= t_l
        hi += t_r
    return BroadcastPlan(
        layout=layout,
        alpha=alpha,
        strategy="doubling",
        method="windowed",
        participants=xs_sorted,
        root_site=int(root_site),
        claim_order=np.concatenate(claim_chunks),
        round_sizes=np.asarray(sizes, dtype=np.int64),
        layer_durations=np.asarray(durations, dtype=np.float64),
        max_target_distances=np.asarray(maxdists, dtype=np.float64),
    )


def _cascade_windowed(layout, sites, root_site, alpha) -> BroadcastPlan:
    xs_sorted = np.sort(sites)
    k = xs_sorted.shape[0]
    xs = layout.coords[xs_sorted, 0]
    spacing = int(xs[1] - xs[0]) if k > 1 else 1
    step_duration = math.pi / (2.0 * float(interaction_strengths(np.asarray([spacing * spacing]), alpha)[0]))
    p0 = int(np.nonzero(xs_sorted == root_site)[0][0])
    lo = hi = p0
    claim_chunks = [np.asarray([root_site], dtype=np.int64)]
    sizes = []
    while (hi - lo + 1) < k:
        m = hi - lo + 1
        frontier = (1 if lo > 0 else 0) + (1 if hi < k - 1 else 0)
        take = min(m, frontier)
        if take == 2:
            claim_chunks.append(np.asarray([xs_sorted[lo - 1], xs_sorted[hi + 1]], dtype=np.int64))
            lo -= 1
            hi += 1
        elif lo > 0:  # single claim, ties go to the lower site id
            claim_chunks.append(xs_sorted[lo - 1 : lo])
            lo -= 1
        else:
            claim_chunks.append(xs_sorted[hi + 1 : hi + 2])
            hi += 1
        sizes.append(take)
    n_rounds = len(sizes)
    return BroadcastPlan(
        layout=layout,
        alpha=alpha,
        strategy="cascade",
        method="windowed",
        participants=xs_sorted,
        root_site=int(root_site),
        claim_order=np.concatenate(claim_chunks),
        round_sizes=np.asarray(sizes, dtype=np.int64),
        layer_durations=np.full(n_rounds, step_duration, dtype=np.float64),
        max_target_distances=np.full(n_rounds, float(spacing), dtype=np.float64),
    )


def _cascade_direct(layout, sites, root_site, alpha) -> BroadcastPlan:
    k = sites.shape[0]
    coords = layout.coords[sites]
    root_pos = int(np.nonzero(sites == root_site)[0][0])
    claimed = np.empty(k, dtype=np.int64)
    claimed[0] = root_pos
    n_claimed = 1
    unclaimed = np.delete(np.arange(k, dtype=np.int64), root_pos)
    sizes, durations, maxdists = [], [], []
    while unclaimed.shape[0]:
        m = n_claimed
        sqd = kernels.min_sqdist_nd(
            np.ascontiguousarray(coords[claimed[:m]]),
            np.ascontiguousarray(coords[unclaimed]),
        )
        dmin = int(sqd.min())
        frontier = np.nonzero(sqd == dmin)[0]
        frontier = frontier[np.argsort(sites[unclaimed[frontier]])]
        take = min(m, frontier.shape[0])
        chosen = frontier[:take]
        strength = float(interaction_strengths(np.asarray([dmin]), alpha)[0])
        durations.append(math.pi / (2.0 * strength))
        maxdists.append(math.sqrt(dmin))
        sizes.append(take)
        claimed[n_claimed : n_claimed + take] = unclaimed[chosen]
        n_claimed += take
        keep = np.ones(unclaimed.shape[0], dtype=bool)
        keep[chosen] = False
        unclaimed = unclaimed[keep]
    return BroadcastPlan(
        layout=layout,
        alpha=alpha,
        strategy="cascade",
        method="direct",
        participants=np.sort(sites),
        root_site=int(root_site),
        claim_order=sites[claimed],
        round_sizes=np.asarray(sizes, dtype=np.int64),
        layer_durations=np.asarray(durations, dtype=np.float64),
        max_target_distances=np.asarray(maxdists, dtype=np.float64),
    )


def _pick_method(layout, sites, method: str) -> str:
    if method not in ("auto", "direct", "windowed"):
        raise ParameterError(f"unknown planning method {method!r}")
    uniform = _uniform_1d_positions(layout, np.sort(sites))
    if method == "windowed":
        if uniform is None:
            raise ParameterError("windowed planning needs a uniformly spaced 1D chain")
        return "windowed"
    if method == "direct":
        return "direct"
    return "windowed" if (uniform is not None and sites.shape[0] > WINDOWED_MIN) else "direct"


def broadcast_over_sites(
    layout: LatticeLayout,
    sites,
    root_site: int,
    alpha: float,
    method: str = "auto",
) -> BroadcastPlan:
    """Plan a broadcast over an explicit participant site set.

    Emits the doubling plan; above alpha = D+1 a nearest-neighbour cascade
    is also planned and the smaller makespan wins (doubling on ties).
    """
    sites = np.asarray(sorted(int(s) for s in sites), dtype=np.int64)
    if np.unique(sites).shape[0] != sites.shape[0]:
        raise ParameterError("duplicate participant sites")
    if alpha < 0:
        raise ParameterError(f"alpha must be nonnegative, got {alpha}")
    if root_site not in sites:
        raise RootError(f"root site {root_site} is not a participant")
    use = _pick_method(layout, sites, method)
    if use == "windowed":
        plan = _doubling_windowed(layout, sites, root_site, alpha)
    else:
        plan = _doubling_direct(layout, sites, root_site, alpha)
    if alpha > layout.dimension + 1 and sites.shape[0] > 1:
        if use == "windowed":
            cascade = _cascade_windowed(layout, sites, root_site, alpha)
        else:
            cascade = _cascade_direct(layout, sites, root_site, alpha)
        if cascade.makespan < plan.makespan:
            plan = cascade
    return plan


def plan_broadcast(
    assignment: QubitAssignment,
    alpha: float,
    root: int = 0,
    method: str = "auto",
) -> BroadcastPlan:
    """Plan the broadcast over the assignment's data qubits, rooted at the
    given logical qubit (0-based)."""
    if not 0 <= root < assignment.n:
        raise RootError(f"root qubit {root} outside 0..{assignment.n - 1}")
    return broadcast_over_sites(
        assignment.layout,
        assignment.data_sites,
        assignment.data_site(root),
        alpha,
        method=method,
    )


@dataclass(frozen=True)
class FanoutPlan:
    """Fanout structure: local CNOT, broadcast over ancillae, parallel local
    CNOT transfer, reversed broadcast, local CNOT."""

    assignment: QubitAssignment
    alpha: float
    broadcast: BroadcastPlan

    @property
    def n(self) -> int:
        return self.assignment.n

    @property
    def layer_count(self) -> int:
        return 3 + 2 * self.broadcast.n_rounds

    @property
    def makespan_net(self) -> float:
        durations = self.broadcast.layer_durations.tolist()
        return math.fsum(durations + durations)

    @property
    def makespan_gross(self) -> float:
        durations = self.broadcast.layer_durations.tolist()
        local = 3 * [math.pi / 2]
        return math.fsum(durations + durations + local)

    def round_summary(self) -> dict:
        summary = self.broadcast.round_summary()
        summary["protocol"] = "fanout"
        summary["n"] = self.n
        summary["makespan_net"] = self.makespan_net
        summary["makespan_gross"] = self.makespan_gross
        return summary

    def to_schedule(self) -> ProtocolSchedule:
        asgn = self.assignment
        layout = asgn.layout
        forward = self.broadcast.to_schedule()
        d1, a1 = asgn.data_site(0), asgn.ancilla_site(0)
        transfer = ScheduleLayer(
            [
                cnot_pulse(asgn.ancilla_site(i), asgn.data_site(i), layout, self.alpha)
                for i in range(1, self.n)
            ],
            local=True,
        )
        head = ScheduleLayer([cnot_pulse(d1, a1, layout, self.alpha)], local=True)
        tail = ScheduleLayer([cnot_pulse(d1, a1, layout, self.alpha)], local=True)
        layers = (
            [head]
            + list(forward.layers)
            + [transfer]
            + list(reversed(forward.layers))
            + [tail]
        )
        return ProtocolSchedule(
            layers,
            metadata={
                "protocol": "fanout",
                "alpha": self.alpha,
                "n": self.n,
                "strategy": self.broadcast.strategy,
            },
        )


def plan_fanout(assignment: QubitAssignment, alpha: float, method: str = "auto") -> FanoutPlan:
    """Plan the ancilla-mediated fanout for an assignment with adjacent
    ancillae.  Net makespan equals exactly twice the broadcast makespan."""
    if not assignment.has_ancillas:
        raise ParameterError("fanout needs an assignment with ancillae")
    if assignment.n < 2:
        raise TrivialFanoutError(f"fanout needs at least 2 data qubits, got {assignment.n}")
    broadcast = broadcast_over_sites(
        assignment.layout,
        assignment.ancilla_sites,
        assignment.ancilla_site(0),
        alpha,
        method=method,
    )
    return FanoutPlan(assignment=assignment, alpha=alpha, broadcast=broadcast)


def reverse_schedule(schedule: ProtocolSchedule) -> ProtocolSchedule:
    """Layers in reverse order with pulses unchanged.

    A completed pulse is its own inverse on the correlated subspace the
    protocols populate; the phase correction commutes with the pulse
    exponential, so its mirrored placement needs no structural change.
    """
    return ProtocolSchedule(tuple(reversed(schedule.layers)), dict(schedule.metadata))


def t_ghz_regime(alpha, dimension: int) -> ScalingRegime:
    """Scaling regime of the broadcast makespan in n for (alpha, D)."""
    return broadcast_time_regime(alpha, dimension)

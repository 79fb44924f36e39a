"""Command-line experiment runner.

Subcommands: ``fanout`` (plan, optionally simulate and verify), ``verify-lemma``
(operator-spreading reports), ``scaling`` (broadcast-makespan sweeps against
the closed-form regimes), ``correlations`` (QFT output correlations by chain
distance).  Config files are INI-style key/value sections; flags override
file values.  Exit codes: 0 pass, 1 scientific failure, 2 usage/configuration
error.

All floats in emitted CSV/JSON carry 17 significant digits, and fixed seeds
give byte-identical artifacts.
"""
from __future__ import annotations

import argparse
import configparser
import json
import sys
from pathlib import Path

import numpy as np

from . import bounds, protocols, simulator, spreading
from .exceptions import CapacityError, TrivialFanoutError
from .lattice import assign_qubits, build_lattice
from .schedule import parse_schedule, serialize_schedule, validate_powerlaw

FIDELITY_GATE = 1.0 - 1e-10
SIM_DATA_QUBIT_CAP = 6
LEMMA_RANGE = (2, 8)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _json_text(obj, indent: int = 0) -> str:
    """Deterministic JSON with 17-significant-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {_json_text(v, indent + 1)}"
            for k, v in sorted(obj.items())
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{_json_text(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj)
    return json.dumps(str(obj))


def _write_json(path: Path, obj) -> None:
    path.write_text(_json_text(obj) + "\n")


def _parse_int_list(text: str) -> list[int]:
    return [int(v) for v in text.replace(" ", "").split(",") if v]


def grid_extents(n: int, dimension: int) -> tuple[int, ...]:
    """Near-cubic integer factorization of n into `dimension` extents."""
    if dimension == 1:
        return (n,)
    exts = []
    rem = n
    for k in range(dimension, 1, -1):
        ideal = rem ** (1.0 / k)
        best = 1
        for cand in range(1, rem + 1):
            if rem % cand == 0 and abs(cand - ideal) < abs(best - ideal):
                best = cand
        exts.append(best)
        rem //= best
    exts.append(rem)
    return tuple(sorted(exts, reverse=True))


class Config:
    """Merged view of the INI file and the command-line overrides."""

    def __init__(self, args: argparse.Namespace):
        ini = configparser.ConfigParser()
        if args.config:
            read = ini.read(args.config)
            if not read:
                raise ValueError(f"cannot read config file {args.config}")
        self._ini = ini
        self._args = args

    def _get(self, section: str, key: str, flag_value, cast):
        if flag_value is not None:
            return flag_value
        if self._ini.has_option(section, key):
            return cast(self._ini.get(section, key))
        return None

    @property
    def alpha(self) -> float:
        v = self._get("protocol", "alpha", self._args.alpha, float)
        return 1.0 if v is None else v

    @property
    def dimension(self) -> int:
        v = self._get("lattice", "dimension", self._args.dimension, int)
        return 1 if v is None else v

    @property
    def n(self) -> int:
        v = self._get("protocol", "n", self._args.n, int)
        return 4 if v is None else v

    @property
    def root(self) -> int:
        v = self._get("protocol", "root", self._args.root, int)
        root = 1 if v is None else v
        if root < 1:
            raise ValueError(f"root is 1-based, got {root}")
        return root - 1

    @property
    def extents(self) -> tuple[int, ...] | None:
        v = self._get("lattice", "extents", getattr(self._args, "extents", None), str)
        return tuple(_parse_int_list(v)) if v else None

    @property
    def placement(self) -> str:
        v = self._get("lattice", "placement", getattr(self._args, "placement", None), str)
        return v or "canonical"

    @property
    def bands(self) -> list[int] | None:
        v = getattr(self._args, "band", None)
        if v is not None:
            return [v]
        if self._ini.has_option("analysis", "bands"):
            return _parse_int_list(self._ini.get("analysis", "bands"))
        return None

    @property
    def samples(self) -> list[int] | None:
        v = self._get("analysis", "samples", getattr(self._args, "samples", None), str)
        return _parse_int_list(v) if v else None

    @property
    def input_kind(self) -> str:
        v = self._get("analysis", "input", getattr(self._args, "input", None), str)
        return v or "random"

    @property
    def seed(self) -> int:
        v = self._get("run", "seed", self._args.seed, int)
        return 0 if v is None else v

    @property
    def out(self) -> Path:
        v = self._get("run", "out", self._args.out, str)
        path = Path(v) if v else Path(".")
        path.mkdir(parents=True, exist_ok=True)
        return path


def _fanout_assignment(cfg: Config):
    if cfg.extents is not None:
        extents = cfg.extents
    elif cfg.dimension == 1:
        extents = (2 * cfg.n,)
    else:
        data = grid_extents(cfg.n, cfg.dimension)
        extents = (2 * data[0],) + data[1:]
    layout = build_lattice(cfg.dimension, extents)
    return assign_qubits(layout, cfg.n, strategy="canonical", ancillas=True)


def cmd_fanout(cfg: Config, schedule_only: bool) -> int:
    n = cfg.n
    if n < 2:
        raise TrivialFanoutError(f"fanout needs n >= 2 data qubits, got {n}")
    if not schedule_only and n > SIM_DATA_QUBIT_CAP:
        raise CapacityError(
            f"simulation verification is capped at {SIM_DATA_QUBIT_CAP} data qubits; "
            f"pass --schedule-only for n={n}"
        )
    assignment = _fanout_assignment(cfg)
    plan = protocols.plan_fanout(assignment, cfg.alpha)
    out = cfg.out
    _write_json(out / "fanout_rounds.json", plan.round_summary())
    result = {
        "alpha": cfg.alpha,
        "dimension": cfg.dimension,
        "n": n,
        "layers": plan.layer_count,
        "makespan_net": plan.makespan_net,
        "makespan_gross": plan.makespan_gross,
        "fanout_fidelity": None,
        "ancilla_return_fidelity": None,
    }
    if schedule_only:
        _write_json(out / "fanout_verification.json", result)
        return 0

    sched = plan.to_schedule()
    text = serialize_schedule(sched)
    (out / "fanout_schedule.txt").write_text(text)
    report = validate_powerlaw(parse_schedule(text), assignment.layout, cfg.alpha)
    if not report.ok:
        print(f"power-law validation failed with {len(report.violations)} violations", file=sys.stderr)
        return 1

    total_qubits = assignment.layout.n_sites
    u = simulator.schedule_unitary(sched, total_qubits)
    data_qubits = [int(s) for s in assignment.data_sites]
    restricted = simulator.restrict_to_zero(u, total_qubits, data_qubits)
    ideal = simulator.ideal_fanout(n)
    overlap = abs(np.trace(ideal.conj().T @ restricted)) / (1 << n)
    result["fanout_fidelity"] = float(overlap)

    rng = np.random.default_rng(cfg.seed)
    worst = 1.0
    role = {int(s): k for k, s in enumerate(assignment.data_sites)}
    for _ in range(20):
        pairs = []
        for site in range(total_qubits):
            if site in role:
                amp = rng.normal(size=2) + 1j * rng.normal(size=2)
            else:
                amp = np.array([1.0, 0.0])
            pairs.append(amp)
        state = simulator.product_state(pairs)
        evolved = simulator.run_schedule(state, sched)
        prob = simulator.ancilla_zero_probability(evolved, assignment.ancilla_sites)
        worst = min(worst, prob)
    result["ancilla_return_fidelity"] = float(worst)
    _write_json(out / "fanout_verification.json", result)
    ok = result["fanout_fidelity"] >= FIDELITY_GATE and result["ancilla_return_fidelity"] >= FIDELITY_GATE
    status = "PASS" if ok else "FAIL"
    print(
        f"fanout n={n} alpha={cfg.alpha}: fidelity={result['fanout_fidelity']:.12f} "
        f"ancilla={result['ancilla_return_fidelity']:.12f} [{status}]"
    )
    return 0 if ok else 1


def cmd_verify_lemma(cfg: Config) -> int:
    n = cfg.n
    lo, hi = LEMMA_RANGE
    if not lo <= n <= hi:
        raise CapacityError(f"verify-lemma supports n in {lo}..{hi}, got {n}")
    bands = cfg.bands or list(range(1, n + 1))
    reports = [spreading.verify_lemma(n)]
    reports += [spreading.aqft_spread(n, k) for k in bands]
    reports.append(spreading.fanout_spread(n))
    payload = []
    for rep in reports:
        payload.append(
            {
                "kind": rep.kind,
                "n": rep.n,
                "band": rep.band,
                "region_r": rep.region_distance,
                "weight": rep.weight,
                "epsilon": rep.epsilon,
                "bound": rep.bound,
                "pass": rep.passed,
            }
        )
    _write_json(cfg.out / "spreading_reports.json", payload)
    ok = all(rep.passed for rep in reports)
    for rep in reports:
        label = rep.kind if rep.band is None else f"{rep.kind} band={rep.band}"
        print(
            f"spreading n={rep.n} {label}: weight={rep.weight:.12f} "
            f"bound={rep.bound:.12f} [{'PASS' if rep.passed else 'FAIL'}]"
        )
    return 0 if ok else 1


def cmd_scaling(cfg: Config) -> int:
    samples = cfg.samples
    if not samples:
        raise ValueError("scaling needs a nonempty sample list (--samples or [analysis] samples)")
    alpha, dim = cfg.alpha, cfg.dimension
    regime = protocols.t_ghz_regime(alpha, dim)
    rows = []
    measured = []
    for n in samples:
        layout = build_lattice(dim, grid_extents(n, dim))
        assignment = assign_qubits(layout, n, strategy=cfg.placement)
        plan = protocols.plan_broadcast(assignment, alpha, root=cfg.root)
        measured.append((n, plan.makespan))
    fit = bounds.fit_scaling(measured, regime.kind)
    match = fit.matches(regime)
    for n, t in measured:
        rows.append(
            ",".join(
                [
                    _fmt(alpha),
                    str(dim),
                    str(n),
                    _fmt(t),
                    _fmt(t),
                    regime.describe(),
                    _fmt(fit.statistic),
                    _fmt(fit.residual),
                ]
            )
        )
    header = "alpha,D,n,makespan_net,makespan_gross,regime,fit_exponent,residual"
    (cfg.out / "scaling.csv").write_text(header + "\n" + "\n".join(rows) + "\n")
    verdict = {
        "alpha": alpha,
        "dimension": dim,
        "expected_regime": regime.describe(),
        "fit_model": fit.model,
        "fit_statistic": fit.statistic,
        "fit_residual": fit.residual,
        "n_used": list(fit.n_used),
        "match": match,
        "lower_bounds": _lower_bound_annotations(alpha, dim),
    }
    _write_json(cfg.out / "scaling_verdict.json", verdict)
    print(
        f"scaling alpha={alpha} D={dim}: expected {regime.describe()}, "
        f"fit statistic={fit.statistic:.6g} residual={fit.residual:.6g} "
        f"[{'PASS' if match else 'FAIL'}]"
    )
    return 0 if match else 1


def cmd_correlations(cfg: Config) -> int:
    n = cfg.n
    kind = cfg.input_kind
    if kind == "zero":
        states = [(1.0, 0.0)] * n
    elif kind == "plus":
        states = [(1.0, 1.0)] * n
    elif kind == "random":
        rng = np.random.default_rng(cfg.seed)
        states = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
    else:
        raise ValueError(f"unknown input kind {kind!r}")
    profile = spreading.placement_correlation(n, cfg.placement, states)
    (cfg.out / "correlations.csv").write_text(spreading.profile_to_csv(profile))
    try:
        rate, resid = bounds.exp_decay_fit(profile)
    except ValueError:
        rate, resid = None, None
    _write_json(
        cfg.out / "correlations_fit.json",
        {
            "n": n,
            "placement": cfg.placement,
            "input": kind,
            "seed": cfg.seed,
            "decay_rate": rate,
            "log_residual": resid,
        },
    )
    shown = rate if rate is not None else float("nan")
    print(f"correlations n={n} placement={cfg.placement}: decay rate {shown:.6g}")
    return 0


def _lower_bound_annotations(alpha: float, dim: int) -> dict:
    """Light-cone formula evaluations for the same (alpha, D); annotation only."""
    out: dict = {}
    try:
        lr = bounds.lr_lower_bound(alpha, dim)
        out["lieb_robinson"] = lr.describe()
    except ValueError:
        out["lieb_robinson"] = None
    if dim == 1:
        try:
            fr = bounds.frob_lower_bound_1d(alpha)
            out["frobenius"] = fr.describe()
        except ValueError:
            out["frobenius"] = None
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lrfanout",
        description="Plan, simulate, and verify long-range fanout/QFT protocols.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="INI config file")
        p.add_argument("--alpha", type=float, help="power-law exponent")
        p.add_argument("--dimension", type=int, help="lattice dimension (1-3)")
        p.add_argument("--n", type=int, help="logical qubit count")
        p.add_argument("--root", type=int, help="broadcast root qubit (1-based)")
        p.add_argument("--seed", type=int, help="random seed")
        p.add_argument("--out", help="output directory")

    p_fan = sub.add_parser("fanout", help="plan and verify the fanout protocol")
    common(p_fan)
    p_fan.add_argument("--extents", help="comma-separated lattice extents")
    p_fan.add_argument(
        "--schedule-only",
        action="store_true",
        help="skip simulation; report makespans only",
    )

    p_lem = sub.add_parser("verify-lemma", help="operator-spreading reports")
    common(p_lem)
    p_lem.add_argument("--band", type=int, help="single AQFT band (default: all)")

    p_sca = sub.add_parser("scaling", help="broadcast makespan sweeps vs regimes")
    common(p_sca)
    p_sca.add_argument("--samples", help="comma-separated n values to sweep")
    p_sca.add_argument("--placement", help="canonical or interleaved")

    p_cor = sub.add_parser(
        "correlations", help="QFT output correlations vs chain distance"
    )
    common(p_cor)
    p_cor.add_argument("--placement", help="canonical or interleaved")
    p_cor.add_argument("--input", choices=["zero", "plus", "random"], help="product input")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = Config(args)
        if args.command == "fanout":
            return cmd_fanout(cfg, schedule_only=args.schedule_only)
        if args.command == "verify-lemma":
            return cmd_verify_lemma(cfg)
        if args.command == "scaling":
            return cmd_scaling(cfg)
        if args.command == "correlations":
            return cmd_correlations(cfg)
        parser.error(f"unknown command {args.command}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())

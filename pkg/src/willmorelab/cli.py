"""Command-line front end.

Every subcommand prints one JSON document to stdout (or a CSV table
with --format csv) and exits 0 when all requested checks pass, 1 when a
mathematical assertion fails (a residual that should vanish does not,
an inequality is violated), and 2 on usage errors such as unknown
example ids. Commands that produce tables (energy convergence, surface
residual grids, optimizer profiles, property-suite summaries) also
write them as CSV to --out when given.

Randomized suites derive one child stream per trial from (seed, trial
index), so identical seeds give byte-identical output regardless of how
trials might be scheduled.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .catalog import UnknownExampleError, catalog_ids, resolve
from .grids import QuadratureGrid
from .immersion import mobius_apply, random_mobius
from .linalg import SymmetricMatrix
from .optimize import (
    TorusFamily,
    family_energy,
    family_profile,
    find_critical_radius,
    second_difference,
)
from .tensors import (
    SymTensor3,
    canonical_pair,
    check_chern_inequality,
    check_li_inequality,
    equality_witness,
    f_tensor_decompose,
    random_symmetric,
    random_trace_free_family,
    trial_rng,
)
from .willmore import (
    el_residual_isoparametric,
    el_residual_surface,
    pinching_integral,
    pinching_threshold,
    willmore_energy,
)

__all__ = ["main", "build_parser", "RunConfig"]

_SLACK_FLOOR = -1e-10
_WITNESS_TOL = 1e-10

_DEFAULT_TOLERANCE = {
    "energy": 1e-6,
    "el-check": 1e-10,
    "pinch": 1e-8,
    "conformal-test": 1e-3,
    "optimize": 1e-8,
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Validated knob set shared by the subcommands."""

    command: str
    example_id: Optional[str]
    resolution: int
    fd_step: float
    seed: int
    trials: int
    tolerance: float
    output_format: str

    def __post_init__(self) -> None:
        if self.resolution < 8:
            raise UsageError("resolution must be at least 8")
        if not 1e-7 <= self.fd_step <= 1e-2:
            raise UsageError("fd-step must lie in [1e-7, 1e-2]")
        if self.trials < 1:
            raise UsageError("trials must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must fit in 64 unsigned bits")
        if self.tolerance <= 0.0:
            raise UsageError("tolerance must be positive")
        if self.output_format not in ("json", "csv"):
            raise UsageError("format must be json or csv")


def _config_from(args: argparse.Namespace) -> RunConfig:
    tolerance = getattr(args, "tolerance", None)
    if tolerance is None:
        tolerance = _DEFAULT_TOLERANCE.get(args.command, 1e-8)
    return RunConfig(
        command=args.command,
        example_id=getattr(args, "example_id", None),
        resolution=getattr(args, "resolution", 64),
        fd_step=getattr(args, "fd_step", 1e-4),
        seed=getattr(args, "seed", 0),
        trials=getattr(args, "trials", 1000),
        tolerance=float(tolerance),
        output_format=args.format,
    )


def _emit(args: argparse.Namespace, payload: dict, rows: list[list]) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(_csv_text(rows), end="")
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(_csv_text(rows))


def _csv_text(rows: list[list]) -> str:
    lines = []
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _grid_for(patch, resolution: int) -> QuadratureGrid:
    return QuadratureGrid.for_patch(patch, resolution)


def _fail(message: str) -> int:
    print(f"assertion failed: {message}", file=sys.stderr)
    return 1


def _cmd_catalog(args: argparse.Namespace) -> int:
    ids = catalog_ids()
    payload = {"command": "catalog", "ids": ids}
    rows = [["id"]] + [[i] for i in ids]
    _emit(args, payload, rows)
    return 0


def _parse_point(text: str, expected: int) -> np.ndarray:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse point {text!r}") from exc
    if len(values) != expected:
        raise UsageError(f"point needs {expected} coordinates, got {len(values)}")
    return np.array(values)


def _cmd_shape(args: argparse.Namespace) -> int:
    config = _config_from(args)
    entry = resolve(config.example_id)
    patch = entry.patch
    if args.point is None:
        point = patch.safe_center()
    else:
        point = _parse_point(args.point, patch.n)
    sd = patch.exact_shape(point, step=config.fd_step)
    payload = {"id": entry.example_id, "point": [float(v) for v in point]}
    payload.update(sd.to_json_dict())
    rows = [["key", "value"]]
    rows.append(["n", sd.n])
    rows.append(["p", sd.p])
    rows.append(["H", sd.mean_norm])
    rows.append(["S", sd.S])
    rows.append(["rho_sq", sd.rho_sq])
    for a in range(sd.p):
        mat = sd.second_fundamental.matrices[a].data
        for i in range(sd.n):
            for j in range(sd.n):
                rows.append([f"h[{a}][{i}][{j}]", float(mat[i, j])])
    _emit(args, payload, rows)
    return 0


def _energy_resolutions(top: int) -> list[int]:
    levels = sorted({max(8, top // 4), max(8, top // 2), top})
    return levels


def _cmd_energy(args: argparse.Namespace) -> int:
    config = _config_from(args)
    entry = resolve(config.example_id)
    patch = entry.patch
    table = []
    for res in _energy_resolutions(config.resolution):
        grid = _grid_for(patch, res)
        table.append((res, willmore_energy(patch, grid, fd_step=config.fd_step)))
    value = table[-1][1]
    payload = {
        "id": entry.example_id,
        "grid": [config.resolution] * patch.n,
        "value": value,
        "mode": "energy",
        "convergence": [{"resolution": r, "value": v} for r, v in table],
    }
    rows = [["resolution", "value"]] + [[r, v] for r, v in table]
    _emit(args, payload, rows)
    if args.check and len(table) >= 2:
        drift = abs(table[-1][1] - table[-2][1])
        scale = max(1.0, abs(value))
        if drift > config.tolerance * scale:
            return _fail(
                f"energy drift {drift:.3e} between the two finest grids exceeds "
                f"{config.tolerance:.1e} x {scale:.6g}"
            )
    return 0


def _cmd_el_check(args: argparse.Namespace) -> int:
    config = _config_from(args)
    entry = resolve(config.example_id)
    if args.surface:
        grid = _grid_for(entry.patch, config.resolution)
        res = el_residual_surface(entry.patch, grid, fd_step=config.fd_step)
        flat_ok = res.max_norm <= config.tolerance
        payload = {
            "id": entry.example_id,
            "mode": "surface",
            "grid": list(grid.counts),
            "max_residual": res.max_norm,
            "willmore": bool(flat_ok),
        }
        rows = [["i", "j", "residual"]]
        for i in range(res.values.shape[0]):
            for j in range(res.values.shape[1]):
                rows.append([i, j, float(res.values[i, j])])
        _emit(args, payload, rows)
        if args.check and not flat_ok:
            return _fail(
                f"surface residual {res.max_norm:.3e} exceeds {config.tolerance:.1e}"
            )
        return 0
    residual = el_residual_isoparametric(entry.spec)
    is_willmore = residual.norm <= config.tolerance
    payload = {
        "id": entry.example_id,
        "mode": "isoparametric",
        "values": [float(v) for v in residual.values],
        "norm": residual.norm,
        "scale": residual.scale,
        "willmore": bool(is_willmore),
    }
    rows = [["alpha", "residual"]] + [
        [a, float(v)] for a, v in enumerate(residual.values)
    ]
    rows.append(["norm", residual.norm])
    _emit(args, payload, rows)
    if args.check and not is_willmore:
        return _fail(f"residual norm {residual.norm:.3e} exceeds {config.tolerance:.1e}")
    return 0


def _cmd_pinch(args: argparse.Namespace) -> int:
    config = _config_from(args)
    entry = resolve(config.example_id)
    patch = entry.patch
    grid = _grid_for(patch, config.resolution)
    value = pinching_integral(patch, grid, mode=args.mode, fd_step=config.fd_step)
    payload = {
        "id": entry.example_id,
        "grid": list(grid.counts),
        "value": value,
        "mode": args.mode,
        "threshold": pinching_threshold(patch.n, patch.p, args.mode),
    }
    rows = [["key", "value"], ["value", value], ["mode", args.mode]]
    _emit(args, payload, rows)
    if args.check and value > config.tolerance:
        return _fail(
            f"pinching integral {value:.3e} is positive beyond {config.tolerance:.1e}"
        )
    return 0


def _suite_commutator(trials: int, seed: int) -> dict:
    worst = np.inf
    violations = 0
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        n = int(rng.integers(2, 7))
        a = random_symmetric(n, rng)
        b = random_symmetric(n, rng)
        slack = check_chern_inequality(a, b)
        worst = min(worst, slack)
        if slack < _SLACK_FLOOR:
            violations += 1
    return {"name": "commutator_bound", "trials": trials, "min_slack": worst,
            "violations": violations}


def _suite_family(trials: int, seed: int) -> dict:
    worst = np.inf
    violations = 0
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        n = int(rng.integers(2, 6))
        p = int(rng.integers(1, 4))
        family = random_trace_free_family(n, p, rng)
        slack = check_li_inequality(family)
        worst = min(worst, slack)
        if slack < _SLACK_FLOOR:
            violations += 1
    return {"name": "family_bound", "trials": trials, "min_slack": worst,
            "violations": violations}


def _suite_trace_split(trials: int, seed: int) -> dict:
    worst = 0.0
    violations = 0
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        n = int(rng.integers(2, 6))
        p = int(rng.integers(1, 4))
        entries = rng.uniform(-1.0, 1.0, size=(p, n, n, n))
        tensor = SymTensor3(n, p, entries)
        _, _, residual = f_tensor_decompose(tensor)
        scaled = residual / (1.0 + tensor.norm_sq())
        worst = max(worst, scaled)
        if scaled > 1e-12:
            violations += 1
    return {"name": "trace_split", "trials": trials, "max_residual": worst,
            "violations": violations}


def _witness_residual(t: np.ndarray, lam: float, mu: float, a, b) -> float:
    n = a.dim
    a0, b0 = canonical_pair(n)
    res_a = float(np.linalg.norm(t.T @ a.data @ t - lam * a0.data))
    res_b = float(np.linalg.norm(t.T @ b.data @ t - mu * b0.data))
    return max(res_a, res_b)


def _suite_witness(trials: int, seed: int) -> dict:
    worst = 0.0
    violations = 0
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        n = int(rng.integers(2, 7))
        lam = float(rng.uniform(0.2, 2.0))
        mu = float(rng.uniform(0.2, 2.0))
        a0, b0 = canonical_pair(n)
        q, _ = np.linalg.qr(rng.normal(size=(n, n)))
        a = SymmetricMatrix(q @ (lam * a0.data) @ q.T)
        b = SymmetricMatrix(q @ (mu * b0.data) @ q.T)
        found = equality_witness(a, b, tol=1e-8)
        if found is None:
            violations += 1
            continue
        t, wlam, wmu = found
        residual = _witness_residual(t, wlam, wmu, a, b)
        worst = max(worst, residual)
        if residual > _WITNESS_TOL:
            violations += 1
    return {"name": "witness_recovery", "trials": trials, "max_residual": worst,
            "violations": violations}


def _cmd_matrix_props(args: argparse.Namespace) -> int:
    config = _config_from(args)
    trials = config.trials
    suites = [
        _suite_commutator(trials, config.seed),
        _suite_family(trials, config.seed),
        _suite_trace_split(trials, config.seed),
        _suite_witness(min(trials, 1000), config.seed),
    ]
    total_violations = sum(s["violations"] for s in suites)
    payload = {
        "command": "matrix-props",
        "seed": config.seed,
        "trials": trials,
        "suites": suites,
        "violations": total_violations,
    }
    rows = [["suite", "trials", "worst", "violations"]]
    for s in suites:
        worst = s.get("min_slack", s.get("max_residual"))
        rows.append([s["name"], s["trials"], float(worst), s["violations"]])
    _emit(args, payload, rows)
    if total_violations:
        return _fail(f"{total_violations} randomized trials violated a bound")
    return 0


def _cmd_conformal_test(args: argparse.Namespace) -> int:
    config = _config_from(args)
    entry = resolve(config.example_id)
    patch = entry.patch
    grid = _grid_for(patch, config.resolution)
    base = willmore_energy(patch, grid, fd_step=config.fd_step)
    reports = []
    attempts = 0
    trial = 0
    while len(reports) < args.maps and attempts < 20 * args.maps:
        attempts += 1
        rng = trial_rng(config.seed, trial)
        trial += 1
        mob = random_mobius(patch.ambient_dim, rng)
        try:
            moved = mobius_apply(mob, patch)
            value = willmore_energy(moved, grid, fd_step=config.fd_step)
        except ValueError as exc:
            # The coarse clearance check can pass while a finer quadrature
            # lattice still grazes the pole; either way, draw the next map.
            if "pole" not in str(exc):
                raise
            continue
        drift = abs(value - base) / base if base else abs(value - base)
        reports.append({"trial": trial - 1, "value": value, "drift": drift})
    max_drift = max((r["drift"] for r in reports), default=0.0)
    payload = {
        "id": entry.example_id,
        "grid": list(grid.counts),
        "base": base,
        "maps": reports,
        "max_drift": max_drift,
        "mode": "conformal",
    }
    rows = [["map", "energy", "drift"], ["base", base, 0.0]]
    for r in reports:
        rows.append([r["trial"], r["value"], r["drift"]])
    _emit(args, payload, rows)
    if len(reports) < args.maps:
        print("error: could not draw enough pole-safe maps", file=sys.stderr)
        return 2
    if args.check and max_drift > config.tolerance:
        return _fail(f"energy drift {max_drift:.3e} exceeds {config.tolerance:.1e}")
    return 0


def _cmd_optimize(args: argparse.Namespace) -> int:
    config = _config_from(args)
    fam = TorusFamily(args.m, args.n)
    tol = min(config.tolerance, 1e-3)
    radius = find_critical_radius(fam, tol=max(tol, 1e-12))
    balanced = fam.balanced_radius
    payload = {
        "m": fam.m,
        "n": fam.n,
        "critical_radius": radius,
        "balanced_radius": balanced,
        "difference": abs(radius - balanced),
        "energy": family_energy(fam, radius),
        "second_difference": second_difference(fam, radius),
        "mode": "optimize",
    }
    profile = family_profile(fam, samples=args.samples)
    rows = [["r", "energy", "derivative"]]
    for r, w, dw in profile:
        rows.append([float(r), float(w), float(dw)])
    _emit(args, payload, rows)
    if args.check and abs(radius - balanced) > 1e-6:
        return _fail(
            f"critical radius {radius!r} differs from the balanced radius "
            f"{balanced!r} by more than 1e-6"
        )
    return 0


def _add_output_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--format", choices=("json", "csv"), default="json",
                     help="stdout payload format")
    sub.add_argument("--out", default=None,
                     help="also write the command's CSV table to this path")


def _add_check_flag(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--assert", dest="check", action="store_true",
                     help="turn expected-value checks into exit-code failures")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="willmorelab",
        description="Numerical laboratory for curvature functionals of "
        "submanifolds of the round sphere.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_catalog = sub.add_parser("catalog", help="list example ids")
    _add_output_flags(p_catalog)

    p_shape = sub.add_parser("shape", help="shape data at a chart point")
    p_shape.add_argument("example_id")
    p_shape.add_argument("--point", default=None,
                         help="comma-separated chart coordinates")
    p_shape.add_argument("--fd-step", type=float, default=1e-4)
    _add_output_flags(p_shape)

    p_energy = sub.add_parser("energy", help="bending energy with a convergence table")
    p_energy.add_argument("example_id")
    p_energy.add_argument("--resolution", type=int, default=128)
    p_energy.add_argument("--fd-step", type=float, default=1e-4)
    p_energy.add_argument("--tolerance", type=float, default=None)
    _add_check_flag(p_energy)
    _add_output_flags(p_energy)

    p_el = sub.add_parser("el-check", help="critical-point residual")
    p_el.add_argument("example_id")
    p_el.add_argument("--surface", action="store_true",
                      help="pointwise surface residual on a periodic grid "
                      "instead of the constant-shape residual")
    p_el.add_argument("--resolution", type=int, default=64)
    p_el.add_argument("--fd-step", type=float, default=1e-4)
    p_el.add_argument("--tolerance", type=float, default=None)
    _add_check_flag(p_el)
    _add_output_flags(p_el)

    p_pinch = sub.add_parser("pinch", help="threshold-weighted pinching integral")
    p_pinch.add_argument("example_id")
    p_pinch.add_argument("--mode", choices=("simons", "li"), default="simons")
    p_pinch.add_argument("--resolution", type=int, default=64)
    p_pinch.add_argument("--fd-step", type=float, default=1e-4)
    p_pinch.add_argument("--tolerance", type=float, default=None)
    _add_check_flag(p_pinch)
    _add_output_flags(p_pinch)

    p_props = sub.add_parser("matrix-props", help="randomized inequality suites")
    p_props.add_argument("--trials", type=int, default=1000)
    p_props.add_argument("--seed", type=int, default=0)
    _add_output_flags(p_props)

    p_conf = sub.add_parser("conformal-test",
                            help="energy drift under random conformal maps")
    p_conf.add_argument("example_id")
    p_conf.add_argument("--maps", type=int, default=10)
    p_conf.add_argument("--resolution", type=int, default=128)
    p_conf.add_argument("--fd-step", type=float, default=1e-4)
    p_conf.add_argument("--seed", type=int, default=0)
    p_conf.add_argument("--tolerance", type=float, default=None)
    _add_check_flag(p_conf)
    _add_output_flags(p_conf)

    p_opt = sub.add_parser("optimize", help="critical radius of the torus family")
    p_opt.add_argument("m", type=int)
    p_opt.add_argument("n", type=int)
    p_opt.add_argument("--tolerance", type=float, default=None)
    p_opt.add_argument("--samples", type=int, default=200,
                       help="rows in the CSV profile")
    _add_check_flag(p_opt)
    _add_output_flags(p_opt)

    return parser


_HANDLERS = {
    "catalog": _cmd_catalog,
    "shape": _cmd_shape,
    "energy": _cmd_energy,
    "el-check": _cmd_el_check,
    "pinch": _cmd_pinch,
    "matrix-props": _cmd_matrix_props,
    "conformal-test": _cmd_conformal_test,
    "optimize": _cmd_optimize,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = _HANDLERS[args.command]
    try:
        return handler(args)
    except UnknownExampleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

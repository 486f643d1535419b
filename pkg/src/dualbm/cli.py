"""Command line interface.

Usage examples::

    dualbm grid --dim 3 --grid-res 8 --out grid.json
    dualbm dmv --bodies bodies.json --grid-res 256
    dualbm lutwak --bodies bodies.json --lambdas 1 2 --dim 2
    dualbm pm semivariation --tensor tensor.json --mode exact
    dualbm characterize --backing tensor.json --arity 2 --grid-res 16 --trials 50 --out report.json
    dualbm recover --poly-from measure.json --grid-res 32
    dualbm reduce --measure measure.json --group cyclic --grid-res 32
    dualbm accept --suite all --seed 0 --out accept.json

Exit status is 0 when every check passes, 1 when a check fails and 2 on
usage or input errors.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .acceptance import CRITERIA, run_suite
from .dual_volume import dual_mixed_volume, lutwak_check
from .exceptions import DualBMError, InvarianceError, NotDiagonalError, ProbeFailure, TransitivityError
from .functional import (
    characterize,
    from_measure,
    from_polymeasure,
    recover_measure_from_polynomial,
    reduce_rotation_invariant,
)
from .polymeasure import (
    FinitePartition,
    PolyMeasure,
    diagonal_measure,
    is_diagonal,
    jordan_decomposition,
    product_measure,
    semivariation,
    variation,
)
from .sphere_grid import cyclic_rotations, make_grid
from .star_body import body_from_dict, sample

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class InputError(Exception):
    """Malformed input file or inconsistent arguments."""


# ---------------------------------------------------------------------------
# input helpers


def _load_json(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _load_bodies(path):
    data = _load_json(path)
    lambdas = None
    if isinstance(data, dict):
        lambdas = data.get("lambdas")
        data = data.get("bodies")
    if not isinstance(data, list) or not data:
        raise InputError(f"{path}: expected a list of body specs or an object with a 'bodies' list")
    bodies = []
    for i, item in enumerate(data):
        try:
            bodies.append(body_from_dict(item))
        except DualBMError as exc:
            raise InputError(f"{path}: bodies[{i}]: {exc}") from None
    return bodies, lambdas


def _load_tensor(path, partition=None):
    data = _load_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected an object with order, atoms, entries")
    try:
        return PolyMeasure.from_dict(data, partition)
    except (DualBMError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_measure(path, grid):
    data = _load_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected an object with 'masses' or 'proportional_to_weights'")
    if "masses" in data:
        mu = np.asarray(data["masses"], dtype=float)
        if mu.shape != (grid.size,):
            raise InputError(f"{path}: field 'masses' needs {grid.size} entries for this grid, got {mu.size}")
        return mu
    if "proportional_to_weights" in data:
        return float(data["proportional_to_weights"]) * grid.weights / grid.dim
    raise InputError(f"{path}: expected field 'masses' or 'proportional_to_weights'")


# ---------------------------------------------------------------------------
# output helpers


def _number(v):
    v = float(v)
    return str(int(v)) if v.is_integer() and abs(v) < 2**53 else repr(v)


def _config(args):
    skip = {"func", "out", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _report(args, result, passed):
    return {"command": args.command_path, "config": _config(args), "pass": bool(passed), "result": result}


def _rows(report):
    """Tabular view of a report for CSV export."""
    res = report["result"]
    cmd = report["command"]
    if cmd == "accept":
        return [{"id": c["id"], "name": c["name"], "pass": c["pass"]} for c in res["criteria"]]
    if cmd == "characterize":
        return [{k: c[k] for k in ("name", "max_violation", "scale", "pass")} for c in res["checks"]]
    if cmd == "grid":
        return [
            dict({f"x{j}": x for j, x in enumerate(node)}, weight=w)
            for node, w in zip(res["nodes"], res["weights"])
        ]
    flat = {k: v for k, v in res.items() if not isinstance(v, (list, dict))}
    return [dict(flat, **{"pass": report["pass"]})]


def _dump(report, fmt):
    if fmt == "csv":
        rows = _rows(report)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _emit(args, report, stdout_text=None):
    text = _dump(report, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(stdout_text if stdout_text is not None else text)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def _grid(args):
    try:
        return make_grid(args.dim, args.grid_res)
    except DualBMError as exc:
        raise InputError(str(exc)) from None


# ---------------------------------------------------------------------------
# commands


def cmd_grid(args):
    g = _grid(args)
    return _emit(args, _report(args, g.to_dict(), True))


def cmd_dmv(args):
    g = _grid(args)
    bodies, _ = _load_bodies(args.bodies)
    if len(bodies) == 1:
        bodies = bodies * g.dim
    if len(bodies) != g.dim:
        raise InputError(f"{args.bodies}: need {g.dim} bodies for dim={g.dim}, got {len(bodies)}")
    value = dual_mixed_volume([sample(b, g) for b in bodies])
    return _emit(args, _report(args, {"value": value}, True), _number(value) + "\n")


def cmd_lutwak(args):
    g = _grid(args)
    bodies, lambdas = _load_bodies(args.bodies)
    if args.lambdas is not None:
        lambdas = args.lambdas
    if lambdas is None:
        lambdas = [1.0] * len(bodies)
    if len(lambdas) != len(bodies):
        raise InputError(f"{len(bodies)} bodies but {len(lambdas)} lambdas")
    if any(not lam >= 0 for lam in lambdas):
        raise InputError("lambdas must be nonnegative")
    rep = lutwak_check(bodies, lambdas, g)
    passed = rep.abs_diff <= args.tol_rel * max(1.0, abs(rep.direct))
    result = rep.to_dict()
    return _emit(args, _report(args, result, passed), json.dumps(result, sort_keys=True) + "\n")


def cmd_pm(args):
    gamma = _load_tensor(args.tensor)
    op = args.op
    scalar = None
    passed = True
    if op == "variation":
        scalar = variation(gamma)
        result = {"value": scalar}
    elif op == "semivariation":
        try:
            sv = semivariation(gamma, args.mode, seed=args.seed)
        except DualBMError as exc:
            raise InputError(str(exc)) from None
        scalar = sv.value
        result = {"value": sv.value, "status": sv.status, "signs": [list(s) for s in sv.signs]}
    elif op == "decompose":
        pos, neg = jordan_decomposition(gamma)
        result = {
            "positive": pos.to_dict(),
            "negative": neg.to_dict(),
            "variation": variation(gamma),
            "variation_positive": variation(pos),
            "variation_negative": variation(neg),
        }
    elif op == "diagonal":
        check = is_diagonal(gamma, args.tol)
        result = {"diagonal": check.is_diagonal}
        if check:
            result["measure"] = diagonal_measure(gamma, args.tol).tolist()
        else:
            result["witness"] = list(check.witness)
            result["magnitude"] = check.magnitude
        passed = check.is_diagonal
    else:  # product
        mu = product_measure(gamma)
        result = {"atoms": mu.atoms ** mu.order, "masses": mu.masses.tolist(), "total": mu.total()}
    text = _number(scalar) + "\n" if scalar is not None else None
    return _emit(args, _report(args, result, passed), text)


def cmd_characterize(args):
    g = _grid(args)
    data = _load_json(args.backing)
    if isinstance(data, dict) and "entries" in data:
        gamma = _load_tensor(args.backing, FinitePartition.node_level(g))
        if gamma.atoms != g.size:
            raise InputError(f"{args.backing}: tensor has {gamma.atoms} atoms, grid has {g.size} nodes")
        if args.arity is not None and args.arity != gamma.order:
            raise InputError(f"--arity {args.arity} disagrees with tensor order {gamma.order}")
        F = from_polymeasure(gamma)
    else:
        if args.arity is None:
            raise InputError("--arity is required for a measure backing")
        F = from_measure(_load_measure(args.backing, g), g, args.arity)
    rep = characterize(F, trials=args.trials, seed=args.seed, rtol=args.tol_rel)
    result = {"backing": F.kind, **rep}
    return _emit(args, _report(args, result, rep["pass"]))


def cmd_recover(args):
    g = _grid(args)
    nu = _load_measure(args.poly_from, g)
    n = g.dim

    def P(f):
        return math.fsum(nu * f.values**n)

    try:
        rec = recover_measure_from_polynomial(P, g, n, seed=args.seed, rtol=args.tol_rel)
    except ProbeFailure as exc:
        result = {"error": str(exc), "property": exc.property, "violation": exc.violation}
        return _emit(args, _report(args, result, False))
    result = {
        "measure": rec.measure.tolist(),
        "max_rel_error": rec.max_rel_error,
        "matches_input": bool(np.array_equal(rec.measure, nu)),
    }
    return _emit(args, _report(args, result, result["max_rel_error"] <= args.tol_rel))


def cmd_reduce(args):
    g = _grid(args)
    if args.group != "cyclic" or g.dim != 2:
        raise InputError("only --group cyclic on a dim=2 grid is available")
    F = from_measure(_load_measure(args.measure, g), g, g.dim)
    try:
        red = reduce_rotation_invariant(F, cyclic_rotations(g), rtol=args.tol_rel)
    except InvarianceError as exc:
        result = {"error": str(exc), "node": exc.node, "invariance_residual": exc.residual}
        return _emit(args, _report(args, result, False))
    except TransitivityError as exc:
        raise InputError(str(exc)) from None
    result = {"c": red.c, "residual": red.residual, "invariance_residual": red.invariance_residual}
    return _emit(args, _report(args, result, True))


def _suite_ids(spec):
    if spec == "all":
        return sorted(CRITERIA)
    try:
        ids = [int(x) for x in spec.split(",")]
    except ValueError:
        raise InputError(f"--suite must be 'all' or a comma-separated list of ids, got {spec!r}") from None
    bad = [i for i in ids if i not in CRITERIA]
    if bad:
        raise InputError(f"unknown criterion ids {bad}; available: {sorted(CRITERIA)}")
    return ids


def cmd_accept(args):
    ids = _suite_ids(args.suite)
    first = run_suite(args.seed, ids)
    second = run_suite(args.seed, ids)
    identical = json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)
    criteria = first + [{"id": 10, "name": "determinism", "pass": identical}]
    passed = all(c["pass"] for c in criteria)
    report = _report(args, {"criteria": criteria}, passed)
    lines = "".join(
        f"criterion {c['id']:>2} {c['name']:<40} {'PASS' if c['pass'] else 'FAIL'}\n" for c in criteria
    )
    return _emit(args, report, lines)


# ---------------------------------------------------------------------------
# parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=2, help="ambient dimension (2 or 3)")
    common.add_argument("--grid-res", type=int, default=64, help="grid resolution k")
    common.add_argument("--tol-rel", type=float, default=1e-9, help="relative tolerance for checks")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--out", help="write the report to this file")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="dualbm", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("grid", parents=[common], help="write a quadrature grid")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("dmv", parents=[common], help="dual mixed volume of n bodies")
    p.add_argument("--bodies", required=True)
    p.set_defaults(func=cmd_dmv)

    p = sub.add_parser("lutwak", parents=[common], help="check the Lutwak expansion")
    p.add_argument("--bodies", required=True)
    p.add_argument("--lambdas", type=float, nargs="+")
    p.set_defaults(func=cmd_lutwak)

    p = sub.add_parser("pm", parents=[common], help="polymeasure operations")
    p.add_argument("op", choices=("variation", "semivariation", "decompose", "diagonal", "product"))
    p.add_argument("--tensor", required=True)
    p.add_argument("--mode", choices=("exact", "randomized"), default="exact")
    p.add_argument("--tol", type=float, default=1e-12, help="off-diagonal tolerance")
    p.set_defaults(func=cmd_pm)

    p = sub.add_parser("characterize", parents=[common], help="run the condition checks on a functional")
    p.add_argument("--backing", required=True, help="measure or tensor JSON")
    p.add_argument("--arity", type=int)
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser("recover", parents=[common], help="recover a measure from its polynomial")
    p.add_argument("--poly-from", required=True, help="measure JSON defining P(f) = sum nu f^n")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("reduce", parents=[common], help="reduce a rotation-invariant measure to c times the weights")
    p.add_argument("--measure", required=True)
    p.add_argument("--group", choices=("cyclic",), default="cyclic")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("accept", parents=[common], help="run the acceptance suite")
    p.add_argument("--suite", default="all")
    p.set_defaults(func=cmd_accept)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    args.command_path = args.command + (f" {args.op}" if args.command == "pm" else "")
    if args.trials < 1 or not args.tol_rel > 0:
        parser.error("--trials must be >= 1 and --tol-rel > 0")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"dualbm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotDiagonalError as exc:
        print(f"dualbm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

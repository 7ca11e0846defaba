"""Command-line frontend.

Each subcommand parses its inputs, dispatches to the library, writes one JSON
report (stable envelope: command, verdict, order, evidence) and prints a
one-line summary.  Exit status: 0 for a positive verdict or successful
computation, 1 for a negative verdict, 2 for usage or evaluation errors.
Reports are byte-identical across runs with the same configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from importlib import resources

import numpy as np

from . import expr as ex
from .colombeau import CompactBox, EpsilonGrid, Net, classify
from .decompose import (
    DecompositionError,
    full_lorentz_decompose,
    orthogonal_decompose,
)
from .groups import GroupElement, element_from_json, planar_flow
from .numbertheory import (
    AlgebraicNumber,
    catalog,
    corollary_pair,
    dirichlet,
    liouville_constant,
    resolve_alpha,
)
from .sampling import random_proper_lorentz, random_special_orthogonal
from .verify import (
    CBoundednessError,
    check_invariance,
    lorentz_invariance_pipeline,
    one_param_theorem_harness,
    open_question_explorer,
    rotation_invariance_pipeline,
    translation_constancy,
    two_period_constancy,
)

EXIT_POSITIVE = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2


def schema_path() -> str:
    """Filesystem path of the published report schema."""
    return str(resources.files("epsnet").joinpath("schemas/report.schema.json"))


class UsageError(Exception):
    pass


def _load_json_arg(text: str):
    """Accept either inline JSON or a path to a JSON file."""
    if os.path.exists(text):
        with open(text, "r", encoding="utf-8") as fh:
            return json.load(fh)
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise UsageError(f"not valid JSON and not a readable file: {text!r} ({err})") from None


def _parse_box(spec: str, dimension: int, samples: int) -> CompactBox:
    """Box syntax: comma-separated per-axis 'lo:hi' ranges, e.g. '-1:1,-1:1'."""
    if not spec:
        return CompactBox.cube(-1.0, 1.0, dimension, samples)
    intervals = []
    for part in spec.split(","):
        lo, _, hi = part.partition(":")
        if not _:
            raise UsageError(f"bad box interval {part!r}; expected lo:hi")
        intervals.append((float(lo), float(hi)))
    if len(intervals) != dimension:
        raise UsageError(f"box has {len(intervals)} axes but dimension is {dimension}")
    return CompactBox(tuple(intervals), samples)


def _parse_vector(spec: str) -> tuple:
    return tuple(float(v) for v in spec.split(",") if v != "")


def _algebraic(spec: str) -> AlgebraicNumber:
    _, name, alg = resolve_alpha(spec)
    if alg is None:
        raise UsageError(
            f"{spec!r} is not in the algebraic catalog ({', '.join(sorted(catalog()))})"
        )
    return alg


def _json_default(value):
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    raise TypeError(f"not JSON serializable: {type(value)}")


def write_report(path: str, command: str, verdict: str, order, evidence) -> None:
    payload = {"command": command, "verdict": verdict, "order": order, "evidence": evidence}
    text = json.dumps(payload, sort_keys=True, indent=2, default=_json_default)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def _grid(args) -> EpsilonGrid:
    return EpsilonGrid.dyadic(args.k_min, args.k_max)


def _net(args) -> Net:
    return Net.parse(args.f, args.dim)


def _element(args, dimension: int) -> GroupElement:
    chosen = [
        args.element is not None,
        args.rotation is not None,
        args.boost is not None,
        args.translate is not None,
    ]
    if sum(chosen) != 1:
        raise UsageError("provide exactly one of --element/--rotation/--boost/--translate")
    if args.element is not None:
        data = _load_json_arg(args.element)
        if "dimension" not in data and "matrix" not in data and "coords" not in data:
            data["dimension"] = dimension
        return element_from_json(data)
    if args.translate is not None:
        return GroupElement.translation(dimension, _parse_vector(args.translate))
    spec = args.rotation if args.rotation is not None else args.boost
    kind = "rotation" if args.rotation is not None else "boost"
    i_s, j_s, theta_s = spec.split(",", 2)
    try:
        theta = float(theta_s)
    except ValueError:
        theta = Net.parse(theta_s, 0)
    factory = planar_flow(kind, dimension, int(i_s), int(j_s))
    return factory(theta)


def _matrix_argument(args, kind: str, rng: random.Random):
    """Resolve --matrix / --matrix-net / --random into a pipeline input."""
    given = [args.matrix is not None, args.matrix_net is not None, args.random]
    if sum(given) != 1:
        raise UsageError("provide exactly one of --matrix/--matrix-net/--random")
    if args.matrix is not None:
        return np.asarray(_load_json_arg(args.matrix), dtype=float)
    if args.matrix_net is not None:
        rows = _load_json_arg(args.matrix_net)
        return [[Net.parse(str(v), 0) if isinstance(v, str) else float(v) for v in row] for row in rows]
    if kind == "rotation":
        return random_special_orthogonal(rng, args.dim)
    return random_proper_lorentz(rng, args.dim)


# ---------------------------------------------------------------------------
# Subcommand handlers; each returns (verdict, order, evidence, summary)


def _cmd_classify(args, rng):
    net = _net(args)
    box = _parse_box(args.box, args.dim, args.samples)
    report = classify(net, box, max_order=args.max_order, grid=_grid(args), p_max=args.p_max)
    summary = (
        f"moderate={report.moderate} negligible_order={report.negligible_order} "
        f"fitted_exponent={report.fitted_exponent:.4g}"
    )
    return "computed", None, report.to_json_dict(), summary


def _cmd_invariance(args, rng):
    net = _net(args)
    box = _parse_box(args.box, args.dim, args.samples)
    g = _element(args, args.dim)
    rep = check_invariance(net, g, box, _grid(args), args.p, strict=args.strict)
    verdict = "positive" if rep.invariant else "negative"
    return verdict, args.p, rep.to_json_dict(), f"invariant={rep.invariant} at order p={args.p}"


def _cmd_one_param(args, rng):
    net = _net(args)
    box = _parse_box(args.box, args.dim, args.samples)
    real_thetas = _parse_vector(args.real_thetas) if args.real_thetas else None
    gen_thetas = tuple(Net.parse(t, 0) for t in (args.gen_theta or ()))
    flow = planar_flow(args.kind, args.dim, args.i, args.j)
    kwargs = {} if real_thetas is None else {"real_thetas": real_thetas}
    rep = one_param_theorem_harness(
        net, flow, gen_thetas=gen_thetas, box=box, grid=_grid(args), p=args.p, **kwargs
    )
    verdict = "positive" if rep.verdict else "negative"
    note = "HYPOTHESIS_FAILED" if rep.hypothesis_failed else "hypothesis holds"
    return verdict, args.p, rep.to_json_dict(), f"{note}; verdict={rep.verdict}"


def _cmd_rotation(args, rng):
    net = _net(args)
    box = _parse_box(args.box, args.dim, args.samples)
    grid = _grid(args)
    M = _matrix_argument(args, "rotation", rng)
    rep = rotation_invariance_pipeline(net, M, box, grid, args.p, strict=args.strict)
    verdict = "positive" if rep.verdict else "negative"
    return verdict, args.p, rep.to_json_dict(), f"invariant={rep.verdict} (consistent={rep.consistent})"


def _cmd_lorentz(args, rng):
    net = _net(args)
    box = _parse_box(args.box, args.dim, args.samples)
    grid = _grid(args)
    L = _matrix_argument(args, "lorentz", rng)
    rep = lorentz_invariance_pipeline(net, L, box, grid, args.p, strict=args.strict)
    verdict = "positive" if rep.verdict else "negative"
    return verdict, args.p, rep.to_json_dict(), f"invariant={rep.verdict} (consistent={rep.consistent})"


def _cmd_decompose_so(args, rng):
    M = np.asarray(_load_json_arg(args.matrix), dtype=float)
    schedule, reflected = orthogonal_decompose(M)
    evidence = {"schedule": schedule.to_json_dict(), "reflected": reflected}
    angles = ", ".join(f"{t:.6g}" for t in schedule.angles())
    return "computed", None, evidence, f"factors=[{angles}] reflected={reflected}"


def _cmd_decompose_lorentz(args, rng):
    L = np.asarray(_load_json_arg(args.matrix), dtype=float)
    full = full_lorentz_decompose(L)
    fact = full.factorization
    evidence = {
        **fact.to_json_dict(),
        "time_inverted": full.time_inverted,
        "orientation_inverted": full.orientation_inverted,
    }
    return (
        "computed",
        None,
        evidence,
        f"theta={fact.theta:.6g} time_inverted={full.time_inverted} "
        f"orientation_inverted={full.orientation_inverted}",
    )


def _cmd_dirichlet(args, rng):
    provider, name, _ = resolve_alpha(args.alpha)
    pair = dirichlet(provider, args.N)
    evidence = {
        "alpha": name,
        "N": args.N,
        "k": pair.k,
        "l": pair.l,
        "defect": pair.defect_float,
    }
    return (
        "computed",
        None,
        evidence,
        f"(k,l)=({pair.k},{pair.l}) defect~{pair.defect_float:.4g}",
    )


def _cmd_liouville(args, rng):
    alg = _algebraic(args.alpha)
    data = liouville_constant(alg)
    evidence = {
        "alpha": alg.name,
        "poly": list(alg.coeffs),
        "degree": alg.degree,
        "c": data.c,
        "M": data.M,
    }
    return "computed", None, evidence, f"c~{data.c:.6g} M={data.M}"


def _cmd_corollary_pair(args, rng):
    alg = _algebraic(args.alpha)
    res = corollary_pair(alg, args.R)
    evidence = {
        "alpha": alg.name,
        "poly": list(alg.coeffs),
        "R": args.R,
        "k": res.k,
        "l": res.l,
        "defect": res.defect_float,
        "M": res.M,
    }
    return (
        "computed",
        None,
        evidence,
        f"(k,l)=({res.k},{res.l}) defect~{res.defect_float:.4g} M={res.M}",
    )


def _cmd_two_period(args, rng):
    net = Net.parse(args.f, 1)
    alg = _algebraic(args.alpha)
    rep = two_period_constancy(net, alg, args.R, args.p, _grid(args), samples=args.samples)
    verdict = {"constant": "positive", "not-certified": "negative", "not-applicable": "not-applicable"}[
        rep.verdict
    ]
    return verdict, args.p, rep.to_json_dict(), rep.verdict


def _cmd_translation(args, rng):
    net = _net(args)
    box = _parse_box(args.box, args.dim, args.samples)
    hs = tuple(_parse_vector(part) for part in args.h_samples.split(";")) if args.h_samples else ((0.5,) * args.dim, (1.0,) * args.dim)
    rep = translation_constancy(net, box, _grid(args), args.p, h_samples=hs)
    verdict = "positive" if rep.verdict else "negative"
    note = "HYPOTHESIS_FAILED" if rep.hypothesis_failed else "constant" if rep.verdict else "not constant"
    return verdict, args.p, rep.to_json_dict(), note


def _cmd_explore(args, rng):
    net = Net.parse(args.f, 1)
    provider, name, _ = resolve_alpha(args.alpha)
    rep = open_question_explorer(provider, net, args.R, args.p, _grid(args), samples=args.samples)
    effective = "nan" if rep.effective_M is None else f"{rep.effective_M:.3f}"
    return (
        "exploratory",
        args.p,
        rep.to_json_dict(),
        f"NON-THEOREM exploration: alpha={name} applicable={rep.applicable} effective_M~{effective}",
    )


_HANDLERS = {
    "classify": _cmd_classify,
    "invariance": _cmd_invariance,
    "one-param": _cmd_one_param,
    "rotation": _cmd_rotation,
    "lorentz": _cmd_lorentz,
    "decompose-so": _cmd_decompose_so,
    "decompose-lorentz": _cmd_decompose_lorentz,
    "dirichlet": _cmd_dirichlet,
    "liouville": _cmd_liouville,
    "corollary-pair": _cmd_corollary_pair,
    "two-period": _cmd_two_period,
    "translation": _cmd_translation,
    "explore-open-question": _cmd_explore,
}

#: Defaults shared by the config-file layer; flags override config values,
#: config values override these.
DEFAULTS = {
    "k_min": 4,
    "k_max": 40,
    "p": 4,
    "p_max": 8,
    "max_order": 2,
    "samples": 33,
    "dim": 1,
    "seed": 0,
    "strict": True,
    "box": "",
    "real_thetas": "",
    "h_samples": "",
}


def _add_common(sp, *names):
    if "grid" in names:
        sp.add_argument("--k-min", type=int, default=None, dest="k_min")
        sp.add_argument("--k-max", type=int, default=None, dest="k_max")
    if "p" in names:
        sp.add_argument("--p", type=int, default=None)
    if "box" in names:
        sp.add_argument("--box", type=str, default=None, help="per-axis lo:hi, comma separated")
        sp.add_argument("--samples", type=int, default=None)
    if "net" in names:
        sp.add_argument("--f", type=str, required=True, help="expression in eps, x1..xd")
        sp.add_argument("--dim", type=int, default=None)


def _global_options() -> argparse.ArgumentParser:
    # shared by the main parser and every subparser so the flags are accepted
    # on either side of the subcommand; SUPPRESS keeps an absent subparser
    # flag from clobbering a value parsed before the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=argparse.SUPPRESS,
                        help="JSON file with default options")
    common.add_argument("--out", type=str, default=argparse.SUPPRESS,
                        help="report path (default <command>_report.json)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for randomized corpus generation")
    common.add_argument("--strict", dest="strict", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--no-strict", dest="strict", action="store_false", default=argparse.SUPPRESS)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _global_options()
    parser = argparse.ArgumentParser(
        prog="epsnet",
        description="Verifiers for invariance properties of nets of smooth functions",
        parents=[common],
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    class _Sub:
        def add_parser(self, name, **kwargs):
            return subparsers.add_parser(name, parents=[common], **kwargs)

    sub = _Sub()

    sp = sub.add_parser("classify", help="asymptotic classification of a net")
    _add_common(sp, "net", "box", "grid")
    sp.add_argument("--max-order", type=int, default=None, dest="max_order")
    sp.add_argument("--p-max", type=int, default=None, dest="p_max")

    sp = sub.add_parser("invariance", help="invariance of a net under one element")
    _add_common(sp, "net", "box", "grid", "p")
    sp.add_argument("--element", type=str, default=None, help="GroupElement JSON (inline or file)")
    sp.add_argument("--rotation", type=str, default=None, help="i,j,theta (theta real or eps-expression)")
    sp.add_argument("--boost", type=str, default=None, help="i,j,theta")
    sp.add_argument("--translate", type=str, default=None, help="comma-separated offset")

    sp = sub.add_parser("one-param", help="real-parameter hypothesis plus generalized conclusion")
    _add_common(sp, "net", "box", "grid", "p")
    sp.add_argument("--kind", choices=("rotation", "boost"), required=True)
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--j", type=int, required=True)
    sp.add_argument("--real-thetas", type=str, default=None, dest="real_thetas")
    sp.add_argument("--gen-theta", action="append", default=None, dest="gen_theta")

    for name in ("rotation", "lorentz"):
        sp = sub.add_parser(name, help=f"{name} invariance pipeline via factorization")
        _add_common(sp, "net", "box", "grid", "p")
        sp.add_argument("--matrix", type=str, default=None)
        sp.add_argument("--matrix-net", type=str, default=None, dest="matrix_net")
        sp.add_argument("--random", action="store_true", default=False)

    sp = sub.add_parser("decompose-so", help="factor an orthogonal matrix")
    sp.add_argument("--matrix", type=str, required=True)

    sp = sub.add_parser("decompose-lorentz", help="factor a proper orthochronous Lorentz matrix")
    sp.add_argument("--matrix", type=str, required=True)

    sp = sub.add_parser("dirichlet", help="minimal-defect approximation pair")
    sp.add_argument("--alpha", type=str, required=True)
    sp.add_argument("--N", type=int, required=True)

    sp = sub.add_parser("liouville", help="lower-bound constant and exponent for a catalog number")
    sp.add_argument("--alpha", type=str, required=True)

    sp = sub.add_parser("corollary-pair", help="two-sided pair for a catalog number")
    sp.add_argument("--alpha", type=str, required=True)
    sp.add_argument("--R", type=float, required=True)

    sp = sub.add_parser("two-period", help="two periods force a generalized constant")
    sp.add_argument("--f", type=str, required=True)
    sp.add_argument("--alpha", type=str, required=True)
    sp.add_argument("--R", type=float, required=True)
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--k-min", type=int, default=None, dest="k_min")
    sp.add_argument("--k-max", type=int, default=None, dest="k_max")
    sp.add_argument("--samples", type=int, default=None)

    sp = sub.add_parser("translation", help="translation invariance forces a constant")
    _add_common(sp, "net", "box", "grid", "p")
    sp.add_argument("--h-samples", type=str, default=None, dest="h_samples",
                    help="semicolon-separated offset vectors, components comma-separated")

    sp = sub.add_parser("explore-open-question", help="two-period data for non-algebraic ratios")
    sp.add_argument("--f", type=str, required=True)
    sp.add_argument("--alpha", type=str, required=True)
    sp.add_argument("--R", type=float, required=True)
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--k-min", type=int, default=None, dest="k_min")
    sp.add_argument("--k-max", type=int, default=None, dest="k_max")
    sp.add_argument("--samples", type=int, default=None)

    return parser


def _apply_config(args: argparse.Namespace) -> argparse.Namespace:
    """Precedence: explicit flags, then config-file values, then defaults."""
    config = {}
    if getattr(args, "config", None):
        config = _load_json_arg(args.config)
        if not isinstance(config, dict):
            raise UsageError("config file must hold a JSON object")
    for key, default in DEFAULTS.items():
        if not hasattr(args, key):
            continue
        if getattr(args, key) is None:
            setattr(args, key, config.get(key, default))
    return args


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_ERROR if err.code not in (0, None) else 0
    for key in ("config", "out", "seed", "strict"):
        if not hasattr(args, key):
            setattr(args, key, None)
    try:
        args = _apply_config(args)
        rng = random.Random(args.seed if args.seed is not None else DEFAULTS["seed"])
        handler = _HANDLERS[args.command]
        verdict, order, evidence, summary = handler(args, rng)
    except (UsageError, ex.ParseError, DecompositionError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR
    except (ex.EvalError, CBoundednessError) as err:
        print(f"evaluation error: {err}", file=sys.stderr)
        return EXIT_ERROR
    out = args.out or f"{args.command.replace('-', '_')}_report.json"
    write_report(out, args.command, verdict, order, evidence)
    print(f"{args.command}: {summary} [{verdict}] -> {out}")
    return EXIT_NEGATIVE if verdict in ("negative", "not-applicable") else EXIT_POSITIVE


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

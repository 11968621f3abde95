"""Command-line interface: JSON in, JSON out.

Exit status is 0 on success, 2 on invalid input and 3 when a search fails
(an Inconclusive verdict or no collision found).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bounds as bnd
from .criterion import Status, certify_pure_ic, check_d3_four_bases, two_basis_counterexample
from .formats import (
    FORMAT_VERSION,
    FormatError,
    decode_basis_set,
    decode_vector,
    dumps,
    encode_basis_set,
    encode_vector,
    loads,
)
from .jaming import (
    KINDS,
    InconsistentDataError,
    JamingConfig,
    ProbabilityData,
    jaming_bases,
    reconstruct_pure_state,
    simulate_probabilities,
)
from .product4 import BlochPair, CollisionNotFound, find_entangled_collision
from .qlinalg import Tolerances
from .spin1 import spin1_verdict

EXIT_OK, EXIT_INVALID, EXIT_SEARCH = 0, 2, 3


class SearchFailed(RuntimeError):
    def __init__(self, message: str, payload: dict | None = None):
        super().__init__(message)
        self.payload = payload


def _read_json(path: str | None):
    if path is None or path == "-":
        return loads(sys.stdin.read(), "<stdin>")
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text, path)


def _tols(args) -> Tolerances:
    kw = {}
    if args.tol_zero is not None:
        kw["tol_zero"] = args.tol_zero
    if args.tol_rank is not None:
        kw["tol_rank"] = args.tol_rank
    return Tolerances(**kw)


def _require(obj, key: str, kind, where: str = "input"):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"{where}: missing field {key!r}")
    val = obj[key]
    if not isinstance(val, kind):
        raise FormatError(f"{where}.{key}: wrong type {type(val).__name__}")
    return val


def _directions(items, where: str) -> list[np.ndarray]:
    out = []
    for i, v in enumerate(items):
        arr = np.asarray(v, dtype=float) if isinstance(v, list) else None
        if arr is None or arr.shape != (3,):
            raise FormatError(f"{where}[{i}]: expected a real 3-vector")
        out.append(arr)
    return out


# --- subcommands --------------------------------------------------------------


def cmd_certify(args) -> dict:
    bases = decode_basis_set(_read_json(args.inp))
    tols = _tols(args)
    if args.d3:
        verdict = check_d3_four_bases(bases, tols)
    else:
        verdict = certify_pure_ic(bases, args.restarts, args.seed, tols)
    out = {"format": FORMAT_VERSION, **verdict.to_json()}
    if verdict.status is Status.INCONCLUSIVE:
        raise SearchFailed("certification inconclusive", out)
    return out


def cmd_jaming(args) -> dict:
    config = JamingConfig.of(args.dim, args.family, args.alpha)
    out = encode_basis_set(jaming_bases(config))
    out["config"] = {"dim": args.dim, "family": args.family, "alpha": args.alpha}
    return out


def cmd_simulate(args) -> dict:
    data = _read_json(args.inp)
    psi = decode_vector(data["state"] if isinstance(data, dict) and "state" in data else data, "state")
    config = JamingConfig.of(psi.size, args.family, args.alpha)
    pd = simulate_probabilities(jaming_bases(config), psi, alpha=args.alpha, family=args.family)
    return {
        "format": FORMAT_VERSION,
        "dim": pd.dim,
        "alpha": args.alpha,
        "family": args.family,
        "table": pd.table.tolist(),
    }


def cmd_reconstruct(args) -> dict:
    data = _read_json(args.inp)
    table = _require(data, "table", list)
    kind = data.get("family", "hermite")
    if kind not in KINDS:
        raise FormatError(f"input.family: unknown family {kind!r}")
    alpha = float(data.get("alpha", 1.0))
    pd = ProbabilityData(np.asarray(table, dtype=float), alpha=alpha, family=kind)
    if "dim" in data and data["dim"] != pd.dim:
        raise FormatError(f"input.dim {data['dim']} disagrees with table width {pd.dim}")
    config = JamingConfig.of(pd.dim, kind, alpha)
    psi = reconstruct_pure_state(pd, config, _tols(args))
    recon = simulate_probabilities(jaming_bases(config), psi)
    return {
        "format": FORMAT_VERSION,
        "dim": pd.dim,
        "state": encode_vector(psi),
        "residual": float(np.max(np.abs(recon.table - pd.table))),
    }


def cmd_spin1(args) -> dict:
    data = _read_json(args.inp)
    dirs = _directions(_require(data, "directions", list), "directions")
    if len(dirs) != 4:
        raise FormatError(f"directions: expected 4, got {len(dirs)}")
    return {"format": FORMAT_VERSION, **spin1_verdict(dirs, _tols(args)).to_json()}


def cmd_product_collide(args) -> dict:
    data = _read_json(args.inp)
    items = _require(data, "pairs", list)
    if len(items) != 4:
        raise FormatError(f"pairs: expected 4, got {len(items)}")
    pairs = []
    for i, item in enumerate(items):
        m = _directions([_require(item, "m", list, f"pairs[{i}]")], f"pairs[{i}].m")[0]
        n = _directions([_require(item, "n", list, f"pairs[{i}]")], f"pairs[{i}].n")[0]
        pairs.append(BlochPair(m, n))
    try:
        res = find_entangled_collision(pairs, args.seed, args.restarts, args.separation, _tols(args))
    except CollisionNotFound as exc:
        raise SearchFailed(str(exc)) from None
    return {"format": FORMAT_VERSION, **res.to_json()}


def cmd_bounds(args) -> dict | str:
    if args.table is not None:
        rows = bnd.bounds_table(args.table)
    elif args.dim is not None:
        rows = [bnd.bounds_report(args.dim)]
    else:
        raise FormatError("bounds needs --dim or --table")
    if args.markdown:
        return bnd.markdown_table(rows)
    return {
        "format": FORMAT_VERSION,
        "rows": [r.to_json() for r in rows],
        "f_minimizer": bnd.f_minimizer(),
        "note": "s_branch names the case of the operator-count bound that attains the maximum",
    }


def cmd_counterexample(args) -> dict:
    bases = decode_basis_set(_read_json(args.inp))
    if len(bases) < 2:
        raise FormatError("counterexample needs two bases")
    w = two_basis_counterexample(bases[0], bases[1], _tols(args))
    return {"format": FORMAT_VERSION, **w.to_json(), "overlap": w.overlap}


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pureic", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, io=True):
        if io:
            p.add_argument("--in", dest="inp", default=None, help="input JSON (default stdin)")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--tol-zero", type=float, default=None)
        p.add_argument("--tol-rank", type=float, default=None)

    def search(p, restarts):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--restarts", type=int, default=restarts)

    p = sub.add_parser("certify", help="certify a basis set")
    common(p)
    search(p, 50)
    p.add_argument("--d3", action="store_true", help="exact four-basis test in dimension 3")
    p.set_defaults(func=cmd_certify)

    for name, func, helptext in (
        ("jaming", cmd_jaming, "emit the four polynomial bases"),
        ("simulate", cmd_simulate, "statistics of a state in the four bases"),
    ):
        p = sub.add_parser(name, help=helptext)
        common(p, io=(name == "simulate"))
        if name == "jaming":
            p.add_argument("--dim", type=int, required=True)
        p.add_argument("--family", choices=KINDS, default="hermite")
        p.add_argument("--alpha", type=float, default=1.0)
        p.set_defaults(func=func)

    p = sub.add_parser("reconstruct", help="recover a pure state from its statistics")
    common(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("spin1", help="four-direction spin-1 criterion")
    common(p)
    p.set_defaults(func=cmd_spin1)

    p = sub.add_parser("product-collide", help="indistinguishable entangled pair for product bases")
    common(p)
    search(p, 64)
    p.add_argument("--separation", type=float, default=1e-3)
    p.set_defaults(func=cmd_product_collide)

    p = sub.add_parser("bounds", help="lower bounds on operator and basis counts")
    common(p, io=False)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--table", type=int, default=None, metavar="N", help="rows for d = 2..N")
    p.add_argument("--markdown", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("counterexample", help="indistinguishable pair for two bases")
    common(p)
    p.add_argument("--bases", dest="inp", help="alias of --in")
    p.set_defaults(func=cmd_counterexample)
    return parser


def _emit(result, path: str | None) -> None:
    text = result if isinstance(result, str) else dumps(result)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        result = args.func(args)
    except SearchFailed as exc:
        if exc.payload is not None:
            _emit(exc.payload, args.out)
        print(f"pureic: {exc}", file=sys.stderr)
        return EXIT_SEARCH
    except (FormatError, InconsistentDataError, ValueError, KeyError, IndexError) as exc:
        print(f"pureic: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit(result, args.out)
    return EXIT_OK


def main() -> None:
    sys.exit(run())

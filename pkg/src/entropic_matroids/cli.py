"""Command-line front end.

Exit codes: 0 success / positive verdict, 1 negative verdict or failed check,
2 malformed input (and, for ``entropic``, a search timeout), 3 capability limit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import __version__
from .almost_affine import AffineCode, distribution_to_code
from .catalog import CANONICAL_NAMES, catalog
from .entropy import FiniteDistribution, as_entropic_matroid, entropic_rank, entropy
from .exceptions import CapabilityError, EntropicMatroidError, FormatError
from .matroid import RankTable, check_axioms, has_minor, require_matroid
from .polar import PolarSourceCodec
from .representability import find_representation
from .reproduce import SCHEMA_VERSION, digest, reproduce
from .search import DEFAULT_BUDGET, ENTROPIC, NOT_ENTROPIC, is_p_entropic

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_CAPABILITY = 0, 1, 2, 3


def _read_json(path: str):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(raw), digest(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def _resolve_matroid(ref: str) -> tuple[RankTable, str]:
    """A JSON file path, or a catalog name when no such file exists."""
    if os.path.exists(ref):
        data, dig = _read_json(ref)
        return RankTable.from_json(data), dig
    M = catalog(ref).matroid
    return M, digest(M.to_json())


def _write_json(path: str, data) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _rank_rows(M: RankTable, width: int = 16) -> list[str]:
    vals = [str(int(v)) for v in M.rank]
    return [f"{i:>5}: " + " ".join(vals[i:i + width]) for i in range(0, len(vals), width)]


def _emit(args, payload: dict, text: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(text))


# ---------------------------------------------------------------- verbs


def cmd_axioms(args) -> int:
    data, dig = _read_json(args.file)
    M = RankTable.from_json(data)
    report = check_axioms(M)
    payload = {"valid": report.valid, "axiom": report.axiom, "witness": report.witness, "input": dig}
    _emit(args, payload, ["valid matroid" if report else f"invalid: {report.describe()}"])
    return EXIT_OK if report else EXIT_INPUT


def cmd_catalog(args) -> int:
    names = [args.name] if args.name else list(CANONICAL_NAMES)
    payload, text = [], []
    for name in names:
        entry = catalog(name)
        M = entry.matroid
        item = {"name": entry.name, "provenance": entry.provenance, **M.to_json()}
        text.append(f"{entry.name}: m={M.m}, rank {M.full_rank}; {entry.provenance}")
        if args.name:
            text.append("rank table (index = subset bitmask):")
            text.extend(_rank_rows(M))
        if entry.matrix is not None:
            item["matrix"] = {"p": entry.matrix.p, "rows": entry.matrix.entries.tolist()}
            if args.name:
                text.append(f"representation over F_{entry.matrix.p}:")
                text.append(entry.matrix.format())
        payload.append(item)
    _emit(args, payload[0] if args.name else {"matroids": payload}, text)
    return EXIT_OK


def cmd_minor(args) -> int:
    M, _ = _resolve_matroid(args.matroid)
    N, _ = _resolve_matroid(args.minor)
    require_matroid(M)
    require_matroid(N)
    w = has_minor(M, N)
    payload = {"minor": w is not None}
    if w is None:
        text = ["no minor found"]
    else:
        payload.update(restrict=w.restrict_set, contract=w.contract_set, mapping=list(w.mapping))
        text = [f"minor found: contract {w.contract_set:#x}, keep {w.restrict_set:#x}, mapping {list(w.mapping)}"]
    _emit(args, payload, text)
    return EXIT_OK if w is not None else EXIT_NEGATIVE


def cmd_represent(args) -> int:
    M, _ = _resolve_matroid(args.matroid)
    require_matroid(M)
    res = find_representation(M, args.p)
    payload = {"p": args.p, "representable": bool(res), "nodes": res.nodes}
    if res:
        payload["representation"] = res.representation.to_json()
        text = [f"F_{args.p}-representable ({res.nodes} nodes):", res.representation.matrix().format()]
    else:
        text = [f"not F_{args.p}-representable in dimension {M.full_rank} ({res.nodes} nodes, exhaustive)"]
    _emit(args, payload, text)
    return EXIT_OK if res else EXIT_NEGATIVE


def cmd_entropic(args) -> int:
    M, dig = _resolve_matroid(args.matroid)
    rep = is_p_entropic(M, args.p, args.budget)
    payload = {"input": dig, **rep.to_json()}
    if rep.verdict == ENTROPIC:
        line = f"{args.p}-entropic ({rep.nodes} nodes)"
    elif rep.verdict == NOT_ENTROPIC:
        line = f"not {args.p}-entropic ({rep.nodes} nodes, exhaustive)"
    else:
        line = f"timeout after {rep.nodes} nodes (deepest level {rep.max_depth}/{rep.total_depth})"
    if args.emit_certificate and rep.code is not None:
        _write_json(args.emit_certificate, rep.code.to_json())
    _emit(args, payload, [line])
    return {ENTROPIC: EXIT_OK, NOT_ENTROPIC: EXIT_NEGATIVE}.get(rep.verdict, EXIT_INPUT)


def _load_distribution(data) -> FiniteDistribution:
    if isinstance(data, dict) and "words" in data:
        C = AffineCode.from_json(data)
        return FiniteDistribution.uniform_on(C.words, C.s, C.m)
    return FiniteDistribution.from_json(data)


def cmd_distribution(args) -> int:
    data, dig = _read_json(args.file)
    mu = _load_distribution(data)
    check = as_entropic_matroid(mu)
    h = entropy(mu)
    payload = {
        "input": dig,
        "q": mu.q,
        "m": mu.m,
        "entropy": h.value,
        "entropic_rank": [float(x) for x in entropic_rank(mu)],
        "matroid": check.matroid.to_json() if check else None,
        "reason": None if check else check.reason,
    }
    text = [f"H = {h.value:.12g} (base {mu.q})"]
    text.append("entropic rank is a matroid" if check else f"not an entropic matroid: {check.reason}")
    if check:
        text.extend(_rank_rows(check.matroid))
        if args.emit_code:
            _write_json(args.emit_code, distribution_to_code(mu).to_json())
    _emit(args, payload, text)
    return EXIT_OK if check else EXIT_NEGATIVE


def cmd_polar(args) -> int:
    data, dig = _read_json(args.mu)
    mu = FiniteDistribution.from_json(data)
    if args.m is not None and args.m != mu.m:
        raise FormatError(f"--m {args.m} does not match the distribution (m = {mu.m})")
    codec = PolarSourceCodec(n=args.n, delta=args.delta, eps=args.eps, source=mu).fit()
    report = {"schema_version": SCHEMA_VERSION, "input": dig, **codec.report()}
    if args.report:
        _write_json(args.report, report)
    s = codec.summary_
    text = [
        f"m={mu.m} n={args.n} H(mu)={entropy(mu).value:.6f}",
        f"non-polarized indices at eps={args.eps}: {s.non_polarized}/{args.n} (mean distance {s.mean_distance:.6f})",
        f"stored components: {codec.plan_.to_json()['stored']}",
        f"rate {codec.rate_:.6f}, block error {codec.error_probability_:.6g} (union bound {codec.union_bound_:.6g})",
    ]
    _emit(args, report, text)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    only = args.only or None

    def progress(i, res):
        if not args.json:
            print(f"[{i}] {res.status} {res.title}", file=sys.stderr, flush=True)

    report = reproduce(args.budget, args.seed, command=sys.argv[1:], only=only, progress=progress)
    if args.report:
        _write_json(args.report, report.to_json())
    if args.json:
        print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    else:
        print(report.table())
    if report.ok:
        return EXIT_OK
    if any(r.status == "fail" for r in report.results):
        return EXIT_NEGATIVE
    return EXIT_CAPABILITY


# ---------------------------------------------------------------- parser


def _threads(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("--threads must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--threads", type=_threads, default=1, help="worker count (work runs sequentially)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized corpora")

    parser = argparse.ArgumentParser(prog="entropic-matroids", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("axioms", parents=[common], help="check the rank axioms of a JSON matroid")
    p.add_argument("file")
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("catalog", parents=[common], help="show a named matroid, or list them all")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("minor", parents=[common], help="test whether N is a minor of M")
    p.add_argument("matroid", help="JSON file or catalog name")
    p.add_argument("minor", help="JSON file or catalog name")
    p.set_defaults(func=cmd_minor)

    p = sub.add_parser("represent", parents=[common], help="search for an F_p-representation")
    p.add_argument("--matroid", required=True, help="JSON file or catalog name")
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(func=cmd_represent)

    p = sub.add_parser("entropic", parents=[common], help="decide whether a matroid is p-entropic")
    p.add_argument("--matroid", required=True, help="JSON file or catalog name")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="node budget")
    p.add_argument("--emit-certificate", metavar="FILE", help="write the certifying code as JSON")
    p.set_defaults(func=cmd_entropic)

    p = sub.add_parser("distribution", parents=[common], help="entropic rank of a distribution or code")
    p.add_argument("file", help="distribution JSON or code JSON (uniform on the words)")
    p.add_argument("--emit-code", metavar="FILE", help="write the support as a code when integral")
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("polar", parents=[common], help="exact polarization profile and codec")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mu", required=True, help="distribution JSON on F_2^m")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--report", metavar="FILE")
    p.set_defaults(func=cmd_polar)

    p = sub.add_parser("reproduce-paper", parents=[common], help="run every reference check")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--only", type=int, nargs="+", choices=range(1, 12), metavar="K", help="criterion numbers to run")
    p.add_argument("--report", metavar="FILE")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (EntropicMatroidError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

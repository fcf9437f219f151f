"""Command-line front end.

Every subcommand prints one newline-terminated document (JSON, or CSV for
``chern --format csv``). Results are cached on disk keyed by a hash of the
command, the canonical descriptor, the parameters, the contents of any input
files and the engine version.

Exit codes: 0 success, 2 parse or flag error, 3 validation failure,
4 size bound exceeded, 5 internal invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from pathlib import Path

from . import __version__
from .errors import InputError, NCChernError, ValidationFailure


def cache_dir() -> Path:
    env = os.environ.get("NCCHERN_CACHE")
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "ncchern"


def cache_key(command: str, params: dict) -> str:
    blob = json.dumps({"command": command, "params": params, "version": __version__},
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def cache_get(key: str) -> str | None:
    path = cache_dir() / f"{key}.json"
    try:
        entry = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError):
        return None
    return entry.get("value") if entry.get("key") == key else None


def cache_put(key: str, value: str) -> None:
    d = cache_dir()
    d.mkdir(parents=True, exist_ok=True)
    entry = json.dumps({"key": key, "value": value, "created_at": time.time()})
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(entry)
        os.replace(tmp, d / f"{key}.json")
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _dump(doc) -> str:
    return json.dumps(doc, separators=(",", ":")) + "\n"


def _read_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return text, json.loads(text)
    except ValueError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _algebra(text: str):
    from .descriptor import parse_descriptor
    node = parse_descriptor(text)
    return node, node.build()


def _element(A, doc, path):
    """Element from ``{"k": k, "coords": [...]}``; k > 1 means M_k(A)."""
    from .algebra import amplify
    from .exact import parse_rational
    if not isinstance(doc, dict) or "coords" not in doc:
        raise InputError(f"{path}: expected an object with 'coords'")
    k = int(doc.get("k", 1))
    if k < 1:
        raise InputError(f"{path}: k must be >= 1")
    B = A if k == 1 else amplify(A, k)
    raw = doc["coords"]
    try:
        if isinstance(raw, dict):
            coords = {int(i): parse_rational(v) for i, v in raw.items()}
        else:
            coords = {i: parse_rational(v) for i, v in enumerate(raw)}
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{path}: bad coordinate: {exc}") from None
    if len(raw) and isinstance(raw, list) and len(raw) != B.dim:
        raise InputError(f"{path}: expected {B.dim} coordinates, got {len(raw)}")
    if any(not 0 <= i < B.dim for i in coords):
        raise InputError(f"{path}: coordinate index out of range")
    return B.element(coords), k


# -- subcommands -------------------------------------------------------------------

def cmd_hp(args):
    from .cq import x_complex_homology
    from .cyclic import bicomplex_homology
    node, A = _algebra(args.algebra)
    reports = []
    if args.method in ("bicomplex", "both"):
        reports.append(bicomplex_homology(A, args.cap, max_dim=args.max_dim))
    if args.method in ("xcomplex", "both"):
        reports.append(x_complex_homology(A, args.order, max_dim=args.max_dim))
    if len(reports) == 1:
        return _dump(reports[0].to_dict())
    agree = reports[0].hp == reports[1].hp
    return _dump({"reports": [r.to_dict() for r in reports], "agree": agree})


def cmd_chern(args):
    from .lie import chern_so_odd, chern_su
    if args.group == "su":
        table = chern_su(args.rank)
    else:
        table = chern_so_odd(args.rank, lambda_rows=args.lambda_rows)
    if args.format == "csv":
        return table.to_csv()
    return table.to_json() + "\n"


def cmd_lift(args):
    from .cq import lift_idempotent
    node, A = _algebra(args.algebra)
    _, doc = _read_json(args.idempotent)
    e, k = _element(A, doc, args.idempotent)
    lifted = lift_idempotent(e, args.order)
    # lift_idempotent has verified e o e - e = 0 below degree 2m + 2
    return _dump({"algebra": str(node), "k": k, "order": args.order,
                  "lift": json.loads(lifted.to_json()), "idempotent_mod_ideal": True})


def cmd_pair(args):
    from .cyclic import CochainFunctional, pair_idempotent
    from .exact import format_rational
    node, A = _algebra(args.algebra)
    ctext, _ = _read_json(args.cocycle)
    phi = CochainFunctional.from_json(A, ctext)
    _, doc = _read_json(args.idempotent)
    e, k = _element(A, doc, args.idempotent)
    value = pair_idempotent(e, phi)
    return _dump({"algebra": str(node), "degree": phi.degree, "k": k,
                  "pairing": format_rational(value)})


def cmd_validate_trace(args):
    from .algebra import TraceFunctional, validate_trace
    node, A = _algebra(args.algebra)
    text, _ = _read_json(args.trace)
    tau = TraceFunctional.from_json(text)
    if len(tau.coords) != A.dim:
        raise InputError(f"trace has {len(tau.coords)} values, algebra dimension is {A.dim}")
    report = validate_trace(A, tau)
    out = _dump({"algebra": str(node), **report.to_dict()})
    if not report.ok:
        raise _Reported(out, ValidationFailure("trace axioms fail"))
    return out


def cmd_irreps(args):
    from .descriptor import parse_group
    from .lie import irrep_dims
    G = parse_group(args.group).descriptor()
    if args.count < 1:
        raise InputError("--count must be >= 1")
    dims = irrep_dims(G, args.count)
    return _dump({"group": str(G),
                  "irreps": [{"highest_weight": list(w), "dim": d} for w, d in dims]})


class _Reported(Exception):
    """Output to print before exiting with the wrapped error's code."""

    def __init__(self, output: str, error: NCChernError):
        super().__init__(str(error))
        self.output, self.error = output, error


def _params(args) -> dict:
    """Canonical cache parameters: descriptors normalised, files by content."""
    from .descriptor import parse_descriptor
    skip = {"func", "out", "no_cache", "command"}
    params = {}
    for name, value in sorted(vars(args).items()):
        if name in skip:
            continue
        if name == "algebra":
            value = str(parse_descriptor(value))
        elif name in ("idempotent", "cocycle", "trace"):
            text, _ = _read_json(value)
            value = hashlib.sha256(text.encode()).hexdigest()
        params[name] = value
    return params


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ncchern", description="Exact cyclic homology and Chern character tables.")
    ap.add_argument("--version", action="version", version=f"ncchern {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="also write the output to this file")
        p.add_argument("--no-cache", action="store_true", help="neither read nor write the result cache")

    p = sub.add_parser("hp", help="Hochschild, cyclic and periodic cyclic homology")
    p.add_argument("--algebra", required=True)
    p.add_argument("--cap", type=int, default=4, help="top bicomplex degree")
    p.add_argument("--method", choices=["bicomplex", "xcomplex", "both"], default="bicomplex")
    p.add_argument("--order", type=int, default=1, help="adic order m for the X-complex")
    p.add_argument("--max-dim", type=int, default=200_000)
    p.set_defaults(func=cmd_hp)
    common(p)

    p = sub.add_parser("chern", help="Chern character coefficient table")
    p.add_argument("--group", choices=["su", "so"], required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--lambda-rows", choices=["n-1", "n"], default="n-1")
    p.set_defaults(func=cmd_chern)
    common(p)

    p = sub.add_parser("lift", help="lift an idempotent through the adic tower")
    p.add_argument("--algebra", required=True)
    p.add_argument("--idempotent", required=True)
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(func=cmd_lift)
    common(p)

    p = sub.add_parser("pair", help="pair a cyclic cocycle with an idempotent")
    p.add_argument("--algebra", required=True)
    p.add_argument("--cocycle", required=True)
    p.add_argument("--idempotent", required=True)
    p.set_defaults(func=cmd_pair)
    common(p)

    p = sub.add_parser("validate-trace", help="check the trace axioms")
    p.add_argument("--algebra", required=True)
    p.add_argument("--trace", required=True)
    p.set_defaults(func=cmd_validate_trace)
    common(p)

    p = sub.add_parser("irreps", help="first irreducible representations by dimension")
    p.add_argument("--group", required=True)
    p.add_argument("--count", type=int, required=True)
    p.set_defaults(func=cmd_irreps)
    common(p)
    return ap


def _emit(output: str, args):
    sys.stdout.write(output)
    sys.stdout.flush()
    if args.out:
        Path(args.out).write_text(output, encoding="utf-8")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        key = None
        if not args.no_cache:
            key = cache_key(args.command, _params(args))
            hit = cache_get(key)
            if hit is not None:
                _emit(hit, args)
                return 0
        output = args.func(args)
        if key is not None:
            cache_put(key, output)
        _emit(output, args)
        return 0
    except _Reported as rep:
        _emit(rep.output, args)
        print(f"ncchern: {rep.error}", file=sys.stderr)
        return rep.error.exit_code
    except NCChernError as exc:
        print(f"ncchern: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


def run(argv=None) -> int:
    """Entry point that never raises SystemExit for argument errors."""
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

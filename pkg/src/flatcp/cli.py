"""Command-line front end.

Every command prints one JSON report on stdout::

    {"command": [...], "input_digest": "sha256:...", "result": {...}}

Exact values are literal strings such as ``"-1/2+1/2*sqrt(17)"``.  With
``--approx DIGITS`` a companion ``"approx"`` object mirrors the result with
decimal approximations.  Diagnostics go to stderr.

Exit codes: ``0`` success (and ``CP`` for ``involution decide``), ``1`` for a
negative verdict (``NotCP``, a failed eigenform check), ``2`` for
``Inconclusive`` and for input or domain errors.

Inputs for ``perm`` and ``involution`` commands are either inline text
(``"A B / B A"`` with ``--lengths "A=1,B=sqrt(5)"``) or a file containing
that text or the JSON form ``{"perm": ..., "lengths": {...}}``.  Surface
inputs are JSON files as written by ``prototype`` or ``suspend``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Sequence

from .exactnum import FieldMismatch, KNum, parse_knum
from .flatsurf import (
    EndoMatrix,
    FlatSurface,
    PrototypeParams,
    PrymStructure,
    checkEigenform,
    complexFlux,
    fluxForm,
    homologyBasis,
    identities_for,
    commensurability,
    kernelMove,
    omega_wedge_conj,
    orientationDoubleCover,
    prototypeP112,
    safDirection,
    strataTable,
)
from .flatsurf.cover import euler_characteristic, minus_rank
from .flatsurf.strata import NotInTable
from .involutions import (
    GenPerm,
    InvolutionError,
    LinearInvolution,
    decideCompletePeriodicity,
    galoisFlux,
    inverseRauzySing,
    irreducible,
    rauzy,
    saf,
)
from .suspension import findSuspensionData, generic_lengths, suspend

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_NEGATIVE, EXIT_INCONCLUSIVE = 0, 1, 2


class CliError(Exception):
    """Bad input; reported on stderr with exit code 2."""


# -- input handling -------------------------------------------------------------


def _read_source(source: str) -> tuple[str, str]:
    """Return ``(text, origin)`` where ``source`` is a path or inline text."""
    path = Path(source)
    if "/" not in source.strip() or path.is_file():
        try:
            return path.read_text(encoding="utf-8"), str(path)
        except OSError as exc:
            if "/" not in source:
                raise CliError(f"cannot read {source}: {exc.strerror}") from exc
    return source, "<inline>"


def _parse_json(text: str, origin: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{origin}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _parse_perm_text(text: str, origin: str) -> GenPerm:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    body = " ".join(lines)
    if body.count("/") != 1:
        if len(lines) == 2 and "/" not in body:
            body = f"{lines[0]} / {lines[1]}"
        else:
            col = body.find("/", body.find("/") + 1) + 1 if body.count("/") > 1 else len(body) + 1
            raise CliError(f"{origin}: line 1, column {col}: expected one '/' between the two rows")
    try:
        return GenPerm.parse(body)
    except (InvolutionError, ValueError) as exc:
        raise CliError(f"{origin}: {exc}") from exc


def _parse_lengths(text: str | None) -> dict[str, str] | None:
    if not text:
        return None
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise CliError(f"--lengths: expected SYMBOL=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _load_perm(source: str) -> tuple[GenPerm, dict | None, str]:
    text, origin = _read_source(source)
    if text.lstrip().startswith("{"):
        obj = _parse_json(text, origin)
        return _parse_perm_text(obj["perm"], origin), obj.get("lengths"), text
    return _parse_perm_text(text, origin), None, text


def _load_involution(source: str, lengths: str | None) -> tuple[LinearInvolution, str]:
    g, file_lengths, text = _load_perm(source)
    lens = _parse_lengths(lengths) or file_lengths
    if lens is None:
        raise CliError("lengths are required (use --lengths or a JSON input)")
    return LinearInvolution(g, lens), text + json.dumps(lens, sort_keys=True)


def _load_surface(source: str) -> tuple[FlatSurface, dict, str]:
    text, origin = _read_source(source)
    obj = _parse_json(text, origin)
    surf = obj.get("surface", obj)
    return FlatSurface.from_json(surf), obj, text


def _parse_vec(text: str, f: int) -> tuple[KNum, KNum]:
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    parts = _split_top_level(body)
    if len(parts) != 2:
        raise CliError(f"expected a vector '(s,t)', got {text!r}")
    return parse_knum(parts[0], f), parse_knum(parts[1], f)


def _split_top_level(body: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in body:
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    parts.append(cur)
    return [p.strip() for p in parts]


def _parse_direction(text: str, f: int):
    if text.strip() in ("inf", "oo", "infinity"):
        return "inf"
    if ":" in text:
        p, q = text.split(":", 1)
        return (parse_knum(p, f), parse_knum(q, f))
    return parse_knum(text, f)


# -- reports --------------------------------------------------------------------


def _approx(value: Any, digits: int) -> Any:
    if isinstance(value, dict):
        return {k: _approx(v, digits) for k, v in value.items()}
    if isinstance(value, list):
        return [_approx(v, digits) for v in value]
    if isinstance(value, str):
        try:
            return parse_knum(value).approx(digits)
        except (ValueError, SyntaxError, FieldMismatch, ZeroDivisionError):
            return value
    return value


def _emit(args: argparse.Namespace, digest_src: str, result: Any) -> None:
    report = {
        "command": [args.group] + ([args.action] if getattr(args, "action", None) else []),
        "input_digest": "sha256:" + hashlib.sha256(digest_src.encode("utf-8")).hexdigest(),
        "result": result,
    }
    if args.approx:
        report["approx"] = _approx(result, args.approx)
    sys.stdout.write(json.dumps(report, sort_keys=True, ensure_ascii=False, indent=2) + "\n")


def _map(func: Callable, items: Sequence, jobs: int) -> list:
    """Apply ``func`` to ``items``, in worker processes when ``jobs > 1``;
    results keep the input order."""
    if jobs <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


# -- commands -------------------------------------------------------------------


def cmd_perm(args: argparse.Namespace) -> int:
    if args.action == "irreducible":
        g, _, text = _load_perm(args.source)
        _emit(args, text, {"perm": str(g), "irreducible": irreducible(g)})
    elif args.action == "rauzy":
        T, text = _load_involution(args.source, args.lengths)
        steps = []
        for _ in range(args.steps):
            T2, step = rauzy(T)
            steps.append(step.to_json())
            if args.trace:
                print(f"{step.kind}: winner {step.winner}, loser {step.loser} -> {T2.perm}", file=sys.stderr)
            T = T2
        out: dict = {"result": T.to_json()}
        if args.trace:
            out["steps"] = steps
        _emit(args, text + str(args.steps), out)
    elif args.action == "inverse-sing":
        g, _, text = _load_perm(args.source)
        pre = inverseRauzySing(g, args.letter)
        _emit(args, text + args.letter, {"perm": str(g), "count": len(pre), "preimages": [str(p) for p in pre]})
    return EXIT_OK


def cmd_involution(args: argparse.Namespace) -> int:
    T, text = _load_involution(args.source, args.lengths)
    if args.action == "saf":
        _emit(args, text, {"saf": str(saf(T))})
        return EXIT_OK
    if args.action == "flux":
        _emit(args, text, {"flux": str(galoisFlux(T))})
        return EXIT_OK
    verdict = decideCompletePeriodicity(T, args.budget)
    _emit(args, text + str(args.budget), verdict.to_json())
    return {"CP": EXIT_OK, "NotCP": EXIT_NEGATIVE}.get(verdict.kind, EXIT_INCONCLUSIVE)


def _saf_job(job):
    surface_json, slope = job
    S = FlatSurface.from_json(surface_json)
    return str(safDirection(S, _parse_direction(slope, S.f)))


def _cylinder_job(job):
    surface_json, direction, budget = job
    S = FlatSurface.from_json(surface_json)
    d = _parse_direction(direction, S.f)
    if d == "inf":
        d = (0, 1)
    elif not isinstance(d, tuple):
        d = (1, d)
    decomp, ident = identities_for(S, d, budget)
    out = decomp.to_json()
    out["identities"] = ident.to_json()
    out["commensurability"] = commensurability(decomp).to_json()
    return out


def cmd_surface(args: argparse.Namespace) -> int:
    S, obj, text = _load_surface(args.source)
    surf_json = obj.get("surface", obj)
    if args.action == "saf":
        slopes = args.slope or ["inf"]
        vals = _map(_saf_job, [(surf_json, s) for s in slopes], args.jobs)
        _emit(args, text + ",".join(slopes), {"saf": [{"slope": s, "value": v} for s, v in zip(slopes, vals)]})
        return EXIT_OK
    if args.action == "cylinders":
        dirs = args.dir or ["0:1"]
        res = _map(_cylinder_job, [(surf_json, d, args.budget) for d in dirs], args.jobs)
        _emit(args, text + ",".join(dirs) + str(args.budget), {"directions": [{"dir": d, **r} for d, r in zip(dirs, res)]})
        return EXIT_OK
    if args.action == "flux":
        B = homologyBasis(S)
        out = {
            "omega_wedge_omega_prime": str(omega_wedge_conj(S, B)),
            "fluxForm_re": str(fluxForm(S, B, "re")),
            "fluxForm_im": str(fluxForm(S, B, "im")),
        }
        try:
            out["complexFlux"] = str(complexFlux(S, B))
        except ValueError as exc:
            out["complexFlux"] = None
            out["precheck"] = str(exc)
        _emit(args, text, out)
        return EXIT_OK
    if args.action == "eigencheck":
        if "prym" not in obj or "T" not in obj:
            raise CliError("eigencheck needs a prototype bundle with 'prym', 'T' and 'D'")
        prym = _prym_from_json(obj["prym"])
        rep = checkEigenform(S, prym, EndoMatrix(tuple(tuple(r) for r in obj["T"])), int(obj["D"]))
        _emit(args, text, rep.to_json())
        return EXIT_OK if rep.passed else EXIT_NEGATIVE
    if args.action == "kernel-move":
        if S.template is None and "templates" not in surf_json:
            raise CliError("kernel-move needs a surface with a registered template")
        moved = kernelMove(S, _parse_vec(args.v, S.f))
        _emit(args, text + args.v, {"surface": moved.to_json(), "stratum": moved.stratum_name()})
        return EXIT_OK
    if args.action == "double-cover":
        X, deck = orientationDoubleCover(S)
        out = {
            "base_stratum": S.stratum_name(),
            "cover_stratum": X.stratum_name(),
            "cover_genus": X.genus,
            "euler_characteristic": euler_characteristic(X),
            "minus_rank": minus_rank(X, deck),
            "surface": X.to_json(),
        }
        try:
            out["table_row"] = strataTable(S.stratum_name()).to_json()
        except NotInTable:
            out["table_row"] = None
        _emit(args, text, out)
        return EXIT_OK
    raise CliError(f"unknown surface action {args.action}")


def _prym_from_json(obj: dict) -> PrymStructure:
    inv = {tuple(a): tuple(b) for a, b in obj["involution"]}
    basis = {k: {(int(p), int(e)): c for p, e, c in v} for k, v in obj["minusBasis"]}
    fixed = tuple(tuple(p) if isinstance(p, list) else p for p in obj["fixedPoints"])
    return PrymStructure(inv, fixed, basis, tuple(tuple(r) for r in obj["intersectionMatrix"]))


def cmd_prototype(args: argparse.Namespace) -> int:
    params = PrototypeParams(args.w, args.h, args.e, args.t)
    S, prym, T = prototypeP112(params)
    bundle = {
        "params": params.to_json(),
        "D": params.D,
        "surface": S.to_json(),
        "stratum": S.stratum_name(),
        "prym": prym.to_json(),
        "T": T.to_json(),
    }
    if args.out:
        Path(args.out).write_text(json.dumps(bundle, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    _emit(args, json.dumps(params.to_json(), sort_keys=True), bundle)
    return EXIT_OK


def cmd_suspend(args: argparse.Namespace) -> int:
    g, file_lengths, text = _load_perm(args.permfile)
    lens = _parse_lengths(args.lengths) or file_lengths or {s: str(v) for s, v in generic_lengths(g).items()}
    data = findSuspensionData(g, lens)
    S = suspend(g, lens, data)
    out = {"data": data.to_json(), "stratum": S.stratum_name(), "surface": S.to_json()}
    if args.out:
        Path(args.out).write_text(json.dumps(S.to_json(), sort_keys=True, indent=2) + "\n", encoding="utf-8")
    _emit(args, text + json.dumps(lens, sort_keys=True), out)
    return EXIT_OK


def cmd_strata(args: argparse.Namespace) -> int:
    _emit(args, args.name, strataTable(args.name).to_json())
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--approx", type=int, metavar="DIGITS", default=None, help="add decimal approximations")
    common.add_argument("--timing", action="store_true", help="print the elapsed time on stderr")

    parser = argparse.ArgumentParser(prog="flatcp", description=__doc__.split("\n\n")[0], parents=[common])
    sub = parser.add_subparsers(dest="group", required=True)

    perm = sub.add_parser("perm", help="generalized permutations", parents=[common])
    perm_sub = perm.add_subparsers(dest="action", required=True)
    p = perm_sub.add_parser("irreducible", parents=[common])
    p.add_argument("source", help="permutation text or file")
    p = perm_sub.add_parser("rauzy", parents=[common])
    p.add_argument("source")
    p.add_argument("--lengths")
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--trace", action="store_true")
    p = perm_sub.add_parser("inverse-sing", parents=[common])
    p.add_argument("source")
    p.add_argument("--letter", default="α")

    inv = sub.add_parser("involution", help="linear involutions", parents=[common])
    inv_sub = inv.add_subparsers(dest="action", required=True)
    for name in ("saf", "decide", "flux"):
        p = inv_sub.add_parser(name, parents=[common])
        p.add_argument("source")
        p.add_argument("--lengths")
        if name == "decide":
            p.add_argument("--budget", type=int, default=10_000)

    surf = sub.add_parser("surface", help="flat surfaces", parents=[common])
    surf_sub = surf.add_subparsers(dest="action", required=True)
    p = surf_sub.add_parser("saf", parents=[common])
    p.add_argument("source")
    p.add_argument("--slope", action="append", help="slope in K or 'inf'; repeatable")
    p.add_argument("--jobs", type=int, default=1)
    p = surf_sub.add_parser("cylinders", parents=[common])
    p.add_argument("source")
    p.add_argument("--dir", action="append", help="direction 'p:q'; repeatable")
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--jobs", type=int, default=1)
    for name in ("flux", "eigencheck", "double-cover"):
        p = surf_sub.add_parser(name, parents=[common])
        p.add_argument("source")
    p = surf_sub.add_parser("kernel-move", parents=[common])
    p.add_argument("source")
    p.add_argument("--v", required=True, help="move vector '(s,t)'")

    p = sub.add_parser("prototype", help="prototype surface in H(1,1,2)", parents=[common])
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--t", required=True, help="parameter t in Q(sqrt D)")
    p.add_argument("--out", help="also write the bundle to this file")

    p = sub.add_parser("suspend", help="suspend a generalized permutation", parents=[common])
    p.add_argument("permfile")
    p.add_argument("--lengths")
    p.add_argument("--out", help="also write the surface JSON to this file")

    p = sub.add_parser("strata", help="look up a row of the strata table", parents=[common])
    p.add_argument("name")
    return parser


_COMMANDS = {
    "perm": cmd_perm,
    "involution": cmd_involution,
    "surface": cmd_surface,
    "prototype": cmd_prototype,
    "suspend": cmd_suspend,
    "strata": cmd_strata,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        code = _COMMANDS[args.group](args)
    except (CliError, ValueError, KeyError, SyntaxError, ZeroDivisionError) as exc:
        print(f"flatcp: error: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    if args.timing:
        print(f"flatcp: {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line entry point.

Every command reads JSON files, checks them against the bundled schema,
runs one domain operation and prints (or writes with ``--out``) a JSON
report with sorted keys.  Exit status: 0 on success, 1 on a domain error,
2 on malformed input.  ``PANACHE_THREADS`` caps the worker count of the
oracle census.
"""

from __future__ import annotations

import argparse
import random
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from . import blended, extmod, genext, motivic, mtdemo, oracle
from .exactla import LinAlgError
from .repcat import ModelError, RepMorphism, WeightedRep, pure
from .serialize import (Loader, MalformedInput, blend_json, check_schema, dumps, ext_json, genext_blocks_json,
                        genext_diagram_json, morphism_json, object_json, parse_matrix, read_json,
                        reduced_ext_json)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_MALFORMED = 2


@dataclass
class RunConfig:
    command: str
    args: argparse.Namespace
    seed: int
    out: Optional[Path]
    verbosity: int


def _load(path, kind: str):
    return Loader().load(Path(path), kind)


def _detect_kind(doc) -> str:
    if isinstance(doc, dict) and "cocycle" in doc or isinstance(doc, dict) and {"of", "by"} <= set(doc):
        return "extClass"
    if isinstance(doc, dict) and "form" in doc:
        return "genext"
    return "object"


def _rng(cfg: RunConfig) -> random.Random:
    return random.Random(cfg.seed)


# ---------------------------------------------------------------------------
# commands

def cmd_validate(cfg: RunConfig) -> dict:
    doc = read_json(cfg.args.file)
    kind = cfg.args.kind or _detect_kind(doc)
    value = _load(cfg.args.file, kind)
    if kind == "object":
        return {"kind": kind, "valid": True, "input": object_json(value), "dim": value.dim}
    if kind == "extClass":
        return {"kind": kind, "valid": True, "input": ext_json(value), "coords": _coords(value)}
    genext.validate_genext(value)
    return {"kind": kind, "valid": True, "input": genext_diagram_json(value), "level": value.level}


def _coords(e) -> List[str]:
    return [e.field.fmt(c) for c in e.coords]


def cmd_ext1(cfg: RunConfig) -> dict:
    m = _load(cfg.args.of, "object")
    n = _load(cfg.args.by, "object")
    if m.signature != n.signature:
        raise ModelError("signature mismatch")
    dim, basis = extmod.ext1_space(m, n)
    return {"inputs": {"of": object_json(m), "by": object_json(n)}, "dim": dim,
            "basis": [reduced_ext_json(e)["cocycle"] for e in basis]}


def cmd_baer(cfg: RunConfig) -> dict:
    e1 = _load(cfg.args.first, "extClass")
    e2 = _load(cfg.args.second, "extClass")
    s = extmod.baer_sum(e1, e2)
    return {"inputs": [ext_json(e1), ext_json(e2)], "sum": reduced_ext_json(s), "coords": _coords(s)}


def cmd_push(cfg: RunConfig) -> dict:
    e = _load(cfg.args.ext, "extClass")
    f = _load(cfg.args.map, "morphism")
    out = extmod.pushforward(e, f)
    return {"inputs": {"ext": ext_json(e), "map": morphism_json(f)}, "result": reduced_ext_json(out),
            "coords": _coords(out)}


def cmd_pull(cfg: RunConfig) -> dict:
    e = _load(cfg.args.ext, "extClass")
    g = _load(cfg.args.map, "morphism")
    out = extmod.pullback(e, g)
    return {"inputs": {"ext": ext_json(e), "map": morphism_json(g)}, "result": reduced_ext_json(out),
            "coords": _coords(out)}


def cmd_is_split(cfg: RunConfig) -> dict:
    e = _load(cfg.args.ext, "extClass")
    return {"input": ext_json(e), "split": e.is_split()}


def cmd_transfer(cfg: RunConfig) -> dict:
    e = _load(cfg.args.ext, "extClass")
    t = extmod.transfer_unit(e)
    back = extmod.transfer_inverse(t, e.of, e.by)
    if back != e:
        raise AssertionError("transfer does not invert")
    return {"input": ext_json(e), "transferred": reduced_ext_json(t), "coords": _coords(t)}


def cmd_blend(cfg: RunConfig) -> dict:
    l = _load(cfg.args.L, "extClass")
    n = _load(cfg.args.N, "extClass")
    b = blended.make_blend(extmod.realize(l), extmod.realize(n))
    report = {"inputs": {"L": ext_json(l), "N": ext_json(n)}}
    if cfg.args.translate:
        e = _load(cfg.args.translate, "extClass")
        report["inputs"]["translate"] = ext_json(e)
        b = blended.translate(e, b, cfg.args.construction)
    b.validate()
    report["blend"] = blend_json(b)
    report["second_row"] = reduced_ext_json(blended.second_row(b))
    report["corner_class"] = _coords(blended.corner_class(b))
    report["aut_dim"] = blended.aut_blend(b).dim
    return report


def cmd_genext(cfg: RunConfig) -> dict:
    a = cfg.args
    g = _load(a.file, "genext")
    genext.validate_genext(g)
    sub = a.sub
    inputs = {"genext": genext_diagram_json(g)}
    if sub == "validate":
        norm = genext.normalize(g)
        return {"inputs": inputs, "valid": True, "normal_form": genext_blocks_json(g, norm.blocks)}
    if sub == "truncate":
        t = genext.truncate(g)
        return {"inputs": inputs, "result": genext_diagram_json(t)}
    if sub == "crop":
        c = genext.crop(g, a.i, a.j)
        return {"inputs": inputs, "result": genext_diagram_json(c)}
    if sub == "equiv":
        if not a.other:
            raise MalformedInput("equiv needs --other")
        h = _load(a.other, "genext")
        genext.validate_genext(h)
        inputs["other"] = genext_diagram_json(h)
        fam = genext.equiv(g, h, a.mode, _rng(cfg))
        out = {"inputs": inputs, "mode": a.mode, "equivalent": fam is not None}
        if fam is not None:
            out["family"] = {f"{m},{n}": f.matrix.to_json() for (m, n), f in sorted(fam.items())}
        return out
    if sub == "act":
        if not a.sigma:
            raise MalformedInput("act needs --sigma")
        doc = read_json(a.sigma)
        check_schema(doc, "frameMaps", a.sigma)
        if len(doc["maps"]) != g.k:
            raise ModelError("one automorphism per frame piece is required")
        sigma = [parse_matrix(g.field, m, part.dim, part.dim, f"sigma[{r}]")
                 for r, (m, part) in enumerate(zip(doc["maps"], g.frame.parts))]
        moved = genext.act_autA(sigma, g)
        genext.validate_genext(moved)
        return {"inputs": inputs, "result": genext_blocks_json(moved, genext.normalize(moved).blocks)}
    if sub == "fiber":
        fd = genext.FiberDescriptor(g)
        out = {"inputs": inputs, "level": fd.level, "group_dims": fd.dims, "group_dim": fd.group_dim,
               "group_order": fd.group_order(),
               "factors": [{"of": object_json(m), "by": object_json(n)} for m, n in fd.factors]}
        if a.classes:
            doc = read_json(a.classes)
            check_schema(doc, "classList", a.classes)
            if len(doc["classes"]) != len(fd.factors):
                raise ModelError("one coordinate list per fiber factor is required")
            classes = [extmod.ExtClass.from_coords(m, n, [g.field(c) for c in cs])
                       for (m, n), cs in zip(fd.factors, doc["classes"])]
            member = fd.lift(classes)
            out["member"] = genext_diagram_json(member)
            out["member_coords"] = [_coords(e) for e in fd.coords(member)]
        return out
    if sub == "transport":
        if not a.family:
            raise MalformedInput("transport needs --family")
        doc = read_json(a.family)
        check_schema(doc, "family", a.family)
        fam = {}
        for key, mat in doc["maps"].items():
            m, n = (int(v) for v in key.split(","))
            if (m, n) not in g.objects or n - m > g.level:
                raise ModelError(f"family entry {key} is not part of the base")
            x = g.x(m, n)
            mm = parse_matrix(g.field, mat, x.dim, x.dim, f"family {key}")
            if not mm.is_invertible():
                raise ModelError(f"family entry {key} is not invertible")
            inv = mm.inverse()
            y = WeightedRep(x.signature, dict(x.support), tuple(mm @ op @ inv for op in x.operators))
            fam[(m, n)] = RepMorphism(x, y, mm)
        for r in range(1, g.k + 1):
            fam.setdefault((r - 1, r), RepMorphism.identity(g.frame.a(r)))
        t = genext.transport(g, fam)
        genext.validate_genext(t)
        return {"inputs": inputs, "result": genext_diagram_json(t)}
    raise MalformedInput(f"unknown genext subcommand {sub!r}")


def cmd_nonsplit(cfg: RunConfig) -> dict:
    e = _load(cfg.args.ext, "extClass")
    return {"input": ext_json(e), "split": e.is_split(), "totally_nonsplit": motivic.totally_nonsplit(e)}


def _object_or_top(path) -> WeightedRep:
    doc = read_json(path)
    if _detect_kind(doc) == "genext":
        return genext.realize_object(_load(path, "genext"))
    return _load(path, "object")


def cmd_uradical(cfg: RunConfig) -> dict:
    x = _object_or_top(cfg.args.file)
    u = motivic.u_radical(x)
    return {"input": object_json(x), "dim": u.dim, "w_minus1_end_dim": motivic.w_minus1_end_dim(x),
            "closure_steps": u.steps, "basis": [m.to_json() for m in u.matrices()],
            "bracket_closed": u.is_bracket_closed(), "degree_negative": u.is_degree_negative()}


def cmd_maximal(cfg: RunConfig) -> dict:
    x = _object_or_top(cfg.args.file)
    out = {"input": object_json(x), "maximal": motivic.is_maximal(x)}
    if x.field.is_rational and len(x.support) >= 2 and motivic.graded_independent(x):
        crit, adj = motivic.maximality_criterion(x)
        out["adjacent_totally_nonsplit"] = adj
        out["criterion_agrees"] = crit == all(adj)
    return out


def cmd_graded_independent(cfg: RunConfig) -> dict:
    doc = read_json(cfg.args.file)
    if isinstance(doc, list) or isinstance(doc, dict) and "frame" in doc and "form" not in doc:
        frame = _load(cfg.args.file, "frame")
    elif isinstance(doc, dict) and "form" in doc:
        frame = _load(cfg.args.file, "genext").frame
    else:
        x = _load(cfg.args.file, "object")
        frame = genext.GradedFrame([pure(x.signature, d, k) for d, k in x.support])
    return {"weights": list(frame.weights), "graded_independent": motivic.graded_independent(frame),
            "arithmetic": motivic.graded_independence_arithmetic(frame.weights)}


def cmd_classify_star(cfg: RunConfig) -> dict:
    a = cfg.args
    frame = _load(a.frame, "frame")
    pick = _load(a.pick, "genext") if a.pick else None
    rep = motivic.classify_star(frame, a.level, pick)
    out = {
        "weights": list(frame.weights),
        "level": rep.level,
        "graded_independent": rep.graded_independent,
        "empty": rep.empty,
        "factors": [{"r": f.r, "ext_dim": f.ext_dim, "hom_dim": f.hom_dim, "nonempty": f.nonempty,
                     "orbit_space": f.orbit_space,
                     "basis": [reduced_ext_json(e)["cocycle"] for e in f.basis]} for f in rep.factors],
    }
    if rep.fiber is not None:
        out["fiber_dims"] = rep.fiber_dims
        out["fiber_dim"] = rep.fiber_dim
        out["pick_totally_nonsplit"] = rep.pick_totally_nonsplit
    return out


def cmd_mt_demo(cfg: RunConfig) -> dict:
    a = cfg.args
    return mtdemo.four_weight_pipeline(a.a, a.c, _label(a.label), a.cutoff)


def _label(s: str):
    try:
        return int(s)
    except ValueError:
        return s


def _int_list(s: str) -> tuple:
    try:
        return tuple(int(v) for v in s.split(",") if v.strip())
    except ValueError:
        raise MalformedInput(f"expected a comma-separated list of integers, got {s!r}")


def cmd_oracle(cfg: RunConfig) -> dict:
    a = cfg.args
    if a.quantifier:
        return oracle.subobject_quantifier_check()
    weights = _int_list(a.weights)
    if a.k is not None and a.k != len(weights):
        raise ModelError(f"--k {a.k} does not match {len(weights)} weights")
    levels = None
    if a.levels:
        try:
            lo, hi = (int(v) for v in a.levels.split(".."))
        except ValueError:
            raise MalformedInput(f"levels must look like 1..2, got {a.levels!r}")
        levels = (lo, hi)
    census = oracle.CensusConfig(a.p, weights, _int_list(a.gens), levels)
    return oracle.enumerate_and_verify(census)


COMMANDS = {
    "validate": cmd_validate,
    "ext1": cmd_ext1,
    "baer": cmd_baer,
    "push": cmd_push,
    "pull": cmd_pull,
    "is-split": cmd_is_split,
    "transfer": cmd_transfer,
    "blend": cmd_blend,
    "genext": cmd_genext,
    "nonsplit": cmd_nonsplit,
    "uradical": cmd_uradical,
    "maximal": cmd_maximal,
    "graded-independent": cmd_graded_independent,
    "classify-star": cmd_classify_star,
    "mt-demo": cmd_mt_demo,
    "oracle": cmd_oracle,
}


class _Parser(argparse.ArgumentParser):
    """Argument errors exit with the malformed-input status."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_MALFORMED)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="run seed (64-bit), recorded in the report")
    common.add_argument("--out", type=Path, help="write the report here instead of stdout")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = _Parser(prog="panache", description="Extensions, blends and generalized extensions of graded representations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", parents=[common], help="validate an object, class or generalized extension")
    s.add_argument("file")
    s.add_argument("--kind", choices=["object", "extClass", "genext"])

    s = sub.add_parser("ext1", parents=[common], help="dimension and basis of Ext¹(of, by)")
    s.add_argument("--of", required=True)
    s.add_argument("--by", required=True)

    s = sub.add_parser("baer", parents=[common], help="Baer sum of two classes")
    s.add_argument("first")
    s.add_argument("second")

    for name, helptext in (("push", "pushforward along a map of subobjects"),
                           ("pull", "pullback along a map of quotients")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("ext")
        s.add_argument("--map", required=True)

    for name, helptext in (("is-split", "whether a class splits"),
                           ("transfer", "transfer to an extension of the unit"),
                           ("nonsplit", "total nonsplitting test")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("ext")

    s = sub.add_parser("blend", parents=[common], help="canonical blend of two extensions, optionally translated")
    s.add_argument("--L", required=True)
    s.add_argument("--N", required=True)
    s.add_argument("--translate")
    s.add_argument("--construction", choices=["row", "column"], default="row")

    s = sub.add_parser("genext", parents=[common], help="generalized extension operations")
    s.add_argument("sub", choices=["validate", "truncate", "crop", "equiv", "act", "fiber", "transport"])
    s.add_argument("file")
    s.add_argument("--other")
    s.add_argument("--mode", choices=["strict", "iso"], default="strict")
    s.add_argument("--i", type=int, default=0)
    s.add_argument("--j", type=int)
    s.add_argument("--sigma")
    s.add_argument("--classes")
    s.add_argument("--family")

    for name, helptext in (("uradical", "unipotent radical of an object"),
                           ("maximal", "maximality of the unipotent radical"),
                           ("graded-independent", "graded independence of a frame or object")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("file")

    s = sub.add_parser("classify-star", parents=[common], help="totally nonsplit classes of a level")
    s.add_argument("--frame", required=True)
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--pick")

    s = sub.add_parser("mt-demo", parents=[common], help="four-weight mixed Tate example")
    s.add_argument("--a", type=int, default=3)
    s.add_argument("--c", type=int, default=5)
    s.add_argument("--label", default="2")
    s.add_argument("--cutoff", type=int, default=mtdemo.DEFAULT_CUTOFF)

    s = sub.add_parser("oracle", parents=[common], help="exhaustive census over a prime field")
    s.add_argument("--p", type=int, default=2)
    s.add_argument("--k", type=int)
    s.add_argument("--weights", default="-2,-1,0")
    s.add_argument("--gens", default="-1,-2")
    s.add_argument("--levels")
    s.add_argument("--quantifier", action="store_true", help="run the subobject quantifier check instead")
    return p


def run(cfg: RunConfig) -> dict:
    if cfg.command == "genext" and cfg.args.sub == "crop" and cfg.args.j is None:
        raise MalformedInput("crop needs --j")
    return COMMANDS[cfg.command](cfg)


def _emit(doc: dict, out: Optional[Path]) -> None:
    text = dumps(doc)
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


_LIST_OPTIONS = ("--weights", "--gens")


def _join_list_options(argv: Sequence[str]) -> List[str]:
    """Let ``--weights -2,-1,0`` through: argparse would read the value as an option."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _LIST_OPTIONS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_list_options(argv))
    if not 0 <= args.seed < 1 << 64:
        parser.error("seed must fit in 64 bits")
    cfg = RunConfig(args.command, args, args.seed, args.out, args.verbose)
    header = {"command": cfg.command, "seed": cfg.seed}
    if cfg.command == "genext":
        header["subcommand"] = args.sub
    try:
        result = run(cfg)
    except MalformedInput as exc:
        _emit({**header, "status": "malformed", "error": str(exc)}, None if cfg.out is None else cfg.out)
        sys.stderr.write(f"malformed input: {exc}\n")
        return EXIT_MALFORMED
    except (ModelError, LinAlgError, AssertionError, ZeroDivisionError) as exc:
        kind = type(exc).__name__
        _emit({**header, "status": "error", "error": {"type": kind, "message": str(exc)}},
              None if cfg.out is None else cfg.out)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    _emit({**header, "status": "ok", "result": result}, cfg.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""JSON reading and writing for objects, classes, blends and generalized extensions.

Every document is checked against ``schema.json`` before it is turned into
domain values; schema failures raise :class:`MalformedInput` carrying the
JSON path of the offending node.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import jsonschema

from .blended import Blend
from .exactla import Field, LinAlgError, Matrix
from .extmod import ExtClass, class_of
from .genext import BlockForm, GenExt, GradedFrame, denormalize
from .repcat import ModelError, ModelSignature, RepMorphism, WeightedRep


class MalformedInput(ValueError):
    """The document does not match the schema or is not JSON at all."""


@lru_cache(maxsize=1)
def schema() -> dict:
    return json.loads(resources.files("panache").joinpath("schema.json").read_text())


def check_schema(doc: Any, kind: str, where: str = "<input>") -> None:
    sch = schema()
    if kind not in sch["$defs"]:
        raise KeyError(kind)
    validator = jsonschema.Draft202012Validator({"$ref": f"#/$defs/{kind}", "$defs": sch["$defs"]})
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = "/".join(str(p) for p in err.absolute_path)
        raise MalformedInput(f"{where}: schema violation at /{path}: {err.message}")


def read_json(path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _entry(key: str):
    m, n = key.split(",")
    return int(m), int(n)


def _entry_key(e) -> str:
    return f"{e[0]},{e[1]}"


class Loader:
    """Resolves object references (inline or file path) relative to a base directory."""

    def __init__(self, base: Optional[Path] = None):
        self.base = Path(base) if base is not None else Path.cwd()

    def load(self, path, kind: str):
        doc = read_json(path)
        check_schema(doc, kind, str(path))
        sub = Loader(Path(path).resolve().parent)
        return getattr(sub, kind)(doc)

    def ref(self, doc) -> WeightedRep:
        if isinstance(doc, str):
            return self.load(self.base / doc, "object")
        return self.object(doc)

    def signature(self, doc) -> ModelSignature:
        field = Field.from_json(doc["field"])
        return ModelSignature.make(field, [(g["name"], g["degree"]) for g in doc["generators"]])

    def object(self, doc) -> WeightedRep:
        sig = self.signature(doc["signature"])
        support = {int(d): k for d, k in doc["support"].items()}
        dim = sum(support.values())
        ops = {}
        for name, mat in doc.get("operators", {}).items():
            if name not in sig.names:
                raise ModelError(f"operator for unknown generator {name!r}")
            ops[name] = _matrix(sig.field, mat, dim, dim, f"operator {name!r}")
        return WeightedRep(sig, support, ops)

    def extClass(self, doc) -> ExtClass:
        of, by = self.ref(doc["of"]), self.ref(doc["by"])
        if of.signature != by.signature:
            raise ModelError("signature mismatch")
        sig = of.signature
        coc = doc.get("cocycle", {})
        mats = []
        for g in sig.generators:
            if g.name in coc:
                mats.append(_matrix(sig.field, coc[g.name], by.dim, of.dim, f"cocycle {g.name!r}"))
            else:
                mats.append(Matrix.zeros(sig.field, by.dim, of.dim))
        unknown = set(coc) - set(sig.names)
        if unknown:
            raise ModelError(f"cocycle for unknown generators {sorted(unknown)}")
        return ExtClass(of, by, mats)

    def frame(self, doc) -> GradedFrame:
        parts = doc["frame"] if isinstance(doc, dict) else doc
        return GradedFrame([self.ref(p) for p in parts])

    def genext(self, doc) -> GenExt:
        frame = self.frame(doc["frame"])
        level = doc["level"]
        sig = frame.signature
        if doc["form"] == "blocks":
            blocks = {}
            for key, per_gen in doc["blocks"].items():
                i, j = _entry(key)
                if not (1 <= i < j <= frame.k):
                    raise ModelError(f"block {key} is outside the frame")
                unknown = set(per_gen) - set(sig.names)
                if unknown:
                    raise ModelError(f"block {key} names unknown generators {sorted(unknown)}")
                di, dj = frame.a(i).dim, frame.a(j).dim
                blocks[(i, j)] = [
                    _matrix(sig.field, per_gen[g.name], di, dj, f"block {key}") if g.name in per_gen
                    else Matrix.zeros(sig.field, di, dj) for g in sig.generators]
            return denormalize(BlockForm.make(frame, level, blocks))
        diag = doc["diagram"]
        objects = {_entry(k): self.ref(v) for k, v in diag["objects"].items()}
        incl, proj = {}, {}
        for key, mat in diag["incl"].items():
            m, n = _entry(key)
            src, tgt = objects.get((m, n - 1)), objects.get((m, n))
            if src is None or tgt is None:
                raise ModelError(f"inclusion {key} refers to a missing entry")
            incl[(m, n)] = RepMorphism(src, tgt, _matrix(sig.field, mat, tgt.dim, src.dim, f"incl {key}"))
        for key, mat in diag["proj"].items():
            m, n = _entry(key)
            src, tgt = objects.get((m, n)), objects.get((m + 1, n))
            if src is None or tgt is None:
                raise ModelError(f"projection {key} refers to a missing entry")
            proj[(m, n)] = RepMorphism(src, tgt, _matrix(sig.field, mat, tgt.dim, src.dim, f"proj {key}"))
        return GenExt(frame, level, objects, incl, proj)

    def frameMaps(self, doc):
        return doc["maps"]

    def classList(self, doc):
        return doc["classes"]

    def morphism(self, doc) -> RepMorphism:
        src, tgt = self.ref(doc["source"]), self.ref(doc["target"])
        if src.signature != tgt.signature:
            raise ModelError("signature mismatch")
        return RepMorphism(src, tgt, _matrix(src.field, doc["matrix"], tgt.dim, src.dim, "morphism"))

    def family(self, doc):
        return {_entry(k): v for k, v in doc["maps"].items()}


def _matrix(field: Field, doc, rows: int, cols: int, what: str) -> Matrix:
    try:
        if rows == 0 or cols == 0:
            if doc not in ([], [[]] * rows):
                raise LinAlgError("expected an empty matrix")
            return Matrix.zeros(field, rows, cols)
        return Matrix.from_json(field, doc, rows, cols)
    except LinAlgError as exc:
        raise ModelError(f"dimension mismatch in {what}: {exc}") from exc


def parse_matrix(field: Field, doc, rows: int, cols: int, what: str = "matrix") -> Matrix:
    return _matrix(field, doc, rows, cols, what)


# ---------------------------------------------------------------------------
# writing

def signature_json(sig: ModelSignature) -> dict:
    return {"field": sig.field.to_json(), "generators": [{"name": g.name, "degree": g.degree} for g in sig.generators]}


def object_json(x: WeightedRep) -> dict:
    return {
        "signature": signature_json(x.signature),
        "support": {str(d): k for d, k in x.support},
        "operators": {g.name: op.to_json() for g, op in zip(x.signature.generators, x.operators)},
    }


def ext_json(e: ExtClass) -> dict:
    return {
        "of": object_json(e.of),
        "by": object_json(e.by),
        "cocycle": {g.name: m.to_json() for g, m in zip(e.of.signature.generators, e.cocycle)},
    }


def reduced_ext_json(e: ExtClass) -> dict:
    doc = ext_json(e)
    doc["cocycle"] = {g.name: m.to_json() for g, m in zip(e.of.signature.generators, e.reduced)}
    return doc


def morphism_json(f: RepMorphism) -> dict:
    return {"source": object_json(f.source), "target": object_json(f.target), "matrix": f.matrix.to_json()}


def blend_json(b: Blend) -> dict:
    return {
        "L": ext_json(_class(b.l)),
        "N": ext_json(_class(b.n)),
        "middle": object_json(b.mid),
        "iota": b.iota.matrix.to_json(),
        "pi": b.pi.matrix.to_json(),
    }


def _class(seq) -> ExtClass:
    return class_of(seq, check=False)


def genext_blocks_json(g: GenExt, blocks: BlockForm) -> dict:
    sig = g.frame.signature
    return {
        "frame": [object_json(a) for a in g.frame.parts],
        "level": blocks.level,
        "form": "blocks",
        "blocks": {_entry_key(e): {gen.name: m.to_json() for gen, m in zip(sig.generators, mats)}
                   for e, mats in blocks.blocks},
    }


def genext_diagram_json(g: GenExt) -> dict:
    return {
        "frame": [object_json(a) for a in g.frame.parts],
        "level": g.level,
        "form": "diagram",
        "diagram": {
            "objects": {_entry_key(e): object_json(o) for e, o in sorted(g.objects.items())},
            "incl": {_entry_key(e): a.matrix.to_json() for e, a in sorted(g.incl.items())},
            "proj": {_entry_key(e): a.matrix.to_json() for e, a in sorted(g.proj.items())},
        },
    }

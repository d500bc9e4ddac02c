"""A mixed-Tate-style model and the four-weight worked example.

Conventions: the Tate object ``Q(n)`` is one-dimensional of weight ``-2n``.
The signature carries one degree ``-2`` generator per Kummer label (a finite
stand-in for ``Q^x ⊗ Q``) and one degree ``-2n`` generator ``z<n>`` for each
odd ``1 < n <= cutoff``.  With these choices ``dim Ext¹(1, Q(n))`` is the
number of labels for ``n = 1``, one for odd ``n > 1`` up to the cutoff, and
zero otherwise.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from .blended import make_blend
from .exactla import QQ, Matrix
from .extmod import ExtClass, ext1_dim, realize
from .genext import GradedFrame, from_level1, truncate, validate_genext
from .motivic import (classify_star, graded_independent, is_maximal, maximality_criterion, tns_genext, u_radical,
                      w_minus1_end_dim)
from .repcat import ModelError, ModelSignature, WeightedRep, find_isomorphism, pure, unit

DEFAULT_LABELS = (2, 3, 5)
DEFAULT_CUTOFF = 11


class MTError(ModelError):
    pass


@dataclass(frozen=True)
class MTSignature:
    signature: ModelSignature
    labels: tuple
    cutoff: int

    def tate(self, n: int) -> WeightedRep:
        return pure(self.signature, -2 * n, 1)

    @property
    def unit(self) -> WeightedRep:
        return unit(self.signature)

    def kummer(self, r) -> str:
        if r not in self.labels:
            raise MTError(f"unknown Kummer label {r!r}")
        return f"kummer_{r}"

    def zeta(self, n: int) -> str:
        if n % 2 == 0 or n <= 1 or n > self.cutoff:
            raise MTError(f"no odd generator for n = {n} (cutoff {self.cutoff})")
        return f"z{n}"

    def ext_table(self, lo: int = 1, hi: Optional[int] = None) -> Dict[int, int]:
        hi = self.cutoff if hi is None else hi
        return {n: ext1_dim(self.unit, self.tate(n)) for n in range(lo, hi + 1)}

    def expected(self, n: int) -> int:
        if n == 1:
            return len(self.labels)
        if n > 1 and n % 2 == 1 and n <= self.cutoff:
            return 1
        return 0


def build_mt(labels: Sequence = DEFAULT_LABELS, cutoff: int = DEFAULT_CUTOFF) -> MTSignature:
    """Signature with Kummer generators and odd generators; checks the Ext table against the pattern."""
    if not isinstance(cutoff, int) or cutoff < 3 or cutoff % 2 == 0:
        raise MTError("cutoff must be an odd integer >= 3")
    labels = tuple(labels)
    if not labels:
        raise MTError("at least one Kummer label is required")
    if len(set(labels)) != len(labels):
        raise MTError("Kummer labels must be distinct")
    gens = [(f"kummer_{r}", -2) for r in labels] + [(f"z{n}", -2 * n) for n in range(3, cutoff + 1, 2)]
    mt = MTSignature(ModelSignature.make(QQ, gens), labels, cutoff)
    for n, d in mt.ext_table(-1).items():
        if d != mt.expected(n):
            raise AssertionError(f"Ext table mismatch at n = {n}: {d} != {mt.expected(n)}")
    return mt


def twist(x: WeightedRep, n: int) -> WeightedRep:
    """Tensor with ``Q(n)``: shift every degree by ``-2n``."""
    return WeightedRep(x.signature, {d - 2 * n: k for d, k in x.support}, x.operators, check=False)


def _ext_on_gen(mt: MTSignature, of: WeightedRep, by: WeightedRep, gen: str, c=1) -> ExtClass:
    """Class whose cocycle is ``c`` on ``gen`` (1x1 objects) and zero elsewhere."""
    sig = mt.signature
    mats = []
    for g in sig.generators:
        mats.append(Matrix(QQ, [[c if g.name == gen else 0]], 1))
    return ExtClass(of, by, mats)


def z_class(mt: MTSignature, n: int, shift: int = 0, c=1) -> ExtClass:
    """A nonzero class of ``Ext¹(Q(shift), Q(n + shift))``."""
    return _ext_on_gen(mt, mt.tate(shift), mt.tate(n + shift), mt.zeta(n), c)


def kummer_class(mt: MTSignature, r, shift: int = 0, c=1) -> ExtClass:
    return _ext_on_gen(mt, mt.tate(shift), mt.tate(1 + shift), mt.kummer(r), c)


def named_objects(mt: MTSignature, n: int = 3, r=None, a: int = 3, c: int = 5,
                  rng: Optional[random.Random] = None) -> Dict[str, WeightedRep]:
    """``Z_n``, ``L_r``, ``M_{a,r}`` and ``M'_{c,r}`` with uniqueness checked on a second random choice."""
    r = mt.labels[0] if r is None else r
    if n % 2 == 0 or n <= 1:
        raise MTError("Z_n needs an odd n > 1")
    for v in (a, c):
        if v % 2 == 0 or v <= 1:
            raise MTError("a and c must be odd and > 1")
    if a == c:
        raise MTError("a and c must be distinct")
    rng = rng or random.Random(0)
    out = {
        f"Z_{n}": realize(z_class(mt, n)).mid,
        f"L_{r}": realize(kummer_class(mt, r)).mid,
    }
    # M_{a,r}: blend with top row L_r(a) and right column Z_a
    out[f"M_{a},{r}"] = make_blend(realize(kummer_class(mt, r, a)), realize(z_class(mt, a))).mid
    # M'_{c,r}: blend with top row Z_c(1) and right column L_r
    out[f"M'_{c},{r}"] = make_blend(realize(z_class(mt, c, 1)), realize(kummer_class(mt, r))).mid
    # a different nonzero scaling gives an isomorphic middle object
    s = QQ(rng.randint(2, 9))
    alt = {
        f"Z_{n}": realize(z_class(mt, n, 0, s)).mid,
        f"L_{r}": realize(kummer_class(mt, r, 0, s)).mid,
        f"M_{a},{r}": make_blend(realize(kummer_class(mt, r, a, s)), realize(z_class(mt, a, 0, s))).mid,
        f"M'_{c},{r}": make_blend(realize(z_class(mt, c, 1, s)), realize(kummer_class(mt, r, 0, s))).mid,
    }
    for key, obj in out.items():
        iso, _ = find_isomorphism(obj, alt[key], rng)
        if iso is None:
            raise AssertionError(f"{key} is not unique up to isomorphism")
    return out


def period_scaffold(a: int, c: int, r) -> List[List[Optional[str]]]:
    """Symbolic 4x4 period-matrix shape for the four-weight example with ``b = 1``."""
    top, mid, low = a + 1 + c, a + 1, a

    def tw(n):
        return f"(2*pi*i)^-{n}"

    return [
        [tw(top), f"{tw(top)}*zeta({c})", f"{tw(top)}*p'_{{{c},{r}}}", f"p_{{{a},{r},{c}}}(X)"],
        [None, tw(mid), f"{tw(mid)}*log({r})", f"{tw(mid)}*p_{{{a},{r}}}"],
        [None, None, tw(low), f"{tw(low)}*zeta({a})"],
        [None, None, None, "1"],
    ]


def scaffold_is_unipotent_after_twists(m: List[List[Optional[str]]]) -> bool:
    """Upper triangular, and each diagonal entry is a pure Tate factor (unit after factoring twists)."""
    n = len(m)
    for i in range(n):
        for j in range(i):
            if m[i][j] is not None:
                return False
        d = m[i][i]
        if d != "1" and not (d.startswith("(2*pi*i)^-") and "*" not in d[len("(2*pi*i)^-"):]):
            return False
    return True


def four_weight_pipeline(a: int = 3, c: int = 5, label=2, cutoff: int = DEFAULT_CUTOFF,
                         fiber_coord=1, labels: Optional[Sequence] = None) -> dict:
    """Run the four-weight example with ``b = 1`` and return a JSON-ready report."""
    b = 1
    for name, v in (("a", a), ("c", c)):
        if not isinstance(v, int) or v <= 0:
            raise MTError(f"{name} must be a positive integer")
    if len({a, b, c}) != 3:
        raise MTError("a, b, c must be distinct")
    if a + b == c or b + c == a:
        raise MTError("graded independence needs a + b != c and b + c != a")
    if a % 2 == 0 or c % 2 == 0:
        raise MTError("a and c must be odd for totally nonsplit classes to exist")
    top = a + b + c
    if cutoff < max(top, a, c) or cutoff % 2 == 0:
        cutoff = max(top, a, c) if max(top, a, c) % 2 else max(top, a, c) + 1
    if labels is None:
        labels = tuple(DEFAULT_LABELS) if label in DEFAULT_LABELS else (label,) + tuple(DEFAULT_LABELS)
    mt = build_mt(labels, cutoff)
    if label not in mt.labels:
        raise MTError(f"label {label!r} is not in the signature")
    frame = GradedFrame([mt.tate(top), mt.tate(a + b), mt.tate(a), mt.unit])
    gi = graded_independent(frame)
    star1 = classify_star(frame, 1)
    level1 = [z_class(mt, c, a + b), kummer_class(mt, label, a), z_class(mt, a)]
    g1 = from_level1(frame, level1)
    validate_genext(g1)
    star2 = classify_star(frame, 2, g1)
    fd2 = star2.fiber
    g2 = fd2.lift(None)
    validate_genext(g2)
    star3 = classify_star(frame, 3, g2)
    fd3 = star3.fiber
    coords = fd3.split_coords([QQ(fiber_coord)] * fd3.group_dim)
    g3 = fd3.lift(coords)
    validate_genext(g3)
    x = g3.x(0, 4)
    u = u_radical(x)
    maximal = is_maximal(x)
    crit, adj = maximality_criterion(x)
    scaffold = period_scaffold(a, c, label)
    names = named_objects(mt, a, label, a, c)
    report = {
        "parameters": {"a": a, "b": b, "c": c, "label": label, "cutoff": cutoff},
        "frame": {"tate_twists": [top, a + b, a, 0], "weights": list(frame.weights)},
        "graded_independent": gi,
        "level1": {
            "factors": [{"r": f.r, "ext_dim": f.ext_dim, "nonempty": f.nonempty, "orbit_space": f.orbit_space}
                        for f in star1.factors],
            "chosen_generators": [_gen_of(e) for e in level1],
            "totally_nonsplit": tns_genext(g1),
        },
        "level2": {
            "fiber_groups": [{"of_twist": -fd2.factors[i][0].weights[0] // 2,
                              "by_twist": -fd2.factors[i][1].weights[0] // 2,
                              "dim": fd2.dims[i]} for i in range(len(fd2.factors))],
            "fiber_dim": fd2.group_dim,
            "unique_lift": fd2.group_dim == 0,
            "totally_nonsplit": tns_genext(g2),
        },
        "level3": {
            "fiber_groups": [{"of_twist": -m.weights[0] // 2, "by_twist": -n.weights[0] // 2, "dim": d}
                             for (m, n), d in zip(fd3.factors, fd3.dims)],
            "fiber_dim": fd3.group_dim,
            "chosen_coordinate": str(QQ(fiber_coord)),
            "totally_nonsplit": tns_genext(g3),
            "truncates_to_level2": truncate(g3) == g2,
        },
        "realized": {
            "support": {str(d): k for d, k in x.support},
            "u_radical_dim": u.dim,
            "w_minus1_end_dim": w_minus1_end_dim(x),
            "is_maximal": maximal,
            "criterion": {"maximal": crit, "adjacent_totally_nonsplit": adj},
            "reductive_rank": 1,
        },
        "galois_dimension": 1 + u.dim,
        "named_objects": {k: {str(d): n for d, n in v.support} for k, v in sorted(names.items())},
        "period_scaffold": scaffold,
        "scaffold_unipotent_after_twists": scaffold_is_unipotent_after_twists(scaffold),
        "notes": [
            "period entries are symbols only; no numerical periods are computed",
            "labels model a finite-rank piece of the Kummer group",
        ],
    }
    return report


def _gen_of(e: ExtClass) -> str:
    names = e.of.signature.names
    for name, m in zip(names, e.cocycle):
        if not m.is_zero():
            return name
    return ""

"""Total nonsplitting, unipotent radicals and maximality.

An extension ``E`` of the unit by an object ``H`` whose weights are all
negative has a unique degree-0 lift ``v`` of the unit generator in its
middle object.  ``E`` is totally nonsplit (its pushforward to ``H/H'`` is
nonsplit for every proper subobject ``H'``) exactly when ``v`` generates the
whole middle object: the subobject generated by ``v`` is ``span(v) ⊕ H'`` for
``H' = <v> ∩ H``, and the pushforward to ``H/H'`` splits precisely through
the image of ``v``.  An extension of ``Y`` by ``X`` is totally nonsplit when
its transfer to an extension of the unit by ``Hom(Y, X)`` is.

The unipotent radical of an object is realized as the Lie algebra generated
by its generator operators inside ``End``; it always sits in the part of
``End`` of negative degree, and the object is maximal when it fills it.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Sequence, Tuple, Union

from .exactla import Matrix, Subspace
from .extmod import ExtClass, class_of, ext1_space, realize, transfer_unit
from .genext import (FiberDescriptor, GenExt, GradedFrame, from_level1, from_object, level1_classes)
from .repcat import (ModelError, WeightedRep, build_ops, generated_subspace, hom_basis, hom_space, internal_hom,
                     pure)


class MotivicError(ModelError):
    pass


class Cancelled(MotivicError):
    """Raised when a cancellation token fires during a long closure."""


class CancelToken:
    """Cooperative cancellation flag checked by long-running closures."""

    def __init__(self):
        self.cancelled = False

    def cancel(self):
        self.cancelled = True

    def check(self):
        if self.cancelled:
            raise Cancelled("computation cancelled")


# ---------------------------------------------------------------------------
# total nonsplitting

def _unit_lift_generates(e: ExtClass) -> bool:
    """For ``e`` in Ext¹(1, H) with H of negative weights: does the lift of 1 generate the middle?"""
    h = e.by
    if any(d >= 0 for d in h.weights):
        raise MotivicError("the transferred target has a part of weight >= 0; total nonsplitting is "
                           "only decided for targets of strictly negative weight")
    seq = realize(e)
    mid = seq.mid
    rng = mid.span_of(0)
    if len(rng) != 1:
        raise MotivicError("expected a unique degree-0 lift of the unit")
    v = [mid.field.zero] * mid.dim
    v[rng.start] = mid.field.one
    return generated_subspace(mid, [v]).dim == mid.dim


def totally_nonsplit(e: ExtClass) -> bool:
    """Whether the extension is totally nonsplit (decided through its transfer to the unit)."""
    return _unit_lift_generates(transfer_unit(e))


def end_dimension(e: ExtClass) -> int:
    mid = realize(e).mid
    return len(hom_basis(mid, mid))


def end_scalar_check(e: ExtClass) -> bool:
    """True iff the middle object of ``e`` has only scalar endomorphisms (characteristic 0 only)."""
    if not e.field.is_rational:
        raise MotivicError("the rigidity statement needs characteristic 0; use the rational field")
    if e.by.dim and e.of.dim and max(e.by.weights) >= min(e.of.weights):
        raise MotivicError("weights of the subobject must lie strictly below those of the quotient")
    return end_dimension(e) == 1


def tns_genext(g: GenExt) -> bool:
    """Every vertical and horizontal extension of the diagram is totally nonsplit."""
    for (m, n) in g.entries():
        if n - m < 2:
            continue
        if not totally_nonsplit(class_of(g.ext_v(m, n), check=False)):
            return False
        if not totally_nonsplit(class_of(g.ext_h(m, n), check=False)):
            return False
    return True


# ---------------------------------------------------------------------------
# unipotent radical

@dataclass
class LieSubalgebra:
    """A bracket-closed subspace of ``End(x)`` given by flattened matrices."""

    ambient: WeightedRep
    basis: Subspace
    closed: bool = True
    steps: int = 0

    @property
    def dim(self) -> int:
        return self.basis.dim

    def matrices(self) -> List[Matrix]:
        n = self.ambient.dim
        return [Matrix.from_flat(self.ambient.field, n, n, v) for v in self.basis.vectors()]

    def is_bracket_closed(self) -> bool:
        mats = self.matrices()
        return all(self.basis.contains((a @ b - b @ a).flatten()) for a in mats for b in mats)

    def is_degree_negative(self) -> bool:
        degs = self.ambient.degrees
        for m in self.matrices():
            for i, row in enumerate(m.data):
                for j, v in enumerate(row):
                    if v and degs[i] >= degs[j]:
                        return False
        return True


def u_radical(x: WeightedRep, token: Optional[CancelToken] = None) -> LieSubalgebra:
    """Lie algebra generated by the generator operators of ``x``."""
    f = x.field
    n = x.dim
    amb = n * n
    span = Subspace.zero(f, amb)
    mats: List[Matrix] = []

    def add(m: Matrix) -> bool:
        nonlocal span
        v = m.flatten()
        if any(v) and not span.contains(v):
            span = span.sum(Subspace.span(f, amb, [v]))
            mats.append(m)
            return True
        return False

    frontier = [m for m in x.operators if add(m)]
    steps = 0
    while frontier:
        if token is not None:
            token.check()
        steps += 1
        new = []
        for a in frontier:
            for b in list(mats):
                c = a @ b - b @ a
                if add(c):
                    new.append(c)
        frontier = new
    return LieSubalgebra(x, span, True, steps)


def w_minus1_end_dim(x: WeightedRep) -> int:
    """Dimension of the negative-degree part of ``End(x)``."""
    supp = x.support
    return sum(dp * dq for i, (_, dp) in enumerate(supp) for (_, dq) in supp[i + 1:])


def is_maximal(x: WeightedRep) -> bool:
    return u_radical(x).dim == w_minus1_end_dim(x)


# ---------------------------------------------------------------------------
# graded independence

FrameLike = Union[GradedFrame, WeightedRep, Sequence[int]]


def _frame_of(obj: FrameLike) -> GradedFrame:
    if isinstance(obj, GradedFrame):
        return obj
    if isinstance(obj, WeightedRep):
        return GradedFrame([pure(obj.signature, d, n) for d, n in obj.support])
    raise MotivicError("graded independence needs a frame or an object")


def graded_independence_arithmetic(weights: Sequence[int]) -> bool:
    """Adjacent weight differences are pairwise distinct and avoid every non-adjacent difference."""
    p = sorted(weights)
    adjacent = [p[r] - p[r + 1] for r in range(len(p) - 1)]
    far = {p[i] - p[j] for i in range(len(p)) for j in range(i + 2, len(p))}
    return len(set(adjacent)) == len(adjacent) and not (set(adjacent) & far)


def graded_independence_objects(frame: GradedFrame) -> Tuple[WeightedRep, List[WeightedRep]]:
    """``C_0`` (sum of the non-adjacent Homs) and ``C_r = Hom(A_{r+1}, A_r)``."""
    k = frame.k
    cs = [internal_hom(frame.a(r + 1), frame.a(r)) for r in range(1, k)]
    far = [internal_hom(frame.a(j), frame.a(i)) for i in range(1, k + 1) for j in range(i + 2, k + 1)]
    c0 = build_ops(far) if far else WeightedRep(frame.signature, {}, check=False)
    return c0, cs


def graded_independent(obj: FrameLike) -> bool:
    """Whether the frame (or the associated graded of an object) is graded-independent.

    Pure objects of this model share a nonzero subquotient exactly when Hom
    between them is nonzero, so the general test runs Hom between each pair
    of ``C_0, C_1, ..., C_{k-1}``; the arithmetic reduction must agree.
    """
    frame = _frame_of(obj)
    c0, cs = graded_independence_objects(frame)
    objs = [c0] + cs
    general = all(hom_space(objs[a], objs[b]).dim == 0 and hom_space(objs[b], objs[a]).dim == 0
                  for a in range(len(objs)) for b in range(a + 1, len(objs)))
    arith = graded_independence_arithmetic(frame.weights)
    if general != arith:
        raise AssertionError("graded independence: general test and weight arithmetic disagree")
    return general


# ---------------------------------------------------------------------------
# maximality criterion

def adjacent_classes(x: WeightedRep) -> List[ExtClass]:
    """Classes of ``W_{p_{r+1}} x / W_{p_{r-1}} x`` in ``Ext¹(Gr_{p_{r+1}}, Gr_{p_r})``."""
    frame = _frame_of(x)
    ident = [Matrix.identity(x.field, a.dim) for a in frame.parts]
    g = from_object(x, ident, frame)
    return level1_classes(g)


def maximality_criterion(x: WeightedRep) -> Tuple[bool, List[bool]]:
    """``(is_maximal(x), [totally_nonsplit(adjacent extension r)])``, computed independently."""
    if not x.field.is_rational:
        raise MotivicError("the maximality criterion needs characteristic 0")
    if len(x.support) < 2:
        return is_maximal(x), []
    if not graded_independent(x):
        raise MotivicError("the object is not graded-independent; the criterion does not apply")
    adj = [totally_nonsplit(e) for e in adjacent_classes(x)]
    return is_maximal(x), adj


# ---------------------------------------------------------------------------
# classification of maximal objects with a given associated graded

def tns_pure_class(e: ExtClass) -> bool:
    """Total nonsplitting for an extension between pure objects: the generator components span Hom."""
    return totally_nonsplit(e)


@dataclass
class StarLevel1Factor:
    r: int
    ext_dim: int
    hom_dim: int
    basis: List[ExtClass]
    nonempty: bool
    orbit_space: Optional[str]


@dataclass
class StarReport:
    level: int
    graded_independent: bool
    factors: List[StarLevel1Factor] = dc_field(default_factory=list)
    fiber: Optional[FiberDescriptor] = None
    fiber_dims: List[int] = dc_field(default_factory=list)
    surjective: bool = True
    empty: bool = False
    pick_totally_nonsplit: Optional[bool] = None

    @property
    def fiber_dim(self) -> int:
        return sum(self.fiber_dims)


def _tns_exists(a_hi: WeightedRep, a_lo: WeightedRep) -> bool:
    """A totally nonsplit class of Ext¹(a_hi, a_lo) exists iff generators can fill Hom(a_hi, a_lo)."""
    h = internal_hom(a_hi, a_lo)
    d = h.weights[0] if h.weights else 0
    gens = [g for g in a_hi.signature.generators if g.degree == d]
    return len(gens) >= h.dim


def classify_star(frame: GradedFrame, level: int, pick: Optional[GenExt] = None) -> StarReport:
    """Describe the totally nonsplit classes of the given level.

    Level 1 returns, per adjacent pair, the Ext¹ basis and whether totally
    nonsplit classes exist (Aut(A) acts by ``σ_r · σ_{r+1}⁻¹``; for
    one-dimensional pieces the orbits of nonzero classes form a projective
    space).  Level ``l >= 2`` needs ``pick``, a totally nonsplit member of
    level ``l - 1``, and returns its fiber as a torsor.
    """
    if not frame.field.is_rational:
        raise MotivicError("classification of maximal objects needs characteristic 0")
    if not graded_independent(frame):
        raise MotivicError("frame is not graded-independent")
    rep = StarReport(level=level, graded_independent=True)
    for r in range(1, frame.k):
        hi, lo = frame.a(r + 1), frame.a(r)
        dim, basis = ext1_space(hi, lo)
        nonempty = _tns_exists(hi, lo) and dim > 0
        orbit = None
        if hi.dim == 1 and lo.dim == 1 and dim > 0:
            orbit = f"P^{dim - 1}"
        rep.factors.append(StarLevel1Factor(r, dim, hi.dim * lo.dim, basis, nonempty, orbit))
    rep.empty = not all(f.nonempty for f in rep.factors)
    if level == 1:
        return rep
    if pick is None:
        raise MotivicError("levels above 1 need a chosen member of the previous level")
    if pick.frame != frame or pick.level != level - 1:
        raise MotivicError("the chosen member has the wrong frame or level")
    rep.pick_totally_nonsplit = tns_genext(pick)
    if not rep.pick_totally_nonsplit:
        raise MotivicError("the chosen member is not totally nonsplit")
    fd = FiberDescriptor(pick)
    rep.fiber = fd
    rep.fiber_dims = list(fd.dims)
    return rep


def realize_maximal(frame: GradedFrame, classes: Sequence[ExtClass],
                    lifts: Sequence[Sequence[ExtClass]] = ()) -> Tuple[GenExt, WeightedRep]:
    """Build a top-level member from level-1 classes and fiber coordinates; return it and its object."""
    g = from_level1(frame, classes)
    for coords in lifts:
        fd = FiberDescriptor(g)
        g = fd.lift(coords)
    return g, g.x(0, frame.k) if g.level == frame.k - 1 else None

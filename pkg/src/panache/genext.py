"""Generalized extensions of a graded frame ``A_1, ..., A_k``.

A level-``l`` generalized extension is a staircase of objects ``X[m, n]``
(``0 <= m < n <= k``, ``n - m <= l + 1``) with ``X[r-1, r] = A_r``, monos
``incl[m, n]: X[m, n-1] -> X[m, n]`` and epis ``proj[m, n]: X[m, n] -> X[m+1, n]``
(both for ``n - m >= 2``), such that the squares commute and each
``X[m, n-1] -> X[m, n] -> A_n`` is exact.

Because the frame pieces are pure of strictly increasing weight, every
diagram is isomorphic, by a family that is the identity on the frame, to a
diagram on ``A_{m+1} ⊕ ... ⊕ A_n`` with standard inclusions and
projections.  The operators of that normal form are block upper triangular;
the block ``B[i, j]: A_j -> A_i`` (one per generator) is the *block form*.
Diagrams are the source of truth; block forms are canonical coordinates.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .blended import Blend, translate_row
from .exactla import Field, Matrix, Subspace, find_invertible, solve
from .extmod import ExtClass, ExtensionSeq, ext1_dim
from .repcat import (MapSystem, ModelError, ModelSignature, RepMorphism, WeightedRep, build_ops, graded,
                     section)

Entry = Tuple[int, int]


class GenExtError(ModelError):
    pass


class GradedFrame:
    """Nonzero pure objects ``A_1, ..., A_k`` of strictly increasing weight."""

    __slots__ = ("parts",)

    def __init__(self, parts: Sequence[WeightedRep]):
        parts = tuple(parts)
        if len(parts) < 2:
            raise GenExtError("a frame needs at least two pieces")
        sig = parts[0].signature
        for r, a in enumerate(parts, start=1):
            if a.signature != sig:
                raise GenExtError("frame pieces have different signatures")
            if a.dim == 0 or not a.is_pure():
                raise GenExtError(f"A_{r} must be a nonzero pure object")
        w = [a.weights[0] for a in parts]
        if any(x >= y for x, y in zip(w, w[1:])):
            raise GenExtError(f"frame weights must increase strictly, got {w}")
        self.parts = parts

    @classmethod
    def from_weights(cls, sig: ModelSignature, weights: Sequence[int], dims: Optional[Sequence[int]] = None):
        dims = dims or [1] * len(weights)
        return cls([WeightedRep(sig, {w: d}, check=False) for w, d in zip(weights, dims)])

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def signature(self) -> ModelSignature:
        return self.parts[0].signature

    @property
    def field(self) -> Field:
        return self.parts[0].field

    @property
    def weights(self) -> Tuple[int, ...]:
        return tuple(a.weights[0] for a in self.parts)

    def a(self, r: int) -> WeightedRep:
        """``A_r`` with 1-based index."""
        return self.parts[r - 1]

    def total(self) -> WeightedRep:
        return build_ops(list(self.parts))

    def crop(self, i: int, j: int) -> "GradedFrame":
        return GradedFrame(self.parts[i:j])

    def __eq__(self, other):
        return isinstance(other, GradedFrame) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __repr__(self):
        return f"GradedFrame(weights={list(self.weights)}, dims={[a.dim for a in self.parts]})"


def entries_of(k: int, level: int) -> List[Entry]:
    return [(m, n) for d in range(1, level + 2) for m in range(0, k - d + 1) for n in [m + d]]


def _clamp(frame: GradedFrame, level: int) -> int:
    if level < 1:
        raise GenExtError("level must be at least 1")
    return min(level, frame.k - 1)


class GenExt:
    """Diagram form of a generalized extension."""

    __slots__ = ("frame", "level", "objects", "incl", "proj", "_normal")

    def __init__(self, frame: GradedFrame, level: int, objects: Mapping[Entry, WeightedRep],
                 incl: Mapping[Entry, RepMorphism], proj: Mapping[Entry, RepMorphism]):
        self.frame = frame
        self.level = _clamp(frame, level)
        self.objects = dict(objects)
        self.incl = dict(incl)
        self.proj = dict(proj)
        self._normal = None

    @property
    def k(self) -> int:
        return self.frame.k

    @property
    def field(self) -> Field:
        return self.frame.field

    def entries(self) -> List[Entry]:
        return entries_of(self.k, self.level)

    def lowest(self) -> List[Entry]:
        d = self.level + 1
        return [(m, m + d) for m in range(0, self.k - d + 1)]

    def x(self, m: int, n: int) -> WeightedRep:
        return self.objects[(m, n)]

    def chain_incl(self, m: int, a: int, n: int) -> Matrix:
        """Composite inclusion ``X[m, a] -> X[m, n]``."""
        f = self.field
        mat = Matrix.identity(f, self.x(m, a).dim)
        for b in range(a + 1, n + 1):
            mat = self.incl[(m, b)].matrix @ mat
        return mat

    def chain_proj(self, m: int, b: int, n: int) -> Matrix:
        """Composite projection ``X[m, n] -> X[b, n]``."""
        f = self.field
        mat = Matrix.identity(f, self.x(m, n).dim)
        for c in range(m, b):
            mat = self.proj[(c, n)].matrix @ mat
        return mat

    def ext_h(self, m: int, n: int) -> ExtensionSeq:
        """``A_{m+1} -> X[m, n] -> X[m+1, n]``."""
        x = self.x(m, n)
        a = self.x(m, m + 1)
        return ExtensionSeq(a, x, self.x(m + 1, n), RepMorphism(a, x, self.chain_incl(m, m + 1, n), check=False),
                            self.proj[(m, n)])

    def ext_v(self, m: int, n: int) -> ExtensionSeq:
        """``X[m, n-1] -> X[m, n] -> A_n``."""
        x = self.x(m, n)
        a = self.x(n - 1, n)
        return ExtensionSeq(self.x(m, n - 1), x, a, self.incl[(m, n)],
                            RepMorphism(x, a, self.chain_proj(m, n - 1, n), check=False))

    def __eq__(self, other):
        if not isinstance(other, GenExt):
            return NotImplemented
        return (self.frame == other.frame and self.level == other.level and self.objects == other.objects
                and all(self.incl[e].matrix == other.incl[e].matrix for e in self.incl)
                and all(self.proj[e].matrix == other.proj[e].matrix for e in self.proj))

    def __hash__(self):
        return hash((self.frame, self.level, tuple(sorted((e, o) for e, o in self.objects.items()))))

    def __repr__(self):
        return f"GenExt(level={self.level}, {self.frame!r})"


def validate_genext(g: GenExt) -> None:
    """Check the frame, every arrow, every square and every exact sequence."""
    k = g.k
    for (m, n) in g.entries():
        if (m, n) not in g.objects:
            raise GenExtError(f"missing object at ({m},{n})")
        if g.x(m, n).signature != g.frame.signature:
            raise GenExtError(f"object at ({m},{n}) has the wrong signature")
    extra = set(g.objects) - set(g.entries())
    if extra:
        raise GenExtError(f"unexpected entries {sorted(extra)}")
    for r in range(1, k + 1):
        if g.x(r - 1, r) != g.frame.a(r):
            raise GenExtError(f"entry ({r - 1},{r}) is not literally A_{r}")
    for (m, n) in g.entries():
        if n - m < 2:
            continue
        for name, arrows, src, tgt in (("inclusion", g.incl, (m, n - 1), (m, n)),
                                       ("projection", g.proj, (m, n), (m + 1, n))):
            a = arrows.get((m, n))
            if a is None:
                raise GenExtError(f"missing {name} at ({m},{n})")
            if a.source != g.x(*src) or a.target != g.x(*tgt):
                raise GenExtError(f"{name} at ({m},{n}) has the wrong endpoints")
            try:
                a.validate()
            except ModelError as exc:
                raise GenExtError(f"{name} at ({m},{n}) is not a morphism: {exc}") from exc
    for (m, n) in g.entries():
        if n - m >= 3:
            lhs = g.incl[(m + 1, n)].matrix @ g.proj[(m, n - 1)].matrix
            rhs = g.proj[(m, n)].matrix @ g.incl[(m, n)].matrix
            if lhs != rhs:
                raise GenExtError(f"square at ({m},{n}) does not commute")
    for (m, n) in g.entries():
        if n - m >= 2:
            try:
                g.ext_v(m, n).validate()
            except ModelError as exc:
                raise GenExtError(f"sequence at ({m},{n}) is not exact: {exc}") from exc
            try:
                g.ext_h(m, n).validate()
            except ModelError as exc:
                raise GenExtError(f"derived sequence at ({m},{n}) is not exact: {exc}") from exc


# ---------------------------------------------------------------------------
# block form

@dataclass(frozen=True)
class BlockForm:
    """Blocks ``B[(i, j)]`` (one matrix ``A_j -> A_i`` per generator) for ``1 <= j - i <= level``."""

    frame: GradedFrame
    level: int
    blocks: Tuple[Tuple[Entry, Tuple[Matrix, ...]], ...]

    @classmethod
    def make(cls, frame: GradedFrame, level: int, blocks: Mapping[Entry, Sequence[Matrix]]):
        level = _clamp(frame, level)
        f = frame.field
        ngen = len(frame.signature.generators)
        out = []
        for i in range(1, frame.k + 1):
            for j in range(i + 1, min(frame.k, i + level) + 1):
                ai, aj = frame.a(i), frame.a(j)
                mats = blocks.get((i, j))
                if mats is None:
                    mats = tuple(Matrix.zeros(f, ai.dim, aj.dim) for _ in range(ngen))
                mats = tuple(mats)
                if len(mats) != ngen:
                    raise GenExtError(f"block ({i},{j}) needs one matrix per generator")
                for g, mat in zip(frame.signature.generators, mats):
                    if mat.shape != (ai.dim, aj.dim):
                        raise GenExtError(f"block ({i},{j}) for {g.name!r} has the wrong shape")
                    if not mat.is_zero() and frame.weights[i - 1] != frame.weights[j - 1] + g.degree:
                        raise GenExtError(f"block ({i},{j}) for {g.name!r} is not homogeneous")
                out.append(((i, j), mats))
        for key in blocks:
            i, j = key
            if not (1 <= i < j <= frame.k and j - i <= level):
                if any(not m.is_zero() for m in blocks[key]):
                    raise GenExtError(f"block {key} is outside the level range")
        return cls(frame, level, tuple(out))

    def as_dict(self) -> Dict[Entry, Tuple[Matrix, ...]]:
        return dict(self.blocks)

    def key(self) -> tuple:
        return tuple((e, tuple(m.flatten() for m in mats)) for e, mats in self.blocks)

    def truncate(self) -> "BlockForm":
        if self.level < 2:
            raise GenExtError("cannot truncate a level-1 generalized extension")
        return BlockForm.make(self.frame, self.level - 1,
                              {e: v for e, v in self.blocks if e[1] - e[0] < self.level})

    def with_level(self, level: int, extra: Mapping[Entry, Sequence[Matrix]] = None) -> "BlockForm":
        d = self.as_dict()
        d.update(extra or {})
        return BlockForm.make(self.frame, level, d)


def _block_object(frame: GradedFrame, blocks: Mapping[Entry, Sequence[Matrix]], m: int, n: int) -> WeightedRep:
    sig = frame.signature
    f = frame.field
    dims = [frame.a(r).dim for r in range(m + 1, n + 1)]
    offs = [sum(dims[:i]) for i in range(len(dims))]
    total = sum(dims)
    ops = []
    for t in range(len(sig.generators)):
        data = [[f.zero] * total for _ in range(total)]
        for i in range(m + 1, n + 1):
            for j in range(i + 1, n + 1):
                mats = blocks.get((i, j))
                if mats is None:
                    continue
                b = mats[t]
                oi, oj = offs[i - m - 1], offs[j - m - 1]
                for a, row in enumerate(b.data):
                    for c, v in enumerate(row):
                        if v:
                            data[oi + a][oj + c] = v
        ops.append(Matrix(f, data, total))
    support = {frame.weights[r - 1]: frame.a(r).dim for r in range(m + 1, n + 1)}
    return WeightedRep(sig, support, tuple(ops), check=False)


def denormalize(bf: BlockForm) -> GenExt:
    """Diagram on ``A_{m+1} ⊕ ... ⊕ A_n`` with standard inclusions and projections."""
    frame, lvl = bf.frame, bf.level
    blocks = bf.as_dict()
    f = frame.field
    objects = {}
    for (m, n) in entries_of(frame.k, lvl):
        objects[(m, n)] = frame.a(n) if n - m == 1 else _block_object(frame, blocks, m, n)
    incl, proj = {}, {}
    for (m, n) in entries_of(frame.k, lvl):
        if n - m < 2:
            continue
        x = objects[(m, n)]
        low = objects[(m, n - 1)]
        high = objects[(m + 1, n)]
        incl[(m, n)] = RepMorphism(low, x, Matrix.zeros(f, x.dim, low.dim).with_block(
            0, 0, Matrix.identity(f, low.dim)), check=False)
        first = frame.a(m + 1).dim
        proj[(m, n)] = RepMorphism(x, high, Matrix.zeros(f, high.dim, x.dim).with_block(
            0, first, Matrix.identity(f, high.dim)), check=False)
    return GenExt(frame, lvl, objects, incl, proj)


class Normalization:
    """Block form of a diagram plus the isomorphisms ``psi[(m, n)]`` from the standard diagram."""

    def __init__(self, blocks: BlockForm, psi: Dict[Entry, Matrix]):
        self.blocks = blocks
        self.psi = psi
        self._inv = {}

    def psi_inv(self, e: Entry) -> Matrix:
        if e not in self._inv:
            self._inv[e] = self.psi[e].inverse()
        return self._inv[e]


def _restrict_degree(x_src: WeightedRep, x_tgt: WeightedRep, mat: Matrix, degree: int) -> Matrix:
    return mat.submatrix(x_tgt.span_of(degree), x_src.span_of(degree))


def normalize(g: GenExt, check: bool = True) -> Normalization:
    """Canonical block form of ``g`` together with the comparison isomorphisms."""
    if g._normal is not None:
        return g._normal
    frame = g.frame
    f = g.field
    psi: Dict[Entry, Matrix] = {}
    for (m, n) in g.entries():
        x = g.x(m, n)
        cols = []
        for r in range(m + 1, n + 1):
            pr = frame.weights[r - 1]
            ar = frame.a(r)
            mid = g.x(r - 1, n)
            J = g.chain_incl(r - 1, r, n)
            P = g.chain_proj(m, r - 1, n)
            Pr = _restrict_degree(x, mid, P, pr)
            Jr = J.submatrix(mid.span_of(pr), range(ar.dim))
            v = Pr.inverse() @ Jr
            full = Matrix.zeros(f, x.dim, ar.dim).with_block(x.span_of(pr).start, 0, v)
            cols.append(full)
        psi[(m, n)] = cols[0].hstack(*cols[1:]) if len(cols) > 1 else cols[0]
    blocks = {}
    for i in range(1, frame.k + 1):
        for j in range(i + 1, min(frame.k, i + g.level) + 1):
            e = (i - 1, j)
            P = psi[e]
            Pinv = P.inverse()
            x = g.x(*e)
            di = frame.a(i).dim
            dj = frame.a(j).dim
            mats = []
            for op in x.operators:
                conj = Pinv @ op @ P
                mats.append(conj.submatrix(range(di), range(x.dim - dj, x.dim)))
            blocks[(i, j)] = tuple(mats)
    norm = Normalization(BlockForm.make(frame, g.level, blocks), psi)
    if check:
        _check_normalization(g, norm)
    g._normal = norm
    return norm


def _check_normalization(g: GenExt, norm: Normalization) -> None:
    """The comparison maps intertwine and commute with all arrows (canonical Gr-compatibility)."""
    std = denormalize(norm.blocks)
    fam = {e: RepMorphism(std.x(*e), g.x(*e), norm.psi[e], check=False) for e in g.entries()}
    bad = check_family(std, g, fam)
    if bad is not None:
        raise GenExtError(f"normalization is inconsistent at {bad}")


def check_family(g1: GenExt, g2: GenExt, fam: Mapping[Entry, RepMorphism]) -> Optional[Entry]:
    """First entry where the family fails to be a morphism of diagrams, or None."""
    for e in g1.entries():
        fm = fam.get(e)
        if fm is None:
            return e
        for xs, xt in zip(g1.x(*e).operators, g2.x(*e).operators):
            if xt @ fm.matrix != fm.matrix @ xs:
                return e
    for (m, n) in g1.entries():
        if n - m < 2:
            continue
        if g2.incl[(m, n)].matrix @ fam[(m, n - 1)].matrix != fam[(m, n)].matrix @ g1.incl[(m, n)].matrix:
            return (m, n)
        if g2.proj[(m, n)].matrix @ fam[(m, n)].matrix != fam[(m + 1, n)].matrix @ g1.proj[(m, n)].matrix:
            return (m, n)
    return None


def realize_object(g: GenExt) -> WeightedRep:
    """The object ``X[0, k]`` of a generalized extension of top level."""
    if g.level != g.k - 1:
        raise GenExtError("only top-level generalized extensions come from a single object")
    return g.x(0, g.k)


def from_object(x: WeightedRep, phi, frame: GradedFrame) -> GenExt:
    """Generalized extension ``X[m, n] = W_{p_n} x / W_{p_m} x`` identified with the frame by ``phi``.

    ``phi`` is either a :class:`RepMorphism` from ``graded(x)`` to the direct
    sum of the frame, or a list of per-weight matrices ``x_{p_r} -> A_r``.
    """
    f = x.field
    if x.support != tuple(sorted((w, a.dim) for w, a in zip(frame.weights, frame.parts))):
        raise GenExtError("associated graded does not match the frame")
    if isinstance(phi, RepMorphism):
        if phi.source != graded(x):
            raise GenExtError("phi must start at the associated graded of x")
        total = phi.matrix
    else:
        total = Matrix.block_diag(f, list(phi))
    if not total.is_square() or total.rows != x.dim or not total.is_invertible():
        raise GenExtError("phi is not an isomorphism")
    for i in range(total.rows):
        for j in range(total.cols):
            if total[i, j] and x.degrees[i] != x.degrees[j]:
                raise GenExtError("phi is not graded")
    inv = total.inverse()
    blocks = {}
    offs = [x.span_of(w).start for w in frame.weights]
    for i in range(1, frame.k + 1):
        for j in range(i + 1, frame.k + 1):
            di, dj = frame.a(i).dim, frame.a(j).dim
            mats = []
            for op in x.operators:
                conj = total @ op @ inv
                mats.append(conj.submatrix(range(offs[i - 1], offs[i - 1] + di), range(offs[j - 1], offs[j - 1] + dj)))
            blocks[(i, j)] = tuple(mats)
    return denormalize(BlockForm.make(frame, frame.k - 1, blocks))


def truncate(g: GenExt) -> GenExt:
    """Forget the lowest diagonal."""
    if g.level < 2:
        raise GenExtError("cannot truncate a level-1 generalized extension")
    keep = set(entries_of(g.k, g.level - 1))
    return GenExt(g.frame, g.level - 1, {e: o for e, o in g.objects.items() if e in keep},
                  {e: a for e, a in g.incl.items() if e in keep}, {e: a for e, a in g.proj.items() if e in keep})


def crop(g: GenExt, i: int, j: int) -> GenExt:
    """Keep the entries ``i <= m < n <= j``, re-indexed to the frame ``A_{i+1}, ..., A_j``."""
    if not (0 <= i and i + 1 < j <= g.k):
        raise GenExtError(f"crop range ({i},{j}) is invalid for k = {g.k}")
    frame = g.frame.crop(i, j)
    lvl = min(g.level, j - i - 1)
    keep = entries_of(j - i, lvl)

    def sh(e):
        return (e[0] + i, e[1] + i)

    return GenExt(frame, lvl, {e: g.objects[sh(e)] for e in keep},
                  {e: g.incl[sh(e)] for e in keep if e[1] - e[0] >= 2},
                  {e: g.proj[sh(e)] for e in keep if e[1] - e[0] >= 2})


# ---------------------------------------------------------------------------
# equivalences and Aut(A)

def _check_same_frame(g1: GenExt, g2: GenExt):
    if g1.frame != g2.frame or g1.level != g2.level:
        raise GenExtError("generalized extensions have different frames or levels")


def frame_endomorphism_space(frame: GradedFrame, b1: BlockForm, b2: BlockForm) -> List[List[Matrix]]:
    """Basis of tuples ``(F_r)`` with ``B2[i, j] F_j = F_i B1[i, j]`` for every block and generator."""
    sys_ = MapSystem(frame.field)
    us = [sys_.unknown(a.degrees, a.degrees) for a in frame.parts]
    d1, d2 = b1.as_dict(), b2.as_dict()
    for (i, j), mats1 in d1.items():
        for m1, m2 in zip(mats1, d2[(i, j)]):
            sys_.constrain([(m2, us[j - 1], None), (None, us[i - 1], -m1)])
    _, basis = sys_.solve()
    return basis


def _family_from_frame_maps(g1: GenExt, g2: GenExt, n1: Normalization, n2: Normalization,
                            F: Sequence[Matrix]) -> Dict[Entry, RepMorphism]:
    f = g1.field
    fam = {}
    for (m, n) in g1.entries():
        diag = Matrix.block_diag(f, list(F[m:n]))
        mat = n2.psi[(m, n)] @ diag @ n1.psi_inv((m, n))
        fam[(m, n)] = RepMorphism(g1.x(m, n), g2.x(m, n), mat, check=False)
    return fam


def equiv(g1: GenExt, g2: GenExt, mode: str = "strict", rng: Optional[random.Random] = None):
    """Morphism family realizing ``g1 ∼′ g2`` (strict) or ``g1 ∼ g2`` (iso), or None."""
    _check_same_frame(g1, g2)
    n1, n2 = normalize(g1), normalize(g2)
    f = g1.field
    if mode == "strict":
        if n1.blocks != n2.blocks:
            return None
        F = [Matrix.identity(f, a.dim) for a in g1.frame.parts]
    elif mode == "iso":
        basis = frame_endomorphism_space(g1.frame, n1.blocks, n2.blocks)
        if not basis:
            return None
        mats = [Matrix.block_diag(f, b) for b in basis]
        found, _ = find_invertible(f, mats, rng or random.Random(0))
        if found is None:
            return None
        F = []
        start = 0
        for a in g1.frame.parts:
            F.append(found.submatrix(range(start, start + a.dim), range(start, start + a.dim)))
            start += a.dim
    else:
        raise GenExtError(f"unknown equivalence mode {mode!r}")
    fam = _family_from_frame_maps(g1, g2, n1, n2, F)
    bad = check_family(g1, g2, fam)
    if bad is not None:
        raise GenExtError(f"equivalence family fails at {bad}")
    return fam


def act_autA(sigma: Sequence[Matrix], g: GenExt) -> GenExt:
    """Twist the arrows at each ``A_r``: ``incl`` out of ``A_r`` becomes ``incl ∘ σ_r⁻¹``,
    ``proj`` into ``A_r`` becomes ``σ_r ∘ proj``."""
    frame = g.frame
    if len(sigma) != frame.k:
        raise GenExtError("one automorphism per frame piece is required")
    inv = []
    for r, s in enumerate(sigma, start=1):
        a = frame.a(r)
        if s.shape != (a.dim, a.dim) or not s.is_invertible():
            raise GenExtError(f"component {r} of sigma is not an automorphism of A_{r}")
        inv.append(s.inverse())
    incl = dict(g.incl)
    proj = dict(g.proj)
    for r in range(1, frame.k + 1):
        if (r - 1, r + 1) in incl:
            a = incl[(r - 1, r + 1)]
            incl[(r - 1, r + 1)] = RepMorphism(a.source, a.target, a.matrix @ inv[r - 1], check=False)
        if (r - 2, r) in proj:
            a = proj[(r - 2, r)]
            proj[(r - 2, r)] = RepMorphism(a.source, a.target, sigma[r - 1] @ a.matrix, check=False)
    return GenExt(frame, g.level, g.objects, incl, proj)


def act_blocks(sigma: Sequence[Matrix], bf: BlockForm) -> BlockForm:
    """Effect of :func:`act_autA` on block forms: ``B[i, j] -> σ_i B[i, j] σ_j⁻¹``."""
    inv = [s.inverse() for s in sigma]
    return BlockForm.make(bf.frame, bf.level, {
        (i, j): tuple(sigma[i - 1] @ m @ inv[j - 1] for m in mats) for (i, j), mats in bf.blocks})


# ---------------------------------------------------------------------------
# spreading and gluing morphisms

def spread_morphism(g1: GenExt, g2: GenExt, at: Entry, f: RepMorphism) -> Dict[Entry, RepMorphism]:
    """Unique extension of ``f: X1[i, j] -> X2[i, j]`` to every entry ``i <= m < n <= j``."""
    _check_same_frame(g1, g2)
    i, j = at
    if at not in g1.objects:
        raise GenExtError(f"entry {at} is not part of the diagram")
    if f.source != g1.x(i, j) or f.target != g2.x(i, j):
        raise GenExtError(f"morphism does not connect the entries at {at}")
    out = {}
    for n in range(i + 1, j + 1):
        J1 = g1.chain_incl(i, n, j)
        J2 = g2.chain_incl(i, n, j)
        fin = solve(J2, f.matrix @ J1)
        if fin is None:
            raise GenExtError(f"morphism does not preserve the filtration at ({i},{n})")
        for m in range(i, n):
            P1 = g1.chain_proj(i, m, n)
            P2 = g2.chain_proj(i, m, n)
            src, tgt = g1.x(m, n), g2.x(m, n)
            s1 = section(RepMorphism(g1.x(i, n), src, P1, check=False))
            out[(m, n)] = RepMorphism(src, tgt, P2 @ fin @ s1, check=False)
    return out


def glue_lowest(g1: GenExt, g2: GenExt, fs: Mapping[Entry, RepMorphism]):
    """Glue morphisms on the lowest diagonal into a family.

    Returns ``(family, None)`` when the spreads agree on the diagonal just
    above the lowest, else ``(None, first_violating_entry)``.
    """
    _check_same_frame(g1, g2)
    lowest = g1.lowest()
    missing = [e for e in lowest if e not in fs]
    if missing:
        raise GenExtError(f"no morphism given at {missing[0]}")
    spreads = [spread_morphism(g1, g2, e, fs[e]) for e in lowest]
    for a, b in zip(spreads, spreads[1:]):
        for e in sorted(set(a) & set(b), key=lambda e: (-(e[1] - e[0]), e)):
            if a[e].matrix != b[e].matrix:
                return None, e
    fam = {}
    for s in spreads:
        fam.update(s)
    return fam, None


def compose_families(f2: Mapping[Entry, RepMorphism], f1: Mapping[Entry, RepMorphism]) -> Dict[Entry, RepMorphism]:
    return {e: f2[e] @ f1[e] for e in f1}


def invert_family(fam: Mapping[Entry, RepMorphism]) -> Dict[Entry, RepMorphism]:
    return {e: f.inverse() for e, f in fam.items()}


def identity_family(g: GenExt) -> Dict[Entry, RepMorphism]:
    return {e: RepMorphism.identity(g.x(*e)) for e in g.entries()}


# ---------------------------------------------------------------------------
# transport and the fiber torsor

def replace_entries(g: GenExt, f: Mapping[Entry, RepMorphism]) -> GenExt:
    """Replace each entry ``X[e]`` by ``f[e].target``; arrows into it are composed with ``f[e]``,
    arrows out of it with ``f[e]⁻¹``."""
    inv = {}
    for e, fe in f.items():
        if e not in g.objects or fe.source != g.x(*e):
            raise GenExtError(f"replacement at {e} does not start at the entry")
        if not fe.is_iso():
            raise GenExtError(f"replacement at {e} is not an isomorphism")
        inv[e] = fe.inverse().matrix
    objects = {e: (f[e].target if e in f else o) for e, o in g.objects.items()}

    def twist(arrow, src, tgt):
        mat = arrow.matrix
        if src in f:
            mat = mat @ inv[src]
        if tgt in f:
            mat = f[tgt].matrix @ mat
        return RepMorphism(objects[src], objects[tgt], mat, check=False)

    incl = {(m, n): twist(a, (m, n - 1), (m, n)) for (m, n), a in g.incl.items()}
    proj = {(m, n): twist(a, (m, n), (m + 1, n)) for (m, n), a in g.proj.items()}
    for r in range(1, g.k + 1):
        if objects[(r - 1, r)] != g.frame.a(r):
            raise GenExtError(f"replacement moves A_{r}")
    return GenExt(g.frame, g.level, objects, incl, proj)


def transport(g: GenExt, f: Mapping[Entry, RepMorphism], check: bool = True) -> GenExt:
    """Rebuild ``g`` over another base along an isomorphism ``f`` of its truncation."""
    if g.level < 2:
        raise GenExtError("transport needs level at least 2")
    base_entries = entries_of(g.k, g.level - 1)
    missing = [e for e in base_entries if e not in f]
    if missing:
        raise GenExtError(f"isomorphism is missing entry {missing[0]}")
    for e in base_entries:
        if not f[e].is_iso():
            raise GenExtError(f"f is not an isomorphism at {e}")
    if check:
        tgt_objects = {e: f[e].target for e in base_entries}
        # f must commute with the arrows of its source; the target arrows are then the transported ones
        src = truncate(g)
        for (m, n) in base_entries:
            if n - m >= 2:
                for arrows, a, b in ((src.incl, (m, n - 1), (m, n)), (src.proj, (m, n), (m + 1, n))):
                    moved = f[b].matrix @ arrows[(m, n)].matrix @ f[a].inverse().matrix
                    RepMorphism(tgt_objects[a], tgt_objects[b], moved)
    return replace_entries(g, {e: f[e] for e in base_entries})


def blend_at(g: GenExt, r: int) -> Blend:
    """Blend with top row ``X^h[r-1, r+l-1]``, right column ``X^v[r, r+l]`` and middle ``X[r-1, r+l]``."""
    lvl = g.level
    if lvl < 2:
        raise GenExtError("blends appear from level 2 on")
    top = g.ext_h(r - 1, r + lvl - 1)
    right = g.ext_v(r, r + lvl)
    mid = g.x(r - 1, r + lvl)
    return Blend(top, right, mid, g.incl[(r - 1, r + lvl)], g.proj[(r - 1, r + lvl)])


def translate_member(es: Sequence[ExtClass], g: GenExt) -> GenExt:
    """Act by ``(E_r) ∈ ∏ Ext¹(A_{r+l}, A_r)`` through row translation of each blend."""
    lvl = g.level
    if lvl < 2:
        raise GenExtError("the torsor action needs level at least 2")
    if len(es) != g.k - lvl:
        raise GenExtError(f"expected {g.k - lvl} classes, got {len(es)}")
    objects = dict(g.objects)
    incl = dict(g.incl)
    proj = dict(g.proj)
    for r, e in enumerate(es, start=1):
        if e.of != g.frame.a(r + lvl) or e.by != g.frame.a(r):
            raise GenExtError(f"class {r} does not lie in Ext¹(A_{r + lvl}, A_{r})")
        b = translate_row(e, blend_at(g, r))
        e_ = (r - 1, r + lvl)
        objects[e_] = b.mid
        incl[e_] = b.iota
        proj[e_] = b.pi
    return GenExt(g.frame, lvl, objects, incl, proj)


def group_factors(frame: GradedFrame, level: int) -> List[Tuple[WeightedRep, WeightedRep]]:
    """``(A_{r+l}, A_r)`` for the factors of the torsor group."""
    return [(frame.a(r + level), frame.a(r)) for r in range(1, frame.k - level + 1)]


class FiberDescriptor:
    """The fiber of truncation above a base of level ``l - 1``."""

    def __init__(self, base: GenExt):
        if base.level + 1 > base.k - 1:
            raise GenExtError("base is already at top level; there is no fiber above it")
        self.base = base
        self.level = base.level + 1
        self.norm = normalize(base)
        self.factors = group_factors(base.frame, self.level)
        self.dims = [ext1_dim(m, n) for m, n in self.factors]

    @property
    def group_dim(self) -> int:
        return sum(self.dims)

    def group_order(self) -> Optional[int]:
        p = self.base.field.p
        return None if p is None else p ** self.group_dim

    def split_coords(self, flat: Sequence) -> List[ExtClass]:
        out = []
        start = 0
        for (m, n), d in zip(self.factors, self.dims):
            out.append(ExtClass.from_coords(m, n, flat[start:start + d]))
            start += d
        return out

    def flat(self, classes: Sequence[ExtClass]) -> tuple:
        return tuple(c for e in classes for c in e.coords)

    def zero(self) -> List[ExtClass]:
        return [ExtClass.zero(m, n) for m, n in self.factors]

    def lift(self, classes: Optional[Sequence[ExtClass]] = None) -> GenExt:
        """Member with distance-``l`` blocks given by the classes, literally over the base."""
        classes = self.zero() if classes is None else list(classes)
        if len(classes) != len(self.factors):
            raise GenExtError("wrong number of classes")
        extra = {}
        for r, e in enumerate(classes, start=1):
            if (e.of, e.by) != self.factors[r - 1]:
                raise GenExtError(f"class {r} has the wrong endpoints")
            extra[(r, r + self.level)] = e.reduced
        bf = self.norm.blocks.with_level(self.level, extra)
        std = denormalize(bf)
        fam = {e: RepMorphism(std.x(*e), self.base.x(*e), self.norm.psi[e], check=False)
               for e in self.base.entries()}
        return replace_entries(std, fam)

    def basepoint(self) -> GenExt:
        return self.lift(None)

    def is_member(self, g: GenExt) -> bool:
        return g.level == self.level and truncate(g) == self.base

    def coords(self, member: GenExt) -> List[ExtClass]:
        if not self.is_member(member):
            raise GenExtError("generalized extension is not in this fiber")
        d = normalize(member).blocks.as_dict()
        return [ExtClass(m, n, d[(r, r + self.level)]) for r, (m, n) in enumerate(self.factors, start=1)]

    def act(self, classes: Sequence[ExtClass], member: GenExt) -> GenExt:
        return translate_member(classes, member)

    def members(self):
        """Every ∼′-class of the fiber (finite fields only), via lifts of all coordinates."""
        f = self.base.field
        if f.p is None:
            raise GenExtError("fiber enumeration needs a finite field")
        for flat in itertools.product(f.elements(), repeat=self.group_dim):
            yield self.lift(self.split_coords(flat))


def fiber_classes(base: GenExt) -> FiberDescriptor:
    return FiberDescriptor(base)


def transport_formula_check(g: GenExt, f: Mapping[Entry, RepMorphism], es: Sequence[ExtClass]) -> bool:
    """Check ``tr(E * g, f) ∼′ (f_A · E) * tr(g, f)``, with ``(f_A · E)_r = f_r E_r f_{r+l}⁻¹``."""
    lvl = g.level
    lhs = transport(translate_member(es, g), f)
    moved = []
    for r, e in enumerate(es, start=1):
        fr = f[(r - 1, r)].matrix
        fq = f[(r + lvl - 1, r + lvl)].matrix.inverse()
        moved.append(ExtClass(e.of, e.by, tuple(fr @ c @ fq for c in e.cocycle)))
    rhs = translate_member(moved, transport(g, f))
    return equiv(lhs, rhs, "strict") is not None


def frame_part(fam: Mapping[Entry, RepMorphism], k: int) -> List[Matrix]:
    return [fam[(r - 1, r)].matrix for r in range(1, k + 1)]


# ---------------------------------------------------------------------------
# Γ-action

def automorphism_space(g: GenExt) -> Subspace:
    """Frame coordinates ``(F_r)`` of endomorphisms of ``g``, as a subspace of ``⊕ End(A_r)``."""
    n = normalize(g)
    basis = frame_endomorphism_space(g.frame, n.blocks, n.blocks)
    amb = sum(a.dim ** 2 for a in g.frame.parts)
    return Subspace.span(g.field, amb, [tuple(x for m in b for x in m.flatten()) for b in basis])


def scalar_line(frame: GradedFrame) -> Subspace:
    f = frame.field
    v = tuple(x for a in frame.parts for x in Matrix.identity(f, a.dim).flatten())
    return Subspace.span(f, len(v), [v])


def frame_maps_from_vector(frame: GradedFrame, vec: Sequence) -> List[Matrix]:
    out = []
    start = 0
    for a in frame.parts:
        n = a.dim * a.dim
        out.append(Matrix.from_flat(frame.field, a.dim, a.dim, vec[start:start + n]))
        start += n
    return out


def family_between(g1: GenExt, g2: GenExt, F: Sequence[Matrix]) -> Dict[Entry, RepMorphism]:
    """Family ``g1 -> g2`` whose frame part is ``F``; valid when ``F`` carries the blocks of g1 to those of g2."""
    _check_same_frame(g1, g2)
    fam = _family_from_frame_maps(g1, g2, normalize(g1), normalize(g2), F)
    bad = check_family(g1, g2, fam)
    if bad is not None:
        raise GenExtError(f"frame maps do not give a morphism at {bad}")
    return fam


def family_from_frame(g: GenExt, F: Sequence[Matrix]) -> Dict[Entry, RepMorphism]:
    """Endomorphism family of ``g`` determined by its frame part."""
    n = normalize(g)
    return _family_from_frame_maps(g, g, n, n, F)


def gamma_act(F: Sequence[Matrix], member: GenExt) -> GenExt:
    """Transport a member of a fiber along the automorphism of its base with frame part ``F``."""
    base = truncate(member)
    fam = family_from_frame(base, F)
    if check_family(base, base, fam) is not None:
        raise GenExtError("frame maps do not define an automorphism of the base")
    return transport(member, fam, check=False)


@dataclass
class GammaReport:
    aut_base: Subspace
    stabilizer: Subspace
    aut_base_is_scalar: bool
    stabilizer_is_scalar: bool

    @property
    def stabilizer_is_everything(self) -> bool:
        return self.aut_base == self.stabilizer


def gamma_stabilizer(base: GenExt, member: GenExt) -> GammaReport:
    """Aut(base) and the image of Aut(member) in it, in frame coordinates."""
    if truncate(member) != base:
        raise GenExtError("member does not lie over the base")
    ab = automorphism_space(base)
    st = automorphism_space(member)
    if not st.issubspace(ab):
        raise GenExtError("restriction of automorphisms left Aut(base)")
    sc = scalar_line(base.frame)
    return GammaReport(ab, st, ab == sc, st == sc)


# ---------------------------------------------------------------------------
# level 1

def level1_classes(g: GenExt) -> List[ExtClass]:
    """Classes of ``X^h[r-1, r+1]`` in ``Ext¹(A_{r+1}, A_r)``."""
    d = normalize(g).blocks.as_dict()
    return [ExtClass(g.frame.a(r + 1), g.frame.a(r), d[(r, r + 1)]) for r in range(1, g.k)]


def from_level1(frame: GradedFrame, classes: Sequence[ExtClass]) -> GenExt:
    if len(classes) != frame.k - 1:
        raise GenExtError("one class per adjacent pair is required")
    blocks = {}
    for r, e in enumerate(classes, start=1):
        if e.of != frame.a(r + 1) or e.by != frame.a(r):
            raise GenExtError(f"class {r} does not lie in Ext¹(A_{r + 1}, A_{r})")
        blocks[(r, r + 1)] = e.reduced
    return denormalize(BlockForm.make(frame, 1, blocks))

"""Extension groups in the graded-representation model.

An extension of ``M`` by ``N`` is determined by one cocycle matrix per
generator, ``phi_t: M -> N`` homogeneous of degree ``d_t``; the middle
object lives on ``N ⊕ M`` with operators ``[[X^N_t, phi_t], [0, X^M_t]]``.
Two cocycles give isomorphic extensions exactly when they differ by a
coboundary ``(X^N_t h - h X^M_t)_t`` for a degree-0 linear map ``h``.

Classes are stored with a canonical representative: the cocycle vector is
reduced against the RREF basis of the coboundary space, so equality of
classes is equality of reduced vectors.
"""

from __future__ import annotations

import functools
from random import Random
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .exactla import Matrix, Subspace, solve
from .repcat import (ModelError, RepMorphism, SignatureMismatch, WeightedRep, hom_basis,
                     hom_unvec, hom_vec, internal_hom, section, unit, _permuted)


class ExtData:
    """Cocycle coordinates and coboundary space for Ext¹(m, n)."""

    def __init__(self, m: WeightedRep, n: WeightedRep):
        if m.signature != n.signature:
            raise SignatureMismatch()
        self.m = m
        self.n = n
        f = m.field
        self.field = f
        # cocycle positions: for generator t, entries (i, j) with deg n_i = deg m_j + d_t
        self.positions: List[Tuple[int, int, int]] = []
        for t, g in enumerate(m.signature.generators):
            for i, di in enumerate(n.degrees):
                for j, dj in enumerate(m.degrees):
                    if di == dj + g.degree:
                        self.positions.append((t, i, j))
        self.index = {pos: k for k, pos in enumerate(self.positions)}
        size = len(self.positions)
        vecs = []
        for i, di in enumerate(n.degrees):
            for j, dj in enumerate(m.degrees):
                if di != dj:
                    continue
                # coboundary of the elementary map E_ij
                v = [f.zero] * size
                for t in range(len(m.signature.generators)):
                    xn = n.operators[t]
                    xm = m.operators[t]
                    for a in range(n.dim):
                        c = xn.data[a][i]
                        if c:
                            v[self.index[(t, a, j)]] += c
                    for b in range(m.dim):
                        c = xm.data[j][b]
                        if c:
                            v[self.index[(t, i, b)]] -= c
                if f.p is not None:
                    v = [x % f.p for x in v]
                if any(v):
                    vecs.append(v)
        self.coboundaries = Subspace.span(f, size, vecs)
        self.free = self.coboundaries.complement_coordinates()

    @property
    def dim(self) -> int:
        return len(self.free)

    def to_vector(self, cocycle: Sequence[Matrix]) -> tuple:
        sig = self.m.signature
        if len(cocycle) != len(sig.generators):
            raise ModelError("one cocycle matrix per generator is required")
        for t, (g, phi) in enumerate(zip(sig.generators, cocycle)):
            if phi.shape != (self.n.dim, self.m.dim):
                raise ModelError(f"cocycle for {g.name!r} has shape {phi.shape}, expected {(self.n.dim, self.m.dim)}")
            for i, row in enumerate(phi.data):
                for j, v in enumerate(row):
                    if v and (t, i, j) not in self.index:
                        raise ModelError(f"cocycle for {g.name!r} is not homogeneous of degree {g.degree}")
        return tuple(cocycle[t].data[i][j] for t, i, j in self.positions) if self.positions else ()

    def from_vector(self, vec: Sequence) -> Tuple[Matrix, ...]:
        f = self.field
        k = len(self.m.signature.generators)
        data = [[[f.zero] * self.m.dim for _ in range(self.n.dim)] for _ in range(k)]
        for (t, i, j), v in zip(self.positions, vec):
            data[t][i][j] = v
        return tuple(Matrix(f, d, self.m.dim) if d else Matrix.zeros(f, 0, self.m.dim) for d in data)

    def reduce(self, vec: Sequence) -> tuple:
        return self.coboundaries.reduce(vec) if self.positions else ()

    def coords(self, vec: Sequence) -> tuple:
        r = self.reduce(vec)
        return tuple(r[k] for k in self.free)

    def vector_from_coords(self, coords: Sequence) -> tuple:
        if len(coords) != self.dim:
            raise ModelError(f"expected {self.dim} coordinates, got {len(coords)}")
        f = self.field
        v = [f.zero] * len(self.positions)
        for k, c in zip(self.free, coords):
            v[k] = f(c)
        return tuple(v)


@functools.lru_cache(maxsize=8192)
def ext_data(m: WeightedRep, n: WeightedRep) -> ExtData:
    return ExtData(m, n)


class ExtClass:
    """An element of Ext¹(of, by), given by a cocycle with a canonical reduction."""

    __slots__ = ("of", "by", "cocycle", "_coords")

    def __init__(self, of: WeightedRep, by: WeightedRep, cocycle: Sequence[Matrix]):
        data = ext_data(of, by)
        cocycle = tuple(cocycle)
        vec = data.to_vector(cocycle)
        self.of = of
        self.by = by
        self.cocycle = cocycle
        self._coords = data.coords(vec)

    @property
    def data(self) -> ExtData:
        return ext_data(self.of, self.by)

    @property
    def field(self):
        return self.of.field

    @property
    def coords(self) -> tuple:
        """Coordinates in the canonical basis of Ext¹(of, by)."""
        return self._coords

    @property
    def reduced(self) -> Tuple[Matrix, ...]:
        """Canonical cocycle representative of the class."""
        d = self.data
        return d.from_vector(d.vector_from_coords(self._coords))

    @classmethod
    def zero(cls, of: WeightedRep, by: WeightedRep) -> "ExtClass":
        d = ext_data(of, by)
        return cls(of, by, d.from_vector([of.field.zero] * len(d.positions)))

    @classmethod
    def from_coords(cls, of: WeightedRep, by: WeightedRep, coords: Sequence) -> "ExtClass":
        d = ext_data(of, by)
        return cls(of, by, d.from_vector(d.vector_from_coords(coords)))

    @classmethod
    def random(cls, of: WeightedRep, by: WeightedRep, rng: Random, bound: int = 3) -> "ExtClass":
        d = ext_data(of, by)
        return cls(of, by, d.from_vector([of.field.random(rng, bound) for _ in d.positions]))

    def is_split(self) -> bool:
        return not any(self._coords)

    def canonical(self) -> "ExtClass":
        return ExtClass(self.of, self.by, self.reduced)

    def __add__(self, other: "ExtClass") -> "ExtClass":
        return baer_sum(self, other)

    def __neg__(self) -> "ExtClass":
        return ExtClass(self.of, self.by, tuple(-c for c in self.cocycle))

    def __sub__(self, other: "ExtClass") -> "ExtClass":
        return baer_sum(self, -other)

    def scale(self, c) -> "ExtClass":
        return ExtClass(self.of, self.by, tuple(m.scale(c) for m in self.cocycle))

    def __eq__(self, other):
        if not isinstance(other, ExtClass):
            return NotImplemented
        return self.of == other.of and self.by == other.by and self._coords == other._coords

    def __hash__(self):
        return hash((self.of, self.by, self._coords))

    def __repr__(self):
        return f"ExtClass({self.of!r} by {self.by!r}, coords={list(self._coords)})"


def ext1_space(m: WeightedRep, n: WeightedRep) -> Tuple[int, List[ExtClass]]:
    """Dimension and canonical basis of Ext¹(m, n)."""
    d = ext_data(m, n)
    basis = []
    for k in range(d.dim):
        coords = [m.field.zero] * d.dim
        coords[k] = m.field.one
        basis.append(ExtClass.from_coords(m, n, coords))
    return d.dim, basis


def ext1_dim(m: WeightedRep, n: WeightedRep) -> int:
    return ext_data(m, n).dim


@dataclass(frozen=True)
class ExtensionSeq:
    """A short exact sequence ``0 -> sub -> mid -> quot -> 0``."""

    sub: WeightedRep
    mid: WeightedRep
    quot: WeightedRep
    incl: RepMorphism
    proj: RepMorphism

    def validate(self) -> None:
        if self.incl.source != self.sub or self.incl.target != self.mid:
            raise ModelError("inclusion endpoints do not match the sequence")
        if self.proj.source != self.mid or self.proj.target != self.quot:
            raise ModelError("projection endpoints do not match the sequence")
        self.incl.validate()
        self.proj.validate()
        if not self.incl.is_mono():
            raise ModelError("sequence is not exact: inclusion is not injective")
        if not self.proj.is_epi():
            raise ModelError("sequence is not exact: projection is not surjective")
        if not (self.proj.matrix @ self.incl.matrix).is_zero() or \
                self.incl.matrix.rank() != self.proj.matrix.kernel().dim:
            raise ModelError("sequence is not exact in the middle")


def realize(e: ExtClass) -> ExtensionSeq:
    """Middle object on ``by ⊕ of`` with operators ``[[X^by, phi], [0, X^of]]``."""
    n, m = e.by, e.of
    f = e.field
    labels = [(d, 0, i) for i, d in enumerate(n.degrees)] + [(d, 1, j) for j, d in enumerate(m.degrees)]
    ops = []
    for xn, xm, phi in zip(n.operators, m.operators, e.cocycle):
        top = xn.hstack(phi)
        bottom = Matrix.zeros(f, m.dim, n.dim).hstack(xm)
        ops.append(top.vstack(bottom))
    mid, P = _permuted(n.signature, labels, ops)
    total = n.dim + m.dim
    emb_n = Matrix.zeros(f, total, n.dim).with_block(0, 0, Matrix.identity(f, n.dim))
    emb_m = Matrix.zeros(f, total, m.dim).with_block(n.dim, 0, Matrix.identity(f, m.dim))
    incl = RepMorphism(n, mid, P @ emb_n, check=False)
    proj = RepMorphism(mid, m, (P @ emb_m).T, check=False)
    return ExtensionSeq(n, mid, m, incl, proj)


def class_of(s: ExtensionSeq, check: bool = True) -> ExtClass:
    """Cocycle of a short exact sequence, computed from its canonical linear section."""
    if check:
        s.validate()
    sigma = section(s.proj)
    cocycle = []
    for x, xm in zip(s.mid.operators, s.quot.operators):
        defect = x @ sigma - sigma @ xm
        phi = solve(s.incl.matrix, defect)
        if phi is None:
            raise ModelError("sequence is not exact")
        cocycle.append(phi)
    return ExtClass(s.quot, s.sub, cocycle)


def _same_endpoints(e1: ExtClass, e2: ExtClass):
    if e1.of != e2.of or e1.by != e2.by:
        raise ModelError("extension classes have different endpoints")


def baer_sum(e1: ExtClass, e2: ExtClass) -> ExtClass:
    _same_endpoints(e1, e2)
    return ExtClass(e1.of, e1.by, tuple(a + b for a, b in zip(e1.cocycle, e2.cocycle)))


def ext_arith(e1: ExtClass, e2: ExtClass) -> ExtClass:
    return baer_sum(e1, e2)


def pushforward(e: ExtClass, f: RepMorphism) -> ExtClass:
    """Image of ``e`` under ``f: by -> by'``."""
    if f.source != e.by:
        raise ModelError("pushforward map must start at the subobject of the extension")
    return ExtClass(e.of, f.target, tuple(f.matrix @ phi for phi in e.cocycle))


def pullback(e: ExtClass, g: RepMorphism) -> ExtClass:
    """Image of ``e`` under ``g: of' -> of``."""
    if g.target != e.of:
        raise ModelError("pullback map must end at the quotient of the extension")
    return ExtClass(g.source, e.by, tuple(phi @ g.matrix for phi in e.cocycle))


def is_split(e: ExtClass) -> bool:
    return e.is_split()


def transfer_unit(e: ExtClass) -> ExtClass:
    """Move an extension of Y by X to an extension of the unit by internal_hom(Y, X)."""
    y, x = e.of, e.by
    h = internal_hom(y, x)
    one = unit(y.signature)
    cocycle = tuple(Matrix(y.field, [[v] for v in hom_vec(y, x, phi)], 1) if h.dim else Matrix.zeros(y.field, 0, 1)
                    for phi in e.cocycle)
    return ExtClass(one, h, cocycle)


def transfer_inverse(e: ExtClass, of: WeightedRep, by: WeightedRep) -> ExtClass:
    """Inverse of :func:`transfer_unit` for the pair ``(of, by)``."""
    h = internal_hom(of, by)
    if e.by != h or e.of != unit(of.signature):
        raise ModelError("class does not live in Ext¹(1, internal_hom(of, by))")
    return ExtClass(of, by, tuple(hom_unvec(of, by, phi.column(0)) for phi in e.cocycle))


def connecting_image(n: ExtClass, a1: WeightedRep) -> Subspace:
    """Image of Hom(n.by, a1) -> Ext¹(n.of, a1), h -> h_* n, in canonical coordinates."""
    d = ext_data(n.of, a1)
    vecs = [pushforward(n, RepMorphism(n.by, a1, h, check=False)).coords for h in hom_basis(n.by, a1)]
    return Subspace.span(n.field, d.dim, vecs)


def yoneda_obstruction(l: ExtClass, n: ExtClass):
    """Vanishing witness for the Yoneda product of ``l`` and ``n``: a blend containing both."""
    if l.of != n.by:
        raise ModelError("extensions do not share the middle graded object")
    from .blended import make_blend
    return make_blend(realize(l), realize(n))

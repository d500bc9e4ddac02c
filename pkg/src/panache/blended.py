"""Blended extensions: 3x3 exact diagrams interlocking two extensions.

A blend of ``L`` (an extension of A2 by A1) and ``N`` (an extension of A3
by A2) is a middle object ``X`` with a mono ``iota: L -> X`` and an epi
``pi: X -> N`` such that::

    A1 -> L  -> A2
    ||    |     |
    A1 -> X  -> N
          |     |
          A3 == A3

has exact rows and columns and commuting squares.  Two blends are
equivalent when an isomorphism of middle objects is the identity on ``L``
and ``N``.  The set of classes is a torsor under Ext¹(A3, A1); translation
is implemented in two ways (Baer sum on the middle row, pushforward into
the middle column) so the two can be compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .exactla import Matrix, Subspace, solve
from .extmod import ExtClass, ExtensionSeq, class_of, ext1_space, ext_data, pullback, realize
from .repcat import (MapSystem, ModelError, RepMorphism, WeightedRep, _permuted, direct_sum,
                     factor_through_epi, fiber_product, quotient, section)


@dataclass(frozen=True)
class Blend:
    l: ExtensionSeq
    n: ExtensionSeq
    mid: WeightedRep
    iota: RepMorphism
    pi: RepMorphism

    @property
    def a1(self) -> WeightedRep:
        return self.l.sub

    @property
    def a2(self) -> WeightedRep:
        return self.l.quot

    @property
    def a3(self) -> WeightedRep:
        return self.n.quot

    @property
    def field(self):
        return self.mid.field

    def row(self) -> ExtensionSeq:
        """Middle row ``A1 -> X -> N``."""
        return ExtensionSeq(self.a1, self.mid, self.n.mid, self.iota @ self.l.incl, self.pi)

    def column(self) -> ExtensionSeq:
        """Middle column ``L -> X -> A3``."""
        return ExtensionSeq(self.l.mid, self.mid, self.a3, self.iota, self.n.proj @ self.pi)

    def validate(self) -> None:
        if self.l.quot != self.n.sub:
            raise ModelError("the two extensions do not share A2")
        self.l.validate()
        self.n.validate()
        if self.iota.source != self.l.mid or self.iota.target != self.mid:
            raise ModelError("iota has the wrong endpoints")
        if self.pi.source != self.mid or self.pi.target != self.n.mid:
            raise ModelError("pi has the wrong endpoints")
        self.row().validate()
        self.column().validate()
        # the square L -> X -> N equals L -> A2 -> N
        if self.pi.matrix @ self.iota.matrix != self.n.incl.matrix @ self.l.proj.matrix:
            raise ModelError("square L -> X -> N does not commute")


def make_blend(l: ExtensionSeq, n: ExtensionSeq) -> Blend:
    """Canonical blend on ``A1 ⊕ A2 ⊕ A3`` with zero corner block."""
    if l.quot != n.sub:
        raise ModelError("interface object mismatch: quotient of L differs from subobject of N")
    a1, a2, a3 = l.sub, l.quot, n.quot
    f = a1.field
    cl = class_of(l)
    cn = class_of(n)
    labels = ([(d, 0, i) for i, d in enumerate(a1.degrees)] + [(d, 1, i) for i, d in enumerate(a2.degrees)]
              + [(d, 2, i) for i, d in enumerate(a3.degrees)])
    d1, d2, d3 = a1.dim, a2.dim, a3.dim
    ops = []
    for x1, x2, x3, pl, pn in zip(a1.operators, a2.operators, a3.operators, cl.cocycle, cn.cocycle):
        top = x1.hstack(pl, Matrix.zeros(f, d1, d3))
        midrow = Matrix.zeros(f, d2, d1).hstack(x2, pn)
        bot = Matrix.zeros(f, d3, d1 + d2).hstack(x3)
        ops.append(top.vstack(midrow, bot))
    mid, P = _permuted(a1.signature, labels, ops)
    total = d1 + d2 + d3

    def inj(start, size):
        return P @ Matrix.zeros(f, total, size).with_block(start, 0, Matrix.identity(f, size))

    inj1, inj2, inj3 = inj(0, d1), inj(d1, d2), inj(d1 + d2, d3)
    sl = section(l.proj)
    retract = _retraction(l, sl)
    iota = RepMorphism(l.mid, mid, inj1 @ retract + inj2 @ l.proj.matrix)
    sn = section(n.proj)
    pi = RepMorphism(mid, n.mid, n.incl.matrix @ inj2.T + sn @ inj3.T)
    return Blend(l, n, mid, iota, pi)


def _retraction(s: ExtensionSeq, sigma: Matrix) -> Matrix:
    """Linear map r with ``r @ incl = 1`` and ``r @ sigma = 0``."""
    f = s.mid.field
    comp = Matrix.identity(f, s.mid.dim) - sigma @ s.proj.matrix
    # comp lands in the image of incl; read off the coordinates
    r = solve(s.incl.matrix, comp)
    if r is None:
        raise ModelError("sequence is not exact")
    return r


def _check_translation(e: ExtClass, b: Blend):
    if e.of != b.a3 or e.by != b.a1:
        raise ModelError("translation class must lie in Ext¹(A3, A1)")


def translate_row(e: ExtClass, b: Blend) -> Blend:
    """Add ``omega^* e`` to the middle row (omega: N -> A3) by an explicit Baer sum."""
    _check_translation(e, b)
    es = realize(e)
    # P = N x_{A3} E
    P, p_n, p_e = fiber_product(b.n.proj, es.proj)
    # F = X x_N P
    F, f_x, f_p = fiber_product(b.pi, p_n)
    # antidiagonal copy of A1 in F: (incl_X a, (0, -incl_E a))
    a1 = b.a1
    inc_x = (b.iota @ b.l.incl).matrix
    # the element (0, -incl_E a) of P
    target_p = Matrix.zeros(a1.field, b.n.mid.dim, a1.dim).vstack(-es.incl.matrix)
    p_in_sum = _coords_in(P, p_n, p_e, target_p)
    anti = _coords_in_pair(F, f_x, f_p, inc_x, p_in_sum)
    Xp, q = quotient(F, anti.image())
    # iota'(l) = [(iota l, (pi iota l, 0))]
    lmid = b.l.mid
    il = b.iota.matrix
    pil = b.pi.matrix @ il
    p_of_l = _coords_in(P, p_n, p_e, pil.vstack(Matrix.zeros(a1.field, es.mid.dim, lmid.dim)))
    f_of_l = _coords_in_pair(F, f_x, f_p, il, p_of_l)
    iota = RepMorphism(lmid, Xp, q.matrix @ f_of_l)
    pi = factor_through_epi(q, b.pi @ f_x)
    return Blend(b.l, b.n, Xp, iota, pi)


def translate_column(e: ExtClass, b: Blend) -> Blend:
    """Add ``lambda_* e`` to the middle column (lambda: A1 -> L) by an explicit Baer sum."""
    _check_translation(e, b)
    es = realize(e)
    lmid = b.l.mid
    f = b.field
    # Q = (L ⊕ E) / {(-lambda a, incl_E a)}
    S, inj, prj = direct_sum([lmid, es.mid])
    rel = RepMorphism(b.a1, S, inj[1].matrix @ es.incl.matrix - inj[0].matrix @ b.l.incl.matrix)
    Q, qq = quotient(S, rel.matrix.image())
    # Q -> A3 induced by (0, proj_E)
    q_to_a3 = factor_through_epi(qq, es.proj @ prj[1])
    F, f_x, f_q = fiber_product(b.n.proj @ b.pi, q_to_a3)
    # antidiagonal copy of L: (iota l, -[l, 0])
    anti = _coords_in_pair(F, f_x, f_q, b.iota.matrix, -(qq.matrix @ inj[0].matrix))
    Xc, q = quotient(F, anti.image())
    iota = RepMorphism(lmid, Xc, q.matrix @ _coords_in_pair(F, f_x, f_q, b.iota.matrix,
                                                                 Matrix.zeros(f, Q.dim, lmid.dim)))
    # pi''[(x, [l, e])] = pi x + incl_N proj_L l
    kappa = factor_through_epi(qq, RepMorphism(S, b.n.mid, b.n.incl.matrix @ b.l.proj.matrix @ prj[0].matrix))
    pi = factor_through_epi(q, b.pi @ f_x + kappa @ f_q)
    return Blend(b.l, b.n, Xc, iota, pi)


def _coords_in(P: WeightedRep, pa: RepMorphism, pb: RepMorphism, stacked: Matrix) -> Matrix:
    """Coordinates in a fiber product of vectors given as stacked component pairs."""
    joint = pa.matrix.vstack(pb.matrix)
    x = solve(joint, stacked)
    if x is None:
        raise ModelError("vector does not lie in the fiber product")
    return x


def _coords_in_pair(F: WeightedRep, fa: RepMorphism, fb: RepMorphism, a: Matrix, b: Matrix) -> Matrix:
    return _coords_in(F, fa, fb, a.vstack(b))


def translate(e: ExtClass, b: Blend, construction: str = "row") -> Blend:
    if construction == "row":
        return translate_row(e, b)
    if construction == "column":
        return translate_column(e, b)
    raise ModelError(f"unknown construction {construction!r}")


def _same_frame(b1: Blend, b2: Blend):
    if b1.l != b2.l or b1.n != b2.n:
        raise ModelError("blends do not share the same L and N")


def blend_equiv(b1: Blend, b2: Blend) -> Optional[RepMorphism]:
    """Isomorphism of middle objects that is the identity on L and N, or None."""
    _same_frame(b1, b2)
    if b1.mid.support != b2.mid.support:
        return None
    sys_ = MapSystem(b1.field)
    u = sys_.unknown_between(b1.mid, b2.mid)
    sys_.intertwines(u, b1.mid, b2.mid)
    sys_.constrain([(None, u, b1.iota.matrix)], b2.iota.matrix)
    sys_.constrain([(b2.pi.matrix, u, None)], b1.pi.matrix)
    part, _ = sys_.solve()
    if part is None:
        return None
    # any solution is invertible: it induces identities on the graded pieces of a finite filtration
    return RepMorphism(b1.mid, b2.mid, part[0], check=False)


def second_row(b: Blend) -> ExtClass:
    """Class of the middle row, an element of Ext¹(N, A1)."""
    return class_of(b.row())


def second_row_translate_formula(e: ExtClass, b: Blend) -> ExtClass:
    """Expected second row of a translate: old row plus the pullback of e along N -> A3."""
    return second_row(b) + pullback(e, b.n.proj)


def aut_blend(b: Blend) -> Subspace:
    """Endomorphisms g of X with ``g iota = 0``, ``pi g = 0``; ``1 + g`` are the automorphisms."""
    sys_ = MapSystem(b.field)
    u = sys_.unknown_between(b.mid, b.mid)
    sys_.intertwines(u, b.mid, b.mid)
    sys_.constrain([(None, u, b.iota.matrix)])
    sys_.constrain([(b.pi.matrix, u, None)])
    _, basis = sys_.solve()
    return Subspace.span(b.field, b.mid.dim ** 2, [m[0].flatten() for m in basis])


def corner_class(b: Blend) -> ExtClass:
    """Torsor coordinate relative to the canonical blend: the e with ``translate(e, make_blend) ~ b``.

    Solved by comparing second rows: the difference of middle rows is the
    pullback of e along N -> A3, which determines e modulo the connecting image.
    """
    base = make_blend(b.l, b.n)
    _, basis = ext1_space(b.a3, b.a1)
    diff = second_row(b) - second_row(base)
    f = b.field
    # solve diff = sum c_k omega^* basis_k modulo coboundaries
    data = ext_data(b.n.mid, b.a1)
    cols = [pullback(v, b.n.proj).coords for v in basis]
    if not basis:
        return ExtClass.zero(b.a3, b.a1)
    m = Matrix.from_columns(f, cols, data.dim)
    rhs = Matrix(f, [[c] for c in diff.coords], 1) if data.dim else Matrix.zeros(f, 0, 1)
    x = solve(m, rhs)
    if x is None:
        raise ModelError("second row is not a translate of the canonical blend")
    return ExtClass.from_coords(b.a3, b.a1, x.column(0))

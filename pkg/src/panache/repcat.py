"""Graded representations of a free graded Lie algebra.

An object is a finite-dimensional Z-graded vector space together with one
operator per generator; generator ``t`` of degree ``d_t < 0`` maps the
degree-``n`` piece to the degree-``n + d_t`` piece.  The weight filtration
``W_n`` is the span of all degrees ``<= n``.  Because the Lie algebra is free,
any homogeneous operator assignment is an object, and because all generator
degrees are negative, every operator is nilpotent.

Bases are always ordered by ascending degree and then by index inside a
degree, so every object and map has a unique matrix.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .exactla import Field, Matrix, Subspace, find_invertible, solve, solve_affine


class ModelError(ValueError):
    """Domain error raised by the representation layer."""


class SignatureMismatch(ModelError):
    def __init__(self, msg: str = "signature mismatch"):
        super().__init__(msg)


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int


@dataclass(frozen=True)
class ModelSignature:
    field: Field
    generators: Tuple[Generator, ...] = ()

    def __post_init__(self):
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ModelError("generator names must be unique")
        for g in self.generators:
            if not isinstance(g.degree, int) or g.degree >= 0:
                raise ModelError(f"generator {g.name!r} has degree {g.degree}; degrees must be negative")

    @classmethod
    def make(cls, field: Field, gens: Iterable) -> "ModelSignature":
        """Build from ``(name, degree)`` pairs or :class:`Generator` values."""
        out = []
        for g in gens:
            out.append(g if isinstance(g, Generator) else Generator(str(g[0]), int(g[1])))
        return cls(field, tuple(out))

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(g.degree for g in self.generators)

    def index(self, name: str) -> int:
        for i, g in enumerate(self.generators):
            if g.name == name:
                return i
        raise ModelError(f"unknown generator {name!r}")

    def __len__(self):
        return len(self.generators)


class WeightedRep:
    """A graded representation: support ``{degree: dim}`` plus operators."""

    __slots__ = ("signature", "support", "operators", "degrees", "_offsets", "_hash")

    def __init__(self, signature: ModelSignature, support, operators=None, check: bool = True):
        self.signature = signature
        items = support.items() if isinstance(support, Mapping) else support
        supp = tuple(sorted((int(d), int(n)) for d, n in items if int(n) != 0))
        for d, n in supp:
            if n < 0:
                raise ModelError(f"negative dimension at degree {d}")
        if len({d for d, _ in supp}) != len(supp):
            raise ModelError("repeated degree in support")
        self.support = supp
        degs = []
        offsets = {}
        for d, n in supp:
            offsets[d] = (len(degs), n)
            degs.extend([d] * n)
        self.degrees = tuple(degs)
        self._offsets = offsets
        dim = len(degs)
        f = signature.field
        if operators is None:
            ops = tuple(Matrix.zeros(f, dim, dim) for _ in signature.generators)
        elif isinstance(operators, Mapping):
            unknown = set(operators) - set(signature.names)
            if unknown:
                raise ModelError(f"operators for unknown generators {sorted(unknown)}")
            ops = tuple(operators.get(g.name, Matrix.zeros(f, dim, dim)) for g in signature.generators)
        else:
            ops = tuple(operators)
        if len(ops) != len(signature.generators):
            raise ModelError("one operator per generator is required")
        for g, m in zip(signature.generators, ops):
            if m.field != f:
                raise ModelError(f"operator {g.name!r} is over the wrong field")
            if m.shape != (dim, dim):
                raise ModelError(f"dimension mismatch: operator {g.name!r} is {m.rows}x{m.cols}, total dimension {dim}")
        self.operators = ops
        self._hash = None
        if check:
            validate_rep(self)

    @property
    def field(self) -> Field:
        return self.signature.field

    @property
    def dim(self) -> int:
        return len(self.degrees)

    @property
    def weights(self) -> Tuple[int, ...]:
        return tuple(d for d, _ in self.support)

    def dim_at(self, degree: int) -> int:
        return self._offsets.get(degree, (0, 0))[1]

    def span_of(self, degree: int) -> range:
        start, n = self._offsets.get(degree, (0, 0))
        return range(start, start + n)

    def op(self, name: str) -> Matrix:
        return self.operators[self.signature.index(name)]

    def is_pure(self) -> bool:
        return len(self.support) <= 1 and all(m.is_zero() for m in self.operators)

    def is_zero(self) -> bool:
        return self.dim == 0

    def block(self, t: int, to_deg: int, from_deg: int) -> Matrix:
        return self.operators[t].submatrix(self.span_of(to_deg), self.span_of(from_deg))

    def __eq__(self, other):
        if not isinstance(other, WeightedRep):
            return NotImplemented
        return (self.signature == other.signature and self.support == other.support
                and self.operators == other.operators)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.signature, self.support, self.operators))
        return self._hash

    def __repr__(self):
        supp = ", ".join(f"{d}:{n}" for d, n in self.support)
        return f"WeightedRep({{{supp}}})"

    def with_operators(self, ops: Sequence[Matrix], check: bool = True) -> "WeightedRep":
        return WeightedRep(self.signature, self.support, tuple(ops), check=check)


def validate_rep(x: WeightedRep) -> None:
    """Raise :class:`ModelError` unless every operator is homogeneous of its degree."""
    degs = x.degrees
    for g, m in zip(x.signature.generators, x.operators):
        if m.shape != (x.dim, x.dim):
            raise ModelError(f"dimension mismatch for operator {g.name!r}")
        for i, row in enumerate(m.data):
            for j, v in enumerate(row):
                if v and degs[i] != degs[j] + g.degree:
                    raise ModelError(
                        f"inhomogeneous operator {g.name!r}: entry ({i},{j}) maps degree {degs[j]} "
                        f"to degree {degs[i]}, expected degree change {g.degree}")


def zero_object(sig: ModelSignature) -> WeightedRep:
    return WeightedRep(sig, {}, check=False)


def unit(sig: ModelSignature) -> WeightedRep:
    """The unit object: one dimension in degree 0."""
    return WeightedRep(sig, {0: 1}, check=False)


def pure(sig: ModelSignature, degree: int, dim: int = 1) -> WeightedRep:
    return WeightedRep(sig, {degree: dim}, check=False)


def _same_sig(*objs: WeightedRep):
    s = objs[0].signature
    for o in objs[1:]:
        if o.signature != s:
            raise SignatureMismatch()


class RepMorphism:
    """A degree-0 intertwiner between two objects."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: WeightedRep, target: WeightedRep, matrix: Matrix, check: bool = True):
        _same_sig(source, target)
        if matrix.shape != (target.dim, source.dim):
            raise ModelError(f"morphism matrix is {matrix.rows}x{matrix.cols}, expected {target.dim}x{source.dim}")
        self.source = source
        self.target = target
        self.matrix = matrix
        if check:
            self.validate()

    def validate(self):
        m = self.matrix
        for i, row in enumerate(m.data):
            for j, v in enumerate(row):
                if v and self.target.degrees[i] != self.source.degrees[j]:
                    raise ModelError("morphism is not homogeneous of degree 0")
        for g, xs, xt in zip(self.source.signature.generators, self.source.operators, self.target.operators):
            if xt @ m != m @ xs:
                raise ModelError(f"map does not intertwine generator {g.name!r}")

    @classmethod
    def identity(cls, x: WeightedRep) -> "RepMorphism":
        return cls(x, x, Matrix.identity(x.field, x.dim), check=False)

    @classmethod
    def zero(cls, src: WeightedRep, tgt: WeightedRep) -> "RepMorphism":
        return cls(src, tgt, Matrix.zeros(src.field, tgt.dim, src.dim), check=False)

    def __matmul__(self, other: "RepMorphism") -> "RepMorphism":
        """Composition ``self ∘ other``."""
        if other.target != self.source:
            raise ModelError("composition endpoint mismatch")
        return RepMorphism(other.source, self.target, self.matrix @ other.matrix, check=False)

    def __add__(self, other: "RepMorphism") -> "RepMorphism":
        if (self.source, self.target) != (other.source, other.target):
            raise ModelError("sum of morphisms with different endpoints")
        return RepMorphism(self.source, self.target, self.matrix + other.matrix, check=False)

    def __neg__(self):
        return RepMorphism(self.source, self.target, -self.matrix, check=False)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "RepMorphism":
        return RepMorphism(self.source, self.target, self.matrix.scale(c), check=False)

    def __eq__(self, other):
        if not isinstance(other, RepMorphism):
            return NotImplemented
        return self.source == other.source and self.target == other.target and self.matrix == other.matrix

    def __hash__(self):
        return hash((self.source, self.target, self.matrix))

    def __repr__(self):
        return f"RepMorphism({self.source!r} -> {self.target!r})"

    def is_mono(self) -> bool:
        return self.matrix.rank() == self.source.dim

    def is_epi(self) -> bool:
        return self.matrix.rank() == self.target.dim

    def is_iso(self) -> bool:
        return self.source.dim == self.target.dim and self.is_mono()

    def inverse(self) -> "RepMorphism":
        if not self.is_iso():
            raise ModelError("morphism is not invertible")
        return RepMorphism(self.target, self.source, self.matrix.inverse(), check=False)


# ---------------------------------------------------------------------------
# linear systems in unknown degree-0 maps

class MapSystem:
    """Collects linear equations on several unknown degree-0 matrices.

    Each unknown has free entries only where source and target degree agree.
    Constraints are sums of terms ``P @ H @ Q`` (``None`` meaning identity)
    equated to a fixed matrix.
    """

    def __init__(self, field: Field):
        self.field = field
        self.nvars = 0
        self.unknowns = []  # (rows, cols, {(r, c): var})
        self.equations = []

    def unknown(self, tgt_degrees: Sequence[int], src_degrees: Sequence[int]) -> int:
        positions = {}
        for r, dr in enumerate(tgt_degrees):
            for c, dc in enumerate(src_degrees):
                if dr == dc:
                    positions[(r, c)] = self.nvars
                    self.nvars += 1
        self.unknowns.append((len(tgt_degrees), len(src_degrees), positions))
        return len(self.unknowns) - 1

    def unknown_between(self, src: WeightedRep, tgt: WeightedRep) -> int:
        return self.unknown(tgt.degrees, src.degrees)

    def constrain(self, terms: Sequence[Tuple[Optional[Matrix], int, Optional[Matrix]]],
                  rhs: Optional[Matrix] = None):
        """Add ``sum P @ H_u @ Q == rhs`` for terms ``(P, u, Q)``."""
        eqs: Dict[Tuple[int, int], Dict[int, object]] = {}
        f = self.field
        out_shape = None
        for P, u, Q in terms:
            rows, cols, positions = self.unknowns[u]
            prow = P.rows if P is not None else rows
            qcol = Q.cols if Q is not None else cols
            if out_shape is None:
                out_shape = (prow, qcol)
            elif out_shape != (prow, qcol):
                raise ModelError("inconsistent term shapes in constraint")
            for (r, c), var in positions.items():
                if P is None:
                    left = [(r, f.one)]
                else:
                    left = [(a, P.data[a][r]) for a in range(P.rows) if P.data[a][r]]
                if Q is None:
                    right = [(c, f.one)]
                else:
                    qrow = Q.data[c]
                    right = [(b, qrow[b]) for b in range(Q.cols) if qrow[b]]
                for a, pa in left:
                    for b, qb in right:
                        d = eqs.setdefault((a, b), {})
                        d[var] = d.get(var, f.zero) + pa * qb
        if out_shape is None:
            return
        if rhs is not None and rhs.shape != out_shape:
            raise ModelError("right-hand side has the wrong shape")
        keys = set(eqs)
        if rhs is not None:
            keys |= {(a, b) for a in range(rhs.rows) for b in range(rhs.cols) if rhs.data[a][b]}
        for key in sorted(keys):
            val = rhs.data[key[0]][key[1]] if rhs is not None else f.zero
            self.equations.append((eqs.get(key, {}), val))

    def intertwines(self, u: int, src: WeightedRep, tgt: WeightedRep):
        """Require ``X^tgt_t H_u = H_u X^src_t`` for every generator."""
        for xs, xt in zip(src.operators, tgt.operators):
            self.constrain([(xt, u, None), (None, u, -xs)])

    def solve(self):
        """Return ``(particular, kernel_basis)`` as lists of matrices per unknown."""
        part, ker = solve_affine(self.field, self.nvars, self.equations)
        particular = None if part is None else self._unpack(part)
        basis = [self._unpack(v) for v in ker.vectors()]
        return particular, basis

    def _unpack(self, vec) -> List[Matrix]:
        out = []
        f = self.field
        for rows, cols, positions in self.unknowns:
            data = [[f.zero] * cols for _ in range(rows)]
            for (r, c), var in positions.items():
                data[r][c] = vec[var]
            out.append(Matrix(f, data, cols))
        return out


def hom_basis(m: WeightedRep, n: WeightedRep) -> List[Matrix]:
    """Basis (as matrices) of all morphisms m -> n."""
    _same_sig(m, n)
    sys_ = MapSystem(m.field)
    u = sys_.unknown_between(m, n)
    sys_.intertwines(u, m, n)
    _, basis = sys_.solve()
    return [b[0] for b in basis]


def hom_space(m: WeightedRep, n: WeightedRep) -> Subspace:
    """Hom(m, n) as a subspace of flattened ``n.dim x m.dim`` matrices."""
    return Subspace.span(m.field, n.dim * m.dim, [b.flatten() for b in hom_basis(m, n)])


# ---------------------------------------------------------------------------
# internal Hom, sums, tensor, dual

@functools.lru_cache(maxsize=4096)
def hom_positions(m: WeightedRep, n: WeightedRep) -> Tuple[Tuple[int, int, int], ...]:
    """Basis of the internal Hom: entries ``(i, j)`` of ``n.dim x m.dim`` matrices with degree."""
    pos = [(n.degrees[i] - m.degrees[j], m.degrees[j], i, j) for i in range(n.dim) for j in range(m.dim)]
    pos.sort()
    return tuple((d, i, j) for d, _, i, j in pos)


@functools.lru_cache(maxsize=4096)
def internal_hom(m: WeightedRep, n: WeightedRep) -> WeightedRep:
    """Internal Hom: degree-d piece is the maps raising degree by d; X_t f = X^n_t f - f X^m_t."""
    _same_sig(m, n)
    pos = hom_positions(m, n)
    index = {(i, j): k for k, (_, i, j) in enumerate(pos)}
    support: Dict[int, int] = {}
    for d, _, _ in pos:
        support[d] = support.get(d, 0) + 1
    f = m.field
    N = len(pos)
    ops = []
    for xm, xn in zip(m.operators, n.operators):
        data = [[f.zero] * N for _ in range(N)]
        for col, (_, r, c) in enumerate(pos):
            for a in range(n.dim):
                v = xn.data[a][r]
                if v:
                    data[index[(a, c)]][col] += v
            row_c = xm.data[c]
            for b in range(m.dim):
                v = row_c[b]
                if v:
                    data[index[(r, b)]][col] -= v
        ops.append(Matrix(f, data, N))
    return WeightedRep(m.signature, support, tuple(ops), check=False)


def hom_vec(m: WeightedRep, n: WeightedRep, mat: Matrix) -> tuple:
    """Coordinates of a linear map m -> n in the basis of ``internal_hom(m, n)``."""
    return tuple(mat.data[i][j] for _, i, j in hom_positions(m, n))


def hom_unvec(m: WeightedRep, n: WeightedRep, vec: Sequence) -> Matrix:
    f = m.field
    data = [[f.zero] * m.dim for _ in range(n.dim)]
    for (_, i, j), v in zip(hom_positions(m, n), vec):
        data[i][j] = v
    return Matrix(f, data, m.dim)


def _permuted(sig: ModelSignature, labels: Sequence[Tuple], ops_in_label_order: Sequence[Matrix]):
    """Reorder a basis given by sortable labels ``(degree, ...)`` into canonical order.

    Returns the object and the permutation matrix P with ``P @ old = new``.
    """
    order = sorted(range(len(labels)), key=lambda k: labels[k])
    f = sig.field
    n = len(labels)
    support: Dict[int, int] = {}
    for lab in labels:
        support[lab[0]] = support.get(lab[0], 0) + 1
    pdata = [[f.zero] * n for _ in range(n)]
    for new, old in enumerate(order):
        pdata[new][old] = f.one
    P = Matrix(f, pdata, n)
    PT = P.T
    ops = tuple(P @ op @ PT for op in ops_in_label_order)
    return WeightedRep(sig, support, ops, check=False), P


def direct_sum(parts: Sequence[WeightedRep]):
    """Direct sum with its injections and projections (canonical basis order)."""
    if not parts:
        raise ModelError("direct sum of no objects needs a signature; use zero_object")
    _same_sig(*parts)
    sig = parts[0].signature
    f = sig.field
    labels = []
    for k, x in enumerate(parts):
        for i, d in enumerate(x.degrees):
            labels.append((d, k, i))
    total = len(labels)
    ops = []
    for t in range(len(sig.generators)):
        ops.append(Matrix.block_diag(f, [x.operators[t] for x in parts]))
    obj, P = _permuted(sig, labels, ops)
    injections, projections = [], []
    start = 0
    for x in parts:
        emb = Matrix.zeros(f, total, x.dim)
        emb = emb.with_block(start, 0, Matrix.identity(f, x.dim))
        inj = P @ emb
        injections.append(RepMorphism(x, obj, inj, check=False))
        projections.append(RepMorphism(obj, x, inj.T, check=False))
        start += x.dim
    return obj, injections, projections


def build_ops(parts: Sequence[WeightedRep]) -> WeightedRep:
    """Direct sum of a nonempty list of objects."""
    if not parts:
        raise ModelError("empty direct sum")
    return direct_sum(parts)[0]


def tensor(m: WeightedRep, n: WeightedRep) -> WeightedRep:
    """Tensor product with the Leibniz action."""
    _same_sig(m, n)
    f = m.field
    labels = [(m.degrees[i] + n.degrees[j], i, j) for i in range(m.dim) for j in range(n.dim)]
    ops = []
    Im = Matrix.identity(f, m.dim)
    In = Matrix.identity(f, n.dim)
    for xm, xn in zip(m.operators, n.operators):
        ops.append(kron(xm, In) + kron(Im, xn))
    return _permuted(m.signature, labels, ops)[0]


def kron(a: Matrix, b: Matrix) -> Matrix:
    f = a.field
    data = []
    for i in range(a.rows):
        for k in range(b.rows):
            data.append(tuple(a.data[i][j] * b.data[k][l] for j in range(a.cols) for l in range(b.cols)))
    if f.p is not None:
        data = [tuple(x % f.p for x in r) for r in data]
    return Matrix(f, data, a.cols * b.cols) if data else Matrix.zeros(f, 0, a.cols * b.cols)


def dual(m: WeightedRep) -> WeightedRep:
    """Dual object: degrees negate, operators become minus transposes."""
    labels = [(-d, i) for i, d in enumerate(m.degrees)]
    ops = [-(x.T) for x in m.operators]
    return _permuted(m.signature, labels, ops)[0]


# ---------------------------------------------------------------------------
# subobjects, quotients, kernels

def _homogeneous_parts(x: WeightedRep, v: Sequence) -> List[tuple]:
    f = x.field
    parts = []
    for d, _ in x.support:
        rng = x.span_of(d)
        if any(v[i] for i in rng):
            parts.append(tuple(v[i] if i in rng else f.zero for i in range(x.dim)))
    return parts


def is_graded(x: WeightedRep, s: Subspace) -> bool:
    return all(s.contains(p) for v in s.vectors() for p in _homogeneous_parts(x, v))


def is_stable(x: WeightedRep, s: Subspace) -> bool:
    for op in x.operators:
        for v in s.vectors():
            w = [sum((op.data[i][j] * v[j] for j in range(x.dim) if v[j]), x.field.zero) for i in range(x.dim)]
            if not s.contains(w):
                return False
    return True


def _apply(op: Matrix, v: Sequence) -> tuple:
    f = op.field
    out = []
    for row in op.data:
        acc = f.zero
        for a, b in zip(row, v):
            if a and b:
                acc += a * b
        out.append(acc if f.p is None else acc % f.p)
    return tuple(out)


def generated_subspace(x: WeightedRep, vectors: Iterable[Sequence]) -> Subspace:
    """Smallest graded operator-stable subspace containing the vectors."""
    f = x.field
    start = []
    for v in vectors:
        start.extend(_homogeneous_parts(x, v))
    span = Subspace.span(f, x.dim, start)
    frontier = span.vectors()
    while frontier:
        new = []
        for v in frontier:
            for op in x.operators:
                w = _apply(op, v)
                if any(w) and not span.contains(w):
                    span = span.sum(Subspace.span(f, x.dim, [w]))
                    new.append(w)
        frontier = new
    return span


def subrep(x: WeightedRep, s: Subspace):
    """Subobject on a graded stable subspace; returns ``(sub, incl)``."""
    if not is_graded(x, s) or not is_stable(x, s):
        raise ModelError("subspace is not a subobject")
    f = x.field
    vecs = s.vectors()
    # RREF rows of a graded subspace are homogeneous; order them by degree
    labelled = []
    for v, pc in zip(vecs, s.pivots):
        labelled.append((x.degrees[pc], pc, v))
    labelled.sort(key=lambda t: (t[0], t[1]))
    support: Dict[int, int] = {}
    for d, _, _ in labelled:
        support[d] = support.get(d, 0) + 1
    incl = Matrix.from_columns(f, [v for _, _, v in labelled], x.dim)
    piv_rows = [pc for _, pc, _ in labelled]
    ops = []
    for op in x.operators:
        img = op @ incl
        # coordinates in the basis are the entries at pivot columns
        ops.append(img.submatrix(piv_rows, range(img.cols)))
    sub = WeightedRep(x.signature, support, tuple(ops), check=False)
    return sub, RepMorphism(sub, x, incl, check=False)


def quotient(x: WeightedRep, s: Subspace):
    """Quotient by a graded stable subspace; returns ``(q, proj)``."""
    if not is_graded(x, s) or not is_stable(x, s):
        raise ModelError("subspace is not a subobject")
    f = x.field
    keep = s.complement_coordinates()
    support: Dict[int, int] = {}
    for j in keep:
        support[x.degrees[j]] = support.get(x.degrees[j], 0) + 1
    n = x.dim
    cols = []
    for j in range(n):
        e = [f.zero] * n
        e[j] = f.one
        r = s.reduce(e)
        cols.append([r[k] for k in keep])
    proj = Matrix.from_columns(f, cols, len(keep)) if n else Matrix.zeros(f, 0, 0)
    sect = Matrix.zeros(f, n, len(keep))
    for a, j in enumerate(keep):
        sect = sect.with_block(j, a, Matrix.identity(f, 1))
    ops = tuple(proj @ op @ sect for op in x.operators)
    q = WeightedRep(x.signature, support, ops, check=False)
    return q, RepMorphism(x, q, proj, check=False)


def subobject_generated(x: WeightedRep, vectors: Matrix):
    """Subobject generated by the columns of ``vectors``; returns ``(sub, incl)``."""
    if vectors.rows != x.dim:
        raise ModelError("vectors must live in the total space")
    return subrep(x, generated_subspace(x, [vectors.column(j) for j in range(vectors.cols)]))


def kernel(f: RepMorphism):
    return subrep(f.source, f.matrix.kernel())


def image(f: RepMorphism):
    return subrep(f.target, f.matrix.image())


def cokernel(f: RepMorphism):
    return quotient(f.target, f.matrix.image())


def weight_parts(x: WeightedRep, n: int):
    """``(W_n x, inclusion, Gr_n x)``."""
    s = Subspace.span(x.field, x.dim, [
        tuple(x.field.one if k == i else x.field.zero for k in range(x.dim))
        for i in range(x.dim) if x.degrees[i] <= n])
    w, incl = subrep(x, s)
    gr = pure(x.signature, n, x.dim_at(n))
    return w, incl, gr


def graded(x: WeightedRep) -> WeightedRep:
    """Associated graded: same support, zero operators."""
    return WeightedRep(x.signature, x.support, check=False)


def fiber_product(f: RepMorphism, g: RepMorphism):
    """Pullback of ``f: A -> C`` and ``g: B -> C``; returns ``(P, pA, pB)``."""
    if f.target != g.target:
        raise ModelError("fiber product needs a common target")
    s, inj, proj = direct_sum([f.source, g.source])
    diff = RepMorphism(s, f.target, f.matrix @ proj[0].matrix - g.matrix @ proj[1].matrix, check=False)
    P, incl = kernel(diff)
    return P, proj[0] @ incl, proj[1] @ incl


def pushout(f: RepMorphism, g: RepMorphism):
    """Pushout of ``f: C -> A`` and ``g: C -> B``; returns ``(Q, iA, iB)``."""
    if f.source != g.source:
        raise ModelError("pushout needs a common source")
    s, inj, proj = direct_sum([f.target, g.target])
    diff = RepMorphism(f.source, s, inj[0].matrix @ f.matrix - inj[1].matrix @ g.matrix, check=False)
    Q, q = cokernel(diff)
    return Q, q @ inj[0], q @ inj[1]


def factor_through_mono(mono: RepMorphism, f: RepMorphism) -> RepMorphism:
    """The unique g with ``mono ∘ g = f`` (f must land in the image)."""
    x = solve(mono.matrix, f.matrix)
    if x is None:
        raise ModelError("map does not factor through the monomorphism")
    return RepMorphism(f.source, mono.source, x, check=False)


def factor_through_epi(epi: RepMorphism, f: RepMorphism) -> RepMorphism:
    """The unique g with ``g ∘ epi = f`` (f must vanish on the kernel)."""
    x = solve(epi.matrix.T, f.matrix.T)
    if x is None:
        raise ModelError("map does not factor through the epimorphism")
    return RepMorphism(epi.target, f.target, x.T, check=False)


def section(epi: RepMorphism) -> Matrix:
    """Canonical degree-0 linear section s with ``epi @ s = 1`` (not a morphism)."""
    sys_ = MapSystem(epi.source.field)
    u = sys_.unknown(epi.source.degrees, epi.target.degrees)
    sys_.constrain([(epi.matrix, u, None)], Matrix.identity(epi.source.field, epi.target.dim))
    part, _ = sys_.solve()
    if part is None:
        raise ModelError("map is not surjective")
    return part[0]


def find_isomorphism(m: WeightedRep, n: WeightedRep, rng: Optional[random.Random] = None):
    """Search for an isomorphism; returns ``(morphism or None, deterministic)``."""
    _same_sig(m, n)
    if m.support != n.support:
        return None, True
    if m == n:
        return RepMorphism.identity(m), True
    basis = hom_basis(m, n)
    mat, det = find_invertible(m.field, basis, rng or random.Random(0))
    if mat is None:
        return None, det
    return RepMorphism(m, n, mat, check=False), det


def is_isomorphic(m: WeightedRep, n: WeightedRep, rng: Optional[random.Random] = None) -> Optional[RepMorphism]:
    return find_isomorphism(m, n, rng)[0]


def random_rep(sig: ModelSignature, support, rng: random.Random, density: float = 0.7,
               bound: int = 3) -> WeightedRep:
    """Random object with the given support; entries drawn from the field."""
    x = WeightedRep(sig, support, check=False)
    f = sig.field
    ops = []
    for g in sig.generators:
        data = [[f.zero] * x.dim for _ in range(x.dim)]
        for i in range(x.dim):
            for j in range(x.dim):
                if x.degrees[i] == x.degrees[j] + g.degree and rng.random() < density:
                    data[i][j] = f.random(rng, bound)
        ops.append(Matrix(f, data, x.dim) if x.dim else Matrix.zeros(f, 0, 0))
    return x.with_operators(ops, check=False)

"""Seeded random instances shared by the test modules."""

from __future__ import annotations

import random
from typing import List, Sequence, Tuple

from panache.exactla import QQ, Field, Matrix
from panache.extmod import ExtClass, realize
from panache.genext import (BlockForm, GenExt, GradedFrame, denormalize, replace_entries)
from panache.motivic import graded_independence_arithmetic
from panache.repcat import ModelSignature, RepMorphism, WeightedRep, pure, random_rep


def random_invertible(field: Field, n: int, rng: random.Random, scalar_ok: bool = True) -> Matrix:
    while True:
        m = Matrix(field, [[field.random(rng, 3) for _ in range(n)] for _ in range(n)], n) if n else \
            Matrix.zeros(field, 0, 0)
        if m.is_invertible():
            if scalar_ok or n < 2 or not _is_scalar(m):
                return m


def _is_scalar(m: Matrix) -> bool:
    return m == Matrix.scalar(m.field, m.rows, m[0, 0])


def signature_for(field: Field, degrees: Sequence[int]) -> ModelSignature:
    return ModelSignature.make(field, [(f"g{t}", d) for t, d in enumerate(degrees)])


# ---------------------------------------------------------------------------
# three-weight blend instances

def blend_instance(rng: random.Random, field: Field = QQ):
    """Realized ``(l, n)`` with three distinct weights, piece dims <= 2 and a generator for every gap."""
    d1, d2 = rng.randint(1, 2), rng.randint(1, 2)
    w1, w2, w3 = -(d1 + d2), -d2, 0
    degs = [-d1, -d2, -(d1 + d2)]
    degs += [rng.choice(degs) for _ in range(rng.randint(0, 2))]
    sig = signature_for(field, degs)
    a1 = pure(sig, w1, rng.randint(1, 2))
    a2 = pure(sig, w2, rng.randint(1, 2))
    a3 = pure(sig, w3, rng.randint(1, 2))
    l = ExtClass.random(a2, a1, rng)
    n = ExtClass.random(a3, a2, rng)
    return realize(l), realize(n)


# ---------------------------------------------------------------------------
# generalized extensions over a random frame

def random_frame(rng: random.Random, field: Field = QQ, k: int = None, max_dim: int = 2,
                 graded_independent: bool = False) -> GradedFrame:
    fixed_k = k
    while True:
        k = fixed_k or rng.randint(3, 4)
        gaps = [rng.randint(1, 3) for _ in range(k - 1)]
        weights = [0]
        for g in reversed(gaps):
            weights.insert(0, weights[0] - g)
        if graded_independent and not graded_independence_arithmetic(weights):
            continue
        degs = sorted({weights[j] - weights[i] for i in range(k) for j in range(i)})
        degs = [d for d in degs if d < 0]
        degs += [rng.choice(degs) for _ in range(rng.randint(0, 2))]
        sig = signature_for(field, degs)
        return GradedFrame([pure(sig, w, rng.randint(1, max_dim)) for w in weights])


def random_blocks(frame: GradedFrame, level: int, rng: random.Random, density: float = 0.8) -> BlockForm:
    f = frame.field
    blocks = {}
    for i in range(1, frame.k + 1):
        for j in range(i + 1, min(frame.k, i + level) + 1):
            ai, aj = frame.a(i), frame.a(j)
            mats = []
            for g in frame.signature.generators:
                if frame.weights[i - 1] == frame.weights[j - 1] + g.degree and rng.random() < density:
                    mats.append(Matrix(f, [[f.random(rng, 3) for _ in range(aj.dim)] for _ in range(ai.dim)],
                                       aj.dim))
                else:
                    mats.append(Matrix.zeros(f, ai.dim, aj.dim))
            blocks[(i, j)] = mats
    return BlockForm.make(frame, level, blocks)


def graded_iso(x: WeightedRep, rng: random.Random) -> RepMorphism:
    """Random graded automorphism of the underlying space, with the conjugated target object."""
    f = x.field
    parts = [random_invertible(f, k, rng) for _, k in x.support]
    m = Matrix.block_diag(f, parts) if parts else Matrix.zeros(f, 0, 0)
    inv = m.inverse()
    y = WeightedRep(x.signature, dict(x.support), tuple(m @ op @ inv for op in x.operators), check=False)
    return RepMorphism(x, y, m, check=False)


def scramble(g: GenExt, rng: random.Random) -> GenExt:
    """The same diagram written in random graded bases above the frame."""
    fam = {e: graded_iso(g.x(*e), rng) for e in g.entries() if e[1] - e[0] >= 2}
    return replace_entries(g, fam)


def random_genext(rng: random.Random, level: int = None, field: Field = QQ, frame: GradedFrame = None,
                  disguise: bool = True) -> GenExt:
    frame = frame or random_frame(rng, field)
    level = level or rng.randint(2, frame.k - 1)
    g = denormalize(random_blocks(frame, level, rng))
    return scramble(g, rng) if disguise else g


def random_classes(frame: GradedFrame, level: int, rng: random.Random) -> List[ExtClass]:
    return [ExtClass.random(frame.a(r + level), frame.a(r), rng) for r in range(1, frame.k - level + 1)]


# ---------------------------------------------------------------------------
# objects for maximality

def random_gi_object(rng: random.Random) -> Tuple[WeightedRep, GradedFrame]:
    frame = random_frame(rng, QQ, graded_independent=True)
    sig = frame.signature
    density = rng.choice([0.3, 0.6, 0.9, 1.0])
    x = random_rep(sig, {w: a.dim for w, a in zip(frame.weights, frame.parts)}, rng, density)
    return x, frame


# ---------------------------------------------------------------------------
# two-block extensions

def two_block_instance(rng: random.Random) -> ExtClass:
    """Extension of a pure object of weight 0 by a pure object of weight ``-d``."""
    d = rng.randint(1, 3)
    a, b = rng.randint(1, 2), rng.randint(1, 2)
    ngen = rng.randint(1, a * b + 1)
    sig = signature_for(QQ, [-d] * ngen)
    y = pure(sig, 0, a)
    x = pure(sig, -d, b)
    return ExtClass.random(y, x, rng)

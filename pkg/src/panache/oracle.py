"""Exhaustive verification over tiny prime-field instances.

The census enumerates every block configuration of a frame with
one-dimensional pieces, disguises each as a diagram in non-standard bases,
and recovers the classes through normalization.  It then checks, by
explicit application of the relevant group actions:

* every nonempty fiber of truncation has ``p^dim`` elements, where ``dim``
  is the dimension of the product of Ext groups acting on it, and the
  translation action from the base point reaches the whole fiber freely;
* truncation is surjective at every level;
* the orbits of ``Aut(A)`` on strict classes coincide with the isomorphism
  classes found by :func:`genext.equiv` in ``"iso"`` mode, and the twisted
  diagrams of :func:`genext.act_autA` normalize to :func:`genext.act_blocks`;
* for each isomorphism class of base, the automorphism group of the base
  acting on the strict fiber has as many orbits as there are isomorphism
  classes above that base, and the stabilizer of each member is the image
  of the member's own automorphisms.

A separate check compares the generated-subobject test for total
nonsplitting with the definition that loops over all proper subobjects.
"""

from __future__ import annotations

import itertools
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .exactla import GF, Matrix, enumerate_subspaces
from .extmod import ExtClass, ext1_dim, pushforward
from .genext import (BlockForm, FiberDescriptor, GenExt, GradedFrame, act_autA, act_blocks, automorphism_space,
                     denormalize, equiv, frame_maps_from_vector, gamma_act, normalize, replace_entries, truncate,
                     validate_genext)
from .motivic import totally_nonsplit
from .repcat import ModelError, ModelSignature, RepMorphism, WeightedRep, is_graded, is_stable, quotient, unit

SEARCH_BOUND = 10 ** 7


class OracleError(ModelError):
    pass


class BoundExceeded(OracleError):
    pass


def thread_cap() -> int:
    """Worker count from ``PANACHE_THREADS`` (default 1, meaning in-process)."""
    raw = os.environ.get("PANACHE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise OracleError(f"PANACHE_THREADS must be an integer, got {raw!r}")
    return max(1, n)


# ---------------------------------------------------------------------------
# census

@dataclass(frozen=True)
class CensusConfig:
    p: int
    weights: Tuple[int, ...]
    gens: Tuple[int, ...]
    levels: Optional[Tuple[int, int]] = None
    scramble: bool = True

    def __post_init__(self):
        if self.p not in (2, 3):
            raise OracleError("the census runs over F_2 or F_3 only")
        if not 2 <= len(self.weights) <= 4:
            raise OracleError("the census needs 2 <= k <= 4 frame pieces")
        if any(x >= y for x, y in zip(self.weights, self.weights[1:])):
            raise OracleError("weights must increase strictly")
        if any(d >= 0 for d in self.gens):
            raise OracleError("generator degrees must be negative")

    @property
    def k(self) -> int:
        return len(self.weights)

    @property
    def level_range(self) -> Tuple[int, int]:
        lo, hi = self.levels or (1, self.k - 1)
        if not 1 <= lo <= hi <= self.k - 1:
            raise OracleError(f"level range must lie inside 1..{self.k - 1}")
        return lo, hi

    def signature(self) -> ModelSignature:
        return ModelSignature.make(GF(self.p), [(f"g{t}", d) for t, d in enumerate(self.gens)])

    def frame(self) -> GradedFrame:
        return GradedFrame.from_weights(self.signature(), self.weights)

    def positions(self, level: int) -> List[Tuple[Tuple[int, int], int]]:
        """Free scalar slots ``((i, j), t)`` of a level-``level`` block form."""
        w = self.weights
        out = []
        for i in range(1, self.k + 1):
            for j in range(i + 1, min(self.k, i + level) + 1):
                for t, d in enumerate(self.gens):
                    if w[i - 1] == w[j - 1] + d:
                        out.append(((i, j), t))
        return out

    def configurations(self, level: int) -> int:
        return self.p ** len(self.positions(level))

    def estimate(self) -> int:
        """Rough work estimate: configurations, translations, group elements and iso comparisons."""
        lo, hi = self.level_range
        aut = (self.p - 1) ** self.k
        total = 0
        for lvl in range(1, hi + 1):
            n = self.configurations(lvl)
            total += n * (2 + aut) + n * n
        return total

    def to_json(self) -> dict:
        lo, hi = self.level_range
        return {"p": self.p, "weights": list(self.weights), "gens": list(self.gens),
                "levels": [lo, hi], "scramble": self.scramble}


def _blockform(cfg: CensusConfig, frame: GradedFrame, level: int, values: Sequence[int]) -> BlockForm:
    f = frame.field
    ngen = len(cfg.gens)
    blocks: Dict[Tuple[int, int], List[Matrix]] = {}
    for (e, t), v in zip(cfg.positions(level), values):
        mats = blocks.setdefault(e, [Matrix.zeros(f, 1, 1) for _ in range(ngen)])
        mats[t] = Matrix(f, [[v]], 1)
    return BlockForm.make(frame, level, blocks)


def _decode(cfg: CensusConfig, level: int, index: int) -> List[int]:
    n = len(cfg.positions(level))
    out = []
    for _ in range(n):
        index, r = divmod(index, cfg.p)
        out.append(r)
    return out


def _conjugate(x: WeightedRep, m: Matrix) -> RepMorphism:
    inv = m.inverse()
    y = WeightedRep(x.signature, dict(x.support), tuple(m @ op @ inv for op in x.operators), check=False)
    return RepMorphism(x, y, m, check=False)


def _scramble(g: GenExt, rng: random.Random) -> GenExt:
    """Same diagram in random graded bases at every entry above the frame."""
    f = g.field
    fam = {}
    for (m, n) in g.entries():
        if n - m < 2:
            continue
        x = g.x(m, n)
        diag = [f.random_nonzero(rng) for _ in range(x.dim)]
        mat = Matrix(f, [[diag[i] if i == j else 0 for j in range(x.dim)] for i in range(x.dim)], x.dim)
        fam[(m, n)] = _conjugate(x, mat)
    return replace_entries(g, fam)


def _key(g: GenExt) -> tuple:
    return normalize(g).blocks.key()


def build_member(cfg: CensusConfig, frame: GradedFrame, level: int, index: int) -> GenExt:
    """The ``index``-th raw configuration as a (possibly disguised) diagram."""
    g = denormalize(_blockform(cfg, frame, level, _decode(cfg, level, index)))
    if cfg.scramble and level >= 2:
        g = _scramble(g, random.Random(index * 1000003 + level))
        validate_genext(g)
    return g


def _census_shard(cfg: CensusConfig, level: int, start: int, stop: int) -> Dict[tuple, list]:
    """Normalize raw configurations ``start..stop-1``; map class key to ``[count, truncation key]``."""
    frame = cfg.frame()
    out: Dict[tuple, list] = {}
    for idx in range(start, stop):
        g = build_member(cfg, frame, level, idx)
        key = _key(g)
        tkey = _key(truncate(g)) if level >= 2 else None
        slot = out.setdefault(key, [0, tkey])
        if slot[1] != tkey:
            raise AssertionError("one strict class has two different truncations")
        slot[0] += 1
    return out


def _merge(parts: Sequence[Dict[tuple, list]]) -> Dict[tuple, list]:
    """Order-independent union of shard results."""
    out: Dict[tuple, list] = {}
    for part in parts:
        for key, (count, tkey) in part.items():
            slot = out.setdefault(key, [0, tkey])
            if slot[1] != tkey:
                raise AssertionError("shards disagree on a truncation")
            slot[0] += count
    return out


def _run_shards(cfg: CensusConfig, level: int, workers: int) -> Dict[tuple, list]:
    total = cfg.configurations(level)
    nshards = max(1, min(workers * 4, total))
    bounds = [(total * s // nshards, total * (s + 1) // nshards) for s in range(nshards)]
    if workers <= 1 or total < 64:
        return _merge([_census_shard(cfg, level, a, b) for a, b in bounds])
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_census_shard, cfg, level, a, b) for a, b in bounds]
        return _merge([fu.result() for fu in futures])


def _from_key(frame: GradedFrame, level: int, key: tuple) -> BlockForm:
    f = frame.field
    blocks = {}
    for e, flats in key:
        i, j = e
        di, dj = frame.a(i).dim, frame.a(j).dim
        blocks[e] = [Matrix.from_flat(f, di, dj, flat) for flat in flats]
    return BlockForm.make(frame, level, blocks)


def _aut_a(cfg: CensusConfig, frame: GradedFrame) -> List[List[Matrix]]:
    f = frame.field
    units = [x for x in f.elements() if x]
    return [[Matrix(f, [[s]], 1) for s in combo] for combo in itertools.product(units, repeat=cfg.k)]


def _orbits(keys: Sequence[tuple], act) -> Dict[tuple, tuple]:
    """Map every key to the least key of its orbit under the explicit action ``act(key) -> iterable of keys``."""
    rep: Dict[tuple, tuple] = {}
    for key in sorted(keys):
        if key in rep:
            continue
        orbit = set(act(key))
        orbit.add(key)
        least = min(orbit)
        for o in orbit:
            if o in rep and rep[o] != least:
                raise AssertionError("orbits overlap: the action is not a group action")
            rep[o] = least
    return rep


def _iso_classes(frame: GradedFrame, level: int, keys: Sequence[tuple]) -> Dict[tuple, int]:
    """Cluster strict classes by :func:`genext.equiv` in ``"iso"`` mode."""
    reps: List[GenExt] = []
    by_trunc: Dict[tuple, List[int]] = {}
    out = {}
    for key in sorted(keys):
        g = denormalize(_from_key(frame, level, key))
        # isomorphic diagrams have isomorphic truncations; the support of the blocks is a cheap necessary condition
        shape = tuple((e, tuple(tuple(bool(v) for v in flat) for flat in flats)) for e, flats in key)
        found = None
        for idx in by_trunc.get(shape, []):
            if equiv(g, reps[idx], "iso", random.Random(0)) is not None:
                found = idx
                break
        if found is None:
            found = len(reps)
            reps.append(g)
            by_trunc.setdefault(shape, []).append(found)
        out[key] = found
    return out


def enumerate_and_verify(cfg: CensusConfig, workers: Optional[int] = None) -> dict:
    """Run the census; raises ``AssertionError`` on any failed check, ``BoundExceeded`` when too large."""
    est = cfg.estimate()
    if est > SEARCH_BOUND:
        raise BoundExceeded(f"estimated search space {est} exceeds {SEARCH_BOUND}")
    workers = thread_cap() if workers is None else workers
    frame = cfg.frame()
    lo, hi = cfg.level_range
    p = cfg.p
    autA = _aut_a(cfg, frame)
    levels = []
    prev_keys = None
    prev_orbit = None
    for level in range(1, hi + 1):
        classes = _run_shards(cfg, level, workers)
        keys = sorted(classes)
        raw = sum(c for c, _ in classes.values())
        if raw != cfg.configurations(level):
            raise AssertionError("shards lost configurations")

        # Aut(A) orbits by explicit action, compared with iso-equivalence
        def act(key, _level=level):
            bf = _from_key(frame, _level, key)
            return [act_blocks(s, bf).key() for s in autA]

        orbit_of = _orbits(keys, act)
        iso_id = _iso_classes(frame, level, keys)
        for a in keys:
            for b in keys:
                if (orbit_of[a] == orbit_of[b]) != (iso_id[a] == iso_id[b]):
                    raise AssertionError("Aut(A)-orbits differ from isomorphism classes")
        # the diagram-level twist agrees with the block-level action on a sample of classes
        for key in keys[:4]:
            g = denormalize(_from_key(frame, level, key))
            for s in autA:
                if _key(act_autA(s, g)) != act_blocks(s, _from_key(frame, level, key)).key():
                    raise AssertionError("act_autA and act_blocks disagree")
        n_strict = len(keys)
        n_iso = len(set(orbit_of.values()))
        entry = {
            "level": level,
            "raw_configurations": raw,
            "strict_classes": n_strict,
            "iso_classes": n_iso,
            "aut_A_order": len(autA),
        }
        if level == 1:
            expect = p ** sum(ext1_dim(frame.a(r + 1), frame.a(r)) for r in range(1, cfg.k))
            if n_strict != expect:
                raise AssertionError(f"level 1: {n_strict} classes, expected {expect}")
            entry["group_order"] = expect
        else:
            entry.update(_verify_fibers(cfg, frame, level, classes, prev_keys, prev_orbit, orbit_of))
        if level >= lo:
            levels.append(entry)
        prev_keys, prev_orbit = keys, orbit_of
    return {
        "config": cfg.to_json(),
        "levels": levels,
        "certifies": [
            "fiber size equals the order of the acting product of Ext groups",
            "translation from the base point is free and transitive on each fiber",
            "truncation is surjective",
            "Aut(A)-orbits on strict classes equal isomorphism classes",
            "isomorphism classes above a base equal orbits of the base automorphisms on its strict fiber",
            "stabilizers equal images of member automorphisms",
        ],
        "excluded": ["characteristic-0 statements (rigidity, maximality) are checked over Q elsewhere"],
    }


def _verify_fibers(cfg, frame, level, classes, prev_keys, prev_orbit, orbit_of) -> dict:
    p = cfg.p
    fibers: Dict[tuple, List[tuple]] = {}
    for key, (_, tkey) in classes.items():
        fibers.setdefault(tkey, []).append(key)
    if set(fibers) != set(prev_keys):
        raise AssertionError(f"level {level}: truncation is not surjective")
    sizes = sorted({len(v) for v in fibers.values()})
    group_dim = None
    for tkey in sorted(fibers):
        base = denormalize(_from_key(frame, level - 1, tkey))
        fd = FiberDescriptor(base)
        order = fd.group_order()
        if group_dim is None:
            group_dim = fd.group_dim
        if len(fibers[tkey]) != order:
            raise AssertionError(f"level {level}: fiber of size {len(fibers[tkey])}, expected {order}")
        # torsor: translating the base point reaches every member exactly once
        m0 = fd.basepoint()
        reached = set()
        for flat in itertools.product(range(p), repeat=fd.group_dim):
            reached.add(_key(fd.act(fd.split_coords(flat), m0)))
        if reached != set(fibers[tkey]):
            raise AssertionError(f"level {level}: translation is not free and transitive")

    # Γ-orbits against isomorphism classes above each base class
    base_reps = sorted(set(prev_orbit.values()))
    gamma_orbits = {}
    iso_above = {}
    for rep in base_reps:
        base = denormalize(_from_key(frame, level - 1, rep))
        aut = automorphism_space(base)
        units = [F for F in (frame_maps_from_vector(frame, v) for v in _span_elements(aut, p))
                 if all(m.is_invertible() for m in F)]
        members = sorted(fibers[rep])
        lifted = {key: denormalize(_from_key(frame, level, key)) for key in members}
        # the members above rep, re-based literally over ``base`` so Γ acts on them
        fd = FiberDescriptor(base)
        over = {_key(m): m for m in fd.members()}
        if set(over) != set(members):
            raise AssertionError("fiber members differ from enumerated classes")

        def gact(key, _over=over, _units=units):
            return [_key(gamma_act(F, _over[key])) for F in _units]

        orb = _orbits(members, gact)
        for key in members:
            moved = gact(key)
            stab_action = {i for i, k2 in enumerate(moved) if k2 == key}
            own = automorphism_space(lifted[key])
            stab_restrict = {i for i, F in enumerate(units)
                             if own.contains(tuple(x for m in F for x in m.flatten()))}
            if stab_action != stab_restrict:
                raise AssertionError("stabilizer differs from the image of member automorphisms")
        gamma_orbits[rep] = len(set(orb.values()))
        iso_above[rep] = len({orbit_of[k] for k in classes if prev_orbit[classes[k][1]] == rep})
        if gamma_orbits[rep] != iso_above[rep]:
            raise AssertionError(f"level {level}: {gamma_orbits[rep]} Γ-orbits but {iso_above[rep]} iso classes")
    return {
        "fiber_sizes": sizes,
        "group_order": p ** (group_dim or 0),
        "bases": len(fibers),
        "truncation_surjective": True,
        "gamma_orbits_per_base_class": [gamma_orbits[r] for r in base_reps],
        "iso_classes_per_base_class": [iso_above[r] for r in base_reps],
    }


def _span_elements(s, p: int):
    vecs = s.vectors()
    for coeffs in itertools.product(range(p), repeat=len(vecs)):
        yield s.combination(coeffs)


# ---------------------------------------------------------------------------
# total nonsplitting against its quantified definition

@dataclass(frozen=True)
class QuantifierCase:
    """Target ``H`` of strictly negative weights over F_p; operators given per generator as nested lists."""

    p: int
    gens: Tuple[int, ...]
    support: Tuple[Tuple[int, int], ...]
    operators: Optional[Tuple] = None

    def target(self) -> WeightedRep:
        sig = ModelSignature.make(GF(self.p), [(f"g{t}", d) for t, d in enumerate(self.gens)])
        ops = None
        if self.operators is not None:
            dim = sum(k for _, k in self.support)
            ops = tuple(Matrix(sig.field, rows, dim) for rows in self.operators)
        return WeightedRep(sig, dict(self.support), ops)


DEFAULT_CASES = (
    QuantifierCase(3, (-1, -1, -2, -2), ((-2, 1), (-1, 1))),
    QuantifierCase(3, (-1, -1, -2, -2), ((-2, 1), (-1, 1)), (((0, 1), (0, 0)), ((0, 0), (0, 0)),
                                                            ((0, 0), (0, 0)), ((0, 0), (0, 0)))),
    QuantifierCase(3, (-1, -1), ((-1, 2),)),
    QuantifierCase(3, (-1, -2), ((-2, 1), (-1, 2))),
    QuantifierCase(3, (-1, -3), ((-3, 1), (-2, 1), (-1, 1))),
    QuantifierCase(3, (-1,), ((-1, 1),)),
)


def _proper_subobjects(h: WeightedRep):
    for s in enumerate_subspaces(h.field, h.dim):
        if s.dim < h.dim and is_graded(h, s) and is_stable(h, s):
            yield s


def quantified_totally_nonsplit(e: ExtClass, subobjects=None) -> bool:
    """Pushforward to ``H/H'`` is nonsplit for every proper subobject ``H'`` of ``H``."""
    h = e.by
    subs = list(_proper_subobjects(h)) if subobjects is None else subobjects
    for s in subs:
        _, proj = quotient(h, s)
        if pushforward(e, proj).is_split():
            return False
    return True


def subobject_quantifier_check(cases: Sequence[QuantifierCase] = DEFAULT_CASES) -> dict:
    """Compare :func:`motivic.totally_nonsplit` with the quantified definition on every class."""
    out = []
    for case in cases:
        h = case.target()
        if h.field.p != 3:
            raise OracleError("the quantifier check runs over F_3")
        if h.dim + 1 > 5:
            raise BoundExceeded("ambient dimension of the middle object must be at most 5")
        one = unit(h.signature)
        dim = ext1_dim(one, h)
        subs = list(_proper_subobjects(h))
        if 3 ** dim * max(1, len(subs)) > SEARCH_BOUND:
            raise BoundExceeded("too many classes for exhaustive comparison")
        agree = disagree = tns = 0
        for coords in itertools.product(range(3), repeat=dim):
            e = ExtClass.from_coords(one, h, coords)
            a = totally_nonsplit(e)
            b = quantified_totally_nonsplit(e, subs)
            if a == b:
                agree += 1
            else:
                disagree += 1
            tns += a
        out.append({
            "target_support": {str(d): k for d, k in h.support},
            "generators": list(case.gens),
            "classes": 3 ** dim,
            "proper_subobjects": len(subs),
            "totally_nonsplit": tns,
            "agree": agree,
            "disagree": disagree,
        })
    return {"cases": out, "all_agree": all(c["disagree"] == 0 for c in out)}

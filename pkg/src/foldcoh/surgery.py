"""Normal systems of immersed spheres and the ATSS surgery bookkeeping.

An :class:`InvariantRecord` tracks what a fold map ``M^m -> R^n`` determines:
homology ranks of ``M`` and of its Reeb space ``W``, the map induced by the
quotient ``M -> W`` on homology, and (for ``(m, n) = (7, 4)``) the
cohomology ring of ``M``.  Records are immutable; every operation returns a
new one.  Homology bases are labelled so that independent surgeries commute:

    s_j, s^_j     the two factors of the j-th summand of the special generic base
    e_j, top_j    degree n/2 and m - n/2 classes of sphere (or sub-sphere) j
    fib_k, e'_k   degree m - n and n classes of sphere k
    fibP_k, e'P_k the same for polyhedron k
    fibQ_j, e'Q_j the same for the j-th point surgery
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .construction import CharacteristicRecord, ManifoldModel
from .errors import SurgeryError
from .linalg import IntegerMatrix
from .ring import TOP_CLASS, UNIT, GradedRing, Label, RingBuilder, ring_differences

PLAIN = "plain"
POLYHEDRAL = "polyhedral"


@dataclass(frozen=True)
class SphereEntry:
    """An immersed sphere, or a polyhedron made of ``len(base_classes)`` spheres.

    ``base_classes[r]`` is the class of the r-th sub-sphere in the base Reeb
    space, as coordinates on the base generators.  ``sub_ids`` number the
    sub-spheres globally; they index ``target_H`` and crossings.
    """

    id: int
    base_classes: tuple[tuple[int, ...], ...]
    dim: int | None = None
    sub_ids: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "base_classes", tuple(tuple(int(x) for x in c) for c in self.base_classes))
        if self.sub_ids is not None:
            object.__setattr__(self, "sub_ids", tuple(int(x) for x in self.sub_ids))

    @classmethod
    def sphere(cls, id: int, base_class: Sequence[int], dim: int | None = None) -> SphereEntry:
        return cls(id, (tuple(base_class),), dim, (id,))

    @property
    def sub_sphere_count(self) -> int:
        return len(self.base_classes)

    @property
    def base_class(self) -> tuple[int, ...]:
        if self.sub_sphere_count != 1:
            raise AttributeError("a polyhedron has one base class per sub-sphere")
        return self.base_classes[0]


@dataclass(frozen=True)
class Crossing:
    pair: tuple[int, int]
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "pair", tuple(int(x) for x in self.pair))


@dataclass(frozen=True)
class NormalSystem:
    spheres: tuple[SphereEntry, ...]
    crossings: tuple[Crossing, ...]
    target_H: IntegerMatrix
    kind: str = PLAIN
    wider: bool = True  # a supporting wider system exists, which licenses the ATSS

    def __post_init__(self):
        spheres = tuple(self.spheres)
        nxt = 1 + max((j for s in spheres if s.sub_ids for j in s.sub_ids), default=0)
        fixed = []
        for s in spheres:
            if s.sub_ids is None:
                s = replace(s, sub_ids=tuple(range(nxt, nxt + s.sub_sphere_count)))
                nxt += s.sub_sphere_count
            fixed.append(s)
        object.__setattr__(self, "spheres", tuple(fixed))
        object.__setattr__(self, "crossings", tuple(self.crossings))
        if not isinstance(self.target_H, IntegerMatrix):
            n = len(self.sub_ids)
            object.__setattr__(self, "target_H", IntegerMatrix.from_rows(self.target_H, cols=n))

    @property
    def sub_ids(self) -> tuple[int, ...]:
        """All sub-sphere ids in increasing order; row order of ``target_H``."""
        return tuple(sorted(j for s in self.spheres for j in s.sub_ids))

    def h(self, i: int, j: int) -> int:
        pos = {x: k for k, x in enumerate(self.sub_ids)}
        return self.target_H[pos[i], pos[j]]

    @classmethod
    def from_crossings(cls, spheres, crossings, kind: str = PLAIN, wider: bool = True) -> NormalSystem:
        """System whose intended matrix is the signed crossing count of each pair."""
        tmp = cls(tuple(spheres), tuple(crossings), IntegerMatrix.zeros(0, 0), kind, wider)
        ids = tmp.sub_ids
        pos = {x: k for k, x in enumerate(ids)}
        rows = [[0] * len(ids) for _ in ids]
        for c in tmp.crossings:
            i, j = c.pair
            if i in pos and j in pos:
                rows[pos[i]][pos[j]] += c.sign
                if i != j:
                    rows[pos[j]][pos[i]] += c.sign
        return replace(tmp, target_H=IntegerMatrix.from_rows(rows, cols=len(ids)))

    @classmethod
    def realize(cls, spheres, H, kind: str = PLAIN, min_extra_crossings: int = 0) -> NormalSystem:
        """System with the fewest crossings realizing ``H``, plus cancelling slack pairs."""
        tmp = cls(tuple(spheres), (), IntegerMatrix.zeros(0, 0), kind)
        ids = tmp.sub_ids
        H = H if isinstance(H, IntegerMatrix) else IntegerMatrix.from_rows(H, cols=len(ids))
        crossings = []
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                h = H[a, b]
                sign = 1 if h > 0 else -1
                crossings += [Crossing((ids[a], ids[b]), sign)] * abs(h)
                crossings += [Crossing((ids[a], ids[b]), 1), Crossing((ids[a], ids[b]), -1)] * min_extra_crossings
        return replace(tmp, crossings=tuple(crossings), target_H=H)


@dataclass(frozen=True)
class InvariantRecord:
    m: int
    n: int
    manifold_basis: tuple[tuple[Label, ...], ...]
    reeb_basis: tuple[tuple[Label, ...], ...]
    q_map: tuple[IntegerMatrix, ...]
    ring: GradedRing | None
    char: CharacteristicRecord
    base_rank: int = 0
    history: tuple[str, ...] = field(default=(), compare=False)

    @property
    def manifold_rank(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.manifold_basis)

    @property
    def reeb_rank(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.reeb_basis)

    def q_links(self) -> dict[tuple[int, Label], dict[Label, int]]:
        out: dict[tuple[int, Label], dict[Label, int]] = defaultdict(dict)
        for d, q in enumerate(self.q_map):
            for r, rl in enumerate(self.reeb_basis[d]):
                for c, ml in enumerate(self.manifold_basis[d]):
                    if q[r, c]:
                        out[d, ml][rl] = q[r, c]
        return dict(out)


def _sorted(labels: Iterable[Label]) -> tuple[Label, ...]:
    return tuple(sorted(labels, key=Label.sort_key))


def _q_matrices(manifold_basis, reeb_basis, links) -> tuple[IntegerMatrix, ...]:
    out = []
    for d, rb in enumerate(reeb_basis):
        mb = manifold_basis[d] if d < len(manifold_basis) else ()
        rows = [[links.get((d, ml), {}).get(rl, 0) for ml in mb] for rl in rb]
        out.append(IntegerMatrix.from_rows(rows, cols=len(mb)))
    return tuple(out)


def _p1_for(manifold_basis, old_basis4, old_p1) -> tuple[int, ...]:
    if len(manifold_basis) <= 4:
        return ()
    old = dict(zip(old_basis4, old_p1))
    return tuple(old.get(lab, 0) for lab in manifold_basis[4])


def base_special_generic(l_list: Sequence[int], m: int, n: int) -> InvariantRecord:
    """Record of the special generic map on a connected sum of ``S^l_j x S^(m-l_j)``."""
    if not m > n >= 2:
        raise SurgeryError(f"special generic base needs m > n >= 2, got m={m}, n={n}")
    for lj in l_list:
        if not 1 <= lj <= n - 1:
            raise SurgeryError(f"summand dimension {lj} violates 1 <= l_j <= n - 1 = {n - 1}")
    manifold = defaultdict(list)
    reeb = defaultdict(list)
    links = {}
    manifold[0].append(Label("pt"))
    manifold[m].append(Label("fund"))
    reeb[0].append(Label("pt"))
    links[0, Label("pt")] = {Label("pt"): 1}
    for j, lj in enumerate(l_list, start=1):
        s = Label("s", (j,))
        manifold[lj].append(s)
        manifold[m - lj].append(Label("s^", (j,)))
        reeb[lj].append(s)
        links[lj, s] = {s: 1}
    mb = tuple(_sorted(manifold[d]) for d in range(m + 1))
    rb = tuple(_sorted(reeb[d]) for d in range(n + 1))
    base_rank = sum(1 for lj in l_list if 2 * lj == n)
    ring = None
    if (m, n) == (7, 4) and all(lj == 2 for lj in l_list):
        a = len(l_list)
        rbld = RingBuilder({0: [UNIT], 2: [Label("a*", (j,)) for j in range(1, a + 1)],
                            5: [Label("f", (j,)) for j in range(1, a + 1)], 7: [TOP_CLASS]})
        for j in range(1, a + 1):
            rbld.set(Label("a*", (j,)), Label("f", (j,)), {TOP_CLASS: 1})
        ring = rbld.build()
    char = CharacteristicRecord(p1=(0,) * len(mb[4]) if m >= 4 else ())
    return InvariantRecord(m, n, mb, rb, _q_matrices(mb, rb, links), ring, char, base_rank,
                           (f"base_special_generic({tuple(l_list)}, m={m}, n={n})",))


def dimension_findings(m: int, n: int) -> list[str]:
    """Dimension relations under which a sphere ATSS is defined."""
    out = []
    if n % 2:
        out.append(f"n = {n} must be even")
        return out
    half = n // 2
    if not 0 < half < m - n:
        out.append(f"relation 0 < n/2 < m - n fails ({half} vs {m - n})")
    if not n < m - half < m:
        out.append(f"relation n < m - n/2 < m fails ({n} < {m - half} < {m})")
    if m - n == n:
        out.append(f"relation m - n != n fails (both {n})")
    return out


def validate_normal_system(sys: NormalSystem, base: InvariantRecord, min_extra_crossings: int = 0) -> list[str]:
    findings = []
    if sys.kind not in (PLAIN, POLYHEDRAL):
        findings.append(f"unknown system kind {sys.kind!r}")
    if not sys.wider:
        findings.append("no wider normal system supports this system")
    sphere_ids = [s.id for s in sys.spheres]
    for j, c in Counter(sphere_ids).items():
        if c > 1:
            findings.append(f"sphere id {j} is used {c} times")
    all_subs = [j for s in sys.spheres for j in s.sub_ids]
    for j, c in Counter(all_subs).items():
        if c > 1:
            findings.append(f"sub-sphere id {j} is used {c} times")
    if not sys.spheres:
        return findings
    findings.extend(dimension_findings(base.m, base.n))
    for s in sys.spheres:
        if s.sub_sphere_count < 1:
            findings.append(f"sphere {s.id} has no sub-spheres")
        if len(s.sub_ids) != s.sub_sphere_count:
            findings.append(f"sphere {s.id} lists {len(s.sub_ids)} sub-sphere ids for {s.sub_sphere_count} sub-spheres")
        if sys.kind == PLAIN and s.sub_sphere_count != 1:
            findings.append(f"sphere {s.id} has {s.sub_sphere_count} sub-spheres in a plain system")
        if s.dim is not None and 2 * s.dim != base.n:
            findings.append(f"sphere {s.id} has dimension {s.dim}, expected n/2 = {base.n / 2:g}")
        for r, c in enumerate(s.base_classes, start=1):
            if len(c) != base.base_rank:
                findings.append(
                    f"sphere {s.id} sub-sphere {r}: base class has length {len(c)}, "
                    f"base has rank {base.base_rank} in degree n/2"
                )
    ids = sys.sub_ids
    H = sys.target_H
    if H.shape != (len(ids), len(ids)):
        findings.append(f"target_H has shape {H.rows}x{H.cols}, expected {len(ids)}x{len(ids)}")
        return findings
    if not H.is_symmetric():
        findings.append("target_H is not symmetric")
    for k, j in enumerate(ids):
        if H[k, k]:
            findings.append(f"target_H has nonzero diagonal entry {H[k, k]} at sphere {j}")
    pos = {x: k for k, x in enumerate(ids)}
    signed = defaultdict(int)
    count = defaultdict(int)
    for c in sys.crossings:
        i, j = c.pair
        if i not in pos or j not in pos:
            findings.append(f"crossing {c.pair} names an unknown sphere")
            continue
        if c.sign not in (1, -1):
            findings.append(f"crossing {c.pair} has sign {c.sign}, expected +1 or -1")
            continue
        key = (min(i, j), max(i, j))
        signed[key] += c.sign
        count[key] += 1
    for x in range(len(ids)):
        for y in range(x, len(ids)):
            key = (ids[x], ids[y])
            h = H[x, y]
            if signed[key] != h:
                findings.append(f"pair {{{ids[x]},{ids[y]}}}: signed crossing sum {signed[key]} != {h}")
            need = abs(h) + 2 * min_extra_crossings if x != y else 0
            if count[key] < need:
                findings.append(f"pair {{{ids[x]},{ids[y]}}}: {count[key]} crossings, need at least {need}")
            if (count[key] - h) % 2:
                findings.append(f"pair {{{ids[x]},{ids[y]}}}: crossing count parity differs from {h}")
    used = {lab for labs in base.manifold_basis for lab in labs}
    for s in sys.spheres:
        clash = [Label("e", (j,)) for j in s.sub_ids if Label("e", (j,)) in used]
        if Label("fib", (s.id,)) in used or Label("fibP", (s.id,)) in used or clash:
            findings.append(f"sphere {s.id} reuses an id already present in the record")
    return findings


def _label_products(ring: GradedRing):
    for (d1, i, d2, j, k), c in ring.constants.items():
        yield ring.basis[d1][i], ring.basis[d2][j], ring.basis[d1 + d2][k], c


def _rebuild_ring(ring: GradedRing, new_basis: Mapping[int, list[Label]]):
    basis = {d: list(ring.basis[d]) + list(new_basis.get(d, ())) for d in range(ring.top + 1)}
    rb = RingBuilder(basis, ring.top)
    old = defaultdict(dict)
    for x, y, z, c in _label_products(ring):
        old[x, y][z] = c
    for (x, y), v in old.items():
        rb.set(x, y, v)
    return rb


def _ring_after_spheres(ring: GradedRing, sys: NormalSystem) -> GradedRing:
    """Add the classes and products created by a sphere or polyhedral ATSS in (7, 4)."""
    base = [lab for lab in ring.basis[2] if lab.kind == "a*"]
    A = [Label("a*", (r,)) for r in range(1, len(base) + 1)]
    F = [Label("f", (r,)) for r in range(1, len(base) + 1)]
    mu = {TOP_CLASS: 1}
    cls = {j: c for s in sys.spheres for j, c in zip(s.sub_ids, s.base_classes)}
    owner = {j: s for s in sys.spheres for j in s.sub_ids}
    poly = sys.kind == POLYHEDRAL
    k3, k4 = ("tau", "beta") if poly else ("t", "b*4")

    def dual4(j):  # degree-4 class of the sphere or polyhedron containing sub-sphere j
        return Label(k4, (owner[j].id,))

    subs = sys.sub_ids
    new = {
        2: [Label("b*2", (j,)) for j in subs],
        5: [Label("g", (j,)) for j in subs],
        3: [Label(k3, (s.id,)) for s in sys.spheres],
        4: [Label(k4, (s.id,)) for s in sys.spheres],
    }
    rb = _rebuild_ring(ring, new)
    for j in subs:
        rb.set(Label("b*2", (j,)), Label("g", (j,)), mu)
        for r, x in enumerate(A):
            rb.set(x, Label("b*2", (j,)), {dual4(j): cls[j][r]})
        for i in subs:
            if i != j:
                prod = defaultdict(int)
                prod[dual4(i)] += sys.h(i, j)
                prod[dual4(j)] += sys.h(j, i)
                rb.set(Label("b*2", (i,)), Label("b*2", (j,)), prod)
    for s in sys.spheres:
        t = Label(k3, (s.id,))
        rb.set(Label(k4, (s.id,)), t, mu)
        for r, x in enumerate(A):
            rb.set(x, t, {Label("g", (j,)): cls[j][r] for j in s.sub_ids})
        for i in subs:
            prod = defaultdict(int)
            if i in s.sub_ids:
                for r, f in enumerate(F):
                    prod[f] += cls[i][r]
                for j in subs:
                    prod[Label("g", (j,))] += sys.h(i, j)
            for j in s.sub_ids:
                prod[Label("g", (j,))] += sys.h(j, i)
            rb.set(Label("b*2", (i,)), t, prod)
    return rb.build()


def _extend(record: InvariantRecord, gains: Mapping[int, list[Label]], ring, step: str) -> InvariantRecord:
    m, n = record.m, record.n
    mb = tuple(_sorted(list(record.manifold_basis[d]) + list(gains.get(d, ()))) for d in range(m + 1))
    rb = tuple(_sorted(list(record.reeb_basis[d]) + list(gains.get(d, ()))) for d in range(n + 1))
    links = record.q_links()
    for d, labs in gains.items():
        if d <= n:
            for lab in labs:
                links[d, lab] = {lab: 1}
    old4 = record.manifold_basis[4] if m >= 4 else ()
    char = replace(record.char, p1=_p1_for(mb, old4, record.char.p1))
    return replace(record, manifold_basis=mb, reeb_basis=rb, q_map=_q_matrices(mb, rb, links),
                   ring=ring, char=char, history=record.history + (step,))


def apply_atss(record: InvariantRecord, sys: NormalSystem) -> InvariantRecord:
    findings = validate_normal_system(sys, record)
    if findings:
        raise SurgeryError("; ".join(findings))
    if not sys.spheres:
        return record
    m, n = record.m, record.n
    half = n // 2
    gains = defaultdict(list)
    poly = sys.kind == POLYHEDRAL
    for s in sys.spheres:
        for j in s.sub_ids:
            gains[half].append(Label("e", (j,)))
            gains[m - half].append(Label("top", (j,)))
        gains[m - n].append(Label("fibP" if poly else "fib", (s.id,)))
        gains[n].append(Label("e'P" if poly else "e'", (s.id,)))
    ring = record.ring
    if ring is not None:
        if n % 4:
            raise SurgeryError(f"ring update needs n divisible by 4, got n={n}")
        ring = _ring_after_spheres(ring, sys)
    step = f"apply_atss({sys.kind}, spheres={[s.id for s in sys.spheres]})"
    return _extend(record, gains, ring, step)


def apply_point_atss(record: InvariantRecord, count: int) -> InvariantRecord:
    """Surgery along ``count`` embedded points (sphere dimension 0)."""
    if count < 0:
        raise SurgeryError(f"point count must be nonnegative, got {count}")
    if count == 0:
        return record
    m, n = record.m, record.n
    if m - n == n:
        raise SurgeryError(f"relation m - n != n fails (both {n})")
    start = sum(1 for lab in record.manifold_basis[n] if lab.kind == "e'Q")
    ids = range(start + 1, start + count + 1)
    gains = {m - n: [Label("fibQ", (j,)) for j in ids], n: [Label("e'Q", (j,)) for j in ids]}
    ring = record.ring
    if ring is not None:
        rb = _rebuild_ring(ring, {3: [Label("t'", (j,)) for j in ids], 4: [Label("b'*", (j,)) for j in ids]})
        for j in ids:
            rb.set(Label("b'*", (j,)), Label("t'", (j,)), {TOP_CLASS: 1})
        ring = rb.build()
    return _extend(record, gains, ring, f"apply_point_atss({count})")


def apply_pontryagin(record: InvariantRecord, p: Sequence[int]) -> InvariantRecord:
    """Reglue the fiber-sphere neighborhoods so that ``p1 = 4 p`` in the degree-4 basis."""
    width = len(record.char.p1)
    if len(p) != width:
        raise SurgeryError(f"p has length {len(p)}, degree 4 has rank {width}")
    char = replace(record.char, p1=tuple(4 * int(x) for x in p))
    return replace(record, char=char, history=record.history + (f"apply_pontryagin({tuple(p)})",))


def pipeline_equivalence(record: InvariantRecord, model: ManifoldModel, rename=None) -> list[str]:
    if (record.m, record.n) != (7, 4):
        return [f"record has (m, n) = ({record.m}, {record.n}); models live in (7, 4)"]
    findings = []
    if record.manifold_rank != tuple(model.homology_rank):
        findings.append(f"homology ranks differ: {record.manifold_rank} vs {tuple(model.homology_rank)}")
    if record.ring is None:
        findings.append("record carries no ring")
    else:
        findings.extend(ring_differences(model.ring, record.ring, rename))
    if record.char != model.char_classes:
        findings.append(f"characteristic records differ: {record.char} vs {model.char_classes}")
    return findings


@dataclass(frozen=True)
class RoundFoldDescriptor:
    """Concentric singular spheres of radii ``1..l``; ``fiber_counts[r]`` copies of
    ``S^3`` lie over the region between radius ``r`` and ``r + 1`` (index 0 is the inner disk)."""

    radii: tuple[int, ...]
    fiber_counts: tuple[int, ...]


def round_fold_descriptor(l: int) -> RoundFoldDescriptor:
    if l < 1:
        raise ValueError(f"a round fold map needs l >= 1, got {l}")
    return RoundFoldDescriptor(tuple(range(1, l + 1)), tuple(range(l, -1, -1)))


def validate_round_fold(desc: RoundFoldDescriptor) -> list[str]:
    out = []
    counts = desc.fiber_counts
    if len(counts) != len(desc.radii) + 1:
        out.append(f"{len(counts)} fiber counts for {len(desc.radii)} singular spheres")
    if list(desc.radii) != list(range(1, len(desc.radii) + 1)):
        out.append(f"radii {desc.radii} are not 1..l")
    if not desc.radii:
        out.append("no singular spheres")
    if counts and counts[-1] != 0:
        out.append(f"outermost region has {counts[-1]} fibers, expected 0")
    for r, (inner, outer) in enumerate(zip(counts, counts[1:]), start=1):
        if inner - outer != 1:
            out.append(f"fiber count drops from {inner} to {outer} across radius {r}")
    return out

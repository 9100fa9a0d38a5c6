"""Direct construction of the cohomology ring models from their parameters.

The three builders correspond to the basic family (``build_theorem1``), the
family twisted by a symmetric intersection matrix ``H`` (``build_theorem5``)
and its block quotients (``build_theorem6``).  Bases are fixed:

    degree 2: a*_j (j <= a), then b*_{j,2} (j <= b)
    degree 3: t_j or tau_k, then t'_j (j <= bprime)
    degree 4: b*_{j,4} or beta_k, then b'*_j
    degree 5: f_j (dual to a*_j), then g_j (dual to b*_{j,2})
    degree 7: mu
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ParameterError
from .linalg import IntegerMatrix, is_unimodular
from .ring import TOP_CLASS, UNIT, GradedRing, Label, RingBuilder, check_ring, pairing_matrix, ring_differences

THEOREMS = (1, 5, 6)

OFFDIAGONAL_NOTE = (
    "b*_{j1,2} * t_{j2} = h_{j2,j1} g_{j2} for j1 != j2; the unmodified basic-family clause "
    "(zero) is not associative once H is nonzero"
)


def _as_matrix(value, rows: int, cols: int, name: str) -> IntegerMatrix:
    if value is None:
        return IntegerMatrix.zeros(rows, cols)
    if not isinstance(value, IntegerMatrix):
        try:
            value = IntegerMatrix.from_rows(value, cols=cols)
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"{name}: {exc}") from None
    if value.shape != (rows, cols):
        raise ParameterError(f"{name} has shape {value.rows}x{value.cols}, expected {rows}x{cols}")
    return value


@dataclass(frozen=True)
class ConstructionParams:
    """Input data of a construction.

    ``A_matrix[i][j]`` is the coefficient of the j-th A-generator in the class
    carried by the i-th B-sphere; ``H`` is symmetric with zero diagonal;
    ``p`` is the Pontryagin datum in the degree-4 basis (zeros when omitted);
    ``partition`` lists 1-based blocks of ``{1..b}``.
    """

    a: int = 0
    b: int = 0
    bprime: int = 0
    A_matrix: IntegerMatrix | Sequence[Sequence[int]] | None = None
    H: IntegerMatrix | Sequence[Sequence[int]] | None = None
    p: tuple[int, ...] | None = None
    partition: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        for name in ("a", "b", "bprime"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ParameterError(f"{name} must be a nonnegative integer, got {v!r}")
        object.__setattr__(self, "A_matrix", _as_matrix(self.A_matrix, self.b, self.a, "A_matrix"))
        H = _as_matrix(self.H, self.b, self.b, "H")
        if not H.is_symmetric():
            raise ParameterError("H must be symmetric")
        if any(H[j, j] for j in range(self.b)):
            raise ParameterError("H must have zero diagonal")
        object.__setattr__(self, "H", H)
        if self.partition is not None:
            blocks = tuple(tuple(int(j) for j in blk) for blk in self.partition)
            seen = [j for blk in blocks for j in blk]
            if any(not blk for blk in blocks):
                raise ParameterError("partition blocks must be nonempty")
            if sorted(seen) != list(range(1, self.b + 1)):
                raise ParameterError(f"partition {blocks} is not a partition of 1..{self.b}")
            object.__setattr__(self, "partition", blocks)
        want = self.degree4_rank
        if self.p is None:
            object.__setattr__(self, "p", (0,) * want)
        else:
            p = tuple(int(x) for x in self.p)
            if len(p) != want:
                raise ParameterError(f"p has length {len(p)}, expected {want}")
            object.__setattr__(self, "p", p)

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        if self.partition is None:
            return tuple((j,) for j in range(1, self.b + 1))
        return self.partition

    @property
    def degree4_rank(self) -> int:
        return (len(self.partition) if self.partition is not None else self.b) + self.bprime

    def a_coef(self, i: int, j: int) -> int:
        """``a_{i,j}`` with 1-based indices."""
        return self.A_matrix[i - 1, j - 1]

    def h(self, i: int, j: int) -> int:
        return self.H[i - 1, j - 1]

    def replace(self, **changes) -> ConstructionParams:
        data = dict(a=self.a, b=self.b, bprime=self.bprime, A_matrix=self.A_matrix, H=self.H,
                    p=self.p, partition=self.partition)
        data.update(changes)
        return ConstructionParams(**data)


@dataclass(frozen=True)
class CharacteristicRecord:
    """Stiefel-Whitney vanishing flags and the first Pontryagin class.

    ``w1 .. w5`` are True when the class vanishes; ``p1`` is in the degree-4 basis.
    """

    w1: bool = True
    w2: bool = True
    w3: bool = True
    w4: bool = True
    w5: bool = True
    p1: tuple[int, ...] = ()

    @property
    def stiefel_whitney_trivial(self) -> bool:
        return all((self.w1, self.w2, self.w3, self.w4, self.w5))


@dataclass(frozen=True)
class Provenance:
    theorem: int
    params: ConstructionParams
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class ManifoldModel:
    ring: GradedRing
    homology_rank: tuple[int, ...]
    char_classes: CharacteristicRecord
    provenance: Provenance | None = field(default=None, compare=False)


def characteristic_record(params: ConstructionParams) -> CharacteristicRecord:
    if len(params.p) != params.degree4_rank:
        raise ParameterError(f"p has length {len(params.p)}, expected {params.degree4_rank}")
    return CharacteristicRecord(p1=tuple(4 * x for x in params.p))


def expected_homology(params: ConstructionParams, theorem: int) -> tuple[int, ...]:
    mid = (len(params.blocks) if theorem == 6 else params.b) + params.bprime
    side = params.a + params.b
    return (1, 0, side, mid, mid, side, 0, 1)


def _basis(params: ConstructionParams, blocky: bool) -> dict[int, list[Label]]:
    a, b, bp = params.a, params.b, params.bprime
    n3 = len(params.blocks) if blocky else b
    k3, k4 = ("tau", "beta") if blocky else ("t", "b*4")
    return {
        0: [UNIT],
        2: [Label("a*", (j,)) for j in range(1, a + 1)] + [Label("b*2", (j,)) for j in range(1, b + 1)],
        3: [Label(k3, (j,)) for j in range(1, n3 + 1)] + [Label("t'", (j,)) for j in range(1, bp + 1)],
        4: [Label(k4, (j,)) for j in range(1, n3 + 1)] + [Label("b'*", (j,)) for j in range(1, bp + 1)],
        5: [Label("f", (j,)) for j in range(1, a + 1)] + [Label("g", (j,)) for j in range(1, b + 1)],
        7: [TOP_CLASS],
    }


def _dualities(rb: RingBuilder, params: ConstructionParams, k3: str, k4: str, n3: int) -> None:
    mu = {TOP_CLASS: 1}
    for j in range(1, params.a + 1):
        rb.set(Label("a*", (j,)), Label("f", (j,)), mu)
    for j in range(1, params.b + 1):
        rb.set(Label("b*2", (j,)), Label("g", (j,)), mu)
    for k in range(1, n3 + 1):
        rb.set(Label(k4, (k,)), Label(k3, (k,)), mu)
    for j in range(1, params.bprime + 1):
        rb.set(Label("b'*", (j,)), Label("t'", (j,)), mu)


def _model(ring: GradedRing, params: ConstructionParams, theorem: int, notes=()) -> ManifoldModel:
    return ManifoldModel(
        ring=ring,
        homology_rank=expected_homology(params, theorem),
        char_classes=characteristic_record(params),
        provenance=Provenance(theorem, params, tuple(notes)),
    )


def _plain_ring(params: ConstructionParams, twisted: bool) -> GradedRing:
    a, b = params.a, params.b
    A, h = params.a_coef, (params.h if twisted else (lambda i, j: 0))
    rb = RingBuilder(_basis(params, blocky=False))
    _dualities(rb, params, "t", "b*4", b)
    for j2 in range(1, b + 1):
        for j1 in range(1, a + 1):
            rb.set(Label("a*", (j1,)), Label("b*2", (j2,)), {Label("b*4", (j2,)): A(j2, j1)})
            rb.set(Label("a*", (j1,)), Label("t", (j2,)), {Label("g", (j2,)): A(j2, j1)})
        for j1 in range(1, b + 1):
            prod = defaultdict(int)
            prod[Label("b*4", (j1,))] += h(j1, j2)
            prod[Label("b*4", (j2,))] += h(j2, j1)
            rb.set(Label("b*2", (j1,)), Label("b*2", (j2,)), prod)
            if j1 != j2:
                rb.set(Label("b*2", (j1,)), Label("t", (j2,)), {Label("g", (j2,)): h(j2, j1)})
    for i in range(1, b + 1):
        prod = {Label("f", (j,)): A(i, j) for j in range(1, a + 1)}
        prod.update({Label("g", (j,)): h(i, j) for j in range(1, b + 1)})
        rb.set(Label("b*2", (i,)), Label("t", (i,)), prod)
    return rb.build()


def build_theorem1(params: ConstructionParams) -> ManifoldModel:
    """Basic family: all products of degree-2 B-classes vanish."""
    if params.partition is not None:
        raise ParameterError("the basic family takes no partition")
    return _model(_plain_ring(params, twisted=False), params, 1)


def build_theorem5(params: ConstructionParams) -> ManifoldModel:
    if params.partition is not None:
        raise ParameterError("build_theorem5 takes no partition; use build_theorem6")
    return _model(_plain_ring(params, twisted=True), params, 5, [OFFDIAGONAL_NOTE])


def build_theorem6(params: ConstructionParams) -> ManifoldModel:
    """Block quotient: the degree-4 (and dual degree-3) classes of each block merge."""
    if params.partition is None:
        raise ParameterError("build_theorem6 needs a partition")
    a, b = params.a, params.b
    A, h = params.a_coef, params.h
    blocks = params.blocks
    blk = {j: k for k, block in enumerate(blocks, start=1) for j in block}
    rb = RingBuilder(_basis(params, blocky=True))
    _dualities(rb, params, "tau", "beta", len(blocks))

    def beta(j):
        return Label("beta", (blk[j],))

    for j2 in range(1, b + 1):
        for j1 in range(1, a + 1):
            rb.set(Label("a*", (j1,)), Label("b*2", (j2,)), {beta(j2): A(j2, j1)})
        for j1 in range(1, b + 1):
            prod = defaultdict(int)
            prod[beta(j1)] += h(j1, j2)
            prod[beta(j2)] += h(j2, j1)
            rb.set(Label("b*2", (j1,)), Label("b*2", (j2,)), prod)
    for k, block in enumerate(blocks, start=1):
        tau = Label("tau", (k,))
        for j1 in range(1, a + 1):
            rb.set(Label("a*", (j1,)), tau, {Label("g", (j,)): A(j, j1) for j in block})
        for i in range(1, b + 1):
            prod = defaultdict(int)
            if i in block:
                for j in range(1, a + 1):
                    prod[Label("f", (j,))] += A(i, j)
                for j in range(1, b + 1):
                    prod[Label("g", (j,))] += h(i, j)
            for j in block:
                prod[Label("g", (j,))] += h(j, i)
            rb.set(Label("b*2", (i,)), tau, prod)
    return _model(rb.build(), params, 6, [OFFDIAGONAL_NOTE])


BUILDERS = {1: build_theorem1, 5: build_theorem5, 6: build_theorem6}


def build(theorem: int, params: ConstructionParams) -> ManifoldModel:
    try:
        builder = BUILDERS[theorem]
    except KeyError:
        raise ParameterError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}") from None
    return builder(params)


def homology_table(model: ManifoldModel) -> tuple[tuple[int, ...], list[str]]:
    ranks = tuple(model.homology_rank)
    findings = []
    if len(ranks) != 8:
        findings.append(f"homology table has {len(ranks)} degrees, expected 8")
        return ranks, findings
    if any(r < 0 for r in ranks):
        findings.append(f"negative homology rank in {ranks}")
    euler = sum((-1) ** d * r for d, r in enumerate(ranks))
    if euler != 0:
        findings.append(f"Euler characteristic is {euler}, expected 0")
    if ranks[0] != 1 or ranks[7] != 1 or ranks[1] != 0 or ranks[6] != 0:
        findings.append(f"homology {ranks} is not that of a closed simply-connected 7-manifold")
    ring_ranks = model.ring.ranks
    for d in range(8):
        got = ring_ranks[d] if d < len(ring_ranks) else 0
        if got != ranks[d]:
            findings.append(f"homology rank {ranks[d]} in degree {d} but cohomology rank {got}")
    if model.provenance is not None:
        want = expected_homology(model.provenance.params, model.provenance.theorem)
        if ranks != want:
            findings.append(f"homology {ranks} differs from {want} required by the parameters")
    return ranks, findings


def verify_model(model: ManifoldModel) -> list[str]:
    findings = [f"ring: {f}" for f in check_ring(model.ring)]
    ring = model.ring
    if not findings:
        for d in (2, 3):
            m = pairing_matrix(ring, d)
            if not m.is_square() or not is_unimodular(m):
                findings.append(f"duality: pairing of degrees {d} and {7 - d} is not unimodular")
    findings.extend(f"homology: {f}" for f in homology_table(model)[1])
    char = model.char_classes
    if not char.stiefel_whitney_trivial:
        findings.append("characteristic: a Stiefel-Whitney class w1..w5 does not vanish")
    if len(char.p1) != ring.rank(4):
        findings.append(f"characteristic: p1 has {len(char.p1)} coordinates, degree 4 has rank {ring.rank(4)}")
    elif model.provenance is not None:
        want = tuple(4 * x for x in model.provenance.params.p)
        if char.p1 != want:
            findings.append(f"characteristic: p1 = {char.p1}, expected 4*p = {want}")
    elif any(x % 4 for x in char.p1):
        findings.append(f"characteristic: p1 = {char.p1} is not divisible by 4")
    return findings


def model_differences(left: ManifoldModel, right: ManifoldModel, rename=None) -> list[str]:
    """Basis-for-basis comparison of ranks, ring and characteristic record."""
    out = []
    if tuple(left.homology_rank) != tuple(right.homology_rank):
        out.append(f"homology ranks differ: {left.homology_rank} vs {right.homology_rank}")
    out.extend(ring_differences(left.ring, right.ring, rename))
    if left.char_classes != right.char_classes:
        out.append(f"characteristic records differ: {left.char_classes} vs {right.char_classes}")
    return out


def singleton_rename(params: ConstructionParams) -> dict[str, str]:
    """Label map taking a block-quotient ring onto the unquotiented one (singleton blocks)."""
    out = {}
    for k, block in enumerate(params.blocks, start=1):
        if len(block) == 1:
            (j,) = block
            out[str(Label("beta", (k,)))] = str(Label("b*4", (j,)))
            out[str(Label("tau", (k,)))] = str(Label("t", (j,)))
    return out

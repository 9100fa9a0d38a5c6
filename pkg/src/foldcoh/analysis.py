"""Obstructions to special generic maps and isotropy of degree-2 squares."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

from .construction import ConstructionParams, ManifoldModel
from .errors import DimensionError
from .linalg import determinant
from .ring import CohomologyClass, cup, pairing_matrix

DEFAULT_BOUND = 4

P_NONZERO = "p_nonzero"
A_MATRIX_NONZERO = "a_matrix_nonzero"
H_NONZERO = "H_nonzero"


@dataclass(frozen=True)
class ObstructionVerdict:
    obstructed: bool
    reasons: tuple[str, ...] = ()


def special_generic_obstruction(params: ConstructionParams, theorem: int = 5) -> ObstructionVerdict:
    """Sufficient conditions for the manifold to admit no special generic map into R^4.

    The basic family never looks at ``H``.
    """
    reasons = []
    if any(params.p):
        reasons.append(P_NONZERO)
    if not params.A_matrix.is_zero():
        reasons.append(A_MATRIX_NONZERO)
    if theorem != 1 and not params.H.is_zero():
        reasons.append(H_NONZERO)
    return ObstructionVerdict(bool(reasons), tuple(reasons))


def square_of(model: ManifoldModel, coeffs: Sequence[int]) -> CohomologyClass:
    ring = model.ring
    if len(coeffs) != ring.rank(2):
        raise DimensionError(f"{len(coeffs)} coefficients for a degree-2 group of rank {ring.rank(2)}")
    x = CohomologyClass(2, tuple(int(c) for c in coeffs))
    return cup(ring, x, x)


@dataclass(frozen=True)
class IsotropyReport:
    search_bound: int
    vanishing_tuples: tuple[tuple[int, ...], ...] = ()
    lines: tuple[tuple[int, ...], ...] = ()
    union_of_lines: bool = True
    witness_pair: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    max_rank_found: int = 0


def _quadratic_form(model: ManifoldModel):
    """Coefficients ``(i, j, k, c)`` of the square map ``x -> x * x``, with ``i <= j``."""
    merged: dict[tuple[int, int, int], int] = {}
    for i, j, k, c in model.ring.pair_entries(2, 2):
        key = (min(i, j), max(i, j), k)
        merged[key] = merged.get(key, 0) + c
    return [(i, j, k, c) for (i, j, k), c in merged.items() if c]


def _vanishes(form, v) -> bool:
    acc: dict[int, int] = {}
    for i, j, k, c in form:
        if v[i] and v[j]:
            acc[k] = acc.get(k, 0) + c * v[i] * v[j]
    return not any(acc.values())


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    """Primitive generator of the line through ``v``, first nonzero entry positive."""
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        return tuple(v)
    w = [x // g for x in v]
    if next(x for x in w if x) < 0:
        w = [-x for x in w]
    return tuple(w)


def _box(rank: int, bound: int):
    return itertools.product(range(-bound, bound + 1), repeat=rank)


def vanishing_locus(model: ManifoldModel, bound: int = DEFAULT_BOUND) -> IsotropyReport:
    """All nonzero degree-2 tuples in ``[-bound, bound]^rank`` whose square vanishes."""
    if bound < 1:
        raise ValueError(f"bound must be at least 1, got {bound}")
    rank = model.ring.rank(2)
    form = _quadratic_form(model)
    found = tuple(v for v in _box(rank, bound) if any(v) and _vanishes(form, v))
    members = set(found)
    union = all(primitive(v) in members for v in found)
    lines = tuple(sorted({primitive(v) for v in found}, reverse=True))
    return IsotropyReport(bound, found, lines, union)


def _independent(u, v) -> bool:
    return any(u[i] * v[j] - u[j] * v[i] for i in range(len(u)) for j in range(i + 1, len(u)))


def _search_order(v):
    return sum(abs(x) for x in v), tuple(-x for x in v)


def isotropic_rank_search(model: ManifoldModel, bound: int = DEFAULT_BOUND) -> IsotropyReport:
    """Look for independent ``u, v`` with ``u^2 = v^2 = u*v = 0`` inside the box.

    Over torsion-free groups this is the same as a rank-2 sublattice on which
    every square vanishes, since ``(x u + y v)^2 = x^2 u^2 + 2 x y u v + y^2 v^2``.
    """
    locus = vanishing_locus(model, bound)
    ring = model.ring
    if not locus.vanishing_tuples:
        return locus
    # multiples of a candidate add nothing, so only primitive representatives are paired
    cands = sorted({primitive(v) for v in locus.vanishing_tuples}, key=_search_order)
    cls = {v: CohomologyClass(2, v) for v in cands}
    for a, u in enumerate(cands):
        for v in cands[a + 1:]:
            if _independent(u, v) and cup(ring, cls[u], cls[v]).is_zero():
                return IsotropyReport(bound, locus.vanishing_tuples, locus.lines, locus.union_of_lines,
                                      (u, v), 2)
    return IsotropyReport(bound, locus.vanishing_tuples, locus.lines, locus.union_of_lines, None, 1)


def pairing_determinants(model: ManifoldModel) -> dict[int, int | None]:
    """Determinant of the degree-d duality pairing, None when the matrix is not square."""
    out = {}
    for d in range(1, model.ring.top):
        m = pairing_matrix(model.ring, d)
        out[d] = determinant(m) if m.is_square() else None
    return out


@dataclass(frozen=True)
class ComparisonReport:
    bound: int
    homology: tuple[tuple[int, ...], tuple[int, ...]]
    determinants: tuple[dict, dict]
    isotropy_ranks: tuple[int, int]
    distinctions: tuple[str, ...] = field(default=())

    @property
    def distinguished(self) -> bool:
        return bool(self.distinctions)


def compare_models(first: ManifoldModel, second: ManifoldModel, bound: int = DEFAULT_BOUND) -> ComparisonReport:
    h1, h2 = tuple(first.homology_rank), tuple(second.homology_rank)
    d1, d2 = pairing_determinants(first), pairing_determinants(second)
    i1 = isotropic_rank_search(first, bound).max_rank_found
    i2 = isotropic_rank_search(second, bound).max_rank_found
    out = []
    for d in range(8):
        if h1[d] != h2[d]:
            out.append(f"homology_rank[{d}]: {h1[d]} vs {h2[d]}")
    for d in sorted(set(d1) | set(d2)):
        if d1.get(d) != d2.get(d):
            out.append(f"pairing determinant in degree {d}: {d1.get(d)} vs {d2.get(d)}")
    if i1 != i2:
        out.append(f"max isotropic rank at bound {bound}: {i1} vs {i2}")
    return ComparisonReport(bound, (h1, h2), (d1, d2), (i1, i2), tuple(out))

"""Graded-commutative rings given by integer structure constants.

A ring stores a labelled basis in each degree ``0..top`` and the nonzero
structure constants ``(d1, i, d2, j, k) -> c`` meaning

    basis[d1][i] * basis[d2][j] = ... + c * basis[d1 + d2][k] + ...

Products whose degree exceeds ``top`` are the zero class.
"""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import DimensionError
from .linalg import IntegerMatrix

# Kinds are degree specific, so one global order fixes the order inside every degree.
KIND_ORDER = (
    "1", "a*", "b*2", "t", "tau", "t'", "b*4", "beta", "b'*", "f", "g", "mu",
)

_LABEL_RE = re.compile(r"^(?P<kind>[^_{}]+)(?:_(?:(?P<one>-?\d+)|\{(?P<many>-?\d+(?:,-?\d+)*)\}))?$")


@dataclass(frozen=True)
class Label:
    """Symbolic basis element, e.g. ``Label("b*2", (1,))`` printed ``b*_{1,2}``."""

    kind: str
    index: tuple[int, ...] = ()

    def __str__(self):
        if self.kind in ("b*2", "b*4"):
            return f"b*_{{{self.index[0]},{self.kind[-1]}}}"
        if not self.index:
            return self.kind
        if len(self.index) == 1:
            return f"{self.kind}_{self.index[0]}"
        return f"{self.kind}_{{{','.join(map(str, self.index))}}}"

    def __repr__(self):
        return f"Label({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> Label:
        m = _LABEL_RE.match(text)
        if m is None:
            raise ValueError(f"unparseable basis label {text!r}")
        kind = m["kind"]
        if m["one"] is not None:
            index = (int(m["one"]),)
        elif m["many"] is not None:
            index = tuple(int(x) for x in m["many"].split(","))
        else:
            index = ()
        if kind == "b*" and len(index) == 2 and index[1] in (2, 4):
            return cls(f"b*{index[1]}", index[:1])
        return cls(kind, index)

    def sort_key(self):
        try:
            rank = KIND_ORDER.index(self.kind)
        except ValueError:
            rank = len(KIND_ORDER)
        return rank, self.kind, self.index


UNIT = Label("1")
TOP_CLASS = Label("mu")


@dataclass(frozen=True)
class CohomologyClass:
    """Integer combination of the basis of one degree."""

    degree: int
    coords: tuple[int, ...]

    def __add__(self, other: CohomologyClass) -> CohomologyClass:
        if other.degree != self.degree or len(other.coords) != len(self.coords):
            raise DimensionError(f"cannot add classes of degrees {self.degree} and {other.degree}")
        return CohomologyClass(self.degree, tuple(x + y for x, y in zip(self.coords, other.coords)))

    def __neg__(self):
        return CohomologyClass(self.degree, tuple(-x for x in self.coords))

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k: int) -> CohomologyClass:
        return CohomologyClass(self.degree, tuple(k * x for x in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)


@dataclass(frozen=True)
class GradedRing:
    basis: tuple[tuple[Label, ...], ...]
    constants: Mapping[tuple[int, int, int, int, int], int] = field(compare=True)
    top: int = 7

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.basis)

    def rank(self, d: int) -> int:
        return len(self.basis[d]) if 0 <= d <= self.top else 0

    @cached_property
    def _position(self) -> dict[Label, tuple[int, int]]:
        return {lab: (d, i) for d, labs in enumerate(self.basis) for i, lab in enumerate(labs)}

    @cached_property
    def _by_pair(self) -> dict[tuple[int, int], list[tuple[int, int, int, int]]]:
        out = defaultdict(list)
        for (d1, i, d2, j, k), c in self.constants.items():
            out[d1, d2].append((i, j, k, c))
        return dict(out)

    def locate(self, label: Label | str) -> tuple[int, int]:
        if isinstance(label, str):
            label = Label.parse(label)
        return self._position[label]

    def has(self, label: Label | str) -> bool:
        if isinstance(label, str):
            label = Label.parse(label)
        return label in self._position

    def element(self, label: Label | str, coeff: int = 1) -> CohomologyClass:
        d, i = self.locate(label)
        coords = [0] * self.rank(d)
        coords[i] = coeff
        return CohomologyClass(d, tuple(coords))

    def zero(self, d: int) -> CohomologyClass:
        return CohomologyClass(d, (0,) * self.rank(d))

    def combination(self, d: int, terms: Mapping[Label | str, int]) -> CohomologyClass:
        out = self.zero(d)
        for lab, c in terms.items():
            out = out + self.element(lab, c)
        return out

    def as_terms(self, x: CohomologyClass) -> dict[str, int]:
        return {str(self.basis[x.degree][i]): c for i, c in enumerate(x.coords) if c}

    def pair_entries(self, d1: int, d2: int) -> list[tuple[int, int, int, int]]:
        """Nonzero ``(i, j, k, c)`` of the product table for degrees ``(d1, d2)``."""
        return self._by_pair.get((d1, d2), [])

    def table(self, d1: int, d2: int) -> list[list[list[int]]]:
        """Dense table ``T[i][j][k]``; empty target when ``d1 + d2`` exceeds ``top``."""
        target = self.rank(d1 + d2)
        t = [[[0] * target for _ in range(self.rank(d2))] for _ in range(self.rank(d1))]
        for i, j, k, c in self.pair_entries(d1, d2):
            t[i][j][k] = c
        return t

    def structure_constants(self) -> list[tuple[int, int, int, int, int, int, int]]:
        """Sorted ``(d1, i, d2, j, d1 + d2, k, c)`` tuples of all nonzero constants."""
        return sorted((d1, i, d2, j, d1 + d2, k, c) for (d1, i, d2, j, k), c in self.constants.items())


def cup(ring: GradedRing, x: CohomologyClass, y: CohomologyClass) -> CohomologyClass:
    for z in (x, y):
        if len(z.coords) != ring.rank(z.degree):
            raise DimensionError(
                f"class of degree {z.degree} has {len(z.coords)} coordinates, rank is {ring.rank(z.degree)}"
            )
    d = x.degree + y.degree
    out = [0] * ring.rank(d)
    for i, j, k, c in ring.pair_entries(x.degree, y.degree):
        if x.coords[i] and y.coords[j]:
            out[k] += c * x.coords[i] * y.coords[j]
    return CohomologyClass(d, tuple(out))


def _fmt(ring: GradedRing, d: int, vec: Mapping[int, int]) -> str:
    terms = [f"{c}*{ring.basis[d][k]}" for k, c in sorted(vec.items()) if c]
    return " + ".join(terms) or "0"


def check_ring(ring: GradedRing) -> list[str]:
    """Every violated ring axiom, one line each; empty means the ring is sound."""
    findings: list[str] = []
    top = ring.top
    ranks = [ring.rank(d) for d in range(top + 1)]
    if len(ring.basis) != top + 1:
        findings.append(f"basis lists {len(ring.basis)} degrees, expected {top + 1}")
    if ranks[0] != 1:
        findings.append(f"rank of degree 0 is {ranks[0]}, expected 1")
    if top == 7:
        for d, want in ((7, 1), (1, 0), (6, 0)):
            if ranks[d] != want:
                findings.append(f"rank of degree {d} is {ranks[d]}, expected {want}")
    if len(set(ring._position)) != sum(ranks):
        findings.append("basis labels are not distinct")
    if findings:
        return findings

    for (d1, i, d2, j, k), c in sorted(ring.constants.items()):
        if not (0 <= d1 and 0 <= d2 and d1 + d2 <= top) or not (
            i < ranks[d1] and j < ranks[d2] and k < ranks[d1 + d2]
        ) or min(i, j, k) < 0:
            findings.append(f"structure constant ({d1},{i},{d2},{j},{k}) is out of range")
        elif c == 0:
            findings.append(f"explicit zero structure constant ({d1},{i},{d2},{j},{k})")
    if findings:
        return findings

    def prod(d1, i, d2, j):
        return {k: c for (ii, jj, k, c) in ring.pair_entries(d1, d2) if ii == i and jj == j}

    # unit
    for d in range(top + 1):
        for i in range(ranks[d]):
            for left, got in (("1", prod(0, 0, d, i)), ("2", prod(d, i, 0, 0))):
                if got != {i: 1}:
                    x = ring.basis[d][i]
                    expr = f"1 * {x}" if left == "1" else f"{x} * 1"
                    findings.append(f"unit law: {expr} = {_fmt(ring, d, got)}, expected {x}")

    # graded commutativity
    for (d1, i, d2, j, k), c in sorted(ring.constants.items()):
        other = ring.constants.get((d2, j, d1, i, k), 0)
        want = (-1) ** (d1 * d2) * c
        if other != want:
            findings.append(
                f"graded commutativity: {ring.basis[d1][i]} * {ring.basis[d2][j]} and "
                f"{ring.basis[d2][j]} * {ring.basis[d1][i]} disagree on {ring.basis[d1 + d2][k]}"
                f" ({c} vs {other})"
            )

    findings.extend(_associativity_failures(ring))
    return findings


def _associativity_failures(ring: GradedRing) -> list[str]:
    top = ring.top
    out = []
    degrees = [d for d in range(top + 1) if ring.rank(d)]
    for d1 in degrees:
        for d2 in degrees:
            for d3 in degrees:
                d = d1 + d2 + d3
                if d > top or not ring.rank(d):
                    continue
                left: dict[tuple[int, int, int, int], int] = defaultdict(int)
                right: dict[tuple[int, int, int, int], int] = defaultdict(int)
                outer = defaultdict(list)
                for k, l, m, c in ring.pair_entries(d1 + d2, d3):
                    outer[k].append((l, m, c))
                for i, j, k, c in ring.pair_entries(d1, d2):
                    for l, m, c2 in outer.get(k, ()):
                        left[i, j, l, m] += c * c2
                outer = defaultdict(list)
                for i, k, m, c in ring.pair_entries(d1, d2 + d3):
                    outer[k].append((i, m, c))
                for j, l, k, c in ring.pair_entries(d2, d3):
                    for i, m, c2 in outer.get(k, ()):
                        right[i, j, l, m] += c * c2
                for key in sorted(set(left) | set(right)):
                    if left.get(key, 0) != right.get(key, 0):
                        i, j, l, m = key
                        x, y, z = ring.basis[d1][i], ring.basis[d2][j], ring.basis[d3][l]
                        out.append(
                            f"associativity: ({x} * {y}) * {z} and {x} * ({y} * {z}) disagree on "
                            f"{ring.basis[d][m]} ({left.get(key, 0)} vs {right.get(key, 0)})"
                        )
    return out


def pairing_matrix(ring: GradedRing, d: int) -> IntegerMatrix:
    """Matrix of the pairing ``H^d x H^(top-d) -> H^top`` in the chosen bases."""
    if not 1 <= d <= ring.top - 1:
        raise ValueError(f"pairing degree must lie in 1..{ring.top - 1}, got {d}")
    e = ring.top - d
    rows = [[0] * ring.rank(e) for _ in range(ring.rank(d))]
    for i, j, k, c in ring.pair_entries(d, e):
        if k == 0:
            rows[i][j] = c
    return IntegerMatrix.from_rows(rows, cols=ring.rank(e))


class RingBuilder:
    """Accumulates products between labels and freezes them into a GradedRing.

    Each ``set`` also records the mirrored product with the graded sign, and
    unit products are added by ``build``.
    """

    def __init__(self, basis: Mapping[int, Iterable[Label]], top: int = 7):
        self.top = top
        degrees = [tuple(basis.get(d, ())) for d in range(top + 1)]
        self.basis = tuple(tuple(sorted(b, key=Label.sort_key)) for b in degrees)
        self.where = {lab: (d, i) for d, labs in enumerate(self.basis) for i, lab in enumerate(labs)}
        self.constants: dict[tuple[int, int, int, int, int], int] = {}

    def set(self, x: Label, y: Label, value: Mapping[Label, int]) -> None:
        dx, ix = self.where[x]
        dy, iy = self.where[y]
        sign = (-1) ** (dx * dy)
        for z, c in value.items():
            if not c:
                continue
            dz, k = self.where[z]
            if dz != dx + dy:
                raise ValueError(f"{x} * {y} cannot have a {z} term")
            for key, v in (((dx, ix, dy, iy, k), c), ((dy, iy, dx, ix, k), sign * c)):
                if self.constants.get(key, v) != v:
                    raise ValueError(f"conflicting values for {x} * {y} on {z}")
                self.constants[key] = v

    def build(self) -> GradedRing:
        unit = self.basis[0][0]
        for d, labs in enumerate(self.basis):
            for lab in labs:
                self.set(unit, lab, {lab: 1})
        return GradedRing(self.basis, dict(self.constants), self.top)


def sparse_products(ring: GradedRing) -> dict[tuple[str, str], dict[str, int]]:
    """Label-keyed view of every nonzero product, for basis-independent comparison."""
    out: dict[tuple[str, str], dict[str, int]] = defaultdict(dict)
    for (d1, i, d2, j, k), c in ring.constants.items():
        out[str(ring.basis[d1][i]), str(ring.basis[d2][j])][str(ring.basis[d1 + d2][k])] = c
    return dict(out)


def ring_differences(left: GradedRing, right: GradedRing, rename: Mapping[str, str] | None = None) -> list[str]:
    """Describe how two rings differ, matching bases by label.

    ``rename`` maps labels of ``right`` into the label vocabulary of ``left``.
    """
    rename = dict(rename or {})

    def rn(s):
        return rename.get(s, s)

    findings = []
    for d in range(max(left.top, right.top) + 1):
        lb = [str(x) for x in left.basis[d]] if d <= left.top else []
        rb = [rn(str(x)) for x in right.basis[d]] if d <= right.top else []
        if sorted(lb) != sorted(rb):
            findings.append(f"degree {d} bases differ: {lb} vs {rb}")
    if findings:
        return findings
    lp = sparse_products(left)
    rp = {(rn(x), rn(y)): {rn(z): c for z, c in v.items()} for (x, y), v in sparse_products(right).items()}
    for key in sorted(set(lp) | set(rp)):
        a, b = lp.get(key, {}), rp.get(key, {})
        if a != b:
            findings.append(f"product {key[0]} * {key[1]} differs: {_terms(a)} vs {_terms(b)}")
    return findings


def _terms(v: Mapping[str, int]) -> str:
    return " + ".join(f"{c}*{k}" for k, c in sorted(v.items())) or "0"


def ring_from_constants(
    basis: Sequence[Sequence[str]], constants: Iterable[Sequence[int]], top: int = 7
) -> GradedRing:
    """Rebuild a ring from labels and ``(d1, i, d2, j, d3, k, c)`` tuples.

    No validation happens here; ``check_ring`` reports anything malformed.
    """
    labels = tuple(tuple(Label.parse(s) for s in b) for b in basis)
    table: dict[tuple[int, int, int, int, int], int] = {}
    for d1, i, d2, j, d3, k, c in constants:
        if d3 != d1 + d2:
            raise DimensionError(f"constant ({d1},{i},{d2},{j},{d3},{k}) has inconsistent degrees")
        table[d1, i, d2, j, k] = c
    return GradedRing(labels, table, top)

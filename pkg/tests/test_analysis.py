import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from foldcoh.analysis import (
    compare_models,
    isotropic_rank_search,
    pairing_determinants,
    primitive,
    special_generic_obstruction,
    square_of,
    vanishing_locus,
)
from foldcoh.construction import ConstructionParams, build_theorem1, build_theorem5
from foldcoh.errors import DimensionError

from conftest import p0, random_params

M5 = build_theorem5(p0())
M1 = build_theorem1(p0())


def oracle_square(params: ConstructionParams, alpha, beta):
    """Degree-4 coordinates of x*x written straight from the product formulas."""
    out = []
    for k in range(1, params.b + 1):
        c = sum(alpha[i - 1] * params.a_coef(k, i) for i in range(1, params.a + 1))
        c += sum(beta[j - 1] * params.h(k, j) for j in range(1, params.b + 1) if j != k)
        out.append(2 * beta[k - 1] * c)
    return tuple(out)


def oracle_locus(params, bound):
    rank = params.a + params.b
    return sorted(
        v for v in itertools.product(range(-bound, bound + 1), repeat=rank)
        if any(v) and not any(oracle_square(params, v[: params.a], v[params.a:]))
    )


def test_p0_locus_frozen_values():
    rep = vanishing_locus(M5, 4)
    assert len(rep.vanishing_tuples) == 32
    assert rep.union_of_lines
    assert rep.lines == ((1, 0, 0), (1, -1, -1), (0, 1, 0), (0, 0, 1))
    assert sorted(rep.vanishing_tuples) == oracle_locus(p0(), 4)


def test_p0_isotropy_rank_one():
    rep = isotropic_rank_search(M5, 3)
    assert rep.max_rank_found == 1 and rep.witness_pair is None


def test_basic_family_has_rank_two_witness():
    rep = isotropic_rank_search(M1, 3)
    assert rep.max_rank_found == 2
    assert rep.witness_pair == ((0, 1, 0), (0, 0, 1))


def test_square_examples():
    assert square_of(M5, (1, 0, 0)).is_zero()
    assert M5.ring.as_terms(square_of(M5, (1, 1, 1))) == {"b*_{1,4}": 4, "b*_{2,4}": 4}
    with pytest.raises(DimensionError):
        square_of(M5, (1, 0))


def test_primitive():
    assert primitive((0, -2, 4)) == (0, 1, -2)
    assert primitive((3, 6, -9)) == (1, 2, -3)


def test_bound_must_be_positive():
    with pytest.raises(ValueError):
        vanishing_locus(M5, 0)


@pytest.mark.parametrize("p_set", [False, True])
@pytest.mark.parametrize("a_set", [False, True])
@pytest.mark.parametrize("h_set", [False, True])
def test_obstruction_truth_table(p_set, a_set, h_set):
    params = ConstructionParams(
        a=1, b=2,
        A_matrix=[[1], [0]] if a_set else None,
        H=[[0, -1], [-1, 0]] if h_set else None,
        p=(0, 3) if p_set else None,
    )
    v = special_generic_obstruction(params, 5)
    assert v.obstructed == (p_set or a_set or h_set)
    assert ("p_nonzero" in v.reasons) == p_set
    assert ("a_matrix_nonzero" in v.reasons) == a_set
    assert ("H_nonzero" in v.reasons) == h_set
    assert "H_nonzero" not in special_generic_obstruction(params, 1).reasons


def test_p0_obstruction_reasons():
    assert special_generic_obstruction(p0()).reasons == ("a_matrix_nonzero", "H_nonzero")


def test_pairing_determinants_are_units():
    assert set(pairing_determinants(M5).values()) == {1}


def test_compare_distinguishes_p0_from_basic_family():
    rep = compare_models(M5, M1, 3)
    assert rep.distinguished
    assert rep.isotropy_ranks == (1, 2)
    assert not compare_models(M5, M5, 2).distinguished


@given(st.integers(0, 10_000))
def test_square_matches_oracle(seed):
    params = random_params(random.Random(seed), max_dim=3)
    model = build_theorem5(params)
    rng = random.Random(seed + 1)
    v = [rng.randint(-3, 3) for _ in range(params.a + params.b)]
    sq = square_of(model, v)
    got = {lab: c for lab, c in model.ring.as_terms(sq).items()}
    want = oracle_square(params, v[: params.a], v[params.a:])
    assert got == {f"b*_{{{k},4}}": c for k, c in enumerate(want, start=1) if c}


@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3), st.integers(-3, 3))
def test_square_scales_quadratically(v, c):
    assert square_of(M5, [c * x for x in v]) == (c * c) * square_of(M5, v)


@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_square_negation_symmetry(v):
    assert square_of(M5, [-x for x in v]) == square_of(M5, v)


@given(st.integers(1, 3))
def test_locus_is_monotone_in_bound(bound):
    small = set(vanishing_locus(M5, bound).vanishing_tuples)
    big = set(vanishing_locus(M5, bound + 1).vanishing_tuples)
    assert small <= big
    assert all(max(map(abs, v)) <= bound for v in small)

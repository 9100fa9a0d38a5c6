import random
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from foldcoh.construction import build_theorem5, build_theorem6
from foldcoh.errors import SurgeryError
from foldcoh.linalg import IntegerMatrix
from foldcoh.surgery import (
    POLYHEDRAL,
    Crossing,
    NormalSystem,
    RoundFoldDescriptor,
    SphereEntry,
    apply_atss,
    apply_point_atss,
    apply_pontryagin,
    base_special_generic,
    dimension_findings,
    pipeline_equivalence,
    round_fold_descriptor,
    validate_normal_system,
    validate_round_fold,
)

from conftest import p0, plain_system, polyhedral_system, random_params, run_pipeline


def test_base_record_ranks():
    rec = base_special_generic([2], 7, 4)
    assert rec.manifold_rank == (1, 0, 1, 0, 0, 1, 0, 1)
    assert rec.reeb_rank == (1, 0, 1, 0, 0)
    assert rec.base_rank == 1
    assert rec.ring is not None


def test_base_without_ring_outside_seven_four():
    rec = base_special_generic([1, 3], 10, 6)
    assert rec.ring is None
    assert rec.manifold_rank[1] == 1 and rec.manifold_rank[3] == 1 and rec.manifold_rank[9] == 1


def test_base_rejects_bad_summands():
    with pytest.raises(SurgeryError):
        base_special_generic([4], 7, 4)


def test_dimension_relations():
    assert dimension_findings(7, 4) == []
    assert dimension_findings(7, 3)
    assert any("m - n != n" in f for f in dimension_findings(8, 4))


def test_p0_pipeline_matches_direct(P0):
    assert pipeline_equivalence(run_pipeline(P0), build_theorem5(P0)) == []


def test_validator_reports_wrong_signed_sum(P0):
    spheres = [SphereEntry.sphere(1, (1,)), SphereEntry.sphere(2, (1,))]
    sys = NormalSystem(tuple(spheres), (Crossing((1, 2), -1),), P0.H)
    findings = validate_normal_system(sys, base_special_generic([2], 7, 4))
    assert any("signed crossing sum -1 != 1" in f for f in findings)
    with pytest.raises(SurgeryError):
        apply_atss(base_special_generic([2], 7, 4), sys)


def test_validator_other_findings(P0):
    base = base_special_generic([2], 7, 4)
    spheres = (SphereEntry.sphere(1, (1, 0)), SphereEntry.sphere(1, (1,)))
    findings = validate_normal_system(NormalSystem(spheres, (), IntegerMatrix.zeros(2, 2)), base)
    assert any("used 2 times" in f for f in findings)
    assert any("base class has length 2" in f for f in findings)
    lonely = NormalSystem((SphereEntry.sphere(1, (1,)),), (), [[0]], wider=False)
    assert any("wider" in f for f in validate_normal_system(lonely, base))


def test_extra_crossings_knob(P0):
    base = base_special_generic([2], 7, 4)
    assert validate_normal_system(plain_system(P0), base, min_extra_crossings=1)
    assert validate_normal_system(plain_system(P0, extra=1), base, min_extra_crossings=1) == []


def test_empty_system_is_identity():
    base = base_special_generic([2, 2], 7, 4)
    assert apply_atss(base, NormalSystem((), (), IntegerMatrix.zeros(0, 0))) == base


def test_point_atss_ranks():
    rec = apply_point_atss(base_special_generic([2], 7, 4), 3)
    assert rec.manifold_rank == (1, 0, 1, 3, 3, 1, 0, 1)
    assert rec.reeb_rank == (1, 0, 1, 3, 3)
    with pytest.raises(SurgeryError):
        apply_point_atss(rec, -1)


def test_point_atss_composes():
    base = base_special_generic([2], 7, 4)
    assert apply_point_atss(apply_point_atss(base, 1), 2) == apply_point_atss(base, 3)


def test_pontryagin_step(P0):
    rec = run_pipeline(P0.replace(p=(2, 3)))
    assert rec.char.p1 == (8, 12)
    with pytest.raises(SurgeryError):
        apply_pontryagin(rec, (1,))


def test_polyhedral_ranks():
    params = p0(partition=((1, 2),), p=None)
    rec = run_pipeline(params, polyhedral=True)
    assert rec.manifold_rank == (1, 0, 3, 1, 1, 3, 0, 1)
    assert rec.reeb_rank == (1, 0, 3, 1, 1)
    assert pipeline_equivalence(rec, build_theorem6(params)) == []


def test_plain_system_rejects_polyhedra(P0):
    sphere = SphereEntry(1, ((1,), (1,)))
    sys = NormalSystem((sphere,), (Crossing((1, 2), 1),), P0.H)
    assert any("plain system" in f for f in validate_normal_system(sys, base_special_generic([2], 7, 4)))
    assert validate_normal_system(replace(sys, kind=POLYHEDRAL), base_special_generic([2], 7, 4)) == []


def test_order_of_point_and_sphere_steps_matters_only_for_history(P0):
    params = P0.replace(bprime=1, p=None)
    base = base_special_generic([2], 7, 4)
    first = apply_point_atss(apply_atss(base, plain_system(params)), 1)
    assert pipeline_equivalence(first, build_theorem5(params)) == []


def test_sign_mutation_is_detected(P0):
    sys = plain_system(P0)
    flipped = [replace(c, sign=-c.sign) if k == 0 else c for k, c in enumerate(sys.crossings)]
    mutated = NormalSystem.from_crossings(sys.spheres, flipped)
    assert pipeline_equivalence(run_pipeline(P0, system=mutated), build_theorem5(P0))


def test_round_fold_examples():
    d = round_fold_descriptor(3)
    assert d.fiber_counts == (3, 2, 1, 0)
    assert validate_round_fold(d) == []
    assert validate_round_fold(RoundFoldDescriptor((1, 2), (3, 1, 0)))
    assert validate_round_fold(RoundFoldDescriptor((1, 2), (2, 1, 1)))
    with pytest.raises(ValueError):
        round_fold_descriptor(0)


@given(st.integers(0, 10_000))
def test_random_pipelines_match(seed):
    params = random_params(random.Random(seed), max_dim=3)
    assert pipeline_equivalence(run_pipeline(params), build_theorem5(params)) == []


@given(st.integers(1, 6), st.integers(-1, 1))
def test_round_fold_rejects_any_perturbation(l, delta):
    counts = list(range(l, -1, -1))
    counts[0] += delta
    assert (validate_round_fold(RoundFoldDescriptor(tuple(range(1, l + 1)), tuple(counts))) == []) == (delta == 0)

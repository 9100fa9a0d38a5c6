import random

import pytest
from hypothesis import settings

from foldcoh.construction import ConstructionParams
from foldcoh.surgery import POLYHEDRAL, NormalSystem, SphereEntry

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def p0(**changes) -> ConstructionParams:
    base = ConstructionParams(a=1, b=2, A_matrix=[[1], [1]], H=[[0, 1], [1, 0]])
    return base.replace(**changes) if changes else base


def random_partition(rng: random.Random, b: int):
    blocks: list[list[int]] = []
    for j in rng.sample(range(1, b + 1), b):
        if blocks and rng.random() < 0.5:
            rng.choice(blocks).append(j)
        else:
            blocks.append([j])
    return tuple(tuple(sorted(blk)) for blk in sorted(blocks, key=min))


def random_params(rng: random.Random, max_dim: int = 4, max_entry: int = 3, partition: bool = False):
    a, b, bprime = (rng.randint(0, max_dim) for _ in range(3))
    A = [[rng.randint(-max_entry, max_entry) for _ in range(a)] for _ in range(b)]
    H = [[0] * b for _ in range(b)]
    for i in range(b):
        for j in range(i + 1, b):
            H[i][j] = H[j][i] = rng.randint(-max_entry, max_entry)
    part = random_partition(rng, b) if partition else None
    rank4 = (len(part) if part is not None else b) + bprime
    p = tuple(rng.randint(-max_entry, max_entry) for _ in range(rank4))
    return ConstructionParams(a, b, bprime, A, H, p, part)


def plain_system(params: ConstructionParams, extra: int = 0) -> NormalSystem:
    spheres = [SphereEntry.sphere(j, params.A_matrix.row(j - 1)) for j in range(1, params.b + 1)]
    return NormalSystem.realize(spheres, params.H, min_extra_crossings=extra)


def polyhedral_system(params: ConstructionParams) -> NormalSystem:
    spheres = [
        SphereEntry(k, tuple(params.A_matrix.row(j - 1) for j in block), sub_ids=block)
        for k, block in enumerate(params.blocks, start=1)
    ]
    return NormalSystem.realize(spheres, params.H, kind=POLYHEDRAL)


@pytest.fixture
def P0():
    return p0()


def run_pipeline(params: ConstructionParams, polyhedral: bool = False, system: NormalSystem | None = None):
    from foldcoh.surgery import apply_atss, apply_point_atss, apply_pontryagin, base_special_generic

    if system is None:
        system = polyhedral_system(params) if polyhedral else plain_system(params)
    record = base_special_generic([2] * params.a, 7, 4)
    record = apply_atss(record, system)
    record = apply_point_atss(record, params.bprime)
    return apply_pontryagin(record, params.p)

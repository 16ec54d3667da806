from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from klab.aff import aff_induced
from klab.errors import BlockMismatch
from klab.ktheory import (
    K0LimitElement,
    K0Vector,
    K1Vector,
    LimitGroup,
    alpha0_identity_check,
    divisibility_support,
    k0_induced,
    k1_induced,
    rho,
    rho_exact,
)
from klab.spaces import Space
from klab.systems import Block, CircleWinding, PartialHom, Pattern, StepHom


def test_k0_step_images(A):
    assert k0_induced(A.step(1), K0Vector(1, (1,))).ranks == (4, 4)
    assert k0_induced(A.step(2), K0Vector(2, (1, 0))).ranks == (8, 0, 0)
    assert k0_induced(A.step(2), K0Vector(2, (0, 1))).ranks == (0, 27, 27)


def test_k0_agrees_between_systems(A, B):
    rng = np.random.default_rng(3)
    for n in range(1, A.stage_count):
        x = K0Vector(n, tuple(int(v) for v in rng.integers(-9, 10, len(A.blocks(n)))))
        assert k0_induced(A.step(n), x) == k0_induced(B.step(n), x)


def test_k1_generator_moves_to_next_circle(A, B):
    for sys in (A, B):
        for n in range(1, sys.stage_count):
            g = K1Vector.generator(sys.blocks(n), n - 1, n)
            assert k1_induced(sys.step(n), g).windings == tuple([0] * n + [1])


def test_k1_winding_composition():
    c1, c2 = Block(1, Space.CIRCLE), Block(1, Space.CIRCLE)
    f = StepHom((c1,), (c2,), {(0, 0): PartialHom(c1, c2, Pattern([CircleWinding(2)]))}, True, 1, 2)
    g = StepHom((c2,), (c2,), {(0, 0): PartialHom(c2, c2, Pattern([CircleWinding(3)]))}, True, 2, 3)
    x = K1Vector(1, (1,))
    assert k1_induced(g, k1_induced(f, x)).windings == (6,)


def test_k_stage_mismatch(A):
    with pytest.raises(BlockMismatch):
        k0_induced(A.step(2), K0Vector(1, (1,)))
    with pytest.raises(BlockMismatch):
        K1Vector.generator(A.blocks(2), 0)


def test_rho_rank_one_in_m4():
    el = rho(K0Vector(None, (1,)), [Block(4, Space.INTERVAL)], 16)
    assert np.all(el.funcs[0].samples == 0.25)
    assert rho_exact(K0Vector(None, (1,)), [Block(4, Space.INTERVAL)]) == (Fraction(1, 4),)


def test_rho_is_natural(A, B):
    rng = np.random.default_rng(5)
    for sys in (A, B):
        for n in range(1, sys.stage_count):
            blocks = sys.blocks(n)
            x = K0Vector(n, tuple(int(rng.integers(0, b.size + 1)) for b in blocks))
            y = k0_induced(sys.step(n), x)
            lhs = aff_induced(sys.step(n), rho(x, blocks, 64))
            rhs = rho(y, sys.blocks(n + 1), 64)
            assert lhs.distance(rhs) <= 1e-12


@pytest.fixture
def group():
    return LimitGroup((2, 3, 4, 5, 6))


def test_group_membership(group):
    assert group.in_G(1, Fraction(3, 8))
    assert not group.in_G(1, Fraction(1, 3))
    assert group.in_G(2, Fraction(1, 3**7 * 4))
    assert not group.in_G(2, Fraction(1, 8))
    assert group.contains(group.unit())


def test_divisibility_examples(group):
    x = K0LimitElement((Fraction(3, 8),))
    assert divisibility_support(x, 1, group)
    assert group.divisible_brute_force(x, 1)
    y = K0LimitElement((0, Fraction(1, 3)))
    assert divisibility_support(y, 2, group)
    assert group.divisible_brute_force(y, 2, max_power=20)
    assert not divisibility_support(group.unit(), 2, group)


GROUP = LimitGroup((2, 3, 4, 5, 6))


@settings(max_examples=200)
@given(st.lists(st.fractions(max_denominator=60), min_size=0, max_size=4), st.sampled_from([0, Fraction(1, 2), 1]), st.integers(1, 5))
def test_structural_divisibility_matches_brute_force(coords, tail, k):
    group = GROUP
    x = K0LimitElement(tuple(coords), Fraction(tail))
    assert group.divisible_by_all_powers(x, k) == group.divisible_brute_force(x, k, max_power=40)


@given(st.lists(st.fractions(max_denominator=30), max_size=4), st.lists(st.fractions(max_denominator=30), max_size=4))
def test_limit_element_algebra(a, b):
    x, y = K0LimitElement(tuple(a)), K0LimitElement(tuple(b))
    assert (x + y) - y == x
    assert hash(K0LimitElement(tuple(a) + (0, 0))) == hash(x)


def test_alpha0_identity():
    steps = alpha0_identity_check(6)
    assert steps and all(s.holds for s in steps)
    assert {s.generator for s in steps} >= {1, 2, 3, 4, 5, 6}


def test_from_stage_embedding(A, group):
    blocks = A.blocks(3)
    x = K0Vector(3, (32, 0, 54))
    el = group.from_stage(x, blocks)
    assert el.at(1) == 1 and el.at(2) == 0 and el.tail == Fraction(1, 2)
    assert group.contains(el)


member_coord = st.builds(lambda m, a, b, c: Fraction(m, 2**a * 3**b * 5**c), st.integers(-20, 20), st.integers(0, 3), st.integers(0, 2), st.integers(0, 2))


@settings(max_examples=200)
@given(st.lists(member_coord, max_size=4), st.sampled_from([0, 1]), st.integers(1, 4))
def test_divisibility_on_group_members(coords, tail, k):
    x = K0LimitElement(tuple(coords), Fraction(tail))
    assert GROUP.divisible_by_all_powers(x, k) == GROUP.divisible_brute_force(x, k, max_power=40)

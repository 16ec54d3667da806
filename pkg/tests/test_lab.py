from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from klab.aff import AffElement
from klab.errors import NotUVD, ParamMismatch, StageBudgetExceeded, StageOutOfRange
from klab.families import lipschitz_elements
from klab.lab import (
    admissible_stage,
    corner_quotient_map,
    inv0_equivalence_report,
    obstruction_experiment,
    splitting_for_A,
)
from klab.spaces import Space, midrange_seminorm
from klab.systems import SystemParams, build_system_B
from klab.unitary import UClass, push_forward_uclass, quotient_norm_uclass


def test_inv0_small(small_A, small_B):
    rep = inv0_equivalence_report(small_A, small_B, seed=0, random_count=10)
    assert rep.passed, [c.name for c in rep.checks if not c.passed]
    assert sum(d.upper for d in rep.step_defects) < float(rep.partial_sums[-1]) + 4 * 4 / 1024
    assert rep.partial_sums[0] == Fraction(1, 2)


def test_inv0_param_mismatch(small_A, B):
    with pytest.raises(ParamMismatch):
        inv0_equivalence_report(small_A, B)


def test_row_extraction(B):
    row = corner_quotient_map(B, 1)
    assert len(row.steps) == B.stage_count - 1
    for m, step in enumerate(row.steps, start=1):
        assert step.part(0, 0).pattern == B.step(m).part(0, 0).pattern
    with pytest.raises(StageOutOfRange):
        corner_quotient_map(B, 7)


def test_row_projection_of_off_row_class(B):
    g = UClass.generator(B.blocks(3), 2, 4096, 1, stage=3)
    q = corner_quotient_map(B, 1).project(g)
    assert q.windings == (0,) and midrange_seminorm(q.phases[0]) == 0.0


def test_row_quotient_of_generator_image(B):
    n, m = 1, 3
    g = UClass.generator(B.blocks(n), n - 1, 4096, 1, stage=n)
    u = push_forward_uclass(B.hom(n, m), g, blocks=[m - 2])
    row = corner_quotient_map(B, m - 1)
    final = row.push(row.project(u), B.stage_count)
    assert quotient_norm_uclass(final) >= 3


def test_splitting_for_A(A):
    for n in (1, 2, 4):
        s = splitting_for_A(A, n, 1)
        assert s.pi_of_section == 1
        assert all(d.windings_equal and d.defect <= 1e-9 for d in s.diagram)
        assert all(d.interval_oscillation <= 1e-12 for d in s.diagram)
    assert [d.m for d in splitting_for_A(A, 1).diagram] == [2, 3, 4, 5, 6]


def test_splitting_refuses_B(B):
    with pytest.raises(NotUVD):
        splitting_for_A(B, 1)


def test_admissible_stage():
    assert admissible_stage(1, 0.0) == 3
    assert admissible_stage(1, 1.0) == 4
    assert admissible_stage(1, 10.0) == 5
    assert admissible_stage(4, 0.0) == 5


def test_obstruction_frozen(B):
    led = obstruction_experiment(B, 1, AffElement.zeros(B.blocks(1), 4096, 1))
    assert led.passed
    assert led.m == 3 and led.ratio == 16 and led.htilde_norm == 8
    assert led.pushed_norm == pytest.approx(8.0, abs=1e-12)
    assert led.tail_bound == Fraction(13, 729)
    assert led.lower_bound == pytest.approx(8 * 716 / 729, abs=1e-12)
    assert led.direct_final == pytest.approx(8 * (80 / 81) * (242 / 243) * (728 / 729), abs=1e-12)
    assert led.threshold_violated


def test_obstruction_stage_two_is_not_enough(B):
    led = obstruction_experiment(B, 1, AffElement.zeros(B.blocks(1), 4096, 1), m=2)
    assert led.ratio == 4 and led.htilde_norm == 2
    assert not led.passed


def test_obstruction_ratio_all_m(B):
    for n in range(1, 5):
        for m in range(n + 1, 7):
            led = obstruction_experiment(B, n, AffElement.zeros(B.blocks(n), 4096, n), m=m)
            assert led.ratio == 4 ** (m - 1)


def test_obstruction_budget(B):
    h = AffElement.constant(B.blocks(1), 4096, 1000.0, 1)
    with pytest.raises(StageBudgetExceeded):
        obstruction_experiment(B, 1, h)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 4), st.floats(0, 10), st.integers(0, 2**16))
def test_obstruction_lower_bound_property(n, M, seed):
    B = _B()
    blocks = B.blocks(n)
    funcs = lipschitz_elements([b.space for b in blocks], 4096, seed, 3)[seed % 3]
    h = AffElement(n, funcs)
    h = h * (M / h.norm()) if h.norm() else h
    led = obstruction_experiment(B, n, h)
    assert led.m <= 6
    assert led.pushed_norm >= 4 * led.M + 4 - 4 / 4096
    assert led.lower_bound >= 3 - 4 / 4096
    assert led.lower_bound > 1 / 16
    assert led.passed


_cache = {}


def _B():
    if "B" not in _cache:
        _cache["B"] = build_system_B(SystemParams.default())
    return _cache["B"]

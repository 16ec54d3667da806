from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from klab.errors import BlockMismatch, InvalidParams, StageOutOfRange
from klab.spaces import Space, SpectrumPoint
from klab.systems import (
    CircleWinding,
    ConstPoint,
    ExpWinding,
    IdentityInterval,
    Pattern,
    Projection,
    RootOrbit,
    SystemParams,
    Term,
    build_system_A,
    build_system_B,
    compose_maps,
    corner_unit_image,
    matmul,
    multiplicity_matrix,
    stage_sizes,
    winding_length,
)

SIZES = [
    [1],
    [4, 4],
    [32, 108, 108],
    [512, 8748, 67500, 67500],
    [16384, 2125764, 210937500, 1134472500, 1134472500],
    [1048576, 1549681956, 3295898437500, 133469555152500, 2009787236572500, 2009787236572500],
]
L_N = [16, 1728, 4320000, 290424960000, 2058022130250240000]


def product_formula(n, i, ks, primes):
    """``[n,i] = prod_{j<i} p_j^k_j * prod_{i<=j<n} p_i^k_j`` (the last block repeats block n-1)."""
    if n == 1:
        return 1
    i = min(i, n - 1)
    out = 1
    for j in range(1, i):
        out *= primes[j - 1] ** ks[j - 1]
    for j in range(i, n):
        out *= primes[i - 1] ** ks[j - 1]
    return out


def test_sizes_frozen(params):
    assert stage_sizes(params) == SIZES


def test_sizes_product_formula(params):
    for n in range(1, 7):
        assert [product_formula(n, i, params.k_seq, params.primes) for i in range(1, n + 1)] == SIZES[n - 1]


def test_winding_lengths_frozen(params):
    assert [winding_length(params, n) for n in range(1, 6)] == L_N


def test_block_spaces(A):
    assert [b.space for b in A.blocks(3)] == [Space.INTERVAL, Space.INTERVAL, Space.CIRCLE]
    assert A.blocks(1)[0].space is Space.CIRCLE


def test_step1_patterns(A, B):
    a = A.step(1).part(0, 0).pattern
    assert len(a) == 4
    b = B.step(1).part(0, 0).pattern
    assert b == Pattern([ExpWinding(16)] + [ConstPoint(SpectrumPoint.circle(Fraction(j, 3))) for j in range(3)])
    assert sum(1 for lam in b.expand() if isinstance(lam, ConstPoint)) == 3


def test_parts_other_than_nn_agree(A, B):
    for n in range(1, A.stage_count):
        ha, hb = A.step(n), B.step(n)
        assert ha.parts.keys() == hb.parts.keys()
        for key in ha.parts:
            if key != (n - 1, n - 1):
                assert ha.parts[key].pattern == hb.parts[key].pattern


def test_multiplicity_matrices(A, B, params):
    assert multiplicity_matrix(A.step(1)) == [[4, 4]]
    assert multiplicity_matrix(A.step(2)) == [[8, 0, 0], [0, 27, 27]]
    for n in range(1, A.stage_count):
        M = multiplicity_matrix(A.step(n))
        assert M == multiplicity_matrix(B.step(n))
        for i in range(1, n):
            assert M[i - 1][i - 1] == params.p(i) ** params.k(n)
        assert M[n - 1][n - 1] == M[n - 1][n] == params.p(n) ** params.k(n)


def test_composite_multiplicities(A):
    for n in range(1, A.stage_count):
        for m in range(n + 1, A.stage_count + 1):
            expect = multiplicity_matrix(A.step(n))
            for s in range(n + 1, m):
                expect = matmul(expect, multiplicity_matrix(A.step(s)))
            assert multiplicity_matrix(A.hom(n, m)) == expect


def test_compose_maps_windings():
    assert compose_maps(CircleWinding(2), ExpWinding(16)) == ExpWinding(32)
    assert compose_maps(CircleWinding(3), CircleWinding(2)) == CircleWinding(6)
    assert compose_maps(ExpWinding(5), IdentityInterval()) == ExpWinding(5)
    assert compose_maps(IdentityInterval(), ConstPoint(SpectrumPoint.interval(Fraction(1, 3)))).point.coordinate == Fraction(1, 3)
    pt = compose_maps(ExpWinding(3), ConstPoint(SpectrumPoint.interval(Fraction(1, 4))))
    assert pt == ConstPoint(SpectrumPoint.circle(Fraction(3, 4)))
    with pytest.raises(BlockMismatch):
        compose_maps(ExpWinding(1), CircleWinding(1))


def _brute_compose(outer: Pattern, inner: Pattern) -> Pattern:
    return Pattern([compose_maps(a, b) for a in outer.expand() for b in inner.expand()])


@pytest.mark.parametrize("system", ["small_A", "small_B"])
def test_composite_patterns_against_expansion(system, request):
    sys = request.getfixturevalue(system)
    for n in range(1, 3):
        f, g = sys.step(n), sys.step(n + 1)
        h = sys.hom(n, n + 2)
        for (i, j), part in h.parts.items():
            expect = None
            for k in range(len(f.target)):
                a, b = f.part(i, k), g.part(k, j)
                if a is None or b is None:
                    continue
                pat = _brute_compose(a.pattern, b.pattern)
                expect = pat if expect is None else expect + pat
            assert part.pattern == expect


def test_composite_patterns_stay_compressed(B):
    h = B.hom(1, 6)
    assert all(len(p.pattern.terms) < 100 for p in h.parts.values())


def test_corner_units(B):
    assert corner_unit_image(B, 2, 3).ranks == (0, 108, 108)
    q = corner_unit_image(B, 2, 3) - corner_unit_image(B, 3, 3)
    assert q.ranks == (0, 108, 0)


def test_tail_sum_example():
    p = SystemParams.default(stage_count=5, k_seq=(2, 3, 4, 5))
    assert p.tail_sum(1, 2) == Fraction(7, 32)


@pytest.mark.parametrize(
    "kw",
    [
        dict(stage_count=6, k_seq=(3, 2, 4, 5, 6)),
        dict(stage_count=6, k_seq=(1, 2, 3, 4, 5)),
        dict(stage_count=6, k_seq=(2, 3)),
        dict(stage_count=0),
    ],
)
def test_invalid_params(kw):
    with pytest.raises(InvalidParams):
        SystemParams.default(**kw)


def test_tail_condition_small_exponents():
    # 2^-2 + 2^-3 > 1/4 for row 1 from m = 2
    with pytest.raises(InvalidParams):
        SystemParams.default(stage_count=4, k_seq=(2, 2, 3))


def test_stage_errors(A):
    with pytest.raises(StageOutOfRange):
        A.blocks(7)
    with pytest.raises(StageOutOfRange):
        A.step(6)
    with pytest.raises(StageOutOfRange):
        A.hom(3, 2)


def test_projection_order():
    p, q = Projection(1, (1, 2)), Projection(1, (2, 2))
    assert p <= q and not q <= p
    assert (q - p).ranks == (1, 0)
    with pytest.raises(ValueError):
        p - q


@given(st.integers(1, 50), st.integers(0, 49), st.integers(1, 50), st.integers(1, 5))
def test_root_orbit_compose_with_winding(order, start, extra, v):
    start = start % order
    orb = RootOrbit(order, start, start + extra)
    comp = compose_maps(CircleWinding(v), orb)
    expect = [(v * ph) % 1 for ph in orb.phases()]
    assert list(comp.phases()) == expect


def test_pattern_length_counts_orbits():
    pat = Pattern([Term(ExpWinding(1), 2), RootOrbit(10, 0, 7)])
    assert len(pat) == 9
    assert pat.merged() == pat

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from speedup_lab.subshift import (HorizonError, InconclusiveError, JumpFunction, Point,
                                  UnsupportedInputError, block_recode, count_orbit_classes,
                                  decompose, evaluate_jump, jump_values, orbit_number,
                                  orbit_number_from_jumps, speedup_walk, substitution_point,
                                  walk_point)
from speedup_lab.symbols import Substitution, fixed_point_prefix, language, parse_word


def test_jump_function_checks_shapes():
    with pytest.raises(ValueError):
        JumpFunction(0, 1, {(0,): 2}, 1)
    with pytest.raises(ValueError):
        JumpFunction(0, 0, {(0,): 0}, 1)
    with pytest.raises(ValueError):
        JumpFunction.from_cylinders(2, [(0, (0,), 1), (0, (0, 1), 2)], 1)


def test_jump_round_trip(parity):
    _, p = parity
    q = JumpFunction.from_dict(p.to_dict())
    assert q == p and q.max_value == 3 and (q.left, q.right) == (1, 5)


def test_evaluate_jump_examples(parity, divergent):
    theta, p = divergent
    z = substitution_point(theta, 100, p.left)
    assert evaluate_jump(p, z, 0) == 3
    assert evaluate_jump(JumpFunction.constant(1), z, 7) == 1

    theta, p = parity
    z = substitution_point(theta, 400, p.left)
    hits = [t for t in range(300) if z.segment(t, t + 6) == parse_word("001011")]
    assert hits
    for t in hits:
        assert evaluate_jump(p, z, t) == 3
        assert evaluate_jump(p, z, t + 1) == 1


def test_point_windows_raise_past_the_horizon():
    x = Point((0, 1, 1, 0), origin=1)
    assert x.symbol(-1) == 0 and x.window(0, 1, 1) == (0, 1, 1)
    with pytest.raises(HorizonError):
        x.window(2, 0, 1)
    with pytest.raises(HorizonError):
        x.symbol(-2)


def test_two_sided_fixed_point(divergent):
    theta, _ = divergent
    z = substitution_point(theta, 50, 10)
    # the left half is grown from the last symbol 1: ...001 | 00011...
    assert z.segment(-3, 0) == theta.images[1]
    assert z.segment(0, 50) == fixed_point_prefix(theta, 0, 50)


def test_speedup_walk_examples(divergent):
    theta, p = divergent
    w = speedup_walk(theta, p, 0, 2)
    assert w.positions == (0, 3, 5) and w.jumps == (3, 2)
    w = speedup_walk(theta, JumpFunction.constant(2), 0, 5)
    assert w.positions == (0, 2, 4, 6, 8, 10)
    assert list(w.records())[1] == (1, 2, 2)


def test_walk_reports_achieved_steps():
    x = Point((0,) * 10)
    with pytest.raises(HorizonError) as info:
        walk_point(JumpFunction.constant(3), x, 10)
    assert info.value.achieved == 4


def test_decompose_examples(divergent):
    theta, _ = divergent
    d = decompose(theta, fixed_point_prefix(theta, 0, 21), 1)
    assert d.cuts == (0, 5, 10, 15, 18, 21) and d.symbols == (0, 0, 0, 1, 1)
    d = decompose(theta, fixed_point_prefix(theta, 0, 5), 3)
    assert d.cuts[0] == 0 and d.symbols == (0,)
    with pytest.raises(UnsupportedInputError):
        decompose(theta, (1, 1, 1), 1)


def test_decompositions_refine(parity):
    theta, _ = parity
    prefix = fixed_point_prefix(theta, 0, 500)
    for k in (1, 2):
        fine, coarse = decompose(theta, prefix, k), decompose(theta, prefix, k + 1)
        assert set(c for c in coarse.cuts if c <= 500) <= set(fine.cuts)
        gaps = np.diff(fine.cuts)
        assert list(gaps) == [len(theta.power(k).images[s]) for s in fine.symbols]


def test_block_recode_parity(parity):
    theta, p = parity
    rec = block_recode(theta, p)
    assert list(rec.dictionary) == language(theta, p.width)
    assert sorted(set(rec.jump.table.values())) == [1, 2, 3]
    for w, i in rec.index().items():
        expected = 3 if w[1:] == parse_word("001011") else (
            1 if w[:6] == parse_word("001011") else 2)
        assert rec.jump.value((i,)) == expected


def test_block_recode_projects_back(parity):
    theta, p = parity
    rec = block_recode(theta, p)
    z = substitution_point(theta, 200, p.left)
    y = substitution_point(rec.theta, 150)
    for t in range(50):
        word = rec.dictionary[y.symbol(t)]
        assert word == z.segment(t, t + p.width)
    # the recoded jump at t is p at t + shift
    wz = walk_point(p, z, 30, start=rec.shift)
    wy = walk_point(rec.jump, y, 30)
    assert [t - rec.shift for t in wz.positions] == list(wy.positions)


def test_block_recode_trivial_window():
    theta = Substitution([(0, 1), (1, 0, 0)])
    rec = block_recode(theta, JumpFunction.constant(2))
    assert rec.theta == theta and rec.dictionary == ((0,), (1,))


def test_orbit_numbers(parity, divergent):
    for theta, p in (parity, divergent):
        assert orbit_number(theta, p) == 2
        assert orbit_number(theta, JumpFunction.constant(1)) == 1
    theta, p = parity
    assert orbit_number(theta.power(2), p) == 2


def test_orbit_number_needs_a_horizon(parity):
    theta, p = parity
    with pytest.raises(InconclusiveError):
        orbit_number(theta, p, horizon=5)


@given(st.integers(1, 6), st.integers(30, 300))
@settings(max_examples=40, deadline=None)
def test_constant_jump_splits_into_c_classes(c, n):
    counts = count_orbit_classes([c] * n, c)
    assert set(counts) == {c}
    if n > 4 * c:
        assert orbit_number_from_jumps([c] * n, c) == c


@given(st.integers(1, 400))
@settings(max_examples=30, deadline=None)
def test_walk_positions_telescope(steps):
    theta = Substitution([(0, 0, 0, 1, 1), (0, 0, 1)])
    p = JumpFunction.from_cylinders(2, [(0, (0, 0, 0, 1, 1), 3), (-1, (0, 0, 0, 1, 1), 1)], 2)
    w = speedup_walk(theta, p, 0, steps)
    assert w.positions[-1] == sum(w.jumps)
    z = substitution_point(theta, w.positions[-1] + 6, 1)
    assert np.array_equal(jump_values(p, z, 0, 5), [3, 1, 2, 2, 2])

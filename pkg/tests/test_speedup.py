import itertools

import pytest
from hypothesis import given, settings, strategies as st

from speedup_lab.speedup import (LabelingError, build_labeling, build_sigma, column_permutations,
                                 compose_along, cycles, identity, is_cyclic, is_minimal_speedup,
                                 iterate_permutations, label_column, labeling_at,
                                 nonconjugacy_evidence, normalize_level, orbit_number_by_labels,
                                 orbit_number_by_reachability, perm_power, perm_str,
                                 permutation_step, self_induce_map, sigma_sequence,
                                 speedup_alphabet, symbol_label_sequence)
from speedup_lab.subshift import JumpFunction, jump_values, orbit_number, substitution_point
from speedup_lab.symbols import Substitution, apply, language
from speedup_lab.systems import COBOUNDARY_SIGMA_TABLE, PARITY_SIGMA_TABLE

SWAP = (1, 0)


def test_permutation_helpers():
    assert perm_str(identity(3)) == "id" and perm_str(SWAP) == "(0 1)"
    assert perm_power((1, 2, 0), 3) == (0, 1, 2)
    assert [tuple(c) for c in cycles((1, 0, 2))] == [(0, 1), (2,)]
    assert is_cyclic((1, 2, 0)) and not is_cyclic((1, 0, 2))
    # perms[word[0]] acts first
    a, b = (1, 2, 0), (1, 0, 2)
    assert compose_along([a, b], (0, 1)) == tuple(b[a[x]] for x in range(3))


def test_label_column():
    assert label_column([1, 1, 1]) == [0, 0, 0]
    assert label_column([2, 2, 2, 2]) == [0, 1, 0, 1]


def test_normalized_levels(parity, divergent):
    theta, p = parity
    lv = normalize_level(theta, p)
    assert lv.level == 2 and min(lv.theta.lengths()) == 20
    assert not lv.checks[0].ok
    theta, p = divergent
    assert normalize_level(theta, p).level <= 3
    assert normalize_level(theta, JumpFunction.constant(1)).level == 1


def test_labelings(parity, divergent):
    for theta, p in (parity, divergent):
        lab = build_labeling(normalize_level(theta, p).theta, p)
        assert lab.c == 2
        assert all(set(col) == {0, 1} for col in lab.labels)
        rows = list(lab.rows())
        assert rows[0] == (0, 0, 0, lab.jumps[0][0])
    lab = build_labeling(parity[0], JumpFunction.constant(1))
    assert lab.c == 1 and all(set(col) == {0} for col in lab.labels)


def test_labeling_needs_normalized_level(parity):
    theta, p = parity
    with pytest.raises(LabelingError):
        build_labeling(theta, p)


def test_column_permutations(parity, divergent):
    for theta, p in (parity, divergent):
        a = is_minimal_speedup(theta, p)
        assert [perm_str(x) for x in a.permutations] == ["id", "(0 1)"]
    theta = parity[0]
    lab = build_labeling(theta, JumpFunction.constant(1))
    assert column_permutations(lab) == ((0,), (0,))


def test_iterate_permutations(parity):
    theta, _ = parity
    it = iterate_permutations(((0, 1), SWAP), theta)
    assert it.K == 1 and it.stable == ((0, 1), SWAP)
    assert iterate_permutations(((0, 1), (0, 1)), theta).K == 1
    rot = (1, 2, 0)
    it = iterate_permutations((rot, rot), theta)
    # lengths 4 and 6: first step gives <(012), id>
    assert it.sequence[1] == (rot, (0, 1, 2))
    assert it.K == it.preperiod and it.period == 2


def test_permutation_recursion_matches_relabeling(parity, divergent):
    for theta, p in (parity, divergent):
        a = is_minimal_speedup(theta, p)
        perms = a.permutations
        for k in (1, 2):
            perms = permutation_step(perms, a.base)
            scratch = column_permutations(labeling_at(a, a.normalized.level + k))
            assert perms == scratch


def test_sigma_tables(parity, divergent):
    assert is_minimal_speedup(*parity).sigma.render() == list(PARITY_SIGMA_TABLE)
    assert is_minimal_speedup(*divergent).sigma.render() == list(COBOUNDARY_SIGMA_TABLE)


def test_sigma_serialization(parity):
    doc = is_minimal_speedup(*parity).sigma.to_dict()
    assert doc["alphabet"] == 4 and doc["pairs"]["2"] == [1, 0]


def test_sigma_with_one_label_is_theta(parity):
    theta, _ = parity
    sig = build_sigma(theta, ((0,), (0,)))
    assert [[sig.pairs[s][0] for s in img] for img in sig.substitution.images] == \
        [list(w) for w in theta.images]


def test_sigma_projects_onto_theta(parity, divergent):
    for theta, p in (parity, divergent):
        a = is_minimal_speedup(theta, p)
        sig = a.sigma
        for k in range(1, 5):
            for s, (i, _) in enumerate(sig.pairs):
                img = apply(sig.substitution, (s,), k)
                assert tuple(sig.pairs[t][0] for t in img) == apply(a.sigma_base, (i,), k)


def test_minimality_verdicts(parity, divergent):
    assert is_minimal_speedup(*parity).minimal
    assert is_minimal_speedup(*divergent).minimal
    a = is_minimal_speedup(parity[0], JumpFunction.constant(2))
    assert a.c == 2 and not a.minimal
    # labels never mix: sigma is block diagonal
    for s, img in enumerate(a.sigma.substitution.images):
        assert {a.sigma.pairs[t][1] for t in img} == {a.sigma.pairs[s][1]}


def test_identity_jump_is_minimal(parity, divergent):
    for theta, _ in (parity, divergent):
        a = is_minimal_speedup(theta, JumpFunction.constant(1))
        assert a.minimal and a.c == 1


def test_sigma_first_symbols_keep_their_label(parity):
    # the first-symbol map of sigma preserves labels, so no power of sigma is proper
    sig = is_minimal_speedup(*parity).sigma
    for s, img in enumerate(sig.substitution.images):
        assert sig.pairs[img[0]][1] == sig.pairs[s][1]


def test_orbit_number_agreement(parity, divergent):
    for theta, p in (parity, divergent):
        c = orbit_number_by_labels(theta, p)
        assert c == orbit_number_by_reachability(theta, p) == orbit_number(theta, p) == 2
        assert is_minimal_speedup(theta, p).c == c


def test_simulated_labels_match_sigma(parity, divergent):
    for theta, p in (parity, divergent):
        a = is_minimal_speedup(theta, p)
        assert symbol_label_sequence(a, 1000) == sigma_sequence(a, 1000)


def test_speedup_alphabet(parity, divergent):
    blocks, _ = speedup_alphabet(parity[0], JumpFunction.constant(1))
    assert blocks == [(0,), (1,)]
    theta, p = divergent
    blocks, rec = speedup_alphabet(theta, p)
    assert {len(b) for b in blocks} == {1, 2, 3}
    assert len(blocks) <= len(language(theta, p.max_value + p.width))
    for b in blocks:
        assert len(b) == rec.jump.value(b[:1])


def test_nonconjugacy_surplus(parity, divergent):
    theta, p = parity
    ev = nonconjugacy_evidence(theta, p)
    z = substitution_point(theta, 20000, p.left)
    for m, row in ev["surplus"].items():
        N = row["N"]
        assert N <= row["bound_N"]
        for start in range(0, 2000, 10):
            assert jump_values(p, z, start, start + N).sum() > N + m
    Ns = [ev["surplus"][m]["N"] for m in sorted(ev["surplus"])]
    assert Ns == sorted(Ns)
    ev = nonconjugacy_evidence(*divergent)
    assert ev["strictly_increasing"] and len(ev["complexity"]) == 40
    ev = nonconjugacy_evidence(theta, JumpFunction.constant(1))
    assert ev["surplus"] == {} and "identically 1" in ev["hypothesis"]


def test_self_induced_maps(parity, divergent):
    for theta, p in (parity, divergent):
        fm = self_induce_map(theta, p, 200)
        assert fm.ok and len(fm.trace) == 200
        assert len(fm.U) == len(fm.mapping)
    fm = self_induce_map(parity[0], JumpFunction.constant(1), 200)
    assert fm.ok


@st.composite
def proper_primitive(draw):
    n = draw(st.integers(2, 3))
    imgs = []
    for _ in range(n):
        mid = draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=4))
        imgs.append([0] + mid + [n - 1])
    return Substitution(imgs)


@given(proper_primitive())
@settings(max_examples=25, deadline=None)
def test_identity_speedup_of_random_substitutions(theta):
    from speedup_lab.symbols import is_aperiodic_up_to, is_primitive
    if not is_primitive(theta) or not is_aperiodic_up_to(theta, 12).aperiodic:
        return
    a = is_minimal_speedup(theta, JumpFunction.constant(1), aperiodicity_horizon=12)
    assert a.minimal and a.c == 1
    assert all(perm == (0,) for perm in a.permutations)


def test_pair_index_layout(parity):
    sig = is_minimal_speedup(*parity).sigma
    for i, ell in itertools.product(range(2), range(2)):
        assert sig.pairs[sig.index((i, ell))] == (i, ell)

"""Ground-truth enumeration, elections, and certificate search."""

import pytest

from popmatch import (
    Matching,
    blocking_edges,
    check_witness,
    parse_instance,
    stable_matching,
)
from popmatch.legality import legal_edge_set
from popmatch.mirror import build_mirror, mirror_system
from popmatch.oracle import (
    OracleCapError,
    enumerate_matchings,
    ground_truth,
    witness_search,
)

from conftest import (
    random_instance,
    showcase_full,
    showcase_max,
    showcase_stable,
    size_gap_max,
    size_gap_stable,
)


class TestEnumeration:
    def test_size_gap_has_five(self, size_gap):
        assert sum(1 for _ in enumerate_matchings(size_gap)) == 5

    def test_no_edges_single_matching(self):
        inst = parse_instance("agents:\njobs: b0\n")
        assert sum(1 for _ in enumerate_matchings(inst)) == 1

    def test_single_pair_has_two(self):
        inst = parse_instance("agents: a\njobs: b\na > b\nb > a\n")
        assert sum(1 for _ in enumerate_matchings(inst)) == 2

    def test_each_matching_once(self):
        for seed in range(30):
            inst = random_instance(seed, max_side=3)
            seen = [m.partner for m in enumerate_matchings(inst)]
            assert len(seen) == len(set(seen))

    def test_cap_enforced(self, showcase):
        with pytest.raises(OracleCapError):
            list(enumerate_matchings(showcase, cap=8))

    def test_cap_env_override(self, showcase, monkeypatch):
        monkeypatch.setenv("POPMATCH_ORACLE_CAP", "8")
        with pytest.raises(OracleCapError):
            list(enumerate_matchings(showcase))
        monkeypatch.setenv("POPMATCH_ORACLE_CAP", "12")
        assert sum(1 for _ in enumerate_matchings(showcase)) > 0


class TestGroundTruth:
    def test_size_gap_fully_popular_pair(self, size_gap):
        report = ground_truth(size_gap)
        fully = {m.partner for m in report.fully_popular}
        assert fully == {
            size_gap_stable(size_gap).partner,
            size_gap_max(size_gap).partner,
        }
        assert report.max_fully_popular_size == 2

    def test_identical_prefs_nothing_agent_popular(self, identical_prefs):
        report = ground_truth(identical_prefs)
        assert report.num_matchings == 34
        assert report.a_popular == ()
        assert report.fully_popular == ()
        assert report.max_fully_popular_size is None

    def test_showcase_size_profile(self, showcase):
        report = ground_truth(showcase)
        assert report.min_popular_size == 4
        assert report.max_popular_size == 6
        assert report.max_fully_popular_size == 5
        popular = {m.partner for m in report.popular}
        assert showcase_max(showcase).partner in popular
        assert showcase_stable(showcase).partner in popular
        a_pop = {m.partner for m in report.a_popular}
        for mat in report.popular:
            if mat.size(showcase) in (4, 6):
                assert mat.partner not in a_pop
        assert showcase_full(showcase).partner in {
            m.partner for m in report.fully_popular
        }

    def test_fully_is_intersection(self):
        for seed in range(60):
            inst = random_instance(seed)
            report = ground_truth(inst)
            pop = {m.partner for m in report.popular}
            apop = {m.partner for m in report.a_popular}
            fully = {m.partner for m in report.fully_popular}
            assert fully == pop & apop

    def test_every_stable_matching_is_popular(self):
        for seed in range(80):
            inst = random_instance(seed)
            report = ground_truth(inst)
            popular = {m.partner for m in report.popular}
            assert stable_matching(inst).partner in popular
            # and stable matchings are exactly the blocking-free ones
            for mat in enumerate_matchings(inst):
                if not blocking_edges(inst, mat):
                    assert mat.partner in popular


class TestWitnessSearch:
    def test_stable_finds_zero_vector(self, size_gap):
        assert witness_search(size_gap, size_gap_stable(size_gap)) == (
            0,
        ) * size_gap.n

    def test_size_gap_max_has_witness(self, size_gap):
        mat = size_gap_max(size_gap)
        alpha = witness_search(size_gap, mat)
        assert alpha is not None
        assert check_witness(size_gap, mat, alpha)

    def test_unpopular_has_none(self, size_gap):
        bad = Matching.from_pairs(
            size_gap, [(size_gap.id_of("a0"), size_gap.id_of("b1"))]
        )
        assert witness_search(size_gap, bad) is None

    def test_cap_enforced(self, showcase):
        with pytest.raises(OracleCapError):
            witness_search(showcase, showcase_full(showcase), cap=8)

    def test_existence_matches_elections(self):
        # A certificate exists exactly for the matchings that win or tie
        # every election, in both directions.
        for seed in range(60):
            inst = random_instance(seed, max_side=3)
            report = ground_truth(inst, with_witness_flags=True)
            popular = {m.partner for m in report.popular}
            for mat, flag in zip(
                enumerate_matchings(inst), report.witness_exists
            ):
                assert flag == (mat.partner in popular), seed


class TestMirrorStableSizeLaw:
    def test_engine_matching_size_is_order_independent(self):
        # Shuffling which left copy proposes first never changes the
        # resulting matching, hence never its size.
        import random

        rng = random.Random(7)
        for seed in range(30):
            inst = random_instance(seed, max_side=3)
            mirror = build_mirror(inst, legal_edge_set(inst))
            base_sys = mirror_system(mirror)
            base = base_sys.run()
            for _ in range(3):
                system = mirror_system(mirror)
                order = list(system.queue)
                rng.shuffle(order)
                system.queue.clear()
                system.queue.extend(order)
                out = system.run()
                assert out.feasible == base.feasible
                if base.feasible:
                    assert out.left_edge == base.left_edge

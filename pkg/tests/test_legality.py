"""Valid/popular/legal classification and the popular subgraph."""

from popmatch import (
    compute_posts,
    legal_edge_set,
    parse_instance,
    popular_edges,
    valid_edges,
)
from popmatch.legality import dominant_pairs, stable_pairs, two_level_instance
from popmatch.oracle import ground_truth

from conftest import ids, random_instance


def keyset(inst, classification_set):
    return sorted(
        (inst.names[u], inst.names[v]) for u, v in classification_set
    )


class TestValidEdges:
    def test_size_gap(self, size_gap):
        got = keyset(size_gap, valid_edges(size_gap, compute_posts(size_gap)))
        assert got == [
            ("a0", "a0"),
            ("a0", "b1"),
            ("a1", "b0"),
            ("a1", "b1"),
            ("b0", "b0"),
        ]

    def test_top_choice_job_loop_excluded(self, size_gap):
        b1 = size_gap.id_of("b1")
        assert (b1, b1) not in valid_edges(size_gap, compute_posts(size_gap))

    def test_single_pair(self):
        inst = parse_instance("agents: a\njobs: b\na > b\nb > a\n")
        got = valid_edges(inst, compute_posts(inst))
        assert got == frozenset({(0, 1), (0, 0)})

    def test_every_agent_has_exactly_two_valid_slots(self):
        for seed in range(60):
            inst = random_instance(seed)
            valid = valid_edges(inst, compute_posts(inst))
            for a in inst.agent_ids():
                incident = [k for k in valid if k[0] == a]
                assert len(incident) == 2


class TestPopularEdges:
    def test_size_gap(self, size_gap):
        got = keyset(size_gap, popular_edges(size_gap))
        assert got == [
            ("a0", "a0"),
            ("a0", "b1"),
            ("a1", "b0"),
            ("a1", "b1"),
            ("b0", "b0"),
        ]

    def test_single_pair_no_loops(self):
        inst = parse_instance("agents: a\njobs: b\na > b\nb > a\n")
        assert popular_edges(inst) == frozenset({(0, 1)})

    def test_showcase_contains_stable_and_max(self, showcase):
        from conftest import showcase_max, showcase_stable

        popular = popular_edges(showcase)
        for mat in (showcase_stable(showcase), showcase_max(showcase)):
            assert set(mat.pairs(showcase)) <= popular

    def test_fast_equals_oracle_union(self):
        for seed in range(150):
            inst = random_instance(seed)
            fast = popular_edges(inst, backend="fast")
            report = ground_truth(inst)
            exact = report.popular_edges | frozenset(
                (u, u) for u in report.popular_loops
            )
            assert fast == exact, seed

    def test_oracle_backend_matches_fast(self, size_gap):
        assert popular_edges(size_gap, backend="oracle") == popular_edges(
            size_gap, backend="fast"
        )


class TestPairFamilies:
    def test_stable_pairs_subset_of_popular(self):
        for seed in range(40):
            inst = random_instance(seed)
            assert stable_pairs(inst) <= popular_edges(inst)

    def test_two_level_instance_shape(self, size_gap):
        aux, na = two_level_instance(size_gap)
        assert na == size_gap.num_agents
        assert aux.num_agents == 2 * na
        assert aux.m == 2 * size_gap.m + 2 * na
        # High copies rank the last resort first; low copies rank it last.
        hi0 = aux.pref[0]
        lo0 = aux.pref[na]
        assert hi0[0] == lo0[-1]

    def test_dominant_pairs_cover_max_size_popular(self, size_gap):
        a0, a1, b0, b1 = ids(size_gap, "a0", "a1", "b0", "b1")
        dom = dominant_pairs(size_gap)
        assert (a0, b1) in dom and (a1, b0) in dom


class TestLegalEdgeSet:
    def test_size_gap_legal(self, size_gap):
        classification = legal_edge_set(size_gap)
        assert keyset(size_gap, classification.legal) == [
            ("a0", "a0"),
            ("a0", "b1"),
            ("a1", "b0"),
            ("a1", "b1"),
            ("b0", "b0"),
        ]

    def test_legal_is_exact_intersection(self):
        for seed in range(40):
            inst = random_instance(seed)
            classification = legal_edge_set(inst)
            assert classification.legal == (
                classification.valid & classification.popular
            )

    def test_size_gap_single_component(self, size_gap):
        classification = legal_edge_set(size_gap)
        assert len(classification.components) == 1
        assert set(classification.components[0]) == set(range(size_gap.n))

    def test_disjoint_pairs_give_two_components(self):
        inst = parse_instance(
            "agents: a0 a1\njobs: b0 b1\na0 > b0\na1 > b1\nb0 > a0\nb1 > a1\n"
        )
        classification = legal_edge_set(inst)
        assert len(classification.components) == 2

    def test_components_partition_all_vertices(self):
        for seed in range(60):
            inst = random_instance(seed)
            classification = legal_edge_set(inst)
            seen = [u for comp in classification.components for u in comp]
            assert sorted(seen) == list(range(inst.n))
            for u in range(inst.n):
                cid = classification.component_id[u]
                assert u in classification.components[cid]

    def test_fully_popular_matchings_use_only_legal_edges(self):
        for seed in range(100):
            inst = random_instance(seed)
            report = ground_truth(inst)
            legal = legal_edge_set(inst).legal
            for mat in report.fully_popular:
                for a, b in mat.pairs(inst):
                    assert (a, b) in legal, seed
                for u in range(inst.n):
                    if mat.is_self(u):
                        assert (u, u) in legal, seed

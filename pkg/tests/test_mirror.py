"""Mirror graph construction, embeddings, realizations, projections, partitions."""

import pytest

from popmatch import (
    Matching,
    build_mirror,
    classify_partition,
    embed_stable,
    legal_edge_set,
    mirror_blocking_edges,
    parse_instance,
    project,
    realize_witnessed,
    stable_matching,
    verify_popular,
)
from popmatch.mirror import MirrorMatching, format_mirror, mirror_system
from popmatch.oracle import ground_truth, witness_search

from conftest import ids, random_instance, showcase_full, size_gap_max

# Frozen because its left-optimal legal mirror matching differs between the
# two halves (found by sweeping seeded instances).
ASYMMETRIC_TEXT = """\
agents: a0 a1 a2
jobs: b0 b1
a0 > b1 b0
a1 > b1 b0
a2 > b1
b0 > a0 a1
b1 > a0 a1 a2
"""


def make_mirror(inst, backend="fast"):
    return build_mirror(inst, legal_edge_set(inst, backend=backend))


class TestBuild:
    def test_size_gap_edge_count(self, size_gap):
        mirror = make_mirror(size_gap)
        assert mirror.num_edges == 4 * size_gap.m + size_gap.n

    def test_stable_vertex_twins_forbidden(self, size_gap):
        mirror = make_mirror(size_gap)
        a0, a1, b0, b1 = ids(size_gap, "a0", "a1", "b0", "b1")
        assert mirror.twin(a1) in mirror.forbidden
        assert mirror.twin(b1) in mirror.forbidden
        assert mirror.twin(a0) not in mirror.forbidden
        assert mirror.twin(b0) not in mirror.forbidden

    def test_invalid_edge_copies_all_forbidden(self, identical_prefs):
        # b3 is neither a top choice nor any agent's fallback, so every
        # signed copy of every edge into it is forbidden.
        mirror = make_mirror(identical_prefs)
        b3 = identical_prefs.id_of("b3")
        for k, (a, b) in enumerate(identical_prefs.edges):
            if b == b3:
                for off in range(4):
                    assert 4 * k + off in mirror.forbidden

    def test_rank_orders(self, size_gap):
        # Left copies: partner-minus block, partner-plus block, twin last.
        # Right copies: partner-minus block, twin, partner-plus block.
        mirror = make_mirror(size_gap)
        a1 = size_gap.id_of("a1")
        row = mirror.left_lists[a1]
        assert [mirror.right_tag[e] for e in row] == [-1, -1, 1, 1, 1]
        assert mirror.is_twin(row[-1])
        incident = sorted(
            (
                e
                for e in range(mirror.num_edges)
                if mirror.edge_right[e] == a1
                and (mirror.is_twin(e) or mirror.edge_left[e] != a1)
            ),
            key=lambda e: mirror.rrank[e],
        )
        assert [mirror.left_tag[e] for e in incident] == [-1, -1, -1, 1, 1]
        assert mirror.is_twin(incident[2])

    def test_dump_lists_every_copy(self, size_gap):
        text = format_mirror(make_mirror(size_gap))
        for name in size_gap.names:
            assert f"{name}_l >" in text
            assert f"{name}_r >" in text


class TestEmbed:
    def test_size_gap_embed(self, size_gap):
        mirror = make_mirror(size_gap)
        mh = embed_stable(mirror, stable_matching(size_gap))
        genuine = sum(
            1 for e in mh.left_edge if not mirror.is_twin(e)
        )
        twins = sum(1 for e in mh.left_edge if mirror.is_twin(e))
        assert (genuine, twins) == (2, 2)
        assert mirror_blocking_edges(mh) == ()

    def test_unstable_input_rejected(self, size_gap):
        mirror = make_mirror(size_gap)
        with pytest.raises(ValueError, match="not stable"):
            embed_stable(mirror, size_gap_max(size_gap))

    def test_no_edges_means_all_twins(self):
        inst = parse_instance("agents:\njobs: b0 b1\n")
        mirror = make_mirror(inst)
        mh = embed_stable(mirror, Matching((0, 1)))
        assert all(mirror.is_twin(e) for e in mh.left_edge)

    def test_showcase_embed_stable(self, showcase):
        from conftest import showcase_stable

        mirror = make_mirror(showcase)
        mh = embed_stable(mirror, showcase_stable(showcase))
        assert mirror_blocking_edges(mh) == ()

    def test_random_stable_embeddings_never_blocked(self):
        for seed in range(80):
            inst = random_instance(seed)
            mirror = make_mirror(inst)
            mh = embed_stable(mirror, stable_matching(inst))
            assert mirror_blocking_edges(mh) == (), seed


class TestRealize:
    def test_zero_witness_reproduces_embedding(self, size_gap):
        mirror = make_mirror(size_gap)
        stable = stable_matching(size_gap)
        embedded = embed_stable(mirror, stable)
        realized = realize_witnessed(mirror, stable, (0,) * size_gap.n)
        assert realized.left_edge == embedded.left_edge
        assert realized.right_edge == embedded.right_edge

    def test_size_gap_max_realization_stable(self, size_gap):
        mirror = make_mirror(size_gap)
        mat = size_gap_max(size_gap)
        alpha = verify_popular(size_gap, mat).witness
        mh = realize_witnessed(mirror, mat, alpha)
        assert mirror_blocking_edges(mh) == ()

    def test_showcase_full_realization_legal_and_stable(self, showcase):
        mirror = make_mirror(showcase)
        mat = showcase_full(showcase)
        alpha = witness_search(showcase, mat)
        assert alpha is not None
        mh = realize_witnessed(mirror, mat, alpha)
        assert mirror_blocking_edges(mh) == ()
        assert not mh.uses_forbidden()

    def test_tag_sums_are_twice_the_certificate(self, size_gap):
        mirror = make_mirror(size_gap)
        mat = size_gap_max(size_gap)
        alpha = verify_popular(size_gap, mat).witness
        mh = realize_witnessed(mirror, mat, alpha)
        for u in range(size_gap.n):
            le, re = mh.left_edge[u], mh.right_edge[u]
            ltag = mirror.left_tag[le] if mirror.edge_left[le] == u else mirror.right_tag[le]
            rtag = mirror.right_tag[re] if mirror.edge_right[re] == u else mirror.left_tag[re]
            assert ltag + rtag == 2 * alpha[u]

    def test_non_cancelling_pair_rejected(self, size_gap):
        mirror = make_mirror(size_gap)
        mat = size_gap_max(size_gap)
        # (a1, b0) is matched but the entries sum to 2 instead of zero.
        with pytest.raises(ValueError, match="non-cancelling"):
            realize_witnessed(mirror, mat, (1, 1, 1, -1))

    def test_all_popular_realizations_stable(self):
        # Every popular matching with any certificate realizes to a stable
        # mirror matching; fully popular ones realize to legal ones.
        for seed in range(60):
            inst = random_instance(seed, max_side=3)
            mirror = make_mirror(inst)
            report = ground_truth(inst)
            fully = {m.partner for m in report.fully_popular}
            for mat in report.popular:
                alpha = witness_search(inst, mat)
                assert alpha is not None
                mh = realize_witnessed(mirror, mat, alpha)
                assert mirror_blocking_edges(mh) == (), seed
                if mat.partner in fully:
                    assert not mh.uses_forbidden(), seed


class TestProject:
    def test_round_trip_both_halves(self, size_gap):
        mirror = make_mirror(size_gap)
        stable = stable_matching(size_gap)
        mh = embed_stable(mirror, stable)
        assert project(mh, "upper").partner == stable.partner
        assert project(mh, "lower").partner == stable.partner

    def test_realizations_are_symmetric(self, showcase):
        mirror = make_mirror(showcase)
        mat = showcase_full(showcase)
        alpha = witness_search(showcase, mat)
        mh = realize_witnessed(mirror, mat, alpha)
        assert project(mh, "upper").partner == mat.partner
        assert project(mh, "lower").partner == mat.partner

    def test_engine_matching_can_differ_between_halves(self):
        inst = parse_instance(ASYMMETRIC_TEXT)
        system = mirror_system(make_mirror(inst))
        outcome = system.run()
        assert outcome.feasible
        mh = MirrorMatching(
            make_mirror(inst), outcome.left_edge, outcome.right_edge
        )
        assert project(mh, "upper").partner != project(mh, "lower").partner

    def test_unknown_half_rejected(self, size_gap):
        mirror = make_mirror(size_gap)
        mh = embed_stable(mirror, stable_matching(size_gap))
        with pytest.raises(ValueError, match="half"):
            project(mh, "middle")


class TestPartition:
    def test_size_gap_embedding_partition(self, size_gap):
        mirror = make_mirror(size_gap)
        mh = embed_stable(mirror, stable_matching(size_gap))
        part = classify_partition(mh)
        a0, a1, b0, b1 = ids(size_gap, "a0", "a1", "b0", "b1")
        assert part.u_agents == {a0}
        assert part.u_jobs == {b0}
        assert part.a_minus == {a1}
        assert part.b_plus == {b1}
        assert part.ap_plus == {a1}
        assert part.bp_minus == {b1}
        assert part.a_plus == part.b_minus == set()
        assert part.ap_minus == part.bp_plus == set()

    def test_all_twin_partition(self):
        inst = parse_instance("agents:\njobs: b0 b1\n")
        mirror = make_mirror(inst)
        mh = embed_stable(mirror, Matching((0, 1)))
        part = classify_partition(mh)
        assert part.u_jobs == {0, 1}
        assert not (
            part.a_plus
            or part.a_minus
            or part.b_plus
            or part.b_minus
            or part.ap_plus
            or part.ap_minus
            or part.bp_plus
            or part.bp_minus
        )

    def test_partition_covers_each_side(self):
        for seed in range(40):
            inst = random_instance(seed)
            system = mirror_system(make_mirror(inst))
            outcome = system.run()
            if not outcome.feasible:
                continue
            mh = MirrorMatching(
                make_mirror(inst), outcome.left_edge, outcome.right_edge
            )
            part = classify_partition(mh)
            agents = frozenset(inst.agent_ids())
            jobs = frozenset(inst.job_ids())
            assert part.u_agents | part.a_plus | part.a_minus == agents
            assert part.u_agents | part.ap_plus | part.ap_minus == agents
            assert part.u_jobs | part.b_plus | part.b_minus == jobs
            assert part.u_jobs | part.bp_plus | part.bp_minus == jobs

    def test_final_solver_partition_containments(self, showcase):
        from popmatch import solve

        for inst in (showcase, parse_instance(ASYMMETRIC_TEXT)):
            report = solve(inst, validate=True)
            state = report.state
            part, z = state.partition, state.z_set
            assert part.a_minus - z <= part.ap_minus
            assert part.ap_plus - z <= part.a_plus
            assert part.b_plus - z <= part.bp_plus
            assert part.bp_minus - z <= part.b_minus

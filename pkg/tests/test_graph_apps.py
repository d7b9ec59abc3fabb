"""Sink-free orientations, spanning trees, hard-core, and path analytics."""

import itertools
from collections import Counter
from fractions import Fraction

import pytest

from prsampling.errors import RoundCapError
from prsampling.graph_apps import (
    alpha,
    assignment_to_arrows,
    bad_vertices,
    corner_matrix,
    cycle_popping,
    disjoint_paths_experiment,
    disjoint_paths_graph,
    encode_hardcore,
    encode_sink_free,
    encode_spanning_tree,
    endpoint_matrix,
    hardcore_condition,
    hardcore_sample,
    is_arrow_tree,
    path_partition,
    ratio_bounds,
    res_vertices,
    sink_popping,
    spanning_tree_variables,
)
from prsampling.graphs import (
    complete_graph,
    cycle_graph,
    make_graph,
    path_graph,
)
from prsampling.model import (
    enumerate_assignments,
    is_extremal,
    occurring_events,
)
from prsampling.rng import derive_seed
from prsampling.sampler import SamplerConfig, extremal_prs, general_prs

F = Fraction


def cfg(seed, **kw):
    return SamplerConfig(seed=seed, record_log=kw.pop("record_log", True), **kw)


def brute_hardcore(k, lam):
    """Weights lam^|S| over independent subsets of a k-path, by enumeration."""
    lam = F(lam)
    out = {}
    for bits in itertools.product((0, 1), repeat=k):
        if any(a and b for a, b in zip(bits, bits[1:])):
            continue
        out[bits] = lam ** sum(bits)
    return out


class TestSinkPopping:
    def test_triangle_support_and_balance(self):
        n = 20_000
        counts = Counter(
            sink_popping(cycle_graph(3), cfg(derive_seed(1, i), record_log=False))[0]
            for i in range(n)
        )
        assert set(counts) == {(0, 1, 0), (1, 0, 1)}  # the two cyclic orientations
        assert abs(counts[(0, 1, 0)] / n - 0.5) < 0.015

    def test_output_never_has_a_sink(self):
        g = complete_graph(4)
        for i in range(100):
            orient, stats = sink_popping(g, cfg(derive_seed(2, i)))
            assert stats.halted
            for v in range(g.num_vertices):
                outgoing = any(
                    (v == u and orient[eid] == 0) or (v == w and orient[eid] == 1)
                    for eid in g.incident_edges[v]
                    for u, w in [g.edges[eid]]
                )
                assert outgoing, "vertex %d is a sink" % v

    def test_logged_sinks_are_independent(self):
        g = cycle_graph(5)
        for i in range(100):
            _, stats = sink_popping(g, cfg(derive_seed(3, i)))
            for sinks in stats.log:
                assert not any(
                    v in g.adjacency[u] for u in sinks for v in sinks
                ), "two adjacent sinks in one round"

    def test_tree_hits_round_cap(self):
        with pytest.raises(RoundCapError, match="sink-free"):
            sink_popping(path_graph(2), cfg(0, round_cap=100))

    def test_stats_accounting(self):
        _, stats = sink_popping(cycle_graph(4), cfg(11))
        assert stats.total_resamples == sum(stats.event_resamples)
        assert stats.rounds == len(stats.log) == len(stats.var_log)


class TestEncodeSinkFree:
    def test_c3_counts(self):
        inst = encode_sink_free(cycle_graph(3))
        assert inst.num_events == 3 and is_extremal(inst)
        valid = [
            a
            for a in enumerate_assignments(inst)
            if not occurring_events(inst, list(a))
        ]
        assert sorted(valid) == [(0, 1, 0), (1, 0, 1)]

    def test_c4_one_defect_ratio(self):
        inst = encode_sink_free(cycle_graph(4))
        assert is_extremal(inst)
        by_defects = Counter(
            len(occurring_events(inst, list(a))) for a in enumerate_assignments(inst)
        )
        assert by_defects[0] == 2 and by_defects[1] == 12
        bounds = ratio_bounds(cycle_graph(4))
        assert by_defects[1] / by_defects[0] <= bounds["sink_free"]["bound"] == 12

    def test_isolated_vertices_skipped(self):
        inst = encode_sink_free(make_graph(3, [(0, 1)]))
        assert inst.num_events == 2

    def test_matches_specialized_sampler(self):
        g = cycle_graph(4)
        inst = encode_sink_free(g)
        for i in range(60):
            seed = derive_seed(4, i)
            orient, st_s = sink_popping(g, cfg(seed))
            sigma, st_g = extremal_prs(inst, cfg(seed))
            assert tuple(sigma) == orient
            assert st_s.var_log == st_g.var_log
            assert st_s.log == st_g.log


class TestCyclePopping:
    def test_triangle_three_trees(self):
        g = cycle_graph(3)
        n = 10_000
        counts = Counter(
            cycle_popping(g, 0, cfg(derive_seed(5, i), record_log=False))[0]
            for i in range(n)
        )
        assert len(counts) == 3
        for arrows, c in counts.items():
            assert is_arrow_tree(g, 0, arrows)
            assert abs(c / n - 1 / 3) < 0.02

    def test_k4_sixteen_trees(self):
        g = complete_graph(4)
        seen = {
            cycle_popping(g, 0, cfg(derive_seed(6, i), record_log=False))[0]
            for i in range(4000)
        }
        assert len(seen) == 16  # Cayley: n**(n-2)
        assert all(is_arrow_tree(g, 0, a) for a in seen)

    def test_validation(self):
        with pytest.raises(ValueError, match="connected"):
            cycle_popping(make_graph(4, [(0, 1), (2, 3)]), 0, cfg(0))
        with pytest.raises(ValueError, match="root"):
            cycle_popping(cycle_graph(3), 5, cfg(0))

    def test_round_cap(self):
        # Cap 0 means even one popping round is forbidden; some seed needs one.
        g = complete_graph(4)
        hit = 0
        for i in range(30):
            try:
                cycle_popping(g, 0, cfg(derive_seed(7, i), round_cap=0))
            except RoundCapError as err:
                assert err.stats.rounds == 0
                hit += 1
        assert hit > 0


class TestIsArrowTree:
    def test_accepts_tree(self):
        assert is_arrow_tree(cycle_graph(3), 0, (-1, 0, 0))

    def test_rejects_cycle(self):
        assert not is_arrow_tree(cycle_graph(3), 0, (-1, 2, 1))

    def test_rejects_non_neighbor_arrow(self):
        assert not is_arrow_tree(path_graph(3), 0, (-1, 0, 0))

    def test_rejects_wrong_root_arrow(self):
        assert not is_arrow_tree(cycle_graph(3), 0, (1, 0, 0))


class TestEncodeSpanningTree:
    def test_triangle_encoding(self):
        g = cycle_graph(3)
        inst = encode_spanning_tree(g, 0)
        assert spanning_tree_variables(g, 0) == (1, 2)
        assert inst.num_variables == 2 and inst.num_events == 1
        valid = [
            a
            for a in enumerate_assignments(inst)
            if not occurring_events(inst, list(a))
        ]
        assert len(valid) == 3
        for a in valid:
            assert is_arrow_tree(g, 0, assignment_to_arrows(g, 0, a))

    @pytest.mark.parametrize(
        "g,root,num_trees",
        [
            (cycle_graph(4), 0, 4),
            (complete_graph(4), 0, 16),
            (complete_graph(4), 2, 16),
        ],
    )
    def test_tree_counts(self, g, root, num_trees):
        inst = encode_spanning_tree(g, root)
        valid = sum(
            1
            for a in enumerate_assignments(inst)
            if not occurring_events(inst, list(a))
        )
        assert valid == num_trees

    def test_k4_one_defect_ratio(self):
        g = complete_graph(4)
        inst = encode_spanning_tree(g, 0)
        by_defects = Counter(
            len(occurring_events(inst, list(a))) for a in enumerate_assignments(inst)
        )
        # 3 non-root vertices cannot host two vertex-disjoint directed cycles.
        assert by_defects[0] == 16 and by_defects[1] == 11 and by_defects[2] == 0
        assert by_defects[1] / by_defects[0] <= ratio_bounds(g)["spanning_tree"]["bound"]

    def test_extremal(self):
        # Directed cycles through a shared vertex coincide, so dependent
        # cycle events are pairwise disjoint.
        assert is_extremal(encode_spanning_tree(complete_graph(4), 0))

    def test_matches_specialized_sampler(self):
        for g, root in [(complete_graph(4), 0), (cycle_graph(4), 1)]:
            inst = encode_spanning_tree(g, root)
            for i in range(60):
                seed = derive_seed(8, i)
                arrows, _ = cycle_popping(g, root, cfg(seed))
                sigma, _ = general_prs(inst, cfg(seed))
                assert assignment_to_arrows(g, root, sigma) == arrows

    def test_requires_connected(self):
        with pytest.raises(ValueError, match="connected"):
            encode_spanning_tree(make_graph(4, [(0, 1), (2, 3)]), 0)


class TestHardcoreSampler:
    def test_single_edge_exact_support(self):
        g = path_graph(2)
        n = 20_000
        counts = Counter(
            frozenset(hardcore_sample(g, 1, cfg(derive_seed(9, i), record_log=False))[0])
            for i in range(n)
        )
        assert set(counts) == {frozenset(), frozenset({0}), frozenset({1})}
        tv = 0.5 * sum(abs(c / n - 1 / 3) for c in counts.values())
        assert tv <= 0.02

    def test_weighted_single_vertex(self):
        g = make_graph(1, [])
        n = 30_000
        occupied = sum(
            bool(hardcore_sample(g, 2, cfg(derive_seed(10, i), record_log=False))[0])
            for i in range(n)
        )
        assert abs(occupied / n - 2 / 3) < 0.01

    def test_output_always_independent(self):
        g = complete_graph(4)
        for i in range(200):
            occ, stats = hardcore_sample(g, F(1, 2), cfg(derive_seed(11, i)))
            assert stats.halted
            assert not any(u in occ and v in occ for u, v in g.edges)

    def test_lam_validation(self):
        with pytest.raises(TypeError, match="float"):
            hardcore_sample(path_graph(2), 0.5, cfg(0))
        with pytest.raises(ValueError, match="nonnegative"):
            hardcore_sample(path_graph(2), F(-1, 2), cfg(0))

    def test_matches_generic_sampler(self):
        g = cycle_graph(5)
        inst = encode_hardcore(g, F(1, 2))
        for i in range(80):
            seed = derive_seed(12, i)
            occ, st_s = hardcore_sample(g, F(1, 2), cfg(seed))
            sigma, st_g = general_prs(inst, cfg(seed))
            assert occ == {v for v, bit in enumerate(sigma) if bit}
            assert st_s.var_log == st_g.var_log


class TestBadAndResVertices:
    def test_path_examples(self):
        g = path_graph(3)
        assert bad_vertices(g, {0, 1}) == {0, 1}
        assert res_vertices(g, {0, 1}) == {0, 1, 2}
        assert bad_vertices(g, {0, 2}) == frozenset()
        assert res_vertices(g, {0, 2}) == frozenset()

    def test_fully_occupied_triangle(self):
        g = cycle_graph(3)
        assert bad_vertices(g, {0, 1, 2}) == {0, 1, 2}
        assert res_vertices(g, {0, 1, 2}) == {0, 1, 2}

    def test_matches_generic_resampling_set(self):
        from prsampling.sampler import select_resampling_set

        g = cycle_graph(4)
        inst = encode_hardcore(g, 1)
        for bits in itertools.product((0, 1), repeat=4):
            occupied = {v for v, b in enumerate(bits) if b}
            res = select_resampling_set(inst, list(bits))
            touched = sorted({v for j in res for v in inst.events[j].vbl})
            assert touched == sorted(res_vertices(g, occupied))


class TestEncodeHardcore:
    def test_p5_support_and_weights(self):
        inst = encode_hardcore(path_graph(5), 1)
        valid = [
            a
            for a in enumerate_assignments(inst)
            if not occurring_events(inst, list(a))
        ]
        assert len(valid) == 13  # path partition value I_5 at lam=1
        assert not is_extremal(inst)

    def test_event_probability(self):
        from prsampling.model import event_probability

        inst = encode_hardcore(path_graph(2), F(1, 10))
        assert event_probability(inst, inst.events[0]) == F(1, 121)

    def test_float_rejected(self):
        with pytest.raises(TypeError):
            encode_hardcore(path_graph(2), 0.1)


class TestHardcoreCondition:
    # Threshold is 1/(2*sqrt(e)*d - 1); at d=3 that is about 0.1125.
    def test_values(self):
        assert hardcore_condition(F(1, 10), 3) is True
        assert hardcore_condition(F(3, 25), 3) is False
        assert hardcore_condition(0, 7) is True
        assert hardcore_condition(F(2, 5), 1) is True
        assert hardcore_condition(F(11, 25), 1) is False

    def test_validation(self):
        with pytest.raises(TypeError):
            hardcore_condition(0.1, 3)
        with pytest.raises(ValueError):
            hardcore_condition(F(1, 10), 0)
        with pytest.raises(ValueError):
            hardcore_condition(F(-1, 10), 3)


class TestRatioBounds:
    def test_c4(self):
        r = ratio_bounds(cycle_graph(4))
        assert r["sink_free"] == {"bound": 12, "applicable": True}
        assert r["spanning_tree"] == {"bound": 16, "applicable": True}

    def test_tree_and_disconnected(self):
        r = ratio_bounds(path_graph(4))
        assert r["sink_free"]["applicable"] is False
        assert r["spanning_tree"]["applicable"] is True
        r2 = ratio_bounds(make_graph(4, [(0, 1), (2, 3)]))
        assert not r2["sink_free"]["applicable"]
        assert not r2["spanning_tree"]["applicable"]


class TestPathPartition:
    def test_fibonacci_at_lam_one(self):
        assert path_partition(5, 1) == [1, 2, 3, 5, 8, 13]

    def test_lam_zero(self):
        assert path_partition(6, 0) == [F(1)] * 7

    @pytest.mark.parametrize("lam", [F(1, 2), F(2), F(3, 7)])
    def test_matches_enumeration(self, lam):
        for k in range(0, 9):
            assert path_partition(k, lam)[k] == sum(brute_hardcore(k, lam).values())

    def test_p3_endpoint_pair_probability(self):
        # Both endpoints of a 3-path occupied at lam=2: weight 4 out of 11.
        lam = F(2)
        table = brute_hardcore(3, lam)
        total = sum(table.values())
        assert total == path_partition(3, lam)[3] == 11
        assert table[(1, 0, 1)] / total == F(4, 11)

    def test_validation(self):
        with pytest.raises(ValueError):
            path_partition(-1, 1)
        with pytest.raises(TypeError):
            path_partition(3, 0.5)


class TestEndpointMatrix:
    @pytest.mark.parametrize("lam", [F(1, 2), F(1), F(2)])
    def test_entries_sum_to_one(self, lam):
        for k in range(4, 13):
            w = endpoint_matrix(k, lam).w
            assert w[0][0] + 2 * w[0][1] + w[1][1] == 1
            assert w[0][1] == w[1][0]

    @pytest.mark.parametrize("lam", [F(1, 2), F(2)])
    def test_matches_enumeration(self, lam):
        for k in range(4, 11):
            table = brute_hardcore(k, lam)
            total = sum(table.values())
            joint = [[F(0), F(0)], [F(0), F(0)]]
            for bits, weight in table.items():
                joint[bits[0]][bits[-1]] += weight / total
            assert endpoint_matrix(k, lam).w == (
                (joint[0][0], joint[0][1]),
                (joint[1][0], joint[1][1]),
            )

    @pytest.mark.parametrize("lam", [F(1, 2), F(1), F(2)])
    def test_determinant_identity(self, lam):
        for k in range(4, 13):
            m = endpoint_matrix(k, lam)
            i_k = path_partition(k, lam)[k]
            assert m.det == (-1) ** (k - 1) * lam ** k / i_k ** 2

    def test_corner_matrix_determinants(self):
        for lam in (F(1, 2), F(1), F(2)):
            (a, b), (c, d) = corner_matrix(4, lam)
            assert a * d - b * c == -(lam ** 2)
            (a, b), (c, d) = corner_matrix(5, lam)
            assert a * d - b * c == lam ** 3

    def test_json_shape(self):
        j = endpoint_matrix(4, F(1, 2)).to_json()
        assert set(j) == {"k", "lam", "w", "det"}
        assert j["lam"] == "1/2"

    def test_needs_k_at_least_four(self):
        with pytest.raises(ValueError):
            endpoint_matrix(3, 1)
        with pytest.raises(ValueError):
            corner_matrix(3, 1)


class TestAlpha:
    def test_closed_forms(self):
        assert alpha(2) == pytest.approx(0.5)
        assert alpha(0) == 0.0
        assert alpha(6) == pytest.approx(2 / 3)

    def test_limits_and_monotonicity(self):
        assert alpha(10 ** 6) > 0.99
        xs = [alpha(F(k, 4)) for k in range(1, 40)]
        assert all(a < b for a, b in zip(xs, xs[1:]))

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            alpha(-1)

    @pytest.mark.parametrize("lam", [F(1, 2), F(1), F(2)])
    def test_det_ratio_recovers_alpha(self, lam):
        # |det W_k| = lam**k / I_k**2, so the 20-step ratio root converges
        # to lam/phi**2 = alpha(lam) with the constant factor cancelled.
        d20 = abs(float(endpoint_matrix(20, lam).det))
        d40 = abs(float(endpoint_matrix(40, lam).det))
        assert (d40 / d20) ** (1 / 20) == pytest.approx(alpha(lam), abs=1e-4)

    @pytest.mark.parametrize("lam", [F(1, 2), F(2)])
    def test_endpoint_marginal_converges(self, lam):
        w = endpoint_matrix(60, lam).w
        marginal = float(w[1][0] + w[1][1])
        assert marginal == pytest.approx(alpha(lam), abs=1e-9)


class TestDisjointPaths:
    def test_graph_shape(self):
        g = disjoint_paths_graph(12, 4)
        assert g.num_vertices == 12 and g.num_edges == 9
        assert g.num_components == 3
        with pytest.raises(ValueError):
            disjoint_paths_graph(10, 4)

    def test_experiment_report(self):
        rep = disjoint_paths_experiment(8, 4, 1, trials=60, base_seed=123)
        assert rep["n"] == 8 and rep["L"] == 4 and rep["trials"] == 60
        assert len(rep["rows"]) == 60
        freq = rep["endpoint_freq"]
        exact = rep["endpoint_exact"]
        assert abs(sum(map(sum, freq)) - 1.0) < 1e-9
        for a in range(2):
            for b in range(2):
                assert abs(freq[a][b] - exact[a][b]) < 0.12

    def test_short_paths_skip_exact(self):
        rep = disjoint_paths_experiment(6, 2, 1, trials=5, base_seed=1)
        assert "endpoint_exact" not in rep

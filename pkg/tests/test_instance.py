import io
import json

import numpy as np
import pytest

from coversketch import (
    CoverageInstance,
    ParseError,
    brute_force_kcover,
    coverage,
    feature_pairs_instance,
    generate_adversarial,
    generate_planted,
    greedy_kcover,
    khop_dominating_instance,
    load_edge_list,
    loads_edge_list,
    serialize_edge_list,
    stats,
)
from coversketch.instance import (
    load_fractional_edge_list,
    load_probabilistic_edge_list,
    load_weighted_edge_list,
    serialize_fractional_edge_list,
    serialize_weighted_edge_list,
)


class TestLoadEdgeList:
    def test_basic(self):
        inst = loads_edge_list("0 0\n0 1\n1 1\n")
        assert (inst.n, inst.m, inst.edge_count) == (2, 2, 3)

    def test_malformed_token_reports_line(self):
        with pytest.raises(ParseError, match="line 1"):
            loads_edge_list("0 x\n")

    def test_malformed_later_line(self):
        with pytest.raises(ParseError, match="line 3"):
            loads_edge_list("0 0\n# fine\n0\n")

    def test_duplicate_edges_deduplicated(self):
        inst = loads_edge_list("0 0\n0 0\n")
        assert inst.edge_count == 1

    def test_empty_is_an_error(self):
        with pytest.raises(ValueError, match="empty instance"):
            loads_edge_list("# only comments\n")

    def test_comments_and_gap_ids(self):
        # Unreferenced intermediate ids stay as degree-0 elements.
        inst = loads_edge_list("# header\n0 0\n1 4\n")
        assert (inst.n, inst.m) == (2, 5)
        assert inst.elem_degrees.tolist() == [1, 0, 0, 0, 1]

    def test_negative_id_rejected(self):
        with pytest.raises(ParseError):
            loads_edge_list("0 -1\n")

    def test_round_trip(self):
        inst = loads_edge_list("3 1\n0 0\n0 5\n2 3\n1 1\n")
        text = serialize_edge_list(inst)
        again = load_edge_list(io.BytesIO(text.encode()))
        assert again == inst

    def test_file_source(self, tmp_path):
        path = tmp_path / "edges.txt"
        path.write_text("0 0\n1 1\n")
        inst = load_edge_list(path)
        assert inst.n == 2


class TestCoverageInstance:
    def test_adjacency_consistency(self):
        inst = loads_edge_list("0 0\n0 1\n1 1\n2 0\n")
        assert inst.set_elements(0).tolist() == [0, 1]
        assert inst.element_sets(1).tolist() == [0, 1]
        assert inst.edge_count == sum(len(e) for e in inst.set_edges)
        assert inst.edge_count == sum(len(e) for e in inst.element_edges)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            CoverageInstance.from_edges(2, 2, [0, 2], [0, 1])

    def test_equality(self):
        a = loads_edge_list("0 0\n1 1\n")
        b = loads_edge_list("1 1\n0 0\n")
        assert a == b


class TestKhopDominating:
    def test_path_one_hop(self):
        adj = [[1], [0, 2], [1]]
        inst = khop_dominating_instance(adj, 1)
        assert inst.n == inst.m == 3
        assert inst.set_elements(1).tolist() == [0, 1, 2]
        assert len(inst.set_elements(0)) == 2
        assert len(inst.set_elements(2)) == 2

    def test_path_two_hops(self):
        adj = [[1], [0, 2], [1, 3], [2, 4], [3]]
        inst = khop_dominating_instance(adj, 2)
        assert inst.set_elements(2).tolist() == [0, 1, 2, 3, 4]

    def test_star_greedy_matches_brute_force(self):
        leaves = 5
        adj = [list(range(1, leaves + 1))] + [[0]] * leaves
        inst = khop_dominating_instance(adj, 1)
        best = brute_force_kcover(inst, 1)
        assert best.coverage_value == 6
        assert greedy_kcover(inst, 1).coverage_value == 6
        assert best.chosen == [0]

    def test_hop_containment(self):
        rng = np.random.default_rng(3)
        nv = 40
        adj = [[] for _ in range(nv)]
        for _ in range(60):
            u, v = rng.integers(0, nv, 2)
            if u != v:
                adj[int(u)].append(int(v))
                adj[int(v)].append(int(u))
        prev = None
        for hops in (1, 2, 3):
            inst = khop_dominating_instance(adj, hops)
            pairs = set(zip(*map(np.ndarray.tolist, inst.edges())))
            if prev is not None:
                assert prev <= pairs
            prev = pairs

    def test_bad_hops(self):
        with pytest.raises(ValueError):
            khop_dominating_instance([[1], [0]], 4)


class TestGeneratePlanted:
    def test_partition_no_decoys(self):
        inst, planted = generate_planted(2, 4, 0, 0.0, seed=1)
        assert inst.n == 2 and inst.m == 4
        sizes = sorted(len(inst.set_elements(s)) for s in planted)
        assert sizes == [2, 2]
        assert coverage(inst, planted) == 4

    def test_decoy_sizes_and_planted_union(self):
        inst, planted = generate_planted(2, 100, 50, 0.2, seed=9)
        assert inst.n == 52 and inst.m == 100
        decoys = sorted(set(range(52)) - set(planted))
        assert all(len(inst.set_elements(s)) == 60 for s in decoys)
        assert coverage(inst, planted) == 100
        # planted blocks are disjoint
        assert sum(len(inst.set_elements(s)) for s in planted) == 100

    def test_hardinst_a_parameters(self):
        inst, planted = generate_planted(100, 10000, 10000, 0.2, seed=0)
        assert inst.n == 10100 and inst.m == 10000
        assert len(planted) == 100
        st = stats(inst)
        assert st.edge_count == 10000 + 10000 * 120

    def test_deterministic_in_seed(self):
        a, pa = generate_planted(4, 40, 10, 0.2, seed=5)
        b, pb = generate_planted(4, 40, 10, 0.2, seed=5)
        c, _ = generate_planted(4, 40, 10, 0.2, seed=6)
        assert a == b and pa == pb
        assert a != c

    def test_rejects_bad_params(self):
        with pytest.raises(ValueError):
            generate_planted(3, 10, 5, 0.2, seed=0)


class TestGenerateAdversarial:
    def test_paper_shape(self):
        inst = generate_adversarial(10, 2, 2.0)
        assert inst.n == 10 and inst.m == 30
        bonus_sets = [8, 9]
        assert coverage(inst, bonus_sets) == 30
        assert brute_force_kcover(inst, 2).coverage_value == 30

    def test_small_case_brute_force(self):
        inst = generate_adversarial(4, 2, 1.0)
        bonus = [2, 3]
        assert all(len(inst.set_elements(s)) == 4 + 2 for s in bonus)
        assert brute_force_kcover(inst, 2).coverage_value == 8

    def test_minimal_parameters(self):
        inst = generate_adversarial(2, 1, 1.0)
        assert len(inst.set_elements(0)) == 2
        assert len(inst.set_elements(1)) == 4

    def test_normal_sets_cover_only_normals(self):
        inst = generate_adversarial(10, 2, 2.0)
        assert coverage(inst, [0, 1]) == 10

    def test_param_validation(self):
        with pytest.raises(ValueError):
            generate_adversarial(10, 6, 2.0)  # k > n/2
        with pytest.raises(ValueError):
            generate_adversarial(10, 2, 1.3)  # beta*n/k not integral


class TestFeaturePairs:
    def test_complete_column(self):
        inst = feature_pairs_instance(np.ones((3, 1), dtype=int))
        assert inst.n == 1 and inst.m == 3
        assert inst.element_labels == [1, 2, 5]  # codes r1*R + r2

    def test_identity_has_no_pairs(self):
        with pytest.raises(ValueError, match="empty instance"):
            feature_pairs_instance(np.eye(3, dtype=int))

    def test_two_column_counts(self):
        mat = np.zeros((4, 2), dtype=int)
        mat[[0, 1, 2], 0] = 1
        mat[[2, 3], 1] = 1
        inst = feature_pairs_instance(mat)
        assert len(inst.set_elements(0)) == 3
        assert len(inst.set_elements(1)) == 1
        assert coverage(inst, [0, 1]) == 4

    def test_non_binary_rejected(self):
        with pytest.raises(ValueError):
            feature_pairs_instance(np.array([[0, 2], [1, 1]]))

    def test_matches_direct_enumeration(self):
        rng = np.random.default_rng(11)
        mat = (rng.random((20, 6)) < 0.4).astype(int)
        try:
            inst = feature_pairs_instance(mat)
        except ValueError:
            return
        for c in range(6):
            active = np.flatnonzero(mat[:, c])
            want = len(active) * (len(active) - 1) // 2
            assert len(inst.set_elements(c)) == want


class TestStats:
    def test_small_instance(self):
        inst = loads_edge_list("0 0\n0 1\n1 1\n")
        st = stats(inst)
        assert st.max_set_size == 2
        assert st.max_element_degree == 2
        assert st.set_size_hist == (0, 1, 1)

    def test_single_edge(self):
        st = stats(loads_edge_list("0 0\n"))
        assert st.max_set_size == st.max_element_degree == 1

    def test_planted_edge_count(self):
        inst, _ = generate_planted(5, 50, 7, 0.2, seed=2)
        st = stats(inst)
        assert st.edge_count == 50 + 7 * 12

    def test_json_line(self):
        st = stats(loads_edge_list("0 0\n"))
        payload = json.loads(st.to_json_line())
        assert payload["n"] == 1 and payload["m"] == 1
        assert "\n" not in st.to_json_line()


class TestWeightedFormats:
    def test_weighted_round_trip(self):
        text = "#U 5\n0 0 2\n0 1 5\n1 1 5\n"
        winst = load_weighted_edge_list(io.BytesIO(text.encode()))
        assert winst.U == 5
        assert winst.element_weight.tolist() == [2, 5]
        again = load_weighted_edge_list(
            io.BytesIO(serialize_weighted_edge_list(winst).encode()))
        assert again.base == winst.base
        assert np.array_equal(again.element_weight, winst.element_weight)

    def test_conflicting_weights_rejected(self):
        with pytest.raises(ValueError, match="conflicting"):
            load_weighted_edge_list(io.BytesIO(b"0 0 2\n1 0 3\n"))

    def test_fractional_round_trip(self):
        text = "#U 4\n0 0 2\n1 0 3\n1 1 4\n"
        finst = load_fractional_edge_list(io.BytesIO(text.encode()))
        assert finst.U == 4
        again = load_fractional_edge_list(
            io.BytesIO(serialize_fractional_edge_list(finst).encode()))
        assert again.base == finst.base
        assert np.array_equal(again.numer_set_order, finst.numer_set_order)

    def test_fractional_requires_header(self):
        with pytest.raises(ParseError, match="#U"):
            load_fractional_edge_list(io.BytesIO(b"0 0 2\n"))

    def test_probabilistic_loader_shares_format(self):
        pinst = load_probabilistic_edge_list(io.BytesIO(b"#U 2\n0 0 1\n"))
        assert pinst.U == 2

    def test_numerator_range_enforced(self):
        with pytest.raises(ValueError):
            load_fractional_edge_list(io.BytesIO(b"#U 2\n0 0 3\n"))

    def test_weight_range_enforced(self):
        winst_src = io.BytesIO(b"#U 2\n0 0 0\n")
        with pytest.raises(ValueError):
            load_weighted_edge_list(winst_src)

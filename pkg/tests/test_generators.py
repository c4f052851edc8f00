from collections import Counter

import numpy as np
import pytest
from scipy.stats import chi2

from groupnets.generators import (
    MODALITIES,
    GroupTree,
    ModalityParams,
    bundle_edge_count,
    er_block,
    gen_bridge,
    gen_comembership,
    gen_edge_bundle,
    gen_liaison,
    generate,
    uniform_spanning_tree,
)
from groupnets.graphs import Graph, average_clustering, is_connected
from groupnets.partition import PowerLawSpec


def home_group_map(mg):
    home = {}
    for gi, members in enumerate(mg.groups):
        for v in members:
            home[v] = gi
    return home


def cross_edges_by_pair(mg):
    """Inter-group edges keyed by the (sorted) pair of home groups."""
    home = home_group_map(mg)
    pairs = {}
    for u, v in mg.graph.edges:
        gu, gv = home.get(u), home.get(v)
        if gu is None or gv is None or gu == gv:
            continue
        pairs.setdefault((min(gu, gv), max(gu, gv)), []).append((u, v))
    return pairs


def test_params_defaults():
    p = ModalityParams()
    assert p.comember_inclusion == pytest.approx(0.9)
    assert p.branching_pmf[2] == pytest.approx(27 / 35)
    assert p.branching_pmf[3] == pytest.approx(8 / 35)
    with pytest.raises(ValueError):
        ModalityParams(epsilon=0.0)
    with pytest.raises(ValueError):
        ModalityParams(bundle_scale=-1.0)
    with pytest.raises(ValueError):
        ModalityParams(comember_inclusion=1.5)


def test_er_block_tiny_epsilon_is_clique():
    g = er_block(3, 1e-9, np.random.default_rng(0))
    assert g.edge_count == 3


def test_er_block_edge_count_mean():
    rng = np.random.default_rng(1)
    counts = [er_block(10, 0.1, rng).edge_count for _ in range(300)]
    assert np.mean(counts) == pytest.approx(0.9 * 45, abs=0.6)


def test_er_block_clustering_mean():
    rng = np.random.default_rng(2)
    values = [average_clustering(er_block(10, 0.1, rng)) for _ in range(1000)]
    assert np.mean(values) == pytest.approx(0.9, abs=0.02)


def test_er_block_always_connected():
    rng = np.random.default_rng(3)
    for _ in range(200):
        assert is_connected(er_block(int(rng.integers(3, 12)), 0.4, rng))


def test_er_block_validation():
    with pytest.raises(ValueError):
        er_block(0, 0.1, np.random.default_rng(0))
    with pytest.raises(ValueError):
        er_block(5, 1.0, np.random.default_rng(0))


def test_spanning_tree_small_cases():
    assert uniform_spanning_tree(1, np.random.default_rng(0)).tree_edges == frozenset()
    assert uniform_spanning_tree(2, np.random.default_rng(0)).tree_edges == {(0, 1)}


def test_spanning_tree_structure():
    rng = np.random.default_rng(4)
    for _ in range(50):
        k = int(rng.integers(3, 30))
        tree = uniform_spanning_tree(k, rng)  # GroupTree validates itself
        assert len(tree.tree_edges) == k - 1


def test_spanning_tree_uniform_over_labeled_trees():
    # Cayley: 4^2 = 16 labeled trees on 4 nodes, each with frequency ~1/16
    rng = np.random.default_rng(5)
    draws = 16_000
    counts = Counter(
        tuple(uniform_spanning_tree(4, rng).sorted_edges()) for _ in range(draws)
    )
    assert len(counts) == 16
    expected = draws / 16
    stat = sum((c - expected) ** 2 / expected for c in counts.values())
    p = chi2.sf(stat, df=15)
    assert p > 0.001, f"chi-square stat {stat:.1f}, p {p:.2e}"


def test_group_tree_validation():
    with pytest.raises(ValueError):
        GroupTree(3, frozenset({(0, 1)}))
    with pytest.raises(ValueError):
        GroupTree(3, frozenset({(0, 1), (0, 1)}))
    with pytest.raises(ValueError):
        GroupTree(4, frozenset({(0, 1), (1, 2), (0, 2)}))


def test_bundle_edge_count_rule():
    assert bundle_edge_count(3, 3, 0.05) == 2  # round(0.45) = 0 -> floor 2
    assert bundle_edge_count(10, 10, 0.05) == 5
    assert bundle_edge_count(3, 3, 10.0) == 9  # capped at the slot count
    assert bundle_edge_count(3, 4, 0.05) == 2


def test_bridge_cross_edge_count():
    for seed in range(200):
        mg = gen_bridge(60, ModalityParams(), np.random.default_rng(seed))
        pairs = cross_edges_by_pair(mg)
        assert is_connected(mg.graph)
        assert sum(len(v) for v in pairs.values()) == mg.group_count - 1
        assert all(len(v) == 1 for v in pairs.values())


def test_tree_skeleton_matches_group_tree():
    params = ModalityParams()
    for gen in (gen_bridge, gen_edge_bundle, gen_comembership):
        for seed in range(40):
            mg = gen(50, params, np.random.default_rng(seed))
            assert set(cross_edges_by_pair(mg)) == set(mg.tree.sorted_edges())


def test_bundle_cross_edges_at_least_two_and_distinct():
    for seed in range(100):
        mg = gen_edge_bundle(60, ModalityParams(), np.random.default_rng(seed))
        for pair, edges in cross_edges_by_pair(mg).items():
            assert len(edges) >= 2
            assert len(set(edges)) == len(edges)


def test_bridge_nested_in_bundle_same_stream():
    # same raw stream -> same partition, tree and anchor endpoints
    for seed in range(40):
        b = gen_bridge(60, ModalityParams(), np.random.default_rng(seed))
        eb = gen_edge_bundle(60, ModalityParams(), np.random.default_rng(seed))
        assert b.groups == eb.groups
        assert b.tree == eb.tree
        assert set(b.graph.edges) <= set(eb.graph.edges)


def test_comembership_shared_endpoint_and_counts():
    for seed in range(100):
        mg = gen_comembership(60, ModalityParams(), np.random.default_rng(seed))
        co_by_pair = {}
        for v, gi in mg.extra_memberships:
            home = home_group_map(mg)[v]
            co_by_pair[(min(home, gi), max(home, gi))] = v
        for pair, edges in cross_edges_by_pair(mg).items():
            assert len(edges) >= 3
            shared = set(edges[0])
            for e in edges[1:]:
                shared &= set(e)
            assert co_by_pair[pair] in shared


def test_comembership_membership_map():
    mg = gen_comembership(40, ModalityParams(), np.random.default_rng(8))
    member = mg.membership()
    adoptions = Counter(v for v, _ in mg.extra_memberships)
    for v in range(mg.graph.n):
        assert len(member[v]) == 1 + adoptions[v]


def test_comembership_mean_cross_edges():
    # forced two groups of 20: expected cross edges = 0.9 * 20
    params = ModalityParams()
    spec = PowerLawSpec(support_max=20, support_min=20)
    counts = []
    rng = np.random.default_rng(9)
    for _ in range(400):
        mg = gen_comembership(40, params, rng, size_spec=spec)
        (edges,) = cross_edges_by_pair(mg).values()
        counts.append(len(edges))
    assert np.mean(counts) == pytest.approx(0.9 * 20, rel=0.05)


def test_liaison_single_group_no_hierarchy():
    mg = gen_liaison(3, ModalityParams(), np.random.default_rng(0))
    assert mg.liaison_nodes == ()
    assert mg.graph.n == 3


def test_liaison_structure():
    for seed in range(100):
        mg = gen_liaison(60, ModalityParams(), np.random.default_rng(seed))
        n_groups = mg.group_count
        assert mg.graph.n == 60 + len(mg.liaison_nodes)
        assert is_connected(mg.graph)
        if n_groups == 1:
            assert not mg.liaison_nodes
            continue
        liaisons = set(mg.liaison_nodes)
        home = home_group_map(mg)
        # children per liaison: edges to lower-layer units (groups or
        # earlier liaisons); every liaison except the root also has one
        # edge up to its parent
        children = {lid: 0 for lid in liaisons}
        unit_edges = 0
        touched_groups = {}
        for u, v in mg.graph.edges:
            in_l = (u in liaisons, v in liaisons)
            if not any(in_l):
                continue
            unit_edges += 1
            if all(in_l):
                children[max(u, v)] += 1
            else:
                lid, member = (u, v) if u in liaisons else (v, u)
                children[lid] += 1
                touched_groups.setdefault(lid, set()).add(home[member])
        root = max(liaisons)
        for lid in liaisons:
            degree = mg.graph.degree(lid)
            n_children = degree if lid == root else degree - 1
            assert n_children in (2, 3), f"liaison {lid} has branching {n_children}"
        # contracted hierarchy (groups + liaisons) is a tree
        assert unit_edges == n_groups + len(liaisons) - 1
        # removing the liaisons disconnects the groups
        survivors = [
            (u, v) for u, v in mg.graph.edges if u not in liaisons and v not in liaisons
        ]
        assert not is_connected(Graph(60, survivors))


def test_generate_deterministic_and_distinct():
    a = generate("bridge", 50, seed=7)
    b = generate("bridge", 50, seed=7)
    assert a.graph.edges == b.graph.edges
    c = generate("bridge", 50, seed=8)
    assert a.graph.edges != c.graph.edges


def test_generate_unknown_modality():
    with pytest.raises(ValueError):
        generate("ring", 50, seed=0)
    with pytest.raises(ValueError):
        generate("bridge", 50, seed=-1)


def test_generate_all_modalities_connected():
    for modality in MODALITIES:
        mg = generate(modality, 200, seed=3)
        assert is_connected(mg.graph)
        assert sum(mg.group_sizes.sizes) == 200


def test_document_roundtrip_via_generate():
    mg = generate("comembership", 60, seed=5)
    doc = mg.to_document()
    assert doc.modality == "comembership"
    assert doc.seed == 5
    # co-members appear in two group lists
    flat = [v for grp in doc.groups for v in grp]
    assert len(flat) == len(set(flat)) + len(mg.extra_memberships)
    text = doc.to_json_text()
    assert text == type(doc).from_json_text(text).to_json_text()


def test_er_block_mean_degree():
    # G(10, 0.9) has mean degree 0.9 * 9 over replications
    rng = np.random.default_rng(21)
    degs = []
    for _ in range(400):
        g = er_block(10, 0.1, rng)
        degs.append(2 * g.edge_count / g.n)
    assert np.mean(degs) == pytest.approx(0.9 * 9, abs=0.1)

"""Reachability and component tests against a brute-force oracle.

The oracle computes the reflexive-transitive closure of small random graphs
by boolean matrix powering, then clusters and components are read off from
that closure directly.
"""

import json

import numpy as np
import pytest

from poisson_digraph.sampler import sample_graph_fast
from poisson_digraph.structure import (
    ComponentSummary,
    backward_cluster,
    backward_cluster_size,
    component_summary,
    degree_arrays,
    degrees,
    forward_cluster,
    forward_cluster_size,
    strong_class,
    strong_components,
    weak_components,
)
from poisson_digraph.weights import ParetoMirrored, sample_weights
from poisson_digraph.digraph import MultiDigraph


def _closure(g):
    """Boolean reachability matrix including each vertex itself."""
    adj = np.eye(g.n, dtype=bool)
    adj[g.src - 1, g.dst - 1] = True
    reach = adj.copy()
    while True:
        nxt = reach | (reach @ reach)
        if np.array_equal(nxt, reach):
            return reach
        reach = nxt


def _random_graph(n, seed):
    w = sample_weights(ParetoMirrored(3.5, 1.0), n, seed)
    return sample_graph_fast(w, float(w.sum_in), seed)


@pytest.mark.parametrize("seed", range(8))
def test_clusters_match_closure_oracle(seed):
    g = _random_graph(25, seed)
    reach = _closure(g)
    for v in (1, 7, 25):
        fwd = {u + 1 for u in np.nonzero(reach[v - 1])[0]}
        bwd = {u + 1 for u in np.nonzero(reach[:, v - 1])[0]}
        assert forward_cluster(g, v) == fwd
        assert backward_cluster(g, v) == bwd
        assert forward_cluster_size(g, v) == len(fwd)
        assert backward_cluster_size(g, v) == len(bwd)
        assert strong_class(g, v) == fwd & bwd


def test_reachability_is_reflexive_on_isolated_vertices():
    g = MultiDigraph.empty(5)
    for v in range(1, 6):
        assert forward_cluster(g, v) == {v}
        assert backward_cluster(g, v) == {v}
        assert strong_class(g, v) == {v}


def test_vertex_id_validation():
    g = MultiDigraph.empty(3)
    for bad in (0, 4, -1):
        with pytest.raises(ValueError):
            forward_cluster(g, bad)


def test_three_cycle_is_one_strong_class():
    g = MultiDigraph.from_arc_dict(3, {(1, 2): 1, (2, 3): 1, (3, 1): 1})
    assert strong_class(g, 2) == {1, 2, 3}
    labels = strong_components(g).strong_labels
    assert len(set(labels.tolist())) == 1


def test_directed_path_has_singleton_strong_classes():
    g = MultiDigraph.from_arc_dict(4, {(1, 2): 1, (2, 3): 1, (3, 4): 1})
    assert forward_cluster(g, 1) == {1, 2, 3, 4}
    assert backward_cluster(g, 4) == {1, 2, 3, 4}
    assert strong_class(g, 2) == {2}
    assert len(set(strong_components(g).strong_labels.tolist())) == 4
    assert len(set(weak_components(g).weak_labels.tolist())) == 1


@pytest.mark.parametrize("seed", range(5))
def test_component_labels_match_closure_oracle(seed):
    g = _random_graph(30, 100 + seed)
    reach = _closure(g)
    mutual = reach & reach.T
    strong = strong_components(g).strong_labels
    for v in range(30):
        for u in range(v, 30):
            assert (strong[v] == strong[u]) == bool(mutual[v, u])
    sym = _closure(
        MultiDigraph(
            g.n,
            np.concatenate([g.src, g.dst]),
            np.concatenate([g.dst, g.src]),
            np.concatenate([g.mult, g.mult]),
        )
    )
    weak = weak_components(g).weak_labels
    for v in range(30):
        for u in range(v, 30):
            assert (weak[v] == weak[u]) == bool(sym[v, u])


def test_degrees_exclude_loops():
    g = MultiDigraph.from_arc_dict(2, {(1, 1): 2, (1, 2): 3, (2, 1): 1})
    d1, d2 = degrees(g)
    assert (d1.d_in, d1.d_out, d1.loops, d1.total) == (1, 3, 2, 6)
    assert (d2.d_in, d2.d_out, d2.loops, d2.total) == (3, 1, 0, 4)


@pytest.mark.parametrize("seed", range(4))
def test_degree_arrays_match_per_vertex(seed):
    g = _random_graph(40, 200 + seed)
    arr = degree_arrays(g)
    assert arr.d_in.sum() == arr.d_out.sum() == g.total_arcs - g.total_loops
    per_vertex = degrees(g)
    for v in (1, 13, 40):
        d = per_vertex[v - 1]
        assert (arr.d_in[v - 1], arr.d_out[v - 1], arr.loops[v - 1]) == (
            d.d_in,
            d.d_out,
            d.loops,
        )


def test_component_summary_invariants():
    g = _random_graph(200, 42)
    s = component_summary(g)
    assert s.n == 200
    assert sum(s.strong_sizes) == 200
    assert sum(s.weak_sizes) == 200
    assert s.largest_strong == max(s.strong_sizes)
    assert s.largest_weak == max(s.weak_sizes)
    assert s.largest_strong <= s.largest_weak


def test_component_summary_json():
    g = MultiDigraph.from_arc_dict(4, {(1, 2): 1, (2, 1): 1})
    payload = json.loads(component_summary(g).to_json(topk=3))
    assert payload["n"] == 4
    assert payload["largest_strong"] == 2
    assert payload["largest_weak"] == 2
    assert payload["strong_sizes_topk"] == [2, 1, 1]
    assert payload["weak_sizes_topk"] == [2, 1, 1]


def test_summary_handles_empty_graph():
    s = component_summary(MultiDigraph.empty(6))
    assert s.largest_strong == 1
    assert s.largest_weak == 1
    assert len(s.strong_sizes) == 6

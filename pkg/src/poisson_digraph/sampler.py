"""Samplers for conditionally Poissonian directed multigraphs.

Given realized weights and a normalizer L, every ordered vertex pair (v, u),
diagonal included, carries an independent Poisson(w_out(v) * w_in(u) / L)
arc count.  Two samplers realize this law: a quadratic per-pair reference
sampler and a linear-time sampler that draws the Poisson total arc count and
places arcs i.i.d. via alias tables (valid by Poisson superposition).

Also provided: one-vertex growth via Poisson thinning, and the mirrored-sum
constructions (two opposedly oriented undirected samples, or one doubled
undirected sample with uniform orientation) that reproduce the direct law
exactly, diagonal included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .digraph import MultiDigraph
from .streams import AliasTable, stream
from .weights import (
    Marginal,
    NormalizerMode,
    WeightModel,
    WeightSequence,
    capacity_marginal,
    is_mirrored,
    moments,
    normalizer,
    sample_weights,
)

__all__ = [
    "sample_graph_naive",
    "sample_graph_fast",
    "evolve",
    "evolve_chain",
    "sample_oriented_sum",
    "oriented_sum_parts",
    "sample_randomly_oriented_nr",
    "sample_independent_sum",
    "independent_sum_parts",
    "SumParts",
]

NAIVE_DEFAULT_CAP = 10_000


def _check_l(l_n: float) -> None:
    if not (l_n > 0 and math.isfinite(l_n)):
        raise ValueError(f"normalizer L must be positive and finite, got {l_n}")


def sample_graph_naive(
    w: WeightSequence,
    l_n: float,
    seed: int,
    max_n: int = NAIVE_DEFAULT_CAP,
    allow_large: bool = False,
) -> MultiDigraph:
    """Reference sampler: one Poisson draw per ordered pair, O(n^2).

    Guarded at ``max_n`` vertices unless ``allow_large`` is set; intended as
    the distributional oracle for the linear-time sampler.
    """
    _check_l(l_n)
    n = w.n
    if n > max_n and not allow_large:
        raise ValueError(
            f"naive sampler is O(n^2); n={n} exceeds cap {max_n} (pass allow_large=True)"
        )
    rng = stream(seed, "naive")
    rows_per_block = max(1, 4_000_000 // n)
    src_parts, dst_parts, mult_parts = [], [], []
    for lo in range(0, n, rows_per_block):
        hi = min(n, lo + rows_per_block)
        rates = np.outer(w.w_out[lo:hi], w.w_in) / l_n
        counts = rng.poisson(rates)
        r, c = np.nonzero(counts)
        src_parts.append(r + lo + 1)
        dst_parts.append(c + 1)
        mult_parts.append(counts[r, c])
    return MultiDigraph(
        n,
        np.concatenate(src_parts) if src_parts else np.zeros(0, dtype=np.int64),
        np.concatenate(dst_parts) if dst_parts else np.zeros(0, dtype=np.int64),
        np.concatenate(mult_parts) if mult_parts else np.zeros(0, dtype=np.int64),
    )


def sample_graph_fast(w: WeightSequence, l_n: float, seed: int) -> MultiDigraph:
    """Linear-time sampler, O(n + number of arcs).

    Draws the total arc count K ~ Poisson((sum w_out)(sum w_in) / L), then
    K sources i.i.d. proportional to w_out and K targets proportional to
    w_in via alias tables.  Superposition and thinning of Poisson processes
    make the per-pair counts independent Poissons with the product rates.
    """
    _check_l(l_n)
    rng = stream(seed, "fast")
    k = int(rng.poisson(w.sum_out * w.sum_in / l_n))
    if k == 0:
        return MultiDigraph.empty(w.n)
    src = AliasTable(w.w_out).sample(rng, k) + 1
    dst = AliasTable(w.w_in).sample(rng, k) + 1
    return MultiDigraph(w.n, src, dst, np.ones(k, dtype=np.int64))


# -- growth by one vertex -----------------------------------------------------


def evolve(
    g: MultiDigraph,
    w: WeightSequence,
    l_prev: float,
    l_next: float,
    seed: int,
) -> MultiDigraph:
    """One step of the graph process: n vertices to n + 1.

    Existing arcs are kept independently with probability l_prev / l_next
    (binomial thinning per multiplicity), then vertex n + 1 arrives with
    fresh Poisson arcs at rate w_out * w_in / l_next for every ordered pair
    involving it, its loop included.  If g followed the target law at
    (n, l_prev), the result follows it at (n + 1, l_next).

    Requires l_next >= l_prev; the empirical-product normalizer is not
    pathwise monotone and must not be used here.
    """
    _check_l(l_prev)
    _check_l(l_next)
    if l_next < l_prev:
        raise ValueError(f"normalizer must be nondecreasing, got {l_prev} -> {l_next}")
    n_new = g.n + 1
    if w.n < n_new:
        raise ValueError(f"weight sequence has {w.n} pairs, need {n_new}")
    rng = stream(seed, "evolve", n_new)
    kept = rng.binomial(g.mult, l_prev / l_next) if g.mult.size else g.mult
    # arcs out of the new vertex (loop included), then arcs into it
    out_counts = rng.poisson(w.w_out[n_new - 1] * w.w_in[:n_new] / l_next)
    in_counts = rng.poisson(w.w_out[: n_new - 1] * w.w_in[n_new - 1] / l_next)
    src = np.concatenate([g.src, np.full(n_new, n_new), np.arange(1, n_new)])
    dst = np.concatenate([g.dst, np.arange(1, n_new + 1), np.full(n_new - 1, n_new)])
    mult = np.concatenate([kept, out_counts, in_counts])
    return MultiDigraph(n_new, src, dst, mult)


def evolve_chain(
    model: WeightModel,
    n_from: int,
    n_to: int,
    seed: int,
    mode: NormalizerMode = NormalizerMode.DETERMINISTIC_MU_N,
) -> MultiDigraph:
    """Sample at n_from and grow one vertex at a time to n_to.

    The weight sequence is drawn once for n_to (prefix stable), so every
    intermediate graph uses the same realized weights.  Only the mu-n and
    capacity-sum normalizers are monotone along the chain and allowed.
    """
    if not 1 <= n_from <= n_to:
        raise ValueError(f"need 1 <= n_from <= n_to, got {n_from}, {n_to}")
    if mode is NormalizerMode.EMPIRICAL_PRODUCT:
        raise ValueError("empirical-product normalizer is not monotone under growth")
    mu = moments(model).mu
    w = sample_weights(model, n_to, seed)
    l_cur = normalizer(w.prefix(n_from), mu, mode)
    g = sample_graph_fast(w.prefix(n_from), l_cur, seed)
    for n_next in range(n_from + 1, n_to + 1):
        l_next = normalizer(w.prefix(n_next), mu, mode)
        g = evolve(g, w, l_cur, l_next, seed)
        l_cur = l_next
    return g


# -- mirrored-sum constructions -----------------------------------------------


def _nr_oriented_arcs(
    cap: np.ndarray, l_n: float, orientation: str, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Arc endpoints (1-based) of one undirected inhomogeneous sample.

    Unordered pair {v, w}, v != w, carries Poisson(cap_v cap_w / l_n) edges
    and the diagonal Poisson(cap_v^2 / (2 l_n)), realized by drawing the
    Poisson total (sum cap)^2 / (2 l_n) and both endpoints i.i.d.
    proportional to cap.  Orientation: 'higher' and 'lower' point every
    edge toward the higher / lower index (loops stay loops); 'uniform'
    keeps the exchangeable endpoint order, which is a fair coin per edge.
    """
    total = float(cap.sum()) ** 2 / (2.0 * l_n)
    k = int(rng.poisson(total))
    if k == 0:
        z = np.zeros(0, dtype=np.int64)
        return z, z
    table = AliasTable(cap)
    a = table.sample(rng, k) + 1
    b = table.sample(rng, k) + 1
    if orientation == "higher":
        return np.minimum(a, b), np.maximum(a, b)
    if orientation == "lower":
        return np.maximum(a, b), np.minimum(a, b)
    if orientation == "uniform":
        return a, b
    raise ValueError(f"unknown orientation {orientation!r}")


@dataclass(frozen=True)
class SumParts:
    """A sum-construction sample together with its two constituents."""

    graph: MultiDigraph
    first: MultiDigraph
    second: MultiDigraph


def _require_mirrored(w: WeightSequence) -> None:
    if not w.is_mirrored():
        raise ValueError("sum constructions need mirrored capacities (w_in == w_out)")


def oriented_sum_parts(
    capacity_weights: WeightSequence, seed: int, l_n: float | None = None
) -> SumParts:
    """Two independent undirected samples, oppositely oriented, arc-summed.

    The first constituent points every edge toward the higher index, the
    second toward the lower.  With the default l_n = sum of capacities the
    arc-summed graph follows the direct mirrored law exactly, loops
    included (each constituent carries half the diagonal rate).
    """
    _require_mirrored(capacity_weights)
    cap = capacity_weights.w_in
    if l_n is None:
        l_n = capacity_weights.sum_in
    _check_l(l_n)
    n = capacity_weights.n
    s1, d1 = _nr_oriented_arcs(cap, l_n, "higher", stream(seed, "oriented-sum", 1))
    s2, d2 = _nr_oriented_arcs(cap, l_n, "lower", stream(seed, "oriented-sum", 2))
    first = MultiDigraph(n, s1, d1, np.ones(s1.size, dtype=np.int64))
    second = MultiDigraph(n, s2, d2, np.ones(s2.size, dtype=np.int64))
    graph = MultiDigraph(
        n,
        np.concatenate([s1, s2]),
        np.concatenate([d1, d2]),
        np.ones(s1.size + s2.size, dtype=np.int64),
    )
    return SumParts(graph=graph, first=first, second=second)


def sample_oriented_sum(
    capacity_weights: WeightSequence, seed: int, l_n: float | None = None
) -> MultiDigraph:
    """Arc sum of two oppositely oriented undirected samples."""
    return oriented_sum_parts(capacity_weights, seed, l_n).graph


def sample_randomly_oriented_nr(
    capacity_weights: WeightSequence, seed: int, l_n: float | None = None
) -> MultiDigraph:
    """One undirected sample at doubled capacities, uniformly oriented.

    At doubled capacities the unordered pair {v, w} carries rate
    4 cap_v cap_w / (2 l_n) = 2 cap_v cap_w / l_n, exactly the undirected
    intensity of the direct mirrored digraph; a fair coin per edge then
    splits it evenly between the two directions.  Loops keep the full
    diagonal rate cap_v^2 / l_n, again matching the direct law; the coin
    flip on a loop has no observable effect.
    """
    _require_mirrored(capacity_weights)
    cap = capacity_weights.w_in
    if l_n is None:
        l_n = capacity_weights.sum_in
    _check_l(l_n)
    rng = stream(seed, "randomly-oriented")
    src, dst = _nr_oriented_arcs(2.0 * cap, 2.0 * l_n, "uniform", rng)
    return MultiDigraph(capacity_weights.n, src, dst, np.ones(src.size, dtype=np.int64))


# -- independent-sum construction ---------------------------------------------


def _one_sided_capacity(model) -> Marginal:
    if isinstance(model, (int, float)):
        raise TypeError("pass a Marginal or mirrored WeightModel, not a number")
    if isinstance(model, Marginal):
        return model
    if is_mirrored(model):
        return capacity_marginal(model)
    raise ValueError(f"independent-sum constituents must be one-sided, got {model!r}")


def independent_sum_parts(model1, model2, n: int, seed: int) -> SumParts:
    """Two undirected samples with independent capacity sequences, summed.

    Constituent capacities are drawn independently from model1 and model2
    (marginals or mirrored models with a common mean mu), both normalized
    by L = mu * n.  The first constituent is oriented toward the higher
    index, the second toward the lower, and the arc multisets are summed.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    m1, m2 = _one_sided_capacity(model1), _one_sided_capacity(model2)
    mu1, mu2 = m1.mean(), m2.mean()
    if not math.isclose(mu1, mu2, rel_tol=1e-9):
        raise ValueError(f"constituent means must agree, got {mu1} vs {mu2}")
    l_n = mu1 * n
    cap1 = m1.from_uniform(stream(seed, "indep-capacity", 1).random(n))
    cap2 = m2.from_uniform(stream(seed, "indep-capacity", 2).random(n))
    s1, d1 = _nr_oriented_arcs(cap1, l_n, "higher", stream(seed, "indep-sum", 1))
    s2, d2 = _nr_oriented_arcs(cap2, l_n, "lower", stream(seed, "indep-sum", 2))
    first = MultiDigraph(n, s1, d1, np.ones(s1.size, dtype=np.int64))
    second = MultiDigraph(n, s2, d2, np.ones(s2.size, dtype=np.int64))
    graph = MultiDigraph(
        n,
        np.concatenate([s1, s2]),
        np.concatenate([d1, d2]),
        np.ones(s1.size + s2.size, dtype=np.int64),
    )
    return SumParts(graph=graph, first=first, second=second)


def sample_independent_sum(model1, model2, n: int, seed: int) -> MultiDigraph:
    """Arc sum of two independently weighted, oppositely oriented samples."""
    return independent_sum_parts(model1, model2, n, seed).graph

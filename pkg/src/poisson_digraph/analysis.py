"""Distributional checks for sampled graphs.

Contains the exact total-variation distance between Poisson laws, the
mixed-Poisson degree prediction (joint in/out pmf and tail), goodness-of-fit
tests for degrees and loop totals, conditional per-vertex degree rates at
fixed weights, and a resampling test quantifying the dependence between the
degrees of a fixed set of tracked vertices.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .digraph import MultiDigraph
from .structure import degree_arrays
from .streams import stream
from .weights import (
    Constant,
    ConstantMarginal,
    IndependentProduct,
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
    "poisson_tv",
    "Pmf",
    "mixed_poisson_pmf",
    "mixed_poisson_tail",
    "DegreeFitResult",
    "degree_fit_test",
    "ConditionalDegreeParams",
    "conditional_degree_params",
    "IndependenceResult",
    "independence_test",
    "LoopTestResult",
    "loop_test",
    "ChiSquareResult",
    "poisson_chisquare",
    "product_poisson_chisquare",
    "empirical_tv",
    "mixing_pairs",
]


# -- exact Poisson total variation --------------------------------------------


def poisson_tv(u: float, lam: float) -> float:
    """Total-variation distance between Poisson(u) and Poisson(lam).

    Computed as half the l1 distance of the pmfs on 0..J plus the tail
    difference, where J is grown until both survival functions at J are
    below 5e-13; the neglected mass then bounds the absolute error by
    1e-12.  Rate 0 denotes the unit mass at zero, so
    poisson_tv(0, u) = 1 - exp(-u).
    """
    for r in (u, lam):
        if not (r >= 0 and math.isfinite(r)):
            raise ValueError(f"rates must be finite and nonnegative, got {r}")
    if u == lam:
        return 0.0
    hi = max(u, lam)
    j_max = int(hi + 12.0 * math.sqrt(hi + 1.0)) + 30
    while stats.poisson.sf(j_max, u) + stats.poisson.sf(j_max, lam) > 1e-12:
        j_max *= 2
    j = np.arange(j_max + 1)
    body = np.abs(stats.poisson.pmf(j, u) - stats.poisson.pmf(j, lam)).sum()
    tail = abs(stats.poisson.sf(j_max, u) - stats.poisson.sf(j_max, lam))
    return float(min(0.5 * (body + tail), 1.0))


# -- mixed-Poisson degree law -------------------------------------------------


def mixing_pairs(model: WeightModel, size: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """A quadrature sample (w_in, w_out) from the weight-pair law.

    Degenerate models return a single atom, which makes downstream sample
    means exact; otherwise ``size`` i.i.d. pairs are drawn from a stream
    independent of the graph-weight stream.
    """
    if isinstance(model, Constant):
        atom = np.array([model.c])
        return atom, atom
    if isinstance(model, IndependentProduct) and all(
        isinstance(m, ConstantMarginal) for m in (model.marginal_in, model.marginal_out)
    ):
        return np.array([model.marginal_in.value]), np.array([model.marginal_out.value])
    if is_mirrored(model) and isinstance(capacity_marginal(model), ConstantMarginal):
        atom = np.array([capacity_marginal(model).value])
        return atom, atom
    if size < 1:
        raise ValueError(f"size must be >= 1, got {size}")
    u = stream(seed, "mixing").random((size, 2))
    if isinstance(model, IndependentProduct):
        return model.marginal_in.from_uniform(u[:, 0]), model.marginal_out.from_uniform(u[:, 1])
    cap = capacity_marginal(model).from_uniform(u[:, 0])
    return cap, cap


@dataclass(frozen=True)
class Pmf:
    """Joint law of (d_in, d_out) truncated to a square grid.

    masses[j, k] = P(d_in = j, d_out = k) for j, k <= kmax; tail_mass is
    the probability outside the grid, so masses.sum() + tail_mass = 1.
    """

    masses: np.ndarray
    tail_mass: float

    def __post_init__(self):
        if self.masses.ndim != 2 or np.any(self.masses < -1e-15):
            raise ValueError("masses must be a nonnegative 2-d array")
        total = float(self.masses.sum()) + self.tail_mass
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"masses plus tail must sum to 1, got {total}")

    @property
    def kmax(self) -> int:
        return self.masses.shape[0] - 1


def mixed_poisson_pmf(
    model: WeightModel, kmax: int, mc_samples: int = 200_000, seed: int = 0
) -> Pmf:
    """Limiting joint degree pmf E[Poisson(w_in) x Poisson(w_out)].

    Exact for models with a degenerate mixing law; otherwise a Monte Carlo
    average of the conditional product pmfs over ``mc_samples`` weight
    pairs (seeded, fixed quadrature).
    """
    if kmax < 0:
        raise ValueError(f"kmax must be >= 0, got {kmax}")
    w_in, w_out = mixing_pairs(model, mc_samples, seed)
    k = np.arange(kmax + 1)
    joint = np.zeros((kmax + 1, kmax + 1))
    chunk = max(1, 20_000_000 // (4 * (kmax + 1)))
    for lo in range(0, w_in.size, chunk):
        hi = min(w_in.size, lo + chunk)
        pin = stats.poisson.pmf(k[None, :], w_in[lo:hi, None])
        pout = stats.poisson.pmf(k[None, :], w_out[lo:hi, None])
        joint += np.einsum("sj,sk->jk", pin, pout)
    joint /= w_in.size
    tail = max(0.0, 1.0 - float(joint.sum()))
    return Pmf(masses=joint, tail_mass=tail)


def mixed_poisson_tail(
    model: WeightModel,
    ks: np.ndarray,
    side: str = "in",
    mc_samples: int = 1_000_000,
    seed: int = 0,
) -> np.ndarray:
    """Marginal tail P(d >= k) of the limiting in- or out-degree law."""
    if side not in ("in", "out"):
        raise ValueError(f"side must be 'in' or 'out', got {side!r}")
    w_in, w_out = mixing_pairs(model, mc_samples, seed)
    w = w_in if side == "in" else w_out
    ks = np.asarray(ks, dtype=np.int64)
    acc = np.zeros(ks.size)
    chunk = max(1, 20_000_000 // max(1, ks.size))
    for lo in range(0, w.size, chunk):
        hi = min(w.size, lo + chunk)
        acc += stats.poisson.sf(ks[None, :] - 1, w[lo:hi, None]).sum(axis=0)
    return acc / w.size


# -- degree goodness of fit ---------------------------------------------------


@dataclass(frozen=True)
class DegreeFitResult:
    statistic: float
    threshold: float
    passed: bool
    n: int
    kmax: int
    empirical_tail: float
    model_tail: float


def degree_fit_test(
    g: MultiDigraph,
    model: WeightModel,
    kmax: int = 50,
    threshold: float = 0.01,
    mc_samples: int = 200_000,
    seed: int = 0,
) -> DegreeFitResult:
    """Compare the empirical joint (d_in, d_out) pmf to the mixed-Poisson limit.

    The statistic is the total variation on the truncated grid with all
    overflow lumped into one cell, a lower bound of the full TV.  Degrees
    exclude loops.  The comparison is asymptotic in n; a warning is issued
    for n below 1000.
    """
    if g.n < 1000:
        warnings.warn(
            f"degree fit is an asymptotic test; n={g.n} gives little power",
            stacklevel=2,
        )
    arr = degree_arrays(g)
    d_in = np.minimum(arr.d_in, kmax + 1)
    d_out = np.minimum(arr.d_out, kmax + 1)
    emp = np.zeros((kmax + 2, kmax + 2))
    np.add.at(emp, (d_in, d_out), 1.0)
    emp /= g.n
    emp_grid = emp[: kmax + 1, : kmax + 1]
    emp_tail = float(1.0 - emp_grid.sum())
    theory = mixed_poisson_pmf(model, kmax, mc_samples=mc_samples, seed=seed)
    statistic = 0.5 * (
        float(np.abs(emp_grid - theory.masses).sum()) + abs(emp_tail - theory.tail_mass)
    )
    return DegreeFitResult(
        statistic=statistic,
        threshold=threshold,
        passed=statistic < threshold,
        n=g.n,
        kmax=kmax,
        empirical_tail=emp_tail,
        model_tail=theory.tail_mass,
    )


# -- conditional degree rates at fixed weights --------------------------------


@dataclass(frozen=True)
class ConditionalDegreeParams:
    """Poisson rates of (d_in, d_out, total degree) of one vertex given weights.

    Forced by the arc law: d_in(v) sums Poisson arcs from all u != v, so its
    rate is w_in(v) (sum w_out - w_out(v)) / L; symmetrically for d_out; the
    total adds the loop rate w_in(v) w_out(v) / L once.
    """

    lam_in: float
    lam_out: float
    lam_total: float


def conditional_degree_params(
    w: WeightSequence, l_n: float, v: int
) -> ConditionalDegreeParams:
    if not (l_n > 0 and math.isfinite(l_n)):
        raise ValueError(f"normalizer must be positive and finite, got {l_n}")
    pair = w.pair(v)
    lam_in = pair.w_in * (w.sum_out - pair.w_out) / l_n
    lam_out = pair.w_out * (w.sum_in - pair.w_in) / l_n
    lam_total = lam_in + lam_out + pair.w_in * pair.w_out / l_n
    return ConditionalDegreeParams(lam_in=lam_in, lam_out=lam_out, lam_total=lam_total)


# -- dependence between tracked vertices --------------------------------------


@dataclass(frozen=True)
class IndependenceResult:
    statistic: float
    n: int
    k: int
    reps: int
    pairwise: dict = field(repr=False)


def independence_test(
    model: WeightModel,
    n: int,
    k: int,
    reps: int = 1_000_000,
    seed: int = 0,
    mode: NormalizerMode = NormalizerMode.DETERMINISTIC_MU_N,
) -> IndependenceResult:
    """Dependence between the joint degrees of k tracked vertices.

    Weights are realized once; the graph is then resampled ``reps`` times
    and the joint law of the tracked (d_in, d_out) vectors is compared to
    the product of their marginals.  The statistic is the maximum, over
    tracked pairs, of the total variation between the empirical joint pmf
    and the product of empirical marginals on the observed support.

    Only arcs among tracked vertices couple their degrees, so the
    resampling draws exactly those O(k^2) shared Poisson counts plus one
    independent Poisson remainder per degree; this reproduces the joint
    conditional law of the tracked degrees without materializing graphs.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if k == 1:
        return IndependenceResult(statistic=0.0, n=n, k=k, reps=reps, pairwise={})
    w = sample_weights(model, n, seed)
    l_n = normalizer(w, moments(model).mu, mode)
    tracked = np.arange(k)
    wi, wo = w.w_in[tracked], w.w_out[tracked]
    out_rest = w.sum_out - wo.sum()
    in_rest = w.sum_in - wi.sum()
    # off-diagonal tracked-block rates, row = source, column = target
    block_rates = np.outer(wo, wi) / l_n
    np.fill_diagonal(block_rates, 0.0)
    rng = stream(seed, "independence")
    d_in = np.empty((reps, k), dtype=np.int64)
    d_out = np.empty((reps, k), dtype=np.int64)
    chunk = max(1, 40_000_000 // (k * k + 2 * k))
    for lo in range(0, reps, chunk):
        hi = min(reps, lo + chunk)
        m = hi - lo
        block = rng.poisson(block_rates, size=(m, k, k))
        d_in[lo:hi] = rng.poisson(wi * out_rest / l_n, size=(m, k)) + block.sum(axis=1)
        d_out[lo:hi] = rng.poisson(wo * in_rest / l_n, size=(m, k)) + block.sum(axis=2)
    base = int(max(d_in.max(), d_out.max())) + 1
    codes = d_in * base + d_out
    pairwise = {}
    best = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            ci, inv_i = np.unique(codes[:, i], return_inverse=True)
            cj, inv_j = np.unique(codes[:, j], return_inverse=True)
            joint = np.zeros((ci.size, cj.size))
            np.add.at(joint, (inv_i, inv_j), 1.0)
            joint /= reps
            prod = np.outer(joint.sum(axis=1), joint.sum(axis=0))
            tv = 0.5 * float(np.abs(joint - prod).sum())
            pairwise[(i + 1, j + 1)] = tv
            best = max(best, tv)
    return IndependenceResult(statistic=best, n=n, k=k, reps=reps, pairwise=pairwise)


# -- loop totals --------------------------------------------------------------


@dataclass(frozen=True)
class LoopTestResult:
    observed_mean: float
    expected_mean: float
    z: float
    chi2_pvalue: float
    passed: bool
    reps: int


def loop_test(
    model: WeightModel,
    n: int,
    reps: int = 10_000,
    seed: int = 0,
    mode: NormalizerMode = NormalizerMode.DETERMINISTIC_MU_N,
    alpha: float = 0.01,
) -> LoopTestResult:
    """Total loop count over independent graphs against Poisson(rho / mu).

    Each replicate redraws weights and the loop total, whose conditional
    law is Poisson(sum w_in w_out / L); the within-replicate off-diagonal
    arcs never contribute and are not sampled.  Refuses models with
    rho = E[w_in w_out] infinite, where no limit law exists.
    """
    mom = moments(model)
    if not math.isfinite(mom.rho):
        raise ValueError(
            "E[w_in * w_out] is infinite for this model (mirrored tail exponent"
            " tau <= 3); the loop total has no limiting Poisson law"
        )
    expected = mom.rho / mom.mu
    rng = stream(seed, "loop-test")
    wi_atom, wo_atom = mixing_pairs(model, 1, seed) if _degenerate(model) else (None, None)
    totals = np.empty(reps, dtype=np.int64)
    if wi_atom is not None:
        w = WeightSequence(np.full(n, wi_atom[0]), np.full(n, wo_atom[0]))
        rate = w.sum_products / normalizer(w, mom.mu, mode)
        totals[:] = rng.poisson(rate, size=reps)
    else:
        chunk = max(1, 2_000_000 // n)
        for lo in range(0, reps, chunk):
            hi = min(reps, lo + chunk)
            u = rng.random((hi - lo, n, 2))
            rates = np.empty(hi - lo)
            for r in range(hi - lo):
                w = _weights_from_uniforms(model, u[r])
                rates[r] = w.sum_products / normalizer(w, mom.mu, mode)
            totals[lo:hi] = rng.poisson(rates)
    chi2 = poisson_chisquare(totals, expected)
    sd = float(totals.std(ddof=1)) if reps > 1 else float("nan")
    z = (float(totals.mean()) - expected) / (sd / math.sqrt(reps)) if sd > 0 else 0.0
    return LoopTestResult(
        observed_mean=float(totals.mean()),
        expected_mean=expected,
        z=float(z),
        chi2_pvalue=chi2.pvalue,
        passed=chi2.pvalue >= alpha and abs(z) <= 3.0,
        reps=reps,
    )


def _degenerate(model: WeightModel) -> bool:
    # mixing_pairs collapses to a single atom only for constant models
    wi, _ = mixing_pairs(model, 2, 0)
    return wi.size == 1


def _weights_from_uniforms(model: WeightModel, u: np.ndarray) -> WeightSequence:
    if isinstance(model, IndependentProduct):
        return WeightSequence(
            model.marginal_in.from_uniform(u[:, 0]),
            model.marginal_out.from_uniform(u[:, 1]),
        )
    cap = capacity_marginal(model).from_uniform(u[:, 0])
    return WeightSequence(cap, cap)


# -- chi-square and empirical-TV helpers --------------------------------------


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    pvalue: float
    dof: int
    bins: int


def poisson_chisquare(
    samples: np.ndarray, rate: float, min_expected: float = 5.0
) -> ChiSquareResult:
    """Chi-square test of integer samples against Poisson(rate).

    Cells are merged left to right until each expected count reaches
    ``min_expected``; the final cell absorbs the upper tail.
    """
    samples = np.asarray(samples, dtype=np.int64)
    r = samples.size
    if r == 0:
        raise ValueError("need at least one sample")
    j_max = int(samples.max())
    observed = np.bincount(samples, minlength=j_max + 1).astype(np.float64)
    probs = stats.poisson.pmf(np.arange(j_max + 1), rate)
    tail = float(stats.poisson.sf(j_max, rate))
    obs_bins: list[float] = []
    p_bins: list[float] = []
    acc_o = acc_p = 0.0
    for o, p in zip(observed, probs):
        acc_o += o
        acc_p += p
        if acc_p * r >= min_expected:
            obs_bins.append(acc_o)
            p_bins.append(acc_p)
            acc_o = acc_p = 0.0
    # remainder plus the analytic tail go into the last bin
    acc_p += tail
    if obs_bins and acc_p * r < min_expected:
        obs_bins[-1] += acc_o
        p_bins[-1] += acc_p
    else:
        obs_bins.append(acc_o)
        p_bins.append(acc_p)
    if len(obs_bins) < 2:
        raise ValueError(f"rate {rate} leaves fewer than two cells at this sample size")
    stat, pvalue = stats.chisquare(obs_bins, np.array(p_bins) * r)
    return ChiSquareResult(
        statistic=float(stat), pvalue=float(pvalue), dof=len(obs_bins) - 1, bins=len(obs_bins)
    )


def product_poisson_chisquare(
    samples: np.ndarray, rates: np.ndarray, min_expected: float = 5.0
) -> ChiSquareResult:
    """Chi-square of joint integer vectors against a product-Poisson law.

    ``samples`` has shape (r, k); cell probabilities are products of the
    coordinate pmfs on a grid covering all but 1e-9 of the mass, with all
    low-expectation cells and the off-grid remainder merged into one bin.
    """
    samples = np.asarray(samples, dtype=np.int64)
    if samples.ndim != 2:
        raise ValueError("samples must have shape (r, k)")
    r, k = samples.shape
    rates = np.asarray(rates, dtype=np.float64)
    if rates.shape != (k,):
        raise ValueError(f"rates must have shape ({k},)")
    uppers = [int(stats.poisson.isf(1e-9 / k, rate)) + 1 for rate in rates]
    grid_p = np.ones(1)
    for rate, upper in zip(rates, uppers):
        grid_p = np.multiply.outer(grid_p, stats.poisson.pmf(np.arange(upper + 1), rate))
    grid_p = grid_p.reshape(-1)
    in_grid = np.all(samples <= np.array(uppers), axis=1)
    codes = np.zeros(r, dtype=np.int64)
    for c, upper in enumerate(uppers):
        codes = codes * (upper + 1) + np.minimum(samples[:, c], upper)
    observed = np.bincount(codes[in_grid], minlength=grid_p.size).astype(np.float64)
    rest_obs = float(r - observed.sum())
    keep = grid_p * r >= min_expected
    rest_p = float(1.0 - grid_p[keep].sum())
    rest_obs += float(observed[~keep].sum())
    obs_bins = np.append(observed[keep], rest_obs)
    p_bins = np.append(grid_p[keep], rest_p)
    if p_bins[-1] * r < min_expected and p_bins.size > 1:
        p_bins[-2] += p_bins[-1]
        obs_bins[-2] += obs_bins[-1]
        obs_bins, p_bins = obs_bins[:-1], p_bins[:-1]
    if p_bins.size < 2:
        raise ValueError("fewer than two cells left after merging")
    stat, pvalue = stats.chisquare(obs_bins, p_bins * r)
    return ChiSquareResult(
        statistic=float(stat), pvalue=float(pvalue), dof=p_bins.size - 1, bins=p_bins.size
    )


def empirical_tv(xs: np.ndarray, ys: np.ndarray) -> float:
    """Total variation between the empirical pmfs of two integer samples."""
    xs = np.asarray(xs).reshape(-1)
    ys = np.asarray(ys).reshape(-1)
    values = np.union1d(xs, ys)
    px = np.bincount(np.searchsorted(values, xs), minlength=values.size) / xs.size
    py = np.bincount(np.searchsorted(values, ys), minlength=values.size) / ys.size
    return 0.5 * float(np.abs(px - py).sum())

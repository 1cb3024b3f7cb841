"""Statistical primitives shared by the agent- and group-level tests.

Permutation p-values, the paired energy statistic, distance correlation
and its permutation test, Hotelling's T-squared (two-sample and paired),
Fisher's combination, Kendall's tau-b and Wilson intervals.
"""

import logging
from collections.abc import Sequence
from typing import Union

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg
from scipy import stats as scipy_stats
from scipy.spatial.distance import cdist

from src.domain.entities.arrays import FloatArray
from src.domain.entities.test_result import TestResult
from src.domain.exceptions import (
    DegenerateGroupError,
    InvalidArgumentError,
    SingularCovarianceError,
    ZeroVarianceError,
)
from src.domain.services.streams import SeedLike, derive_stream, map_ordered

logger = logging.getLogger(__name__)

# Relative size below which a mean difference counts as exactly zero.
_ZERO_SHIFT_TOLERANCE = 1e-10


def perm_pvalue(
    observed: float, nulls: Union[Sequence[float], FloatArray], two_tailed: bool = False
) -> float:
    """Permutation p-value (1 + #{null >= observed}) / (1 + B).

    Ties count as exceedances. The two-tailed form compares absolute values.

    Raises:
        InvalidArgumentError: If ``nulls`` is empty or any input is not finite
    """
    null_array = np.asarray(nulls, dtype=np.float64)
    if null_array.size == 0:
        raise InvalidArgumentError("permutation null sample is empty")
    if not np.isfinite(observed) or not np.all(np.isfinite(null_array)):
        raise InvalidArgumentError("permutation statistics must be finite")
    if two_tailed:
        exceed = np.abs(null_array) >= abs(observed)
    else:
        exceed = null_array >= observed
    return float((1 + int(np.count_nonzero(exceed))) / (1 + null_array.size))


def energy_distance(
    dist: FloatArray,
    idx_t: Union[Sequence[int], FloatArray],
    idx_t2: Union[Sequence[int], FloatArray],
    include_same_agent_cross: bool = False,
) -> float:
    """Paired energy statistic 2 * Dbar_tt' - Dbar_t - Dbar_t'.

    Each average runs over ordered pairs n != n' with denominator
    n_l (n_l - 1). With ``include_same_agent_cross`` the cross term runs
    over all n_l^2 pairs instead, which is the textbook energy distance.

    Args:
        dist: Precomputed distance matrix over the group's slots
        idx_t: Row of each agent's slot at the first timepoint
        idx_t2: Row of each agent's slot at the second timepoint, same order

    Raises:
        DegenerateGroupError: If fewer than two agents are given
    """
    first = np.asarray(idx_t, dtype=np.intp)
    second = np.asarray(idx_t2, dtype=np.intp)
    n = first.shape[0]
    if n < 2 or second.shape[0] != n:
        raise DegenerateGroupError(
            f"energy distance needs two equal index sets of size >= 2, got {n}"
        )
    pairs = n * (n - 1)
    within_first = dist[np.ix_(first, first)]
    within_second = dist[np.ix_(second, second)]
    cross = dist[np.ix_(first, second)]
    mean_first = (within_first.sum() - np.trace(within_first)) / pairs
    mean_second = (within_second.sum() - np.trace(within_second)) / pairs
    if include_same_agent_cross:
        mean_cross = cross.sum() / (n * n)
    else:
        mean_cross = (cross.sum() - np.trace(cross)) / pairs
    return float(2.0 * mean_cross - mean_first - mean_second)


def _as_samples(values: ArrayLike) -> FloatArray:
    array = np.asarray(values, dtype=np.float64)
    if array.ndim == 1:
        array = array[:, np.newaxis]
    return array


def _centered_distances(samples: FloatArray) -> FloatArray:
    """Double-centered Euclidean distance matrix of the rows of ``samples``."""
    d = cdist(samples, samples)
    centered: FloatArray = (
        d - d.mean(axis=0)[np.newaxis, :] - d.mean(axis=1)[:, np.newaxis] + d.mean()
    )
    return centered


def _dcor_from_centered(a: FloatArray, b: FloatArray, var_a: float, var_b: float) -> float:
    dcov_sq = float(np.mean(a * b))
    return float(np.sqrt(max(dcov_sq, 0.0) / np.sqrt(var_a * var_b)))


def _prepare_dcor(x: ArrayLike, y: ArrayLike) -> tuple[FloatArray, FloatArray, float, float]:
    xs, ys = _as_samples(x), _as_samples(y)
    if xs.shape[0] != ys.shape[0] or xs.shape[0] < 2:
        raise InvalidArgumentError(
            f"distance correlation needs equal row counts >= 2, got "
            f"{xs.shape[0]} and {ys.shape[0]}"
        )
    a, b = _centered_distances(xs), _centered_distances(ys)
    var_a, var_b = float(np.mean(a * a)), float(np.mean(b * b))
    if var_a <= 0.0 or var_b <= 0.0:
        raise ZeroVarianceError("distance variance of a sample is zero")
    return a, b, var_a, var_b


def distance_correlation(x: ArrayLike, y: ArrayLike) -> float:
    """Sample distance correlation (V-statistic form), in [0, 1].

    Raises:
        InvalidArgumentError: If row counts differ or are below two
        ZeroVarianceError: If either sample has zero distance variance
    """
    a, b, var_a, var_b = _prepare_dcor(x, y)
    return min(1.0, _dcor_from_centered(a, b, var_a, var_b))


def dcorr_perm_test(
    x: ArrayLike,
    y: ArrayLike,
    n_permutations: int,
    seed: SeedLike,
    threads: int = 1,
    keep_null: bool = False,
) -> TestResult:
    """Distance-correlation independence test with a row-permutation null.

    Permutation b shuffles the rows of ``y`` with the substream (seed, b).
    """
    if n_permutations < 1:
        raise InvalidArgumentError("at least one permutation is required")
    a, b, var_a, var_b = _prepare_dcor(x, y)
    observed = min(1.0, _dcor_from_centered(a, b, var_a, var_b))
    rows = a.shape[0]

    def permuted(index: int) -> float:
        order = derive_stream(seed, index).permutation(rows)
        return min(1.0, _dcor_from_centered(a, b[np.ix_(order, order)], var_a, var_b))

    nulls = map_ordered(permuted, range(n_permutations), threads)
    return TestResult(
        statistic=observed,
        p_value=perm_pvalue(observed, nulls),
        n_permutations=n_permutations,
        null_sample=tuple(nulls) if keep_null else None,
        method_name="dcorr",
    )


def _is_zero_shift(diff: FloatArray, *samples: FloatArray) -> bool:
    scale = 1.0 + max(float(np.max(np.abs(s), initial=0.0)) for s in samples)
    return float(np.max(np.abs(diff), initial=0.0)) <= _ZERO_SHIFT_TOLERANCE * scale


def _quadratic_form(covariance: FloatArray, vector: FloatArray) -> float:
    """vector^T covariance^{-1} vector, refusing singular covariances."""
    k = covariance.shape[0]
    if np.linalg.matrix_rank(covariance) < k:
        raise SingularCovarianceError("covariance matrix is singular")
    try:
        solved = linalg.solve(covariance, vector, assume_a="pos")
    except (linalg.LinAlgError, ValueError) as e:
        raise SingularCovarianceError(f"covariance matrix is not invertible: {e}") from e
    return float(vector @ solved)


def hotelling_two_sample(sample_a: ArrayLike, sample_b: ArrayLike) -> TestResult:
    """Two-sample Hotelling T-squared test with pooled covariance.

    T^2 = n1 n2 / (n1 + n2) * d^T S_pooled^{-1} d, converted to
    F = (n1 + n2 - k - 1) / ((n1 + n2 - 2) k) * T^2 on (k, n1 + n2 - k - 1)
    degrees of freedom.

    Raises:
        InvalidArgumentError: If n1 + n2 - 2 <= k
        SingularCovarianceError: If the pooled covariance is singular
    """
    a, b = _as_samples(sample_a), _as_samples(sample_b)
    if a.shape[1] != b.shape[1]:
        raise InvalidArgumentError("samples must share the same dimension")
    n1, n2, k = a.shape[0], b.shape[0], a.shape[1]
    if n1 + n2 - 2 <= k or n1 < 1 or n2 < 1:
        raise InvalidArgumentError(
            f"Hotelling two-sample test needs n1 + n2 - 2 > k (n1={n1}, n2={n2}, k={k})"
        )
    diff = a.mean(axis=0) - b.mean(axis=0)
    if _is_zero_shift(diff, a, b):
        return TestResult(statistic=0.0, p_value=1.0, method_name="hotelling_two_sample")
    pooled = (
        (n1 - 1) * np.atleast_2d(np.cov(a, rowvar=False))
        + (n2 - 1) * np.atleast_2d(np.cov(b, rowvar=False))
    ) / (n1 + n2 - 2)
    t_squared = (n1 * n2 / (n1 + n2)) * _quadratic_form(pooled, diff)
    dof = n1 + n2 - k - 1
    f_stat = dof / ((n1 + n2 - 2) * k) * t_squared
    p_value = float(scipy_stats.f.sf(f_stat, k, dof))
    return TestResult(
        statistic=t_squared,
        p_value=min(1.0, max(p_value, np.finfo(np.float64).tiny)),
        method_name="hotelling_two_sample",
    )


def hotelling_paired(diffs: ArrayLike) -> TestResult:
    """Paired Hotelling T-squared test on within-agent difference vectors.

    T^2 = n * dbar^T S_D^{-1} dbar, converted to
    F = (n - k) / ((n - 1) k) * T^2 on (k, n - k) degrees of freedom.

    Raises:
        InvalidArgumentError: If n <= k
        SingularCovarianceError: If the difference covariance is singular
    """
    d = _as_samples(diffs)
    n, k = d.shape
    if n <= k:
        raise InvalidArgumentError(f"paired Hotelling test needs n > k (n={n}, k={k})")
    mean = d.mean(axis=0)
    if _is_zero_shift(mean, d):
        return TestResult(statistic=0.0, p_value=1.0, method_name="hotelling_paired")
    covariance = np.atleast_2d(np.cov(d, rowvar=False))
    t_squared = n * _quadratic_form(covariance, mean)
    f_stat = (n - k) / ((n - 1) * k) * t_squared
    p_value = float(scipy_stats.f.sf(f_stat, k, n - k))
    return TestResult(
        statistic=t_squared,
        p_value=min(1.0, max(p_value, np.finfo(np.float64).tiny)),
        method_name="hotelling_paired",
    )


def fisher_statistic(pvals: Sequence[float]) -> float:
    """Fisher's chi-squared statistic -2 sum log p."""
    values = np.asarray(pvals, dtype=np.float64)
    if values.size == 0:
        raise InvalidArgumentError("Fisher's method needs at least one p-value")
    if np.any(values <= 0.0) or np.any(values > 1.0):
        raise InvalidArgumentError("p-values must lie in (0, 1]")
    return float(-2.0 * np.log(values).sum())


def fisher_combine(pvals: Sequence[float]) -> float:
    """Combined p-value: upper tail of chi-squared with 2M dof at -2 sum log p.

    The tail is floored at the smallest positive double so that very strong
    combined evidence still yields a valid p-value.
    """
    statistic = fisher_statistic(pvals)
    p_value = float(scipy_stats.chi2.sf(statistic, 2 * len(pvals)))
    return min(1.0, max(p_value, np.finfo(np.float64).tiny))


def _tie_sums(values: FloatArray) -> tuple[float, float, float]:
    _, counts = np.unique(values, return_counts=True)
    c = counts.astype(np.float64)
    return (
        float((c * (c - 1)).sum()),
        float((c * (c - 1) * (c - 2)).sum()),
        float((c * (c - 1) * (2 * c + 5)).sum()),
    )


def kendall_tau(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Kendall's tau-b with a continuity-corrected normal-approximation p-value.

    Returns:
        Tuple of (tau, two-sided p-value)

    Raises:
        InvalidArgumentError: If lengths differ or fewer than two pairs exist
        ZeroVarianceError: If x or y is entirely tied
    """
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    n = xs.shape[0]
    if n < 2 or ys.shape[0] != n:
        raise InvalidArgumentError("Kendall's tau needs two equal-length samples, n >= 2")
    upper = np.triu_indices(n, k=1)
    dx = np.sign(xs[:, np.newaxis] - xs[np.newaxis, :])[upper]
    dy = np.sign(ys[:, np.newaxis] - ys[np.newaxis, :])[upper]
    score = float((dx * dy).sum())

    pairs = n * (n - 1) / 2.0
    ties_x = float(np.count_nonzero(dx == 0))
    ties_y = float(np.count_nonzero(dy == 0))
    if ties_x == pairs or ties_y == pairs:
        raise ZeroVarianceError("Kendall's tau is undefined for an all-tied sample")
    tau = score / np.sqrt((pairs - ties_x) * (pairs - ties_y))

    v1x, v2x, vtx = _tie_sums(xs)
    v1y, v2y, vty = _tie_sums(ys)
    variance = (n * (n - 1) * (2 * n + 5) - vtx - vty) / 18.0
    variance += v1x * v1y / (2.0 * n * (n - 1))
    if n > 2:
        variance += v2x * v2y / (9.0 * n * (n - 1) * (n - 2))
    corrected = max(abs(score) - 1.0, 0.0)
    z = corrected / np.sqrt(variance)
    p_value = min(1.0, float(2.0 * scipy_stats.norm.sf(z)))
    return float(tau), p_value


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1 or not 0 <= successes <= trials:
        raise InvalidArgumentError(f"invalid binomial counts {successes}/{trials}")
    interval = scipy_stats.binomtest(successes, trials).proportion_ci(
        confidence_level=confidence, method="wilson"
    )
    return max(0.0, float(interval.low)), min(1.0, float(interval.high))

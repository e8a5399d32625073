"""Delta-method covariance estimation for measure estimates.

Each target (rule, measure) gets an influence vector: the per-row linear
combination ``d_za * Z*A + d_a * A + d_z * Z`` with the measure gradient
evaluated at the sample moments.  The sample covariance of these vectors
(denominator ``n - 1``) estimates the asymptotic covariance ``V`` of the
scaled estimation errors ``sqrt(n) * (estimate - truth)``; dividing by
``n`` gives standard errors.

Two variance choices are offered:

* plug-in (uncorrected): the sample covariance as-is.  It collapses to
  zero on degenerate samples (a rule perfect on the data, or a rare
  event never observed), which both kills the interval and, near the
  boundary, undercovers.
* corrected: add ``||gradient||^2 * z_{1-alpha/2}^2 / (2 n)`` to each
  diagonal entry.  The addend shrinks at the same ``1/n`` rate as the
  variance itself, so nothing changes asymptotically, but the diagonal
  stays strictly positive whenever the gradient is nonzero.  For the
  accuracy measure this reproduces the familiar add-a-few-successes
  interval adjustment.

A diagonal entry that is zero up to floating tolerance is snapped to
exactly zero here, so downstream code can test degeneracy with a plain
comparison and raise :class:`~perfci.errors.SingularVarianceError`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import BinaryDataset, EvaluationTarget, compute_moments
from .errors import DimensionMismatchError, SingularVarianceError
from .measures import GradientTriple, MeasureCatalog, MomentTriple, resolve_measure
from .quantiles import inv_norm_cdf

__all__ = [
    "InfluenceVector",
    "CovarianceEstimate",
    "CorrelationMatrix",
    "influence",
    "covariance_matrix",
    "covariance_from_influences",
    "blurring_matrix",
    "correct",
    "correlation",
]

# relative scale below which a sample variance is considered exactly zero
_ZERO_SNAP = 1e-12


@dataclass(frozen=True, eq=False)
class InfluenceVector:
    """Per-row influence values for one target, plus the pieces that
    produced them (sample moments, gradient, point estimate)."""

    target: EvaluationTarget
    values: np.ndarray
    moments: MomentTriple
    gradient: GradientTriple
    estimate: float


@dataclass(frozen=True, eq=False)
class CovarianceEstimate:
    """A ``K x K`` covariance matrix of scaled estimation errors.

    ``d_diag`` holds the per-target correction addends (all zero when
    ``corrected`` is False); ``alpha`` records the level the correction
    was built for, ``None`` when uncorrected.
    """

    v: np.ndarray
    n: int
    corrected: bool = False
    d_diag: np.ndarray = field(default=None)  # type: ignore[assignment]
    alpha: float | None = None

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DimensionMismatchError(f"covariance must be square, got {v.shape}")
        object.__setattr__(self, "v", v)
        if self.d_diag is None:
            object.__setattr__(self, "d_diag", np.zeros(v.shape[0]))
        else:
            d = np.asarray(self.d_diag, dtype=float)
            if d.shape != (v.shape[0],):
                raise DimensionMismatchError(
                    f"d_diag shape {d.shape} does not match covariance {v.shape}"
                )
            object.__setattr__(self, "d_diag", d)

    @property
    def dim(self) -> int:
        return self.v.shape[0]

    def restrict(self, indices: Sequence[int]) -> "CovarianceEstimate":
        """Sub-matrix for an ordered subset of targets."""
        idx = np.asarray(list(indices), dtype=int)
        return CovarianceEstimate(
            v=self.v[np.ix_(idx, idx)],
            n=self.n,
            corrected=self.corrected,
            d_diag=self.d_diag[idx],
            alpha=self.alpha,
        )


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Validated correlation matrix: symmetric, unit diagonal, entries
    clamped into ``[-1, 1]``."""

    values: np.ndarray

    def __post_init__(self):
        r = np.array(self.values, dtype=float, copy=True)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise DimensionMismatchError(f"correlation must be square, got {r.shape}")
        if not np.all(np.isfinite(r)):
            raise ValueError("correlation matrix has non-finite entries")
        if np.max(np.abs(r - r.T)) > 1e-8:
            raise ValueError("correlation matrix must be symmetric")
        if np.max(np.abs(np.diagonal(r) - 1.0)) > 1e-8:
            raise ValueError("correlation matrix diagonal must be all ones")
        if np.max(np.abs(r)) > 1.0 + 1e-8:
            raise ValueError("correlation entries must lie in [-1, 1]")
        r = 0.5 * (r + r.T)
        np.clip(r, -1.0, 1.0, out=r)
        np.fill_diagonal(r, 1.0)
        object.__setattr__(self, "values", r)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def influence(
    data: BinaryDataset,
    target: EvaluationTarget,
    catalog: MeasureCatalog | None = None,
) -> InfluenceVector:
    """Influence values of one target on the given sample.

    Propagates ``UnknownRuleError`` (bad rule id), ``UnknownMeasureError``
    (bad measure id) and ``DomainError`` (measure or gradient undefined
    at the sample moments).
    """
    measure = resolve_measure(target.measure_id, catalog)
    moments = compute_moments(data, target.rule_id)
    estimate = measure.evaluate(moments)
    grad = measure.gradient(moments)
    a = data.rule(target.rule_id).astype(float)
    z = data.z.astype(float)
    values = grad.d_za * (z * a) + grad.d_a * a + grad.d_z * z
    return InfluenceVector(
        target=target,
        values=values,
        moments=moments,
        gradient=grad,
        estimate=estimate,
    )


def covariance_from_influences(
    influences: Sequence[InfluenceVector], n: int
) -> CovarianceEstimate:
    """Sample covariance (denominator ``n - 1``) of stacked influence rows."""
    if not influences:
        raise DimensionMismatchError("need at least one influence vector")
    rows = np.vstack([iv.values for iv in influences])
    if rows.shape[1] != n:
        raise DimensionMismatchError(
            f"influence length {rows.shape[1]} does not match n = {n}"
        )
    centered = rows - rows.mean(axis=1, keepdims=True)
    v = centered @ centered.T / (n - 1)
    v = 0.5 * (v + v.T)  # exact symmetry regardless of BLAS kernel paths
    # snap numerically-constant rows to an exact zero row/column
    scale = np.maximum(1.0, np.max(np.abs(rows), axis=1))
    degenerate = np.diagonal(v) <= (_ZERO_SNAP * scale) ** 2
    for k in np.nonzero(degenerate)[0]:
        v[k, :] = 0.0
        v[:, k] = 0.0
    return CovarianceEstimate(v=v, n=n)


def covariance_matrix(
    data: BinaryDataset,
    targets: Sequence[EvaluationTarget],
    catalog: MeasureCatalog | None = None,
) -> CovarianceEstimate:
    """Plug-in covariance estimate for an ordered target list."""
    influences = [influence(data, t, catalog) for t in targets]
    return covariance_from_influences(influences, data.n)


def blurring_matrix(
    gradients: Sequence[GradientTriple], alpha: float, n: int
) -> np.ndarray:
    """Diagonal correction addends, one per target.

    ``D_k = ||gradient_k||^2 * inv_norm_cdf(1 - alpha/2)**2 / (2 n)``;
    scales as ``1/n`` and vanishes only for an all-zero gradient.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    z = inv_norm_cdf(1.0 - float(alpha) / 2.0)
    return np.array(
        [g.squared_norm() * z * z / (2.0 * n) for g in gradients], dtype=float
    )


def correct(
    estimate: CovarianceEstimate,
    alpha: float,
    gradients: Sequence[GradientTriple],
) -> CovarianceEstimate:
    """Corrected covariance: plug-in plus the diagonal blurring addends."""
    if estimate.corrected:
        raise ValueError("covariance estimate is already corrected")
    d = blurring_matrix(gradients, alpha, estimate.n)
    if d.shape[0] != estimate.dim:
        raise DimensionMismatchError(
            f"{d.shape[0]} gradients for a {estimate.dim}-target covariance"
        )
    v = estimate.v.copy()
    v[np.diag_indices_from(v)] += d
    return CovarianceEstimate(
        v=v, n=estimate.n, corrected=True, d_diag=d, alpha=float(alpha)
    )


def correlation(estimate: CovarianceEstimate) -> CorrelationMatrix:
    """Correlation matrix of a covariance estimate.

    Raises
    ------
    SingularVarianceError
        If any diagonal entry is not strictly positive; the message
        names the first offending target index.
    """
    diag = np.diagonal(estimate.v)
    bad = np.nonzero(diag <= 0.0)[0]
    if bad.size:
        k = int(bad[0])
        raise SingularVarianceError(k, f"diagonal entry {diag[k]!r}")
    scale = np.sqrt(diag)
    r = estimate.v / np.outer(scale, scale)
    return CorrelationMatrix(values=r)

"""Interval construction: individual and simultaneous confidence intervals.

Every interval here has the same shape: ``estimate +/- quantile *
sqrt(v / n)`` with ``v`` a diagonal entry of the chosen covariance
estimate.  What changes is the quantile:

* individual mode uses the scalar two-sided normal quantile, so each
  interval covers its own target at level ``1 - alpha`` but the family
  as a whole covers at a lower, unknown rate;
* joint mode uses the simulated equicoordinate quantile of the
  estimated correlation matrix, so all targets in the requested set are
  covered simultaneously at level ``1 - alpha``.

The variance ``choice`` selects the plug-in estimate (1) or the
corrected one (2, default), see :mod:`perfci.covariance`.  In joint
mode the correlation matrix fed to the quantile simulation comes from
the same covariance estimate the widths use.

Partial failure policy: a target whose measure is undefined at the
sample moments, or whose variance degenerates, gets its error recorded
inline while the remaining targets proceed; only when every target
fails does :func:`analyze` raise.  Intervals are not truncated to the
measure's natural range unless ``clamp`` is set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .covariance import (
    CovarianceEstimate,
    correct,
    correlation,
    covariance_from_influences,
    influence,
)
from .dataset import BinaryDataset, EvaluationTarget
from .errors import (
    DimensionMismatchError,
    DomainError,
    NoUsableTargetsError,
    OutOfRangeError,
    SingularVarianceError,
    UnknownMeasureError,
    UnknownRuleError,
)
from .measures import MeasureCatalog, resolve_measure
from .quantiles import (
    DEFAULT_DRAWS,
    QuantileRequest,
    inv_norm_cdf,
    max_abs_quantile,
)

__all__ = [
    "CHOICE_PLUGIN",
    "CHOICE_CORRECTED",
    "IntervalSpec",
    "TargetInterval",
    "IntervalReport",
    "individual_ci",
    "joint_cis",
    "analyze",
]

CHOICE_PLUGIN = 1
CHOICE_CORRECTED = 2


@dataclass(frozen=True)
class IntervalSpec:
    """Knobs for one interval request.

    ``target_set`` holds indices into the analyzed target list (``None``
    means all of them, in order).  ``draws`` and ``seed`` only matter in
    joint mode, where the quantile is simulated.
    """

    alpha: float = 0.05
    mode: str = "joint"
    choice: int = CHOICE_CORRECTED
    target_set: tuple[int, ...] | None = None
    draws: int = DEFAULT_DRAWS
    seed: int = 0
    clamp: bool = False

    def __post_init__(self):
        if not (0.0 < float(self.alpha) < 1.0):
            raise OutOfRangeError(self.alpha)
        object.__setattr__(self, "alpha", float(self.alpha))
        if self.mode not in ("individual", "joint"):
            raise ValueError(f"mode must be 'individual' or 'joint', got {self.mode!r}")
        if self.choice not in (CHOICE_PLUGIN, CHOICE_CORRECTED):
            raise ValueError(f"choice must be 1 or 2, got {self.choice!r}")
        if self.target_set is not None:
            object.__setattr__(
                self, "target_set", tuple(int(i) for i in self.target_set)
            )


@dataclass(frozen=True)
class TargetInterval:
    """One report row.  Either the interval fields are populated, or
    ``error`` explains why this target produced none."""

    rule_id: str
    measure_id: str
    estimate: float | None = None
    lower: float | None = None
    upper: float | None = None
    half_width: float | None = None
    variance: float | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class IntervalReport:
    """Interval rows plus the shared quantile metadata.

    ``q`` is the quantile multiplier all successful rows share;
    ``mc_stderr`` its Monte Carlo standard error (0 in individual mode,
    where the quantile is exact).
    """

    n: int
    alpha: float
    mode: str
    choice: int
    q: float
    mc_stderr: float
    seed: int
    rows: tuple[TargetInterval, ...]

    @property
    def ok_rows(self) -> tuple[TargetInterval, ...]:
        return tuple(r for r in self.rows if r.ok)

    @property
    def failed_rows(self) -> tuple[TargetInterval, ...]:
        return tuple(r for r in self.rows if not r.ok)


def individual_ci(
    estimate: float,
    variance: float,
    n: int,
    alpha: float,
    index: int | None = None,
) -> tuple[float, float]:
    """Two-sided normal interval ``estimate +/- z * sqrt(variance / n)``.

    ``variance`` is the diagonal covariance entry for the scaled error;
    a non-positive value raises :class:`SingularVarianceError`.
    """
    if not (0.0 < alpha < 1.0):
        raise OutOfRangeError(alpha)
    if variance <= 0.0:
        raise SingularVarianceError(index, f"variance {variance!r}")
    half = inv_norm_cdf(1.0 - alpha / 2.0) * math.sqrt(variance / n)
    return (estimate - half, estimate + half)


def joint_cis(
    estimates: Sequence[float],
    cov: CovarianceEstimate,
    spec: IntervalSpec,
    targets: Sequence[EvaluationTarget] | None = None,
) -> IntervalReport:
    """Simultaneous intervals over ``spec.target_set`` (default: all).

    The equicoordinate quantile is simulated from the correlation matrix
    of the restricted covariance, so all selected intervals share one
    multiplier.  Raises ``SingularVarianceError`` on a degenerate
    diagonal and ``NotPositiveSemidefiniteError`` if the correlation
    cannot be factored; callers wanting inline per-target failures use
    :func:`analyze` instead.
    """
    k_all = len(estimates)
    if cov.dim != k_all:
        raise DimensionMismatchError(
            f"{k_all} estimates for a {cov.dim}-target covariance"
        )
    indices = spec.target_set if spec.target_set is not None else tuple(range(k_all))
    if any(i < 0 or i >= k_all for i in indices):
        raise DimensionMismatchError(
            f"target_set {indices} out of bounds for {k_all} targets"
        )
    if not indices:
        raise DimensionMismatchError("target_set must not be empty")
    if targets is None:
        targets = [EvaluationTarget(f"target{i}", "?") for i in range(k_all)]

    sub = cov.restrict(indices)
    corr = correlation(sub)  # raises SingularVarianceError on zero diagonal
    result = max_abs_quantile(
        QuantileRequest(alpha=spec.alpha, corr=corr, draws=spec.draws, seed=spec.seed)
    )
    rows = []
    for pos, i in enumerate(indices):
        rows.append(
            _make_row(
                targets[i],
                float(estimates[i]),
                float(sub.v[pos, pos]),
                result.q,
                cov.n,
                spec.clamp,
            )
        )
    return IntervalReport(
        n=cov.n,
        alpha=spec.alpha,
        mode="joint",
        choice=spec.choice,
        q=result.q,
        mc_stderr=result.mc_stderr,
        seed=spec.seed,
        rows=tuple(rows),
    )


def _make_row(
    target: EvaluationTarget,
    estimate: float,
    variance: float,
    q: float,
    n: int,
    clamp: bool,
) -> TargetInterval:
    half = q * math.sqrt(variance / n)
    lower = estimate - half
    upper = estimate + half
    if clamp:
        measure = resolve_measure(target.measure_id)
        if measure.unit_range:
            lower = max(0.0, lower)
            upper = min(1.0, upper)
    return TargetInterval(
        rule_id=target.rule_id,
        measure_id=target.measure_id,
        estimate=estimate,
        lower=lower,
        upper=upper,
        half_width=half,
        variance=variance,
    )


def analyze(
    data: BinaryDataset,
    targets: Sequence[EvaluationTarget],
    spec: IntervalSpec,
    catalog: MeasureCatalog | None = None,
) -> IntervalReport:
    """End-to-end report for a dataset and an ordered target list.

    Pipeline: plug-in moments and gradients per target, sample
    covariance of the influence vectors, optional correction (choice 2),
    then individual or simultaneous intervals.  Per-target failures
    (unknown ids, domain violations, singular variances) become inline
    error rows; :class:`NoUsableTargetsError` fires only if nothing
    survives.
    """
    indices = (
        spec.target_set if spec.target_set is not None else tuple(range(len(targets)))
    )
    if any(i < 0 or i >= len(targets) for i in indices):
        raise DimensionMismatchError(
            f"target_set {indices} out of bounds for {len(targets)} targets"
        )
    if not indices:
        raise DimensionMismatchError("target_set must not be empty")
    selected = [targets[i] for i in indices]

    influences = {}
    errors: dict[int, str] = {}
    for pos, target in enumerate(selected):
        try:
            influences[pos] = influence(data, target, catalog)
        except (DomainError, UnknownRuleError, UnknownMeasureError) as exc:
            errors[pos] = f"{type(exc).__name__}: {exc.args[0] if exc.args else exc}"

    alive = sorted(influences)
    if not alive:
        raise NoUsableTargetsError(
            {selected[p].label(): msg for p, msg in errors.items()}
        )

    cov = covariance_from_influences([influences[p] for p in alive], data.n)
    if spec.choice == CHOICE_CORRECTED:
        cov = correct(cov, spec.alpha, [influences[p].gradient for p in alive])

    # weed out degenerate variances before the joint step
    usable: list[int] = []
    for row_idx, pos in enumerate(alive):
        if cov.v[row_idx, row_idx] <= 0.0:
            err = SingularVarianceError(indices[pos], f"choice {spec.choice}")
            errors[pos] = f"SingularVarianceError: {err.args[0]}"
        else:
            usable.append(row_idx)
    if not usable:
        raise NoUsableTargetsError(
            {selected[p].label(): msg for p, msg in errors.items()}
        )
    if len(usable) < len(alive):
        keep = [alive[r] for r in usable]
        cov = cov.restrict(usable)
        alive = keep

    if spec.mode == "individual":
        q = inv_norm_cdf(1.0 - spec.alpha / 2.0)
        mc_stderr = 0.0
    else:
        corr = correlation(cov)
        result = max_abs_quantile(
            QuantileRequest(
                alpha=spec.alpha, corr=corr, draws=spec.draws, seed=spec.seed
            )
        )
        q = result.q
        mc_stderr = result.mc_stderr

    row_of: dict[int, TargetInterval] = {}
    for row_idx, pos in enumerate(alive):
        iv = influences[pos]
        row_of[pos] = _make_row(
            selected[pos],
            iv.estimate,
            float(cov.v[row_idx, row_idx]),
            q,
            data.n,
            spec.clamp,
        )
    rows = []
    for pos, target in enumerate(selected):
        if pos in row_of:
            rows.append(row_of[pos])
        else:
            rows.append(
                TargetInterval(
                    rule_id=target.rule_id,
                    measure_id=target.measure_id,
                    error=errors[pos],
                )
            )
    return IntervalReport(
        n=data.n,
        alpha=spec.alpha,
        mode=spec.mode,
        choice=spec.choice,
        q=q,
        mc_stderr=mc_stderr,
        seed=spec.seed,
        rows=tuple(rows),
    )

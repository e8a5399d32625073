"""Coverage simulation harness for the interval constructions.

The harness repeatedly samples a test set from a known data process,
applies fixed classification rules, builds intervals with the estimators
under study, and scores them against the known true measure values.
Three coverage notions are reported:

* individual: per target, how often its own individual interval covers;
* joint-of-individual: how often every individual interval covers at
  once (the naive reading of a table of marginal intervals);
* joint: how often the simultaneous intervals cover all their targets.

Data processes
--------------
``GaussianMixtureProcess`` draws labels fair-coin and a scalar feature
``x ~ N(z, 1)``, so threshold rules have closed-form true moments.
``EmpiricalBootstrapProcess`` resamples rows of a fixed population table
with replacement; true values are the population plug-ins.  Setting
``with_replacement=False`` with test size equal to the population size
turns the process into a pure permutation, a degenerate configuration
whose estimates must equal the truth exactly in every replication; it
exists as an end-to-end self-check of the harness.

Reproducibility
---------------
Every replication derives its own counter-based substream from the
master seed and the replication index, and every simulated quantile gets
its own derived seed, so runs are deterministic for a fixed seed and
independent of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .covariance import blurring_matrix
from .dataset import BinaryDataset, EvaluationTarget, compute_moments, make_targets
from .errors import PerfciError
from .measures import MeasureCatalog, MomentTriple, resolve_measure
from .quantiles import QuantileRequest, inv_norm_cdf, max_abs_quantile, norm_cdf

__all__ = [
    "SampleBatch",
    "GaussianMixtureProcess",
    "EmpiricalBootstrapProcess",
    "ThresholdRule",
    "OneNNRule",
    "FixedPredictionRule",
    "TrueParams",
    "true_params",
    "CoverageConfig",
    "JointSetCoverage",
    "CoverageDiagnostics",
    "CoverageResult",
    "run_coverage",
    "rare_positive_stress",
    "stress_population",
]

DEFAULT_TRUE_MC_SIZE = 1_000_000
MIN_TRUE_MC_SIZE = 100_000
DEFAULT_SIM_DRAWS = 20_000


def _substream(seed: int, *key: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def _substream_seed(seed: int, *key: int) -> int:
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(seq.generate_state(1, np.uint64)[0])


# ---------------------------------------------------------------------------
# Data processes and rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """One sampled test set before rules run.

    Feature-based processes fill ``x``; row-resampling processes fill
    ``population`` and ``indices`` so prediction columns can be sliced
    lazily per rule.
    """

    z: np.ndarray
    x: np.ndarray | None = None
    population: BinaryDataset | None = None
    indices: np.ndarray | None = None


class GaussianMixtureProcess:
    """Fair label coin; feature ``x ~ N(z, 1)`` given the label ``z``."""

    kind = "gaussian_mixture"

    def sample(self, n: int, rng: np.random.Generator) -> SampleBatch:
        z = (rng.random(n) < 0.5).astype(np.uint8)
        x = rng.standard_normal(n) + z
        return SampleBatch(z=z, x=x)

    def __repr__(self) -> str:
        return "GaussianMixtureProcess()"


class EmpiricalBootstrapProcess:
    """Row resampling from a fixed population table.

    ``with_replacement=False`` requires the test size to not exceed the
    population; at exactly the population size each replication is a
    permutation and estimates reproduce the population values exactly.
    """

    kind = "empirical_bootstrap"

    def __init__(self, population: BinaryDataset, with_replacement: bool = True):
        self.population = population
        self.with_replacement = bool(with_replacement)

    def sample(self, n: int, rng: np.random.Generator) -> SampleBatch:
        size = self.population.n
        if self.with_replacement:
            idx = rng.integers(0, size, n)
        else:
            if n > size:
                raise ValueError(
                    f"cannot draw {n} rows without replacement from {size}"
                )
            idx = rng.permutation(size)[:n]
        return SampleBatch(
            z=self.population.z[idx], population=self.population, indices=idx
        )

    def __repr__(self) -> str:
        return (
            f"EmpiricalBootstrapProcess(n={self.population.n}, "
            f"with_replacement={self.with_replacement})"
        )


class ThresholdRule:
    """Predict positive when the scalar feature exceeds ``theta``."""

    def __init__(self, theta: float, rule_id: str | None = None):
        self.theta = float(theta)
        self.id = rule_id if rule_id is not None else f"threshold({self.theta:g})"

    def predict(self, batch: SampleBatch) -> np.ndarray:
        if batch.x is None:
            raise PerfciError(f"rule {self.id!r} needs a feature sample")
        return (batch.x > self.theta).astype(np.uint8)

    def __repr__(self) -> str:
        return f"ThresholdRule({self.theta:g})"


class OneNNRule:
    """Label of the nearest training feature (scalar feature space).

    Equidistant neighbors resolve to the smaller training feature, so
    predictions are deterministic.  Use :meth:`train` to fit one on a
    fresh training sample from a process.
    """

    def __init__(self, train_x: np.ndarray, train_z: np.ndarray, rule_id: str = "one_nn"):
        train_x = np.asarray(train_x, dtype=float)
        train_z = np.asarray(train_z)
        if train_x.shape != train_z.shape or train_x.ndim != 1 or train_x.size == 0:
            raise ValueError("training arrays must be equal-length non-empty vectors")
        order = np.argsort(train_x, kind="stable")
        self._xs = train_x[order]
        self._zs = train_z[order].astype(np.uint8)
        self.id = rule_id

    @classmethod
    def train(
        cls,
        process: GaussianMixtureProcess,
        size: int,
        seed: int,
        rule_id: str = "one_nn",
    ) -> "OneNNRule":
        rng = _substream(seed, 0xF17, 0)
        batch = process.sample(size, rng)
        return cls(batch.x, batch.z, rule_id=rule_id)

    def predict(self, batch: SampleBatch) -> np.ndarray:
        if batch.x is None:
            raise PerfciError(f"rule {self.id!r} needs a feature sample")
        xs, zs = self._xs, self._zs
        m = xs.shape[0]
        pos = np.searchsorted(xs, batch.x)
        left = np.clip(pos - 1, 0, m - 1)
        right = np.clip(pos, 0, m - 1)
        use_left = np.abs(batch.x - xs[left]) <= np.abs(xs[right] - batch.x)
        nearest = np.where(use_left, left, right)
        return zs[nearest]

    def __repr__(self) -> str:
        return f"OneNNRule(train_size={self._xs.shape[0]})"


class FixedPredictionRule:
    """Predictions come from a stored column of the population table."""

    def __init__(self, column: str, rule_id: str | None = None):
        self.column = column
        self.id = rule_id if rule_id is not None else column

    def predict(self, batch: SampleBatch) -> np.ndarray:
        if batch.population is None or batch.indices is None:
            raise PerfciError(f"rule {self.id!r} needs a resampled population batch")
        return batch.population.rule(self.column)[batch.indices]

    def __repr__(self) -> str:
        return f"FixedPredictionRule({self.column!r})"


# ---------------------------------------------------------------------------
# True parameter values
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TrueParams:
    """True measure values per target, with per-target provenance
    (``"analytic"``, ``"population"`` or ``"monte_carlo(...)"``)."""

    targets: tuple[EvaluationTarget, ...]
    values: np.ndarray
    moments: dict[str, MomentTriple]
    provenance: tuple[str, ...]


def _mixture_threshold_moments(theta: float) -> MomentTriple:
    # P(x > t | z) = 1 - Phi(t - z) for z in {0, 1}
    upper0 = 1.0 - norm_cdf(theta)
    upper1 = 1.0 - norm_cdf(theta - 1.0)
    return MomentTriple(m_za=0.5 * upper1, m_a=0.5 * (upper0 + upper1), m_z=0.5)


def true_params(
    process,
    rules: Sequence,
    measure_ids: Sequence[str],
    catalog: MeasureCatalog | None = None,
    mc_size: int = DEFAULT_TRUE_MC_SIZE,
    seed: int = 0,
) -> TrueParams:
    """True measure values for every (rule, measure) target.

    Closed forms are used where available: threshold rules under the
    Gaussian mixture, and any rule under a bootstrap process (population
    plug-in).  Everything else falls back to one shared Monte Carlo
    sample of ``mc_size`` rows (at least 100000).
    """
    if mc_size < MIN_TRUE_MC_SIZE:
        raise ValueError(f"mc_size must be >= {MIN_TRUE_MC_SIZE}, got {mc_size}")
    measures = [resolve_measure(mid, catalog) for mid in measure_ids]
    moments: dict[str, MomentTriple] = {}
    how: dict[str, str] = {}

    mc_rules = []
    for rule in rules:
        if isinstance(process, EmpiricalBootstrapProcess) and isinstance(
            rule, FixedPredictionRule
        ):
            moments[rule.id] = compute_moments(process.population, rule.column)
            how[rule.id] = "population"
        elif isinstance(process, GaussianMixtureProcess) and isinstance(
            rule, ThresholdRule
        ):
            moments[rule.id] = _mixture_threshold_moments(rule.theta)
            how[rule.id] = "analytic"
        else:
            mc_rules.append(rule)

    if mc_rules:
        rng = _substream(seed, 0x7A0E, 0)
        sums = {rule.id: np.zeros(3) for rule in mc_rules}  # za, a, z sums
        total = 0
        chunk = 250_000
        while total < mc_size:
            size = min(chunk, mc_size - total)
            batch = process.sample(size, rng)
            zf = batch.z.astype(float)
            for rule in mc_rules:
                a = rule.predict(batch).astype(float)
                sums[rule.id] += (float(zf @ a), float(a.sum()), float(zf.sum()))
            total += size
        for rule in mc_rules:
            s = sums[rule.id] / total
            moments[rule.id] = MomentTriple(m_za=s[0], m_a=s[1], m_z=s[2])
            how[rule.id] = f"monte_carlo(size={mc_size}, seed={seed})"

    targets = make_targets([r.id for r in rules], [m.id for m in measures])
    values = np.array(
        [
            resolve_measure(t.measure_id, catalog).evaluate(moments[t.rule_id])
            for t in targets
        ]
    )
    provenance = tuple(how[t.rule_id] for t in targets)
    return TrueParams(
        targets=targets, values=values, moments=dict(moments), provenance=provenance
    )


# ---------------------------------------------------------------------------
# Coverage study
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CoverageConfig:
    """Everything one coverage study needs.

    ``joint_sets`` is ``"all"`` (one set spanning every target),
    ``"per-rule"`` (one set per rule), a combination like
    ``"per-rule,all"``, or an explicit tuple of index tuples into the
    rule-major target list.
    """

    process: object
    rules: tuple
    measure_ids: tuple[str, ...]
    n: int
    replications: int = 2000
    alpha: float = 0.05
    choice: int = 1
    joint_sets: object = "all"
    draws: int = DEFAULT_SIM_DRAWS
    seed: int = 0
    true_mc_size: int = DEFAULT_TRUE_MC_SIZE

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "measure_ids", tuple(self.measure_ids))
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.choice not in (1, 2):
            raise ValueError(f"choice must be 1 or 2, got {self.choice}")
        if not self.rules or not self.measure_ids:
            raise ValueError("need at least one rule and one measure")


@dataclass(frozen=True, eq=False)
class JointSetCoverage:
    """Coverage of the simultaneous intervals over one target subset."""

    label: str
    indices: tuple[int, ...]
    coverage: float
    avg_length: np.ndarray  # per member target, mean over covering-capable reps
    avg_q: float
    error_rate: float  # fraction of replications where some member failed


@dataclass(frozen=True, eq=False)
class CoverageDiagnostics:
    """Per-replication raw arrays, for tests and width comparisons.

    Not part of any serialized output.  ``individual_half`` entries are
    NaN where the target failed in that replication.
    """

    estimates: np.ndarray  # (reps, targets)
    variances: np.ndarray  # (reps, targets), after the choice's correction
    individual_half: np.ndarray  # (reps, targets)
    joint_half: dict[str, np.ndarray]  # label -> (reps, set size)
    joint_q: dict[str, np.ndarray]  # label -> (reps,)
    joint_mc_stderr: dict[str, np.ndarray]  # label -> (reps,)


@dataclass(frozen=True, eq=False)
class CoverageResult:
    """Aggregated coverage study output for one variance choice."""

    choice: int
    n: int
    alpha: float
    replications: int
    seed: int
    draws: int
    targets: tuple[EvaluationTarget, ...]
    true_values: np.ndarray
    provenance: tuple[str, ...]
    individual_coverage: np.ndarray  # per target
    avg_individual_length: np.ndarray  # per target
    joint_of_individual: float
    joint_sets: tuple[JointSetCoverage, ...]
    target_error_counts: np.ndarray  # per target, replications with no interval
    diagnostics: CoverageDiagnostics | None = None

    def joint_set(self, label: str) -> JointSetCoverage:
        for js in self.joint_sets:
            if js.label == label:
                return js
        raise KeyError(f"no joint set labeled {label!r}")

    def as_dict(self) -> dict:
        """JSON-friendly summary (diagnostics excluded)."""
        return {
            "meta": {
                "n": self.n,
                "alpha": self.alpha,
                "choice": self.choice,
                "replications": self.replications,
                "seed": self.seed,
                "draws": self.draws,
            },
            "targets": [
                {
                    "rule": t.rule_id,
                    "measure": t.measure_id,
                    "true_value": float(self.true_values[k]),
                    "provenance": self.provenance[k],
                    "individual_coverage": float(self.individual_coverage[k]),
                    "avg_individual_length": float(self.avg_individual_length[k]),
                    "error_count": int(self.target_error_counts[k]),
                }
                for k, t in enumerate(self.targets)
            ],
            "joint_of_individual": self.joint_of_individual,
            "joint_sets": [
                {
                    "label": js.label,
                    "indices": list(js.indices),
                    "coverage": js.coverage,
                    "avg_length": [float(v) for v in js.avg_length],
                    "avg_q": js.avg_q,
                    "error_rate": js.error_rate,
                }
                for js in self.joint_sets
            ],
        }


def _resolve_joint_sets(
    spec, targets: Sequence[EvaluationTarget], rules: Sequence
) -> list[tuple[str, tuple[int, ...]]]:
    if isinstance(spec, str):
        sets: list[tuple[str, tuple[int, ...]]] = []
        for token in spec.split(","):
            token = token.strip()
            if token == "all":
                sets.append(("all", tuple(range(len(targets)))))
            elif token == "per-rule":
                for rule in rules:
                    idx = tuple(
                        k for k, t in enumerate(targets) if t.rule_id == rule.id
                    )
                    sets.append((rule.id, idx))
            else:
                raise ValueError(f"unknown joint set token {token!r}")
        return sets
    out = []
    for i, raw in enumerate(spec):
        idx = tuple(int(k) for k in raw)
        if not idx or any(k < 0 or k >= len(targets) for k in idx):
            raise ValueError(f"joint set {raw!r} out of range")
        out.append((f"set{i}", idx))
    return out


def _simulate(config: CoverageConfig, choices: tuple[int, ...]) -> dict[int, CoverageResult]:
    """Shared-stream engine behind run_coverage and the stress pair.

    All requested variance choices are scored on the same sampled data
    (and the same quantile substreams), so comparisons between them are
    free of between-run Monte Carlo noise.
    """
    process = config.process
    rules = config.rules
    targets = make_targets(
        [r.id for r in rules], [resolve_measure(m).id for m in config.measure_ids]
    )
    n_targets = len(targets)
    measures = {t.measure_id: resolve_measure(t.measure_id) for t in targets}
    truth = true_params(
        process,
        rules,
        config.measure_ids,
        mc_size=config.true_mc_size,
        seed=_substream_seed(config.seed, 0x72, 0),
    )
    sets = _resolve_joint_sets(config.joint_sets, targets, rules)
    reps = config.replications
    n = config.n
    alpha = config.alpha
    z_alpha = inv_norm_cdf(1.0 - alpha / 2.0)

    est = np.full((reps, n_targets), np.nan)
    variances = {c: np.full((reps, n_targets), np.nan) for c in choices}
    ind_half = {c: np.full((reps, n_targets), np.nan) for c in choices}
    joint_half = {
        c: {label: np.full((reps, len(idx)), np.nan) for label, idx in sets}
        for c in choices
    }
    joint_q = {c: {label: np.full(reps, np.nan) for label, _ in sets} for c in choices}
    joint_mc = {c: {label: np.full(reps, np.nan) for label, _ in sets} for c in choices}

    for rep in range(reps):
        rng = _substream(config.seed, rep, 0)
        batch = process.sample(n, rng)
        data = BinaryDataset(
            np.ascontiguousarray(batch.z, dtype=np.uint8),
            {rule.id: np.ascontiguousarray(rule.predict(batch), dtype=np.uint8) for rule in rules},
        )
        moments = {rid: compute_moments(data, rid) for rid in data.rule_ids}
        z_float = data.z.astype(float)

        rows = np.empty((n_targets, n))
        grads = [None] * n_targets
        ok = np.zeros(n_targets, dtype=bool)
        for k, target in enumerate(targets):
            measure = measures[target.measure_id]
            m = moments[target.rule_id]
            if not measure.domain_ok(m) or not measure.grad_ok(m):
                continue
            est[rep, k] = measure.evaluate(m)
            g = measure.gradient(m)
            grads[k] = g
            a = data.rule(target.rule_id).astype(float)
            rows[k] = g.d_za * (z_float * a) + g.d_a * a + g.d_z * z_float
            ok[k] = True

        ok_idx = np.nonzero(ok)[0]
        if ok_idx.size:
            sub = rows[ok_idx]
            centered = sub - sub.mean(axis=1, keepdims=True)
            v_plug = centered @ centered.T / (n - 1)
            v_plug = 0.5 * (v_plug + v_plug.T)
            scale = np.maximum(1.0, np.max(np.abs(sub), axis=1))
            snapped = np.diagonal(v_plug) <= (1e-12 * scale) ** 2
            for r in np.nonzero(snapped)[0]:
                v_plug[r, :] = 0.0
                v_plug[:, r] = 0.0
        else:
            v_plug = np.zeros((0, 0))

        for choice in choices:
            if choice == 2 and ok_idx.size:
                d = blurring_matrix([grads[k] for k in ok_idx], alpha, n)
                v = v_plug + np.diag(d)
            else:
                v = v_plug
            diag = np.diagonal(v) if ok_idx.size else np.zeros(0)
            usable_rows = np.nonzero(diag > 0.0)[0]
            usable_targets = ok_idx[usable_rows]
            variances[choice][rep, usable_targets] = diag[usable_rows]
            ind_half[choice][rep, usable_targets] = z_alpha * np.sqrt(
                diag[usable_rows] / n
            )

            for set_pos, (label, idx) in enumerate(sets):
                members = np.asarray(idx)
                live_mask = np.isin(members, usable_targets)
                live = members[live_mask]
                if live.size == 0:
                    continue
                rows_in_v = np.searchsorted(ok_idx, live)
                vv = v[np.ix_(rows_in_v, rows_in_v)]
                dd = np.sqrt(np.diagonal(vv))
                corr = vv / np.outer(dd, dd)
                corr = 0.5 * (corr + corr.T)
                np.clip(corr, -1.0, 1.0, out=corr)
                np.fill_diagonal(corr, 1.0)
                qres = max_abs_quantile(
                    QuantileRequest(
                        alpha=alpha,
                        corr=corr,
                        draws=config.draws,
                        seed=_substream_seed(config.seed, rep, 1 + set_pos),
                    )
                )
                joint_q[choice][label][rep] = qres.q
                joint_mc[choice][label][rep] = qres.mc_stderr
                half = qres.q * np.sqrt(np.diagonal(vv) / n)
                joint_half[choice][label][rep, live_mask] = half

    # ---- aggregate --------------------------------------------------------
    # NaN entries mean "no interval in that replication": comparisons give
    # False (not covered) and averages skip them, warnings silenced once here.
    results: dict[int, CoverageResult] = {}
    truth_row = truth.values[np.newaxis, :]
    for choice in choices:
        with np.errstate(invalid="ignore"):
            ih = ind_half[choice]
            ind_cover = np.abs(est - truth_row) <= ih
            individual_coverage = ind_cover.mean(axis=0)
            joint_of_individual = float(ind_cover.all(axis=1).mean())
            error_counts = np.isnan(ih).sum(axis=0)

            set_results = []
            for label, idx in sets:
                jh = joint_half[choice][label]
                members = np.asarray(idx)
                cover = np.abs(est[:, members] - truth.values[members]) <= jh
                set_cov = float(cover.all(axis=1).mean())
                failed = np.isnan(jh).any(axis=1)
                avg_len = 2.0 * np.nanmean(jh, axis=0)
                avg_q = float(np.nanmean(joint_q[choice][label]))
                set_results.append(
                    JointSetCoverage(
                        label=label,
                        indices=tuple(int(i) for i in idx),
                        coverage=set_cov,
                        avg_length=avg_len,
                        avg_q=avg_q,
                        error_rate=float(failed.mean()),
                    )
                )

            avg_ind_len = 2.0 * np.nanmean(ih, axis=0)
        results[choice] = CoverageResult(
            choice=choice,
            n=n,
            alpha=alpha,
            replications=reps,
            seed=config.seed,
            draws=config.draws,
            targets=targets,
            true_values=truth.values.copy(),
            provenance=truth.provenance,
            individual_coverage=individual_coverage,
            avg_individual_length=avg_ind_len,
            joint_of_individual=joint_of_individual,
            joint_sets=tuple(set_results),
            target_error_counts=error_counts,
            diagnostics=CoverageDiagnostics(
                estimates=est.copy(),
                variances=variances[choice],
                individual_half=ih,
                joint_half=joint_half[choice],
                joint_q=joint_q[choice],
                joint_mc_stderr=joint_mc[choice],
            ),
        )
    return results


def run_coverage(config: CoverageConfig) -> CoverageResult:
    """Run one coverage study with the variance choice set in ``config``."""
    return _simulate(config, (config.choice,))[config.choice]


# ---------------------------------------------------------------------------
# Built-in rare-positive stress setting
# ---------------------------------------------------------------------------

_STRESS_ROWS = 3333
_STRESS_POSITIVES = 300  # base rate 0.090
_STRESS_PREDICTED = 33
_STRESS_OVERLAP = 5  # true F0.5 = 6.25 / 108 ~ 0.0579


def stress_population() -> BinaryDataset:
    """Deterministic rare-positive population with one weak rule.

    3333 rows, 300 actual positives, 33 predicted positives, 5 in both;
    the weak rule's true F0.5 is about 0.058 and a size-3000 resample
    sees on average 4.5 of the 5 overlap rows, so zero-overlap samples
    (which break the plug-in variance) occur at a noticeable rate.
    """
    z = np.zeros(_STRESS_ROWS, dtype=np.uint8)
    a = np.zeros(_STRESS_ROWS, dtype=np.uint8)
    z[:_STRESS_POSITIVES] = 1
    a[:_STRESS_OVERLAP] = 1
    a[_STRESS_POSITIVES : _STRESS_POSITIVES + (_STRESS_PREDICTED - _STRESS_OVERLAP)] = 1
    return BinaryDataset(z, {"weak": a})


def rare_positive_stress(
    n: int = 3000,
    replications: int = 2000,
    alpha: float = 0.05,
    draws: int = DEFAULT_SIM_DRAWS,
    seed: int = 0,
) -> tuple[CoverageResult, CoverageResult]:
    """Plug-in vs corrected coverage on the built-in rare-event setting.

    Returns ``(plug_in, corrected)`` results computed on identical
    sampled data and quantile streams, so their difference isolates the
    effect of the variance correction.
    """
    population = stress_population()
    config = CoverageConfig(
        process=EmpiricalBootstrapProcess(population),
        rules=(FixedPredictionRule("weak"),),
        measure_ids=("f_beta(0.5)", "accuracy"),
        n=n,
        replications=replications,
        alpha=alpha,
        choice=1,
        joint_sets="all",
        draws=draws,
        seed=seed,
    )
    both = _simulate(config, (1, 2))
    return both[1], both[2]

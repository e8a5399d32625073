"""Catalog of performance measures expressed through a moment triple.

A binary rule ``A`` and a binary ground truth ``Z`` have a joint 2x2
distribution that is fully determined by three moments: ``E[Z*A]``,
``E[A]`` and ``E[Z]``.  Every measure in this catalog is a smooth scalar
function of that triple, and ships with its closed-form gradient with
respect to the triple.  The gradient feeds the delta-method variance
estimates in :mod:`perfci.covariance`; the value function feeds the
point estimates.

Built-in measures
-----------------
``accuracy``, ``f1``, ``f_beta(b)``, ``jaccard``, ``tversky(a,b)``,
``correlation`` (Matthews phi), ``cosine``, ``lift``, ``overlap``.
``f1`` is exactly ``f_beta(1)``; both ids resolve.  Parameterized ids
such as ``f_beta(0.5)`` or ``tversky(0.3,0.4)`` are parsed on demand.

Gradients are written in direct form, finite everywhere the measure
itself is defined: quotients that would read 0/0 at ``E[Z*A] = 0`` are
algebraically simplified away.  ``overlap`` is the one non-smooth entry:
its value is defined whenever ``min(E[A], E[Z]) > 0`` but its gradient
does not exist on the ridge ``E[A] = E[Z]``, where ``gradient`` raises
:class:`~perfci.errors.DomainError` even though ``evaluate`` succeeds.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

from .errors import DomainError, DuplicateIdError, UnknownMeasureError

__all__ = [
    "MomentTriple",
    "GradientTriple",
    "MeasureSpec",
    "MeasureCatalog",
    "builtin_measures",
    "default_catalog",
    "resolve_measure",
    "evaluate",
    "gradient",
]

_BOUND_TOL = 1e-9


@dataclass(frozen=True)
class MomentTriple:
    """The three moments that pin down a (truth, prediction) joint law.

    Parameters
    ----------
    m_za : float
        ``E[Z*A]``, the true-positive mass.
    m_a : float
        ``E[A]``, the predicted-positive mass.
    m_z : float
        ``E[Z]``, the actual-positive mass.

    The constructor enforces the hard constraints every genuine joint
    distribution satisfies: components in ``[0, 1]``,
    ``m_za <= min(m_a, m_z)`` and ``m_za >= m_a + m_z - 1``.
    """

    m_za: float
    m_a: float
    m_z: float

    def __post_init__(self):
        object.__setattr__(self, "m_za", float(self.m_za))
        object.__setattr__(self, "m_a", float(self.m_a))
        object.__setattr__(self, "m_z", float(self.m_z))
        for name in ("m_za", "m_a", "m_z"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < -_BOUND_TOL or v > 1 + _BOUND_TOL:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
        if self.m_za > min(self.m_a, self.m_z) + _BOUND_TOL:
            raise ValueError(
                f"m_za = {self.m_za} exceeds min(m_a, m_z) = {min(self.m_a, self.m_z)}"
            )
        if self.m_za < self.m_a + self.m_z - 1 - _BOUND_TOL:
            raise ValueError(
                f"m_za = {self.m_za} below m_a + m_z - 1 = {self.m_a + self.m_z - 1}"
            )

    def cell_probabilities(self) -> tuple[float, float, float, float]:
        """Joint cell masses ``(p11, p10, p01, p00)`` for ``(Z, A)``."""
        p11 = self.m_za
        p10 = self.m_z - self.m_za
        p01 = self.m_a - self.m_za
        p00 = 1.0 - self.m_z - self.m_a + self.m_za
        return (p11, p10, p01, p00)


@dataclass(frozen=True)
class GradientTriple:
    """Partial derivatives of a measure in ``(m_za, m_a, m_z)`` order."""

    d_za: float
    d_a: float
    d_z: float

    def __post_init__(self):
        for name in ("d_za", "d_a", "d_z"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.d_za, self.d_a, self.d_z)

    def squared_norm(self) -> float:
        """``d_za**2 + d_a**2 + d_z**2``, the blurring magnitude driver."""
        return self.d_za**2 + self.d_a**2 + self.d_z**2


@dataclass(frozen=True)
class MeasureSpec:
    """A performance measure: value, gradient and domain predicate.

    ``unit_range`` marks measures whose values always lie in ``[0, 1]``;
    interval clamping applies only to those.  ``grad_ok`` defaults to
    ``domain_ok`` and differs only where the gradient has extra
    singularities (currently just ``overlap``).
    """

    id: str
    params: tuple[float, ...]
    unit_range: bool
    value_fn: Callable[[MomentTriple], float] = field(repr=False)
    gradient_fn: Callable[[MomentTriple], GradientTriple] = field(repr=False)
    domain_fn: Callable[[MomentTriple], bool] = field(repr=False)
    gradient_domain_fn: Callable[[MomentTriple], bool] | None = field(
        default=None, repr=False
    )

    def domain_ok(self, m: MomentTriple) -> bool:
        """True where the measure value is defined and finite."""
        return bool(self.domain_fn(m))

    def grad_ok(self, m: MomentTriple) -> bool:
        """True where the gradient is defined and finite."""
        if not self.domain_fn(m):
            return False
        if self.gradient_domain_fn is not None:
            return bool(self.gradient_domain_fn(m))
        return True

    def evaluate(self, m: MomentTriple) -> float:
        if not self.domain_fn(m):
            raise DomainError(self.id, _domain_detail(self, m))
        v = float(self.value_fn(m))
        if self.unit_range:
            # guard floating spill past the mathematical range
            v = min(1.0, max(0.0, v))
        return v

    def gradient(self, m: MomentTriple) -> GradientTriple:
        if not self.domain_fn(m):
            raise DomainError(self.id, _domain_detail(self, m))
        if self.gradient_domain_fn is not None and not self.gradient_domain_fn(m):
            raise DomainError(
                self.id, f"gradient undefined at m_a = m_z = {m.m_a} (min kink)"
            )
        return self.gradient_fn(m)


def _domain_detail(spec: MeasureSpec, m: MomentTriple) -> str:
    return (
        f"domain predicate fails at (m_za={m.m_za}, m_a={m.m_a}, m_z={m.m_z})"
    )


# ---------------------------------------------------------------------------
# Built-in measure constructors
# ---------------------------------------------------------------------------


def make_accuracy() -> MeasureSpec:
    """Fraction of agreeing predictions, ``2*m_za - m_a - m_z + 1``."""
    return MeasureSpec(
        id="accuracy",
        params=(),
        unit_range=True,
        value_fn=lambda m: 2.0 * m.m_za - m.m_a - m.m_z + 1.0,
        gradient_fn=lambda m: GradientTriple(2.0, -1.0, -1.0),
        domain_fn=lambda m: True,
    )


def make_f_beta(beta: float) -> MeasureSpec:
    """F score with recall weighted ``beta**2`` times precision.

    Value is ``m_za / (wa * m_a + wz * m_z)`` with
    ``wa = 1 / (1 + beta**2)`` and ``wz = 1 - wa``; ``beta = 1`` is the
    balanced F1 (Dice) score.
    """
    beta = float(beta)
    if not math.isfinite(beta) or beta < 0:
        raise ValueError(f"f_beta needs beta >= 0, got {beta!r}")
    wa = 1.0 / (1.0 + beta * beta)
    wz = 1.0 - wa

    def value(m: MomentTriple) -> float:
        return m.m_za / (wa * m.m_a + wz * m.m_z)

    def grad(m: MomentTriple) -> GradientTriple:
        den = wa * m.m_a + wz * m.m_z
        return GradientTriple(
            1.0 / den,
            -wa * m.m_za / (den * den),
            -wz * m.m_za / (den * den),
        )

    measure_id = "f1" if beta == 1.0 else f"f_beta({beta:g})"
    return MeasureSpec(
        id=measure_id,
        params=(beta,),
        unit_range=True,
        value_fn=value,
        gradient_fn=grad,
        domain_fn=lambda m: wa * m.m_a + wz * m.m_z > 0.0,
    )


def make_jaccard() -> MeasureSpec:
    """Intersection over union, ``m_za / (m_a + m_z - m_za)``."""

    def value(m: MomentTriple) -> float:
        return m.m_za / (m.m_a + m.m_z - m.m_za)

    def grad(m: MomentTriple) -> GradientTriple:
        den = m.m_a + m.m_z - m.m_za
        return GradientTriple(
            (m.m_a + m.m_z) / (den * den),
            -m.m_za / (den * den),
            -m.m_za / (den * den),
        )

    return MeasureSpec(
        id="jaccard",
        params=(),
        unit_range=True,
        value_fn=value,
        gradient_fn=grad,
        domain_fn=lambda m: m.m_a + m.m_z - m.m_za > 0.0,
    )


def make_tversky(a: float, b: float) -> MeasureSpec:
    """Tversky overlap index with false-positive weight ``a`` and
    false-negative weight ``b``; ``a = b = 0.5`` reproduces F1."""
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)) or a <= 0 or b <= 0:
        raise ValueError(f"tversky needs a > 0 and b > 0, got ({a!r}, {b!r})")

    def den_of(m: MomentTriple) -> float:
        return (1.0 - a - b) * m.m_za + a * m.m_a + b * m.m_z

    def value(m: MomentTriple) -> float:
        return m.m_za / den_of(m)

    def grad(m: MomentTriple) -> GradientTriple:
        den = den_of(m)
        return GradientTriple(
            (a * m.m_a + b * m.m_z) / (den * den),
            -a * m.m_za / (den * den),
            -b * m.m_za / (den * den),
        )

    return MeasureSpec(
        id=f"tversky({a:g},{b:g})",
        params=(a, b),
        unit_range=True,
        value_fn=value,
        gradient_fn=grad,
        domain_fn=lambda m: den_of(m) > 0.0,
    )


def make_correlation() -> MeasureSpec:
    """Pearson correlation of the two indicators (Matthews phi)."""

    def value(m: MomentTriple) -> float:
        sa = m.m_a * (1.0 - m.m_a)
        sz = m.m_z * (1.0 - m.m_z)
        v = (m.m_za - m.m_a * m.m_z) / math.sqrt(sa * sz)
        return min(1.0, max(-1.0, v))

    def grad(m: MomentTriple) -> GradientTriple:
        sa = m.m_a * (1.0 - m.m_a)
        sz = m.m_z * (1.0 - m.m_z)
        root = math.sqrt(sa * sz)
        return GradientTriple(
            1.0 / root,
            ((2.0 * m.m_a - 1.0) * m.m_za - m.m_a * m.m_z) / (2.0 * sa * root),
            ((2.0 * m.m_z - 1.0) * m.m_za - m.m_a * m.m_z) / (2.0 * sz * root),
        )

    return MeasureSpec(
        id="correlation",
        params=(),
        unit_range=False,
        value_fn=value,
        gradient_fn=grad,
        domain_fn=lambda m: 0.0 < m.m_a < 1.0 and 0.0 < m.m_z < 1.0,
    )


def make_cosine() -> MeasureSpec:
    """Cosine similarity of the indicator vectors,
    ``m_za / sqrt(m_a * m_z)``."""

    def value(m: MomentTriple) -> float:
        return m.m_za / math.sqrt(m.m_a * m.m_z)

    def grad(m: MomentTriple) -> GradientTriple:
        root = math.sqrt(m.m_a * m.m_z)
        return GradientTriple(
            1.0 / root,
            -m.m_za / (2.0 * m.m_a * root),
            -m.m_za / (2.0 * m.m_z * root),
        )

    return MeasureSpec(
        id="cosine",
        params=(),
        unit_range=True,
        value_fn=value,
        gradient_fn=grad,
        domain_fn=lambda m: m.m_a > 0.0 and m.m_z > 0.0,
    )


def make_lift() -> MeasureSpec:
    """Co-occurrence over independence, ``m_za / (m_a * m_z)``."""

    def value(m: MomentTriple) -> float:
        return m.m_za / (m.m_a * m.m_z)

    def grad(m: MomentTriple) -> GradientTriple:
        return GradientTriple(
            1.0 / (m.m_a * m.m_z),
            -m.m_za / (m.m_a * m.m_a * m.m_z),
            -m.m_za / (m.m_a * m.m_z * m.m_z),
        )

    return MeasureSpec(
        id="lift",
        params=(),
        unit_range=False,
        value_fn=value,
        gradient_fn=grad,
        domain_fn=lambda m: m.m_a > 0.0 and m.m_z > 0.0,
    )


def make_overlap() -> MeasureSpec:
    """Szymkiewicz-Simpson coefficient, ``m_za / min(m_a, m_z)``.

    The value is defined whenever ``min(m_a, m_z) > 0``; the gradient
    additionally needs ``m_a != m_z`` because of the min kink.
    """

    def value(m: MomentTriple) -> float:
        return m.m_za / min(m.m_a, m.m_z)

    def grad(m: MomentTriple) -> GradientTriple:
        if m.m_a < m.m_z:
            return GradientTriple(1.0 / m.m_a, -m.m_za / (m.m_a * m.m_a), 0.0)
        return GradientTriple(1.0 / m.m_z, 0.0, -m.m_za / (m.m_z * m.m_z))

    return MeasureSpec(
        id="overlap",
        params=(),
        unit_range=True,
        value_fn=value,
        gradient_fn=grad,
        domain_fn=lambda m: min(m.m_a, m.m_z) > 0.0,
        gradient_domain_fn=lambda m: m.m_a != m.m_z,
    )


def builtin_measures() -> tuple[MeasureSpec, ...]:
    """The nine stock measures, parameterized entries at their defaults."""
    return (
        make_accuracy(),
        make_f_beta(1.0),
        make_f_beta(0.5),
        make_jaccard(),
        make_tversky(0.5, 0.5),
        make_correlation(),
        make_cosine(),
        make_lift(),
        make_overlap(),
    )


# ---------------------------------------------------------------------------
# Catalog: registration and id resolution
# ---------------------------------------------------------------------------

_PARAM_ID = re.compile(r"^([a-z_][a-z0-9_]*)\(([^()]*)\)$")


class MeasureCatalog:
    """Mutable registry of measures keyed by canonical id.

    Parameterized built-in families (``f_beta``, ``tversky``) resolve
    lazily: ``resolve("f_beta(2)")`` constructs and caches the instance.
    Explicitly registered measures always win over lazy construction.
    """

    def __init__(self, include_builtins: bool = True):
        self._measures: dict[str, MeasureSpec] = {}
        if include_builtins:
            for spec in builtin_measures():
                self._measures[spec.id] = spec

    def ids(self) -> tuple[str, ...]:
        return tuple(self._measures)

    def register(self, measure: MeasureSpec) -> None:
        if measure.id in self._measures:
            raise DuplicateIdError(measure.id)
        self._measures[measure.id] = measure

    def resolve(self, measure_id: str) -> MeasureSpec:
        key = measure_id.strip()
        if key in self._measures:
            return self._measures[key]
        spec = self._parse_parameterized(key)
        if spec is None:
            raise UnknownMeasureError(measure_id, self.ids())
        self._measures.setdefault(spec.id, spec)
        return spec

    def _parse_parameterized(self, key: str) -> MeasureSpec | None:
        match = _PARAM_ID.match(key.replace(" ", ""))
        if match is None:
            return None
        family, raw_args = match.groups()
        try:
            args = tuple(float(tok) for tok in raw_args.split(",") if tok != "")
        except ValueError:
            return None
        if family == "f_beta" and len(args) == 1:
            return make_f_beta(args[0])
        if family == "tversky" and len(args) == 2:
            return make_tversky(args[0], args[1])
        return None


_DEFAULT = MeasureCatalog()


def default_catalog() -> MeasureCatalog:
    """The module-wide catalog used when callers pass none."""
    return _DEFAULT


def resolve_measure(measure_id: str, catalog: MeasureCatalog | None = None) -> MeasureSpec:
    return (catalog or _DEFAULT).resolve(measure_id)


def _as_spec(measure: MeasureSpec | str, catalog: MeasureCatalog | None) -> MeasureSpec:
    if isinstance(measure, MeasureSpec):
        return measure
    return resolve_measure(measure, catalog)


def evaluate(
    measure: MeasureSpec | str,
    m: MomentTriple,
    catalog: MeasureCatalog | None = None,
) -> float:
    """Value of ``measure`` at the moment triple ``m``."""
    return _as_spec(measure, catalog).evaluate(m)


def gradient(
    measure: MeasureSpec | str,
    m: MomentTriple,
    catalog: MeasureCatalog | None = None,
) -> GradientTriple:
    """Gradient of ``measure`` at ``m`` in ``(m_za, m_a, m_z)`` order."""
    return _as_spec(measure, catalog).gradient(m)

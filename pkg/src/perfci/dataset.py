"""Evaluation tables and plug-in moment estimates.

The estimator consumes one table per evaluation: a ground-truth column
``z`` plus one 0/1 column per classification rule, all of common length
``n``.  Point estimates of the moment triple are the column means, so
everything downstream is a smooth function of a few sample averages.

The CSV layout (shared with the command line) is a header row naming
``z`` and the rules, then one 0/1 row per observation.  ``"0.0"`` and
``"1.0"`` style spellings are accepted; anything that is not numerically
0 or 1 is rejected with the exact row and column in the message.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DatasetError,
    DuplicateRuleIdError,
    LengthMismatchError,
    NonBinaryValueError,
    TooFewRowsError,
    UnknownRuleError,
)
from .measures import MomentTriple

__all__ = [
    "BinaryDataset",
    "EvaluationTarget",
    "make_targets",
    "validate_table",
    "read_csv",
    "compute_moments",
]

MIN_ROWS = 2


@dataclass(frozen=True, eq=False)
class EvaluationTarget:
    """One (rule, measure) pair to report on.

    Targets live in ordered collections; a target's position in that
    collection is its index in the covariance matrix and the report.
    """

    rule_id: str
    measure_id: str

    def label(self) -> str:
        return f"{self.rule_id}:{self.measure_id}"


def make_targets(
    rule_ids: Sequence[str], measure_ids: Sequence[str]
) -> tuple[EvaluationTarget, ...]:
    """Rule-major cross product: all measures of rule 1, then rule 2, ..."""
    return tuple(
        EvaluationTarget(r, m) for r in rule_ids for m in measure_ids
    )


class BinaryDataset:
    """Immutable 0/1 evaluation table: truth column plus rule columns.

    Use :meth:`from_arrays`, :func:`validate_table` or :func:`read_csv`
    to construct; the raw constructor trusts its inputs.
    """

    __slots__ = ("_z", "_rules")

    def __init__(self, z: np.ndarray, rules: dict[str, np.ndarray]):
        self._z = z
        self._rules = rules

    # -- construction ------------------------------------------------------

    @classmethod
    def from_arrays(
        cls,
        z: Sequence[int] | np.ndarray,
        rules: Mapping[str, Sequence[int] | np.ndarray] | Iterable[tuple[str, object]],
    ) -> "BinaryDataset":
        """Validate columns given as arrays / sequences.

        ``rules`` may be a mapping or an iterable of ``(rule_id, column)``
        pairs; the pair form can surface duplicate rule ids.
        """
        pairs = list(rules.items()) if isinstance(rules, Mapping) else list(rules)
        seen: set[str] = set()
        for rule_id, _ in pairs:
            if rule_id == "z" or rule_id in seen:
                raise DuplicateRuleIdError(rule_id)
            seen.add(rule_id)
        if not pairs:
            raise DatasetError("table needs at least one rule column besides z")

        z_arr = _as_binary_column(z, "z")
        n = z_arr.shape[0]
        if n < MIN_ROWS:
            raise TooFewRowsError(n)
        cols: dict[str, np.ndarray] = {}
        for rule_id, values in pairs:
            col = _as_binary_column(values, rule_id)
            if col.shape[0] != n:
                raise LengthMismatchError(
                    f"column {rule_id!r} has {col.shape[0]} rows, z has {n}"
                )
            cols[rule_id] = col
        return cls(z_arr, cols)

    # -- basic accessors ---------------------------------------------------

    @property
    def n(self) -> int:
        return int(self._z.shape[0])

    @property
    def z(self) -> np.ndarray:
        return self._z

    @property
    def rule_ids(self) -> tuple[str, ...]:
        return tuple(self._rules)

    def rule(self, rule_id: str) -> np.ndarray:
        try:
            return self._rules[rule_id]
        except KeyError:
            raise UnknownRuleError(rule_id, self.rule_ids) from None

    def __repr__(self) -> str:
        return f"BinaryDataset(n={self.n}, rules={list(self._rules)})"


def _as_binary_column(values, col: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise DatasetError(f"column {col!r} must be one-dimensional")
    out = np.empty(arr.shape[0], dtype=np.uint8)
    for i, v in enumerate(arr):
        try:
            f = float(v)
        except (TypeError, ValueError):
            raise NonBinaryValueError(i + 1, col, v) from None
        if f == 0.0:
            out[i] = 0
        elif f == 1.0:
            out[i] = 1
        else:
            raise NonBinaryValueError(i + 1, col, v)
    return out


def validate_table(
    header: Sequence[str], rows: Iterable[Sequence[str]]
) -> BinaryDataset:
    """Build a dataset from a raw header + cell grid.

    Raises the specific :class:`~perfci.errors.DatasetError` subclass
    for each defect: unknown/duplicate columns, ragged rows, non-binary
    cells, too few rows.
    """
    names = [h.strip() for h in header]
    if names.count("z") == 0:
        raise DatasetError("header must contain a 'z' column")
    if names.count("z") > 1:
        raise DuplicateRuleIdError("z")
    seen: set[str] = set()
    for name in names:
        if name != "z":
            if name in seen:
                raise DuplicateRuleIdError(name)
            seen.add(name)
    if len(names) < 2:
        raise DatasetError("table needs at least one rule column besides z")

    width = len(names)
    columns: list[list[int]] = [[] for _ in names]
    n = 0
    for row in rows:
        cells = list(row)
        if len(cells) == 0:
            continue  # ignore blank trailing lines
        n += 1
        if len(cells) != width:
            raise LengthMismatchError(
                f"row {n} has {len(cells)} fields, header has {width}"
            )
        for j, tok in enumerate(cells):
            columns[j].append(_parse_binary_cell(tok, n, names[j]))
    if n < MIN_ROWS:
        raise TooFewRowsError(n)

    z_idx = names.index("z")
    z_arr = np.asarray(columns[z_idx], dtype=np.uint8)
    rules = {
        names[j]: np.asarray(columns[j], dtype=np.uint8)
        for j in range(width)
        if j != z_idx
    }
    return BinaryDataset(z_arr, rules)


def _parse_binary_cell(token: str, row: int, col: str) -> int:
    tok = token.strip()
    try:
        value = float(tok)
    except ValueError:
        raise NonBinaryValueError(row, col, token) from None
    if value == 0.0:
        return 0
    if value == 1.0:
        return 1
    raise NonBinaryValueError(row, col, token)


def read_csv(source: str | os.PathLike | io.TextIOBase) -> BinaryDataset:
    """Read and validate an evaluation table from a CSV file or stream."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="") as fh:
            return _read_csv_stream(fh)
    return _read_csv_stream(source)


def _read_csv_stream(stream) -> BinaryDataset:
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetError("empty input: no header row") from None
    return validate_table(header, reader)


def compute_moments(data: BinaryDataset, rule_id: str) -> MomentTriple:
    """Plug-in moment triple for one rule: sample means of ZA, A, Z."""
    a = data.rule(rule_id)
    z = data.z
    n = data.n
    return MomentTriple(
        m_za=float(np.sum(z * a)) / n,
        m_a=float(np.sum(a)) / n,
        m_z=float(np.sum(z)) / n,
    )

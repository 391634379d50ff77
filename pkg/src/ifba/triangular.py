"""Continuous t-norms and t-conorms on the unit interval.

Built-in kinds are closed-form; a tabulated kind interpolates bilinearly in
a grid loaded from CSV. Axiom checks are exhaustive over a uniform grid and
report, for each failed axiom, the grid tuple with the largest violation.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple

import numpy as np

from .errors import ConfigurationError, DomainError
from .report import AxiomRecord, AxiomReport

#: absolute slack for every equality/inequality in the axiom predicates
AXIOM_TOL = 1e-12


class TNormKind(str, Enum):
    MINIMUM = "minimum"
    PRODUCT = "product"
    LUKASIEWICZ = "lukasiewicz"
    TABULATED = "tabulated"


class TConormKind(str, Enum):
    MAXIMUM = "maximum"
    PROBABILISTIC_SUM = "probabilistic_sum"
    BOUNDED_SUM = "bounded_sum"
    TABULATED = "tabulated"


_TNORM_FORMULAS: dict[TNormKind, Callable] = {
    TNormKind.MINIMUM: np.minimum,
    TNormKind.PRODUCT: np.multiply,
    TNormKind.LUKASIEWICZ: lambda a, b: np.maximum(a + b - 1.0, 0.0),
}

_TCONORM_FORMULAS: dict[TConormKind, Callable] = {
    TConormKind.MAXIMUM: np.maximum,
    TConormKind.PROBABILISTIC_SUM: lambda a, b: a + b - a * b,
    TConormKind.BOUNDED_SUM: lambda a, b: np.minimum(a + b, 1.0),
}


@dataclass(frozen=True, eq=False)
class Table:
    """Values of a binary operation on a rectilinear grid of ``[0,1]^2``.

    ``values[i, j]`` is the operation at ``(row_axis[i], col_axis[j])``.
    """

    row_axis: np.ndarray
    col_axis: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.row_axis, dtype=np.float64)
        cols = np.asarray(self.col_axis, dtype=np.float64)
        vals = np.asarray(self.values, dtype=np.float64)
        if rows.size == 0 or cols.size == 0 or vals.size == 0:
            raise ConfigurationError("tabulated operation has an empty table")
        if vals.shape != (rows.size, cols.size):
            raise ConfigurationError(
                f"table shape {vals.shape} does not match axes ({rows.size}, {cols.size})"
            )
        for name, axis in (("row", rows), ("column", cols)):
            if axis.size < 2 or axis[0] != 0.0 or axis[-1] != 1.0 or np.any(np.diff(axis) <= 0):
                raise ConfigurationError(
                    f"{name} axis must increase strictly from 0 to 1 with at least two points"
                )
        if not np.all(np.isfinite(vals)):
            raise ConfigurationError("table contains non-finite values")
        object.__setattr__(self, "row_axis", rows)
        object.__setattr__(self, "col_axis", cols)
        object.__setattr__(self, "values", vals)

    @property
    def resolution(self) -> tuple[int, int]:
        return self.values.shape

    def interpolate(self, a, b):
        """Bilinear interpolation; arguments are clamped into ``[0,1]``."""
        a = np.clip(np.asarray(a, dtype=np.float64), 0.0, 1.0)
        b = np.clip(np.asarray(b, dtype=np.float64), 0.0, 1.0)
        i = np.clip(np.searchsorted(self.row_axis, a, side="right") - 1, 0, self.row_axis.size - 2)
        j = np.clip(np.searchsorted(self.col_axis, b, side="right") - 1, 0, self.col_axis.size - 2)
        a0, a1 = self.row_axis[i], self.row_axis[i + 1]
        b0, b1 = self.col_axis[j], self.col_axis[j + 1]
        u = (a - a0) / (a1 - a0)
        w = (b - b0) / (b1 - b0)
        v = self.values
        # exact at grid nodes: u or w equal to 0 drops the far corners
        return (
            (1.0 - u) * (1.0 - w) * v[i, j]
            + (1.0 - u) * w * v[i, j + 1]
            + u * (1.0 - w) * v[i + 1, j]
            + u * w * v[i + 1, j + 1]
        )

    @classmethod
    def from_function(cls, func: Callable, resolution: int) -> "Table":
        axis = np.linspace(0.0, 1.0, resolution)
        aa, bb = np.meshgrid(axis, axis, indexing="ij")
        return cls(axis, axis, np.asarray(func(aa, bb), dtype=np.float64))

    @classmethod
    def from_csv(cls, path: str | os.PathLike) -> "Table":
        """Load a table: first row holds column coordinates, first column row coordinates."""
        with open(path, newline="") as fh:
            rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
        if len(rows) < 2:
            raise ConfigurationError(f"{path}: table needs a header row and at least one data row")
        width = len(rows[0])
        for k, row in enumerate(rows):
            if len(row) != width:
                raise ConfigurationError(f"{path}: row {k + 1} has {len(row)} cells, expected {width}")
        try:
            cols = [float(c) for c in rows[0][1:]]
            row_axis = [float(r[0]) for r in rows[1:]]
            values = [[float(c) for c in r[1:]] for r in rows[1:]]
        except ValueError as exc:
            raise ConfigurationError(f"{path}: non-numeric cell ({exc})") from None
        return cls(np.array(row_axis), np.array(cols), np.array(values))

    def to_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([""] + [repr(float(c)) for c in self.col_axis])
            for a, row in zip(self.row_axis, self.values):
                writer.writerow([repr(float(a))] + [repr(float(v)) for v in row])


class _TriangularOp:
    identity: float
    family: str

    def __init__(self, kind, table: Table | None = None):
        self.kind = kind
        self.table = table

    def _formula(self):
        raise NotImplementedError

    def raw(self, a, b):
        """Unclipped, unvalidated vectorized evaluation."""
        if self.kind.value == "tabulated":
            if self.table is None:
                raise ConfigurationError(f"tabulated {self.family} has no table")
            return self.table.interpolate(a, b)
        return self._formula()(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))

    def __call__(self, a: float, b: float) -> float:
        for name, v in (("a", a), ("b", b)):
            if not (0.0 <= v <= 1.0):
                raise DomainError(name, f"{v!r} is outside [0, 1]")
        # range contract: tabulated values outside [0,1] are clipped here and
        # surfaced only by check_triangular_axioms
        return float(np.clip(self.raw(a, b), 0.0, 1.0))

    def describe(self) -> dict:
        out = {"family": self.family, "kind": self.kind.value}
        if self.table is not None:
            out["table_resolution"] = list(self.table.resolution)
            out["interpolation"] = "bilinear"
        return out

    def __repr__(self):
        return f"{type(self).__name__}({self.kind.value!r})"


class TriangularNorm(_TriangularOp):
    """A t-norm: the fuzzy conjunction with identity 1."""

    identity = 1.0
    family = "t-norm"

    def __init__(self, kind: TNormKind | str, table: Table | None = None):
        kind = TNormKind(kind)
        if kind is TNormKind.TABULATED and table is None:
            raise ConfigurationError("tabulated t-norm requires a table")
        super().__init__(kind, table)

    def _formula(self):
        return _TNORM_FORMULAS[self.kind]

    @classmethod
    def tabulated(cls, table: Table) -> "TriangularNorm":
        return cls(TNormKind.TABULATED, table)


class TriangularConorm(_TriangularOp):
    """A t-conorm: the fuzzy disjunction with identity 0."""

    identity = 0.0
    family = "t-conorm"

    def __init__(self, kind: TConormKind | str, table: Table | None = None):
        kind = TConormKind(kind)
        if kind is TConormKind.TABULATED and table is None:
            raise ConfigurationError("tabulated t-conorm requires a table")
        super().__init__(kind, table)

    def _formula(self):
        return _TCONORM_FORMULAS[self.kind]

    @classmethod
    def tabulated(cls, table: Table) -> "TriangularConorm":
        return cls(TConormKind.TABULATED, table)


BUILTIN_TNORMS = tuple(TriangularNorm(k) for k in TNormKind if k is not TNormKind.TABULATED)
BUILTIN_TCONORMS = tuple(TriangularConorm(k) for k in TConormKind if k is not TConormKind.TABULATED)


def tnorm_eval(op: TriangularNorm, a: float, b: float) -> float:
    return op(a, b)


def tconorm_eval(op: TriangularConorm, a: float, b: float) -> float:
    return op(a, b)


def _grid(resolution: int) -> np.ndarray:
    if resolution < 3:
        raise DomainError("grid_resolution", f"must be >= 3, got {resolution}")
    return np.linspace(0.0, 1.0, int(resolution))


def _record(axiom_id, violation, n_checked, make_witness) -> AxiomRecord:
    bad = violation > AXIOM_TOL
    failures = int(np.count_nonzero(bad))
    if not failures:
        return AxiomRecord(axiom_id, "pass", n_checked)
    idx = np.unravel_index(int(np.argmax(violation)), violation.shape)
    witness = {k: (float(v) if not isinstance(v, str) else v) for k, v in make_witness(idx).items()}
    return AxiomRecord(axiom_id, "fail", n_checked, failures, witness)


def check_triangular_axioms(op: _TriangularOp, grid_resolution: int = 11) -> AxiomReport:
    """Check commutativity, associativity, boundary and monotonicity on a grid.

    The boundary record covers both the identity law and closure of the
    value range in ``[0,1]``. Each failure carries the grid tuple of largest
    violation (first in row-major order on ties).
    """
    g = _grid(grid_resolution)
    n = g.size
    aa, bb = np.meshgrid(g, g, indexing="ij")
    table = np.asarray(op.raw(aa, bb), dtype=np.float64)
    records = []

    comm = np.abs(table - table.T)
    records.append(
        _record(
            "commutativity",
            comm,
            n * n,
            lambda ij: {
                "a": g[ij[0]],
                "b": g[ij[1]],
                "lhs": table[ij],
                "rhs": table[ij[::-1]],
            },
        )
    )

    a3, b3, c3 = np.meshgrid(g, g, g, indexing="ij")
    ab = np.clip(op.raw(a3, b3), 0.0, 1.0)
    bc = np.clip(op.raw(b3, c3), 0.0, 1.0)
    left = op.raw(ab, c3)
    right = op.raw(a3, bc)
    records.append(
        _record(
            "associativity",
            np.abs(left - right),
            n**3,
            lambda ijk: {
                "a": g[ijk[0]],
                "b": g[ijk[1]],
                "c": g[ijk[2]],
                "lhs": left[ijk],
                "rhs": right[ijk],
            },
        )
    )

    excess = np.maximum(table - 1.0, 0.0) + np.maximum(-table, 0.0)
    ident_col = int(np.argmin(np.abs(g - op.identity)))
    ident_err = np.zeros_like(table)
    ident_err[:, ident_col] = np.abs(table[:, ident_col] - g)
    boundary = np.maximum(excess, ident_err)

    def _boundary_witness(ij):
        a, b = g[ij[0]], g[ij[1]]
        value = table[ij]
        if excess[ij] >= ident_err[ij]:
            return {"a": a, "b": b, "lhs": value, "rhs": float(np.clip(value, 0.0, 1.0)), "law": "range"}
        return {"a": a, "b": b, "lhs": value, "rhs": a, "law": "identity"}

    records.append(_record("boundary", boundary, n * n, _boundary_witness))

    # monotone in each argument on the grid <=> monotone on every 4-tuple
    drop_a = np.zeros_like(table)
    drop_a[:-1, :] = np.maximum(table[:-1, :] - table[1:, :], 0.0)
    drop_b = np.zeros_like(table)
    drop_b[:, :-1] = np.maximum(table[:, :-1] - table[:, 1:], 0.0)
    mono = np.maximum(drop_a, drop_b)

    def _mono_witness(ij):
        i, j = ij
        if drop_a[ij] >= drop_b[ij]:
            c, d = g[i + 1], g[j]
            rhs = table[i + 1, j]
        else:
            c, d = g[i], g[j + 1]
            rhs = table[i, j + 1]
        return {"a": g[i], "b": g[j], "c": c, "d": d, "lhs": table[ij], "rhs": rhs}

    records.append(_record("monotonicity", mono, n**4, _mono_witness))

    constants = {"grid_resolution": n, "tolerance": AXIOM_TOL, "operation": op.describe()}
    if op.table is not None:
        constants["continuity"] = "pointwise grid conformance only; off-grid values bilinearly interpolated"
    return AxiomReport(model=f"{op.family}:{op.kind.value}", seed=None, samples=n, axioms=records, constants=constants)


class Idempotency(NamedTuple):
    idempotent: bool
    witness: float | None = None
    value: float | None = None


def is_idempotent(op: _TriangularOp, grid_resolution: int = 11) -> Idempotency:
    """Test ``op(a, a) == a`` on the grid; the witness is the worst offender."""
    g = _grid(grid_resolution)
    diag = np.asarray(op.raw(g, g), dtype=np.float64)
    err = np.abs(diag - g)
    if np.all(err <= AXIOM_TOL):
        return Idempotency(True)
    k = int(np.argmax(err))
    return Idempotency(False, float(g[k]), float(diag[k]))

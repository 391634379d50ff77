"""Concrete real algebras with crisp norms and a direct-inversion oracle.

Four carriers are provided:

``scalar``
    the reals with the absolute value;
``matrix:n=N``
    dense ``N x N`` real matrices with the Frobenius norm;
``series:d=D``
    power series truncated after degree ``D`` (Cauchy product, sum of
    absolute coefficients as norm);
``nullprod:m=M``
    ``R^M`` with the Euclidean norm and the null product ``xy = 0``.

The Frobenius and coefficient-sum norms are submultiplicative, so every
unital carrier here is a (finite-dimensional, hence complete) Banach
algebra.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .errors import ConfigurationError, NonInvertible, StructuralError, UnsupportedOperation

#: a matrix pivot below this fraction of the Frobenius norm means singular
PIVOT_RELATIVE_FLOOR = 1e-12
#: a truncated series whose constant term is below this is not invertible
SERIES_CONSTANT_FLOOR = 1e-15
#: relative residual every returned inverse must satisfy
INVERSE_RESIDUAL_TOL = 1e-8


class ModelKind(str, Enum):
    SCALAR = "scalar"
    MATRIX = "matrix"
    SERIES = "series"
    NULLPROD = "nullprod"


class NormKind(str, Enum):
    ABSOLUTE_VALUE = "absolute_value"
    FROBENIUS = "frobenius"
    COEFFICIENT_SUM = "coefficient_sum"
    EUCLIDEAN = "euclidean"


_DIM_KEY = {ModelKind.MATRIX: "n", ModelKind.SERIES: "d", ModelKind.NULLPROD: "m"}
_NORMS = {
    ModelKind.SCALAR: NormKind.ABSOLUTE_VALUE,
    ModelKind.MATRIX: NormKind.FROBENIUS,
    ModelKind.SERIES: NormKind.COEFFICIENT_SUM,
    ModelKind.NULLPROD: NormKind.EUCLIDEAN,
}


def parse_model_spec(spec: str) -> tuple[str, dict[str, str]]:
    """Split ``kind[:key=value[,key=value]*]`` into its kind and options."""
    spec = spec.strip()
    kind, _, rest = spec.partition(":")
    options: dict[str, str] = {}
    if rest:
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            if not sep or not key.strip() or not value.strip():
                raise ConfigurationError(f"malformed option {item!r} in model spec {spec!r}")
            options[key.strip()] = value.strip()
    return kind.strip(), options


@dataclass(frozen=True)
class AlgebraModel:
    kind: ModelKind
    dim: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if self.kind is ModelKind.SCALAR:
            object.__setattr__(self, "dim", 1)
        elif self.kind is ModelKind.SERIES:
            if self.dim < 0:
                raise ConfigurationError(f"series degree must be >= 0, got {self.dim}")
        elif self.dim < 1:
            raise ConfigurationError(f"{self.kind.value} dimension must be >= 1, got {self.dim}")

    # constructors -------------------------------------------------------

    @classmethod
    def scalar(cls) -> "AlgebraModel":
        return cls(ModelKind.SCALAR)

    @classmethod
    def matrix(cls, n: int) -> "AlgebraModel":
        return cls(ModelKind.MATRIX, n)

    @classmethod
    def series(cls, d: int) -> "AlgebraModel":
        return cls(ModelKind.SERIES, d)

    @classmethod
    def nullprod(cls, m: int) -> "AlgebraModel":
        return cls(ModelKind.NULLPROD, m)

    @classmethod
    def parse(cls, spec: str) -> "AlgebraModel":
        kind, options = parse_model_spec(spec)
        try:
            mk = ModelKind(kind)
        except ValueError:
            raise ConfigurationError(f"unknown model kind {kind!r} in {spec!r}") from None
        if mk is ModelKind.SCALAR:
            if options:
                raise ConfigurationError(f"scalar model takes no options, got {sorted(options)}")
            return cls.scalar()
        key = _DIM_KEY[mk]
        unknown = set(options) - {key}
        if unknown:
            raise ConfigurationError(f"unknown option(s) {sorted(unknown)} for {kind}")
        if key not in options:
            raise ConfigurationError(f"{kind} model requires option {key}=<int>")
        try:
            dim = int(options[key])
        except ValueError:
            raise ConfigurationError(f"option {key} must be an integer, got {options[key]!r}") from None
        return cls(mk, dim)

    # structure ----------------------------------------------------------

    @property
    def tag(self) -> str:
        if self.kind is ModelKind.SCALAR:
            return "scalar"
        return f"{self.kind.value}:{_DIM_KEY[self.kind]}={self.dim}"

    def __str__(self):
        return self.tag

    @property
    def shape(self) -> tuple[int, ...]:
        if self.kind is ModelKind.SCALAR:
            return ()
        if self.kind is ModelKind.MATRIX:
            return (self.dim, self.dim)
        if self.kind is ModelKind.SERIES:
            return (self.dim + 1,)
        return (self.dim,)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=int))

    @property
    def norm_kind(self) -> NormKind:
        return _NORMS[self.kind]

    @property
    def unital(self) -> bool:
        return self.kind is not ModelKind.NULLPROD

    def element(self, data) -> "AlgebraElement":
        return AlgebraElement(self, data)

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, np.zeros(self.shape))

    def unit(self) -> "AlgebraElement":
        if not self.unital:
            raise UnsupportedOperation(f"{self.tag} has no unit")
        if self.kind is ModelKind.SCALAR:
            return AlgebraElement(self, 1.0)
        if self.kind is ModelKind.MATRIX:
            return AlgebraElement(self, np.eye(self.dim))
        payload = np.zeros(self.shape)
        payload[0] = 1.0
        return AlgebraElement(self, payload)

    # batched arithmetic on raw payload arrays ---------------------------

    def batch_norm(self, arr) -> np.ndarray:
        """Crisp norms of a stack of payloads with shape ``(..., *self.shape)``."""
        arr = np.asarray(arr, dtype=np.float64)
        k = len(self.shape)
        if k == 0:
            return np.abs(arr)
        axes = tuple(range(arr.ndim - k, arr.ndim))
        if self.kind is ModelKind.SERIES:
            return np.sum(np.abs(arr), axis=axes)
        return np.sqrt(np.sum(arr * arr, axis=axes))

    def batch_mul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if self.kind is ModelKind.SCALAR:
            return a * b
        if self.kind is ModelKind.MATRIX:
            return np.matmul(a, b)
        if self.kind is ModelKind.NULLPROD:
            return np.zeros(np.broadcast_shapes(a.shape, b.shape))
        a, b = np.broadcast_arrays(a, b)
        lead = a.shape[:-1]
        d = a.shape[-1]
        out = kernels.batch_cauchy_product(
            np.ascontiguousarray(a.reshape(-1, d)), np.ascontiguousarray(b.reshape(-1, d))
        )
        return out.reshape(*lead, d)

    # sampling -----------------------------------------------------------

    def random_batch(self, rng: np.random.Generator, count: int, low: float = -10.0, high: float = 10.0):
        return rng.uniform(low, high, size=(count, *self.shape))

    def random(self, rng: np.random.Generator, low: float = -10.0, high: float = 10.0) -> "AlgebraElement":
        return AlgebraElement(self, rng.uniform(low, high, size=self.shape))

    def random_direction(self, rng: np.random.Generator) -> "AlgebraElement":
        """A direction drawn uniformly from the unit sphere of the crisp norm."""
        if self.kind is ModelKind.SCALAR:
            return AlgebraElement(self, 1.0 if rng.random() < 0.5 else -1.0)
        if self.norm_kind is NormKind.COEFFICIENT_SUM:
            mags = rng.exponential(size=self.shape)
            signs = np.where(rng.random(size=self.shape) < 0.5, -1.0, 1.0)
            v = signs * mags / mags.sum()
        else:
            v = rng.standard_normal(size=self.shape)
            v = v / np.sqrt(np.sum(v * v))
        return AlgebraElement(self, v)


class AlgebraElement:
    """An immutable element of an :class:`AlgebraModel`.

    Arithmetic operators follow the algebra: ``x + y``, ``x - y``, ``x * y``
    (algebra product), ``c * x`` and ``x / c`` for real ``c``.
    """

    __slots__ = ("model", "payload")

    def __init__(self, model: AlgebraModel, payload):
        arr = np.array(payload, dtype=np.float64)
        if arr.shape != model.shape:
            raise StructuralError(f"payload shape {arr.shape} does not match {model.tag} shape {model.shape}")
        if not np.all(np.isfinite(arr)):
            raise ConfigurationError(f"non-finite entries in {model.tag} element")
        arr.setflags(write=False)
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "payload", arr)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    def _check(self, other) -> "AlgebraElement":
        if not isinstance(other, AlgebraElement):
            raise StructuralError(f"expected AlgebraElement, got {type(other).__name__}")
        if other.model != self.model:
            raise StructuralError(f"model mismatch: {self.model.tag} vs {other.model.tag}")
        return other

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        other = self._check(other)
        return AlgebraElement(self.model, self.payload - other.payload)

    def __neg__(self):
        return AlgebraElement(self.model, -self.payload)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return mul(self, other)
        if isinstance(other, (int, float, np.integer, np.floating)):
            return scale(float(other), self)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return scale(float(other), self)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return scale(1.0 / float(other), self)
        return NotImplemented

    def __eq__(self, other):
        return (
            isinstance(other, AlgebraElement)
            and other.model == self.model
            and bool(np.array_equal(self.payload, other.payload))
        )

    __hash__ = None

    def norm(self) -> float:
        return crisp_norm(self)

    def is_zero(self) -> bool:
        return not np.any(self.payload)

    def tolist(self):
        return self.payload.tolist()

    def to_dict(self) -> dict:
        return {"model": self.model.tag, "payload": self.payload.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "AlgebraElement":
        return cls(AlgebraModel.parse(data["model"]), data["payload"])

    def __repr__(self):
        return f"AlgebraElement({self.model.tag}, {self.payload.tolist()!r})"


def add(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    y = x._check(y)
    return AlgebraElement(x.model, x.payload + y.payload)


def mul(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    y = x._check(y)
    m = x.model
    if m.kind is ModelKind.SCALAR:
        return AlgebraElement(m, x.payload * y.payload)
    if m.kind is ModelKind.MATRIX:
        return AlgebraElement(m, x.payload @ y.payload)
    if m.kind is ModelKind.SERIES:
        return AlgebraElement(m, kernels.cauchy_product(x.payload, y.payload))
    return m.zero()


def scale(c: float, x: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(x.model, float(c) * x.payload)


def crisp_norm(x: AlgebraElement) -> float:
    return float(x.model.batch_norm(x.payload))


def direct_inverse(x: AlgebraElement) -> AlgebraElement:
    """Inverse by an exact method, or raise :class:`NonInvertible`.

    Scalars use the reciprocal, matrices Gauss-Jordan elimination with
    partial pivoting (singular when a pivot drops below ``1e-12 * ||x||``),
    truncated series the degree-by-degree coefficient solve (singular when
    the constant term is below ``1e-15`` in magnitude). A returned inverse
    always satisfies ``||x inv - e|| <= 1e-8 max(1, ||x|| ||inv||)``.
    """
    m = x.model
    if not m.unital:
        raise UnsupportedOperation(f"{m.tag} is not unital; inversion is undefined")
    if m.kind is ModelKind.SCALAR:
        v = float(x.payload)
        if v == 0.0:
            raise NonInvertible("zero scalar")
        inv = AlgebraElement(m, 1.0 / v)
    elif m.kind is ModelKind.MATRIX:
        floor = PIVOT_RELATIVE_FLOOR * crisp_norm(x)
        out = kernels.gauss_jordan_inverse(np.ascontiguousarray(x.payload), floor)
        if out is None:
            raise NonInvertible(f"pivot below {floor:.3e}")
        inv = AlgebraElement(m, out)
    else:
        out = kernels.series_reciprocal(np.ascontiguousarray(x.payload), SERIES_CONSTANT_FLOOR)
        if out is None:
            raise NonInvertible("constant coefficient below 1e-15")
        inv = AlgebraElement(m, out)
    resid = crisp_norm(mul(x, inv) - m.unit())
    if resid > INVERSE_RESIDUAL_TOL * max(1.0, crisp_norm(x) * crisp_norm(inv)):
        raise NonInvertible(f"inverse residual {resid:.3e} too large")
    return inv


def is_invertible(x: AlgebraElement) -> bool:
    try:
        direct_inverse(x)
    except NonInvertible:
        return False
    return True


def singularity_indicator(x: AlgebraElement) -> float:
    """A continuous real function vanishing exactly on non-invertible elements.

    The determinant for matrices, the value for scalars and the constant
    coefficient for truncated series. A sign change along a segment proves
    that the segment meets the non-invertible set.
    """
    m = x.model
    if m.kind is ModelKind.SCALAR:
        return float(x.payload)
    if m.kind is ModelKind.MATRIX:
        return float(kernels.determinant(np.ascontiguousarray(x.payload)))
    if m.kind is ModelKind.SERIES:
        return float(x.payload[0])
    raise UnsupportedOperation(f"{m.tag} is not unital")


# CSV layouts ---------------------------------------------------------------


def _read_rows(path) -> list[list[float]]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    try:
        return [[float(c) for c in r] for r in rows]
    except ValueError as exc:
        raise ConfigurationError(f"{path}: non-numeric cell ({exc})") from None


def load_element_csv(model: AlgebraModel, path: str | os.PathLike) -> AlgebraElement:
    """Matrices: ``n`` rows of ``n`` values; other kinds: one row of coefficients."""
    rows = _read_rows(path)
    if model.kind is ModelKind.MATRIX:
        if len(rows) != model.dim or any(len(r) != model.dim for r in rows):
            raise ConfigurationError(f"{path}: expected {model.dim} rows of {model.dim} values")
        return AlgebraElement(model, rows)
    if len(rows) != 1 or len(rows[0]) != max(model.size, 1):
        raise ConfigurationError(f"{path}: expected one row of {max(model.size, 1)} values")
    data = rows[0][0] if model.kind is ModelKind.SCALAR else rows[0]
    return AlgebraElement(model, data)


def save_element_csv(x: AlgebraElement, path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if x.model.kind is ModelKind.MATRIX:
            for row in x.payload:
                writer.writerow([repr(float(v)) for v in row])
        else:
            writer.writerow([repr(float(v)) for v in np.atleast_1d(x.payload)])


def load_sequence_csv(model: AlgebraModel, path: str | os.PathLike) -> list[AlgebraElement]:
    """One element per row; matrices are flattened row-major."""
    rows = _read_rows(path)
    width = max(model.size, 1)
    out = []
    for k, row in enumerate(rows):
        if len(row) != width:
            raise ConfigurationError(f"{path}: row {k + 1} has {len(row)} values, expected {width}")
        out.append(AlgebraElement(model, np.reshape(row, model.shape)))
    if not out:
        raise ConfigurationError(f"{path}: empty sequence")
    return out

"""Fuzzy convergence and Cauchy verdicts over a finite horizon.

"For all n >= n0" is checked on ``n0 .. horizon``; the unbounded Cauchy
offset ``p`` is cut at ``p_max``. Both finite parameters are echoed in every
verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .algebra import AlgebraElement, AlgebraModel, ModelKind, direct_inverse, load_sequence_csv
from .errors import DomainError, StructuralError
from .ifnorm import IFNormModel
from .triangular import AXIOM_TOL

DEFAULT_P_MAX = 16
#: r values used to cross-check the limit formulation against n0 verdicts
CROSS_CHECK_RADII = (0.5, 0.1, 0.01)
LIMIT_TOL = 0.01
TRACE_POINTS = 40


def default_horizon(model: AlgebraModel) -> int:
    return 1_000 if model.kind is ModelKind.MATRIX else 10_000


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class SequenceSpec:
    """A deterministic sequence ``x_1 .. x_horizon`` in one algebra model.

    ``builder`` returns the stacked payloads, shape ``(horizon, *model.shape)``;
    it is called once and cached.
    """

    model: AlgebraModel
    rule: str
    horizon: int
    builder: Callable[[], np.ndarray] = field(repr=False)
    params: dict[str, Any] = field(default_factory=dict)
    _stack: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.horizon < 1:
            raise DomainError("horizon", f"must be >= 1, got {self.horizon}")

    @property
    def stack(self) -> np.ndarray:
        if self._stack is None:
            arr = np.asarray(self.builder(), dtype=np.float64)
            expected = (self.horizon, *self.model.shape)
            if arr.shape != expected:
                raise StructuralError(f"sequence {self.rule!r} produced shape {arr.shape}, expected {expected}")
            arr.setflags(write=False)
            self._stack = arr
        return self._stack

    def __getitem__(self, n: int) -> AlgebraElement:
        """The ``n``-th term, 1-based."""
        if not 1 <= n <= self.horizon:
            raise IndexError(n)
        return AlgebraElement(self.model, self.stack[n - 1])

    def __len__(self):
        return self.horizon

    def to_dict(self) -> dict[str, Any]:
        return {"rule": self.rule, "model": self.model.tag, "horizon": self.horizon, "params": self.params}


def _indices(horizon: int) -> np.ndarray:
    return np.arange(1, horizon + 1, dtype=np.float64)


def _bshape(model: AlgebraModel, v: np.ndarray) -> np.ndarray:
    return v.reshape((-1,) + (1,) * len(model.shape))


def constant(x: AlgebraElement, horizon: int) -> SequenceSpec:
    m = x.model
    return SequenceSpec(
        m, "constant", horizon,
        lambda: np.broadcast_to(x.payload, (horizon, *m.shape)).copy(),
        {"x": x.tolist()},
    )


def perturbation(x: AlgebraElement, a: AlgebraElement, horizon: int) -> SequenceSpec:
    """``x_n = x + a / n``."""
    m = x.model
    x._check(a)
    return SequenceSpec(
        m, "perturbation", horizon,
        lambda: x.payload + _bshape(m, 1.0 / _indices(horizon)) * a.payload,
        {"x": x.tolist(), "a": a.tolist()},
    )


def _powers_stack(q: AlgebraElement, horizon: int) -> np.ndarray:
    m = q.model
    out = np.empty((horizon, *m.shape))
    cur = q.payload
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(horizon):
            out[k] = cur
            cur = m.batch_mul(cur, q.payload)
    return out


def powers(q: AlgebraElement, horizon: int) -> SequenceSpec:
    """``x_n = q^n``."""
    return SequenceSpec(q.model, "powers", horizon, lambda: _powers_stack(q, horizon), {"q": q.tolist()})


def partial_sums(q: AlgebraElement, horizon: int) -> SequenceSpec:
    """``x_n = q + q^2 + ... + q^n``."""
    return SequenceSpec(
        q.model, "partial_sums", horizon,
        lambda: np.cumsum(_powers_stack(q, horizon), axis=0),
        {"q": q.tolist()},
    )


def alternating(x: AlgebraElement, horizon: int, decay: bool = False) -> SequenceSpec:
    """``x_n = (-1)^n x``, or ``(-1)^n x / n`` with ``decay``."""
    m = x.model
    n = _indices(horizon)
    signs = np.where(n % 2 == 0, 1.0, -1.0)
    coef = signs / n if decay else signs
    return SequenceSpec(
        m, "alternating_decay" if decay else "alternating", horizon,
        lambda: _bshape(m, coef) * x.payload,
        {"x": x.tolist()},
    )


def from_elements(elements: Sequence[AlgebraElement], rule: str = "explicit") -> SequenceSpec:
    if not elements:
        raise DomainError("sequence", "empty element list")
    m = elements[0].model
    for e in elements:
        m_e = e.model
        if m_e != m:
            raise StructuralError("sequence elements from different models")
    stack = np.stack([e.payload for e in elements])
    return SequenceSpec(m, rule, len(elements), lambda: stack, {"length": len(elements)})


def from_csv(model: AlgebraModel, path) -> SequenceSpec:
    seq = from_elements(load_sequence_csv(model, path), rule="csv")
    seq.params["path"] = str(path)
    return seq


def pointwise_product(seq_x: SequenceSpec, seq_y: SequenceSpec) -> SequenceSpec:
    if seq_x.model != seq_y.model:
        raise StructuralError("sequences from different models")
    m = seq_x.model
    h = min(seq_x.horizon, seq_y.horizon)
    return SequenceSpec(
        m, "product", h,
        lambda: m.batch_mul(seq_x.stack[:h], seq_y.stack[:h]),
        {"x": seq_x.to_dict(), "y": seq_y.to_dict()},
    )


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------


@dataclass
class ConvergenceVerdict:
    status: str  # "converged" | "not_within_horizon"
    n0: int | None
    r: float
    t: float
    horizon: int
    trace: list[tuple[int, float, float]]
    kind: str = "convergence"
    p_max: int | None = None

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def to_dict(self) -> dict[str, Any]:
        out = {
            "kind": self.kind,
            "status": self.status,
            "n0": self.n0,
            "r": self.r,
            "t": self.t,
            "horizon": self.horizon,
        }
        if self.p_max is not None:
            out["p_max"] = self.p_max
        out["trace"] = [[int(n), float(mu), float(nu)] for n, mu, nu in self.trace]
        return out


def _check_rt(r: float, t: float) -> None:
    if not 0.0 < r < 1.0:
        raise DomainError("r", f"must lie in (0, 1), got {r!r}")
    if not t > 0.0:
        raise DomainError("t", f"must be positive, got {t!r}")


def _first_of_good_tail(ok: np.ndarray) -> int | None:
    """Least 1-based n with ``ok[n-1:]`` all true, or ``None``."""
    if ok.size == 0 or not ok[-1]:
        return None
    bad = np.flatnonzero(~ok)
    return 1 if bad.size == 0 else int(bad[-1]) + 2


def _trace(mu: np.ndarray, nu: np.ndarray, n0: int | None) -> list[tuple[int, float, float]]:
    h = mu.size
    picks = set(np.unique(np.geomspace(1, h, num=min(TRACE_POINTS, h)).round().astype(int)).tolist())
    if n0 is not None:
        picks.update(k for k in (n0 - 1, n0) if 1 <= k <= h)
    return [(n, float(mu[n - 1]), float(nu[n - 1])) for n in sorted(picks)]


def _error_degrees(model: IFNormModel, seq: SequenceSpec, limit: AlgebraElement, t: float):
    if seq.model != model.algebra or limit.model != model.algebra:
        raise StructuralError("sequence, limit and model must share one algebra")
    with np.errstate(invalid="ignore", over="ignore"):
        norms = model.algebra.batch_norm(seq.stack - limit.payload)
    norms = np.where(np.isnan(norms), np.inf, norms)
    return model.degrees(norms, t)


def fuzzy_converges(model: IFNormModel, seq: SequenceSpec, limit: AlgebraElement, r: float, t: float) -> ConvergenceVerdict:
    """Least ``n0`` with mu(x_n - x, t) > 1 - r and nu(x_n - x, t) < r on ``n0..horizon``."""
    _check_rt(r, t)
    mu, nu = _error_degrees(model, seq, limit, t)
    n0 = _first_of_good_tail((mu > 1.0 - r) & (nu < r))
    status = "converged" if n0 is not None else "not_within_horizon"
    return ConvergenceVerdict(status, n0, r, t, seq.horizon, _trace(mu, nu, n0))


@dataclass
class LimitCheck:
    converges: bool
    consistent: bool
    per_t: list[dict[str, Any]]

    def __bool__(self):
        return self.converges

    def to_dict(self) -> dict[str, Any]:
        return {"converges": self.converges, "consistent": self.consistent, "per_t": self.per_t}


def limit_formulation_check(
    model: IFNormModel, seq: SequenceSpec, limit: AlgebraElement, t_set: Iterable[float]
) -> LimitCheck:
    """Check mu(x_n - x, t) -> 1 and nu -> 0 as a finite trend, for each t.

    The trend holds when the final values are within 0.01 of the limits and
    both are monotone over the second half of the horizon. The result is
    cross-checked against :func:`fuzzy_converges` at r in {0.5, 0.1, 0.01}.
    """
    t_list = list(t_set)
    if not t_list:
        raise DomainError("t_set", "must be non-empty")
    per_t = []
    overall = True
    consistent = True
    for t in t_list:
        if not t > 0:
            raise DomainError("t", f"must be positive, got {t!r}")
        mu, nu = _error_degrees(model, seq, limit, t)
        tail = slice(seq.horizon // 2, None)
        mono = bool(
            np.all(np.diff(mu[tail]) >= -AXIOM_TOL) and np.all(np.diff(nu[tail]) <= AXIOM_TOL)
        )
        close = bool(1.0 - mu[-1] <= LIMIT_TOL and nu[-1] <= LIMIT_TOL)
        holds = mono and close
        verdicts = [fuzzy_converges(model, seq, limit, r, t) for r in CROSS_CHECK_RADII]
        agree = holds == all(v.converged for v in verdicts)
        overall &= holds
        consistent &= agree
        per_t.append(
            {
                "t": float(t),
                "final_mu": float(mu[-1]),
                "final_nu": float(nu[-1]),
                "monotone_tail": mono,
                "holds": holds,
                "agrees_with_verdicts": agree,
                "verdict_n0": {str(r): v.n0 for r, v in zip(CROSS_CHECK_RADII, verdicts)},
                "trace": [[n, m_, v_] for n, m_, v_ in _trace(mu, nu, None)],
            }
        )
    return LimitCheck(overall, consistent, per_t)


def fuzzy_cauchy(model: IFNormModel, seq: SequenceSpec, r: float, t: float, p_max: int = DEFAULT_P_MAX) -> ConvergenceVerdict:
    """Least ``n0`` with every gap ``x_{n+p} - x_n`` (``1 <= p <= p_max``) in B(theta, r, t)."""
    _check_rt(r, t)
    if p_max < 1:
        raise DomainError("p_max", f"must be >= 1, got {p_max}")
    if p_max >= seq.horizon:
        raise DomainError("p_max", f"must be below the horizon {seq.horizon}, got {p_max}")
    if seq.model != model.algebra:
        raise StructuralError("sequence and model must share one algebra")
    stack = seq.stack
    span = seq.horizon - p_max
    worst = np.zeros(span)
    with np.errstate(invalid="ignore", over="ignore"):
        for p in range(1, p_max + 1):
            gap = model.algebra.batch_norm(stack[p : p + span] - stack[:span])
            worst = np.maximum(worst, np.where(np.isnan(gap), np.inf, gap))
    mu, nu = model.degrees(worst, t)
    n0 = _first_of_good_tail((mu > 1.0 - r) & (nu < r))
    status = "converged" if n0 is not None else "not_within_horizon"
    return ConvergenceVerdict(status, n0, r, t, span, _trace(mu, nu, n0), kind="cauchy", p_max=p_max)


@dataclass
class ProductLimitReport:
    x_verdict: ConvergenceVerdict
    y_verdict: ConvergenceVerdict
    product_verdict: ConvergenceVerdict

    @property
    def both_converged(self) -> bool:
        return self.x_verdict.converged and self.y_verdict.converged

    @property
    def violation(self) -> bool:
        """Both factors converged but the product did not."""
        return self.both_converged and not self.product_verdict.converged

    def to_dict(self) -> dict[str, Any]:
        return {
            "x": self.x_verdict.to_dict(),
            "y": self.y_verdict.to_dict(),
            "product": self.product_verdict.to_dict(),
            "both_converged": self.both_converged,
            "violation": self.violation,
        }


def product_convergence_check(
    model: IFNormModel,
    seq_x: SequenceSpec,
    x: AlgebraElement,
    seq_y: SequenceSpec,
    y: AlgebraElement,
    r: float,
    t: float,
) -> ProductLimitReport:
    alg = model.algebra
    if not alg.unital:
        raise DomainError("model", f"{alg.tag} is not unital")
    for name, s in (("seq_x", seq_x), ("seq_y", seq_y)):
        if s.model != alg:
            raise DomainError(name, f"sequence model {s.model.tag} differs from {alg.tag}")
    vx = fuzzy_converges(model, seq_x, x, r, t)
    vy = fuzzy_converges(model, seq_y, y, r, t)
    vp = fuzzy_converges(model, pointwise_product(seq_x, seq_y), x * y, r, t)
    return ProductLimitReport(vx, vy, vp)


def builtin_families(alg: AlgebraModel, rng: np.random.Generator, horizon: int | None = None):
    """Seeded instances of every built-in family as ``(name, sequence, limit)``.

    Base elements have entries uniform in [-1, 1]; ratios for the power and
    partial-sum families are rescaled to crisp norm 0.5.
    """
    h = default_horizon(alg) if horizon is None else horizon
    x = alg.random(rng, -1.0, 1.0)
    a = alg.random(rng, -1.0, 1.0)
    q = alg.random(rng, -1.0, 1.0)
    q = q * (0.5 / q.norm())
    out = [
        ("constant", constant(x, h), x),
        ("perturbation", perturbation(x, a, h), x),
        ("powers", powers(q, h), alg.zero()),
        ("alternating_decay", alternating(a, h, decay=True), alg.zero()),
        ("alternating", alternating(a, h), alg.zero()),
    ]
    if alg.unital:
        limit = q * direct_inverse(alg.unit() - q)
        out.insert(3, ("partial_sums", partial_sums(q, h), limit))
    return out


def product_suite(model: IFNormModel, seed: int, r: float = 0.1, t: float = 1.0, horizon: int | None = None):
    """Run :func:`product_convergence_check` over every ordered family pair."""
    rng = np.random.default_rng(seed)
    fam_x = builtin_families(model.algebra, rng, horizon)
    fam_y = builtin_families(model.algebra, rng, horizon)
    results = []
    for name_x, sx, lx in fam_x:
        for name_y, sy, ly in fam_y:
            rep = product_convergence_check(model, sx, lx, sy, ly, r, t)
            results.append((name_x, name_y, rep))
    return results

"""Series inversion and numerical probes of the invertible group.

``neumann_inverse`` sums ``e + x + x^2 + ...``; ``inverse_via_neumann`` and
``resolvent_inverse`` reduce to it. Summation stops once the crisp norm of
the next power drops below ``tol * (1 - ||ratio||)``, which bounds the
residual ``||(e - ratio) s_N - e|| = ||ratio^N||`` by ``tol``. The fuzzy-ball
hypothesis is reported as a certificate; the crisp condition ``||x|| < 1``
together with a decay monitor is what actually gates the summation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .algebra import (
    AlgebraElement,
    ModelKind,
    direct_inverse,
    is_invertible,
    singularity_indicator,
)
from .errors import Diverged, DomainError, NonInvertible, StructuralError, UnsupportedOperation
from .ifnorm import BallSpec, IFNormModel, crisp_ball_radius, in_open_ball, membership

DEFAULT_MAX_TERMS = 100_000
#: consecutive non-decreasing term norms that count as divergence
DIVERGENCE_RUN = 8
#: resampling budget when a perturbed point is not invertible
RESAMPLE_BUDGET = 32
#: counterexamples kept verbatim in a report (all are counted)
MAX_LISTED = 20
BISECTION_STEPS = 60


@dataclass
class NeumannResult:
    approx_inverse: AlgebraElement
    terms_used: int
    residual: float
    norm_x: float
    contractive: bool
    target: str
    fuzzy_certificate: dict[str, Any] | None = None
    term_norms: list[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "approx_inverse": self.approx_inverse.tolist(),
            "terms_used": self.terms_used,
            "residual": self.residual,
            "target": self.target,
            "crisp_certificate": {"norm_x": self.norm_x, "contractive": self.contractive},
            "fuzzy_certificate": self.fuzzy_certificate,
        }


def _require_unital(model: IFNormModel) -> None:
    if not model.algebra.unital:
        raise UnsupportedOperation(f"{model.algebra.tag} is not unital")


def _check_tol(tol: float, max_terms: int) -> None:
    if not tol > 0:
        raise DomainError("tol", f"must be positive, got {tol!r}")
    if max_terms < 1:
        raise DomainError("max_terms", f"must be >= 1, got {max_terms!r}")


def _certificate(model: IFNormModel, ratio: AlgebraElement, ball: BallSpec | None):
    if ball is None:
        return None
    if not ball.center.is_zero():
        raise DomainError("ball", "certificate ball must be centered at theta")
    mu, nu = membership(model, ratio, ball.t)
    return {"r": ball.r, "t": ball.t, "mu": mu, "nu": nu, "ball_member": in_open_ball(model, ball, ratio)}


def _geometric_sum(ratio: AlgebraElement, tol: float, max_terms: int):
    """Partial sum ``e + ratio + ... + ratio^(N-1)`` under the stopping rule."""
    alg = ratio.model
    q = ratio.norm()
    threshold = tol * (1.0 - q) if q < 1.0 else tol
    power = alg.unit()
    total = power.payload.copy()
    terms = 1
    norms: list[float] = []
    prev = None
    rising = 0
    while terms < max_terms:
        power = power * ratio
        pn = power.norm()
        norms.append(pn)
        if pn == 0.0 or pn < threshold:
            break
        if not np.isfinite(pn):
            raise Diverged(f"term norm overflowed after {terms} terms", norms)
        if q >= 1.0:
            rising = rising + 1 if prev is not None and pn >= prev else 0
            if rising >= DIVERGENCE_RUN:
                raise Diverged(
                    f"||ratio|| = {q:.6g} >= 1 and term norms did not decrease over {DIVERGENCE_RUN} terms",
                    norms,
                )
        total += power.payload
        terms += 1
        prev = pn
    return AlgebraElement(alg, total), terms, q, norms


def neumann_inverse(
    model: IFNormModel,
    x: AlgebraElement,
    tol: float = 1e-10,
    max_terms: int = DEFAULT_MAX_TERMS,
    ball: BallSpec | None = None,
) -> NeumannResult:
    """Approximate ``(e - x)^-1`` by its Neumann series.

    Raises :class:`Diverged` when ``||x|| >= 1`` and the term norms stop
    decaying.
    """
    _require_unital(model)
    _check_tol(tol, max_terms)
    alg = model.algebra
    approx, terms, q, norms = _geometric_sum(x, tol, max_terms)
    residual = ((alg.unit() - x) * approx - alg.unit()).norm()
    return NeumannResult(approx, terms, residual, q, q < 1.0, "e - x", _certificate(model, x, ball), norms)


def inverse_via_neumann(
    model: IFNormModel,
    x: AlgebraElement,
    tol: float = 1e-10,
    max_terms: int = DEFAULT_MAX_TERMS,
    ball: BallSpec | None = None,
) -> NeumannResult:
    """Approximate ``x^-1 = e + sum (e - x)^n``."""
    _require_unital(model)
    res = neumann_inverse(model, model.algebra.unit() - x, tol, max_terms, ball)
    res.target = "x"
    res.residual = (x * res.approx_inverse - model.algebra.unit()).norm()
    return res


def resolvent_inverse(
    model: IFNormModel,
    x: AlgebraElement,
    lam: float,
    tol: float = 1e-10,
    max_terms: int = DEFAULT_MAX_TERMS,
    ball: BallSpec | None = None,
) -> NeumannResult:
    """Approximate ``(lam e - x)^-1 = sum_{n>=1} lam^-n x^(n-1)``."""
    _require_unital(model)
    if lam == 0 or not np.isfinite(lam):
        raise DomainError("lambda", f"must be a nonzero finite real, got {lam!r}")
    _check_tol(tol, max_terms)
    alg = model.algebra
    ratio = x / lam
    total, terms, q, norms = _geometric_sum(ratio, tol, max_terms)
    approx = total / lam
    residual = ((lam * alg.unit() - x) * approx - alg.unit()).norm()
    return NeumannResult(approx, terms, residual, q, q < 1.0, "lambda e - x", _certificate(model, ratio, ball), norms)


# ---------------------------------------------------------------------------
# openness of the invertible group
# ---------------------------------------------------------------------------


def _dimension(model: IFNormModel) -> int:
    return max(model.algebra.size, 1)


def _sample_in_ball(model: IFNormModel, rng, center: AlgebraElement, radius: float) -> AlgebraElement:
    u = model.algebra.random_direction(rng)
    rad = radius * rng.random() ** (1.0 / _dimension(model))
    return center + rad * u


def _bisect_crossing(x0: AlgebraElement, x: AlgebraElement) -> AlgebraElement:
    lo, hi = 0.0, 1.0
    f_lo = singularity_indicator(x0)
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        f_mid = singularity_indicator(x0 + mid * (x - x0))
        if f_mid == 0.0:
            lo = hi = mid
            break
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return x0 + (0.5 * (lo + hi)) * (x - x0)


@dataclass
class OpennessProbeReport:
    x0: AlgebraElement
    t: float
    r_star: float
    r: float
    crisp_radius: float
    inverse_norm: float
    samples: int
    seed: int
    pass_count: int = 0
    fail_count: int = 0
    counterexamples: list[dict[str, Any]] = field(default_factory=list)

    @property
    def exceeds_bound(self) -> bool:
        return self.r >= self.r_star

    @property
    def crisp_guarantee(self) -> bool:
        """``radius * ||x0^-1|| < 1``: every point of the ball is invertible."""
        return self.crisp_radius * self.inverse_norm < 1.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "x0": self.x0.tolist(),
            "t": self.t,
            "r_star": self.r_star,
            "r": self.r,
            "r_exceeds_bound": self.exceeds_bound,
            "crisp_radius": self.crisp_radius,
            "inverse_norm": self.inverse_norm,
            "crisp_guarantee": self.crisp_guarantee,
            "seed": self.seed,
            "sample_law": "x0 + rho * U^(1/D) * u, u uniform on the crisp unit sphere, D = real dimension",
            "samples": self.samples,
            "pass_count": self.pass_count,
            "fail_count": self.fail_count,
            "counterexamples": self.counterexamples,
        }


def openness_radius_bound(model: IFNormModel, x0: AlgebraElement, t: float) -> float:
    """``min{mu(x0^-1, t), 1 - nu(x0^-1, t)}`` clamped into the open unit interval."""
    inv = direct_inverse(x0)
    mu, nu = membership(model, inv, t)
    bound = min(mu, 1.0 - nu)
    tiny = np.finfo(float).eps
    return float(np.clip(bound, tiny, 1.0 - tiny))


def invertible_ball_probe(
    model: IFNormModel,
    x0: AlgebraElement,
    t: float = 1.0,
    sample_count: int = 1000,
    seed: int = 0,
    r: float | None = None,
) -> OpennessProbeReport:
    """Sample ``B(x0, r, t)`` and test every draw for invertibility.

    ``r`` defaults to 0.95 of the radius bound. A draw fails when the oracle
    rejects it or when the segment from ``x0`` to it changes the sign of the
    singularity indicator (the segment lies in the ball and must then meet a
    non-invertible point, which is located by bisection and recorded).
    """
    _require_unital(model)
    if not t > 0:
        raise DomainError("t", f"must be positive, got {t!r}")
    if sample_count < 1:
        raise DomainError("samples", f"must be >= 1, got {sample_count}")
    try:
        inv = direct_inverse(x0)
    except NonInvertible as exc:
        raise DomainError("x0", f"must be invertible ({exc})") from None
    r_star = openness_radius_bound(model, x0, t)
    if r is None:
        r = 0.95 * r_star
    ball = BallSpec(x0, r, t)
    rho = crisp_ball_radius(ball)
    report = OpennessProbeReport(x0, t, r_star, r, rho, inv.norm(), sample_count, seed)
    rng = np.random.default_rng(seed)
    sign0 = np.sign(singularity_indicator(x0))
    for k in range(sample_count):
        x = _sample_in_ball(model, rng, x0, rho)
        reason = None
        extra: dict[str, Any] = {}
        if not is_invertible(x):
            reason = "oracle_noninvertible"
        elif np.sign(singularity_indicator(x)) != sign0:
            reason = "segment_crossing"
            crossing = _bisect_crossing(x0, x)
            extra = {
                "crossing_point": crossing.tolist(),
                "crossing_distance": (crossing - x0).norm(),
                "crossing_indicator": singularity_indicator(crossing),
            }
        if reason is None:
            report.pass_count += 1
            continue
        report.fail_count += 1
        if len(report.counterexamples) < MAX_LISTED:
            report.counterexamples.append(
                {"index": k, "x": x.tolist(), "distance": (x - x0).norm(), "reason": reason, **extra}
            )
    return report


# ---------------------------------------------------------------------------
# closedness of the non-invertible set
# ---------------------------------------------------------------------------


def singular_sequence_check(terms: list[AlgebraElement], limit: AlgebraElement) -> dict[str, Any]:
    """Check the generator contract (every term singular) and the limit."""
    invertible_terms = [k + 1 for k, z in enumerate(terms) if is_invertible(z)]
    limit_singular = not is_invertible(limit)
    return {
        "terms": len(terms),
        "generator_contract_ok": not invertible_terms,
        "invertible_term_indices": invertible_terms[:MAX_LISTED],
        "limit_noninvertible": limit_singular,
        "holds": not invertible_terms and limit_singular,
    }


def _random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def singular_family(model: IFNormModel, rng, length: int = 32):
    """A seeded singular limit ``z`` with terms ``z + P / n`` that stay singular."""
    alg = model.algebra
    if alg.kind is ModelKind.SCALAR:
        z = alg.zero()
        return z, [z] * length
    if alg.kind is ModelKind.SERIES:
        zp = rng.uniform(-1.0, 1.0, size=alg.shape)
        zp[0] = 0.0
        pp = rng.uniform(-1.0, 1.0, size=alg.shape)
        pp[0] = 0.0
    elif alg.kind is ModelKind.MATRIX:
        n = alg.dim
        d = rng.uniform(0.5, 2.0, size=n)
        d[rng.permutation(n)[: rng.integers(1, n + 1)]] = 0.0
        zp = _random_orthogonal(rng, n) @ np.diag(d) @ _random_orthogonal(rng, n)
        # keep one kernel direction of z in the kernel of every term
        v = _random_orthogonal(rng, n)[:, 0] if not np.any(d) else None
        if v is None:
            u, s, vt = np.linalg.svd(zp)
            v = vt[-1]
        pp = rng.uniform(-1.0, 1.0, size=(n, n)) @ (np.eye(n) - np.outer(v, v))
    else:
        raise UnsupportedOperation(f"{alg.tag} is not unital")
    z = alg.element(zp)
    return z, [alg.element(zp + pp / k) for k in range(1, length + 1)]


def closed_noninvertible_check(model: IFNormModel, sample_count: int = 100, seed: int = 0, length: int = 32) -> dict[str, Any]:
    """Sample convergent sequences inside the non-invertible set; the limits must stay there."""
    _require_unital(model)
    rng = np.random.default_rng(seed)
    passed = failed = 0
    failures = []
    for k in range(sample_count):
        z, terms = singular_family(model, rng, length)
        res = singular_sequence_check(terms, z)
        if not res["generator_contract_ok"]:
            raise StructuralError(f"singular family {k} emitted invertible terms {res['invertible_term_indices']}")
        if res["holds"]:
            passed += 1
        else:
            failed += 1
            if len(failures) < MAX_LISTED:
                failures.append({"index": k, "limit": z.tolist()})
    return {
        "seed": seed,
        "samples": sample_count,
        "sequence_length": length,
        "pass_count": passed,
        "fail_count": failed,
        "failures": failures,
    }


# ---------------------------------------------------------------------------
# continuity of inversion
# ---------------------------------------------------------------------------


def continuity_pair(model: IFNormModel, x0: AlgebraElement, x: AlgebraElement, epsilon: float):
    """Both sides of the inversion-continuity inequality at one point.

    Returns ``(lhs, rhs, holds)`` with ``lhs = (mu, nu)(x^-1 - x0^-1, eps)``
    and ``rhs = (mu, nu)(x - x0, eps / 4)``; it holds when
    ``lhs.mu >= rhs.mu`` and ``lhs.nu <= rhs.nu``.
    """
    if not epsilon > 0:
        raise DomainError("epsilon", f"must be positive, got {epsilon!r}")
    gap = direct_inverse(x) - direct_inverse(x0)
    lhs = membership(model, gap, epsilon)
    rhs = membership(model, x - x0, epsilon / 4.0)
    return lhs, rhs, lhs.mu >= rhs.mu and lhs.nu <= rhs.nu


@dataclass
class ContinuityProbeReport:
    x0: AlgebraElement
    epsilon: float
    samples: int
    seed: int
    holds_count: int = 0
    fails_count: int = 0
    counterexamples: list[dict[str, Any]] = field(default_factory=list)
    identity_case: dict[str, Any] | None = None
    resampled: int = 0

    @property
    def satisfaction_rate(self) -> float:
        return self.holds_count / self.samples if self.samples else float("nan")

    def to_dict(self) -> dict[str, Any]:
        return {
            "x0": self.x0.tolist(),
            "epsilon": self.epsilon,
            "seed": self.seed,
            "sample_law": "x0 + d u, u uniform on the crisp unit sphere, d log-uniform in [1e-4, 1] * ||x0||",
            "samples": self.samples,
            "holds_count": self.holds_count,
            "fails_count": self.fails_count,
            "satisfaction_rate": self.satisfaction_rate,
            "resampled": self.resampled,
            "identity_case": self.identity_case,
            "counterexamples": self.counterexamples,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any], model: IFNormModel) -> "ContinuityProbeReport":
        return cls(
            x0=model.algebra.element(data["x0"]),
            epsilon=data["epsilon"],
            samples=data["samples"],
            seed=data["seed"],
            holds_count=data["holds_count"],
            fails_count=data["fails_count"],
            counterexamples=data["counterexamples"],
            identity_case=data["identity_case"],
            resampled=data["resampled"],
        )


def _pair_record(x, lhs, rhs, holds):
    return {"x": x.tolist(), "lhs_pair": [lhs.mu, lhs.nu], "rhs_pair": [rhs.mu, rhs.nu], "holds": holds}


def inversion_continuity_probe(
    model: IFNormModel,
    x0: AlgebraElement,
    epsilon: float = 1.0,
    sample_count: int = 1000,
    seed: int = 0,
) -> ContinuityProbeReport:
    """Measure where the inversion-continuity inequality holds near ``x0``.

    The inequality is evaluated, never asserted; only the identity case
    ``x = x0`` is guaranteed to hold.
    """
    _require_unital(model)
    if sample_count < 1:
        raise DomainError("samples", f"must be >= 1, got {sample_count}")
    if not is_invertible(x0):
        raise DomainError("x0", "must be invertible")
    lhs, rhs, holds = continuity_pair(model, x0, x0, epsilon)
    report = ContinuityProbeReport(x0, epsilon, sample_count, seed, identity_case=_pair_record(x0, lhs, rhs, holds))
    rng = np.random.default_rng(seed)
    scale = x0.norm()
    for k in range(sample_count):
        for _attempt in range(RESAMPLE_BUDGET):
            d = scale * 10.0 ** rng.uniform(-4.0, 0.0)
            x = x0 + d * model.algebra.random_direction(rng)
            if is_invertible(x):
                break
            report.resampled += 1
        else:
            raise StructuralError(f"no invertible perturbation of x0 after {RESAMPLE_BUDGET} draws")
        lhs, rhs, holds = continuity_pair(model, x0, x, epsilon)
        if holds:
            report.holds_count += 1
        else:
            report.fails_count += 1
            if len(report.counterexamples) < MAX_LISTED:
                report.counterexamples.append({"index": k, **_pair_record(x, lhs, rhs, holds)})
    return report

"""Topological divisors of zero.

Witnesses are built from an exact kernel vector rather than searched for:
given a singular matrix ``z`` (per the elimination oracle) with ``z v = 0``,
the constant sequence ``z_n = v w^T`` has unit Frobenius norm and
``z z_n = (z v) w^T`` vanishes up to elimination roundoff. Under the induced
norm every unit-norm element has ``mu = t/(t+1)``, so separation from the
ball ``B(theta, r, t)`` is decided in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import kernels
from .algebra import PIVOT_RELATIVE_FLOOR, AlgebraElement, ModelKind, is_invertible
from .errors import DomainError, UnsupportedOperation
from .ifnorm import BallSpec, IFNormModel, in_open_ball, membership

SIDES = ("left", "right")
#: exactness required of a constructed witness, relative to ||z||
ANNIHILATION_TOL = 1e-10
REPLAY_TOL = 1e-12
DECAY_TOL = 0.01

CONVENTION_NOTE = (
    "separation uses the negation of ball membership: mu(z_n,t) <= 1-r or nu(z_n,t) >= r "
    "(non-strict), where the textual definition states strict inequalities"
)


@dataclass(frozen=True)
class NotFound:
    reason: str

    def __bool__(self) -> bool:
        return False

    def to_dict(self) -> dict[str, Any]:
        return {"found": False, "reason": self.reason}


@dataclass
class TDZWitness:
    z: AlgebraElement
    side: str
    sequence_rule: dict[str, Any]
    r: float
    t: float
    decay_trace: list[tuple[int, float, float]] = field(default_factory=list)
    separation_trace: list[tuple[int, float, float]] = field(default_factory=list)
    annihilation_norm: float = 0.0
    note: str = CONVENTION_NOTE

    def term(self, n: int) -> AlgebraElement:
        return _rule_term(self.z.model, self.sequence_rule, n)

    def to_dict(self) -> dict[str, Any]:
        return {
            "found": True,
            "z": self.z.tolist(),
            "side": self.side,
            "sequence_rule": self.sequence_rule,
            "r": self.r,
            "t": self.t,
            "annihilation_norm": self.annihilation_norm,
            "decay_trace": [list(row) for row in self.decay_trace],
            "separation_trace": [list(row) for row in self.separation_trace],
            "note": self.note,
        }


def _rule_term(alg, rule: dict[str, Any], n: int) -> AlgebraElement:
    # every rule produced here is constant in n; explicit lists index from 1
    if rule["kind"] == "explicit":
        return alg.element(rule["terms"][n - 1])
    if rule["kind"] == "constant_unit":
        return alg.unit()
    v = np.asarray(rule["v"], dtype=float)
    w = np.asarray(rule["w"], dtype=float)
    outer = np.outer(v, w) if rule["kind"] == "kernel_outer_left" else np.outer(w, v)
    return alg.element(outer / np.linalg.norm(outer))


def _product(z: AlgebraElement, zn: AlgebraElement, side: str) -> AlgebraElement:
    return z * zn if side == "left" else zn * z


def _traces(model: IFNormModel, z: AlgebraElement, rule: dict[str, Any], side: str, t: float, horizon: int):
    decay, sep = [], []
    for n in range(1, horizon + 1):
        zn = _rule_term(model.algebra, rule, n)
        mu_p, nu_p = membership(model, _product(z, zn, side), t)
        mu_s, nu_s = membership(model, zn, t)
        decay.append((n, mu_p, nu_p))
        sep.append((n, mu_s, nu_s))
    return decay, sep


def _validate(r: float, t: float, horizon: int, side: str) -> None:
    if not 0.0 < r < 1.0:
        raise DomainError("r", f"must lie in (0, 1), got {r!r}")
    if not t > 0:
        raise DomainError("t", f"must be positive, got {t!r}")
    if horizon < 1:
        raise DomainError("horizon", f"must be >= 1, got {horizon!r}")
    if side not in SIDES:
        raise DomainError("side", f"must be one of {SIDES}, got {side!r}")


def find_tdz_witness(
    model: IFNormModel,
    z: AlgebraElement,
    r: float = 0.4,
    t: float = 1.0,
    horizon: int = 10,
    side: str = "left",
) -> TDZWitness | NotFound:
    """Construct a divisor-of-zero witness for ``z`` or explain why there is none."""
    _validate(r, t, horizon, side)
    alg = model.algebra
    if z.model != alg:
        raise DomainError("z", f"element of {z.model.tag} passed to a {alg.tag} model")
    if alg.kind not in (ModelKind.MATRIX, ModelKind.SCALAR):
        raise UnsupportedOperation(f"divisor-of-zero witnesses are not built for {alg.tag}")
    if is_invertible(z):
        return NotFound("z is invertible (elimination oracle)")

    if alg.kind is ModelKind.SCALAR:
        rule: dict[str, Any] = {"kind": "constant_unit", "description": "z_n = 1 for every n"}
    else:
        a = z.payload if side == "left" else z.payload.T
        floor = PIVOT_RELATIVE_FLOOR * float(np.linalg.norm(z.payload))
        v = kernels.null_vector(np.ascontiguousarray(a, dtype=float), floor)
        if v is None:
            return NotFound("elimination produced no kernel vector")
        w = np.zeros(alg.dim)
        w[0] = 1.0
        desc = "z_n = v w^T (constant)" if side == "left" else "z_n = w v^T (constant), v^T z = 0"
        rule = {
            "kind": "kernel_outer_left" if side == "left" else "kernel_outer_right",
            "description": desc,
            "v": [float(c) + 0.0 for c in v],
            "w": [float(c) for c in w],
        }

    zn = _rule_term(alg, rule, 1)
    annihilation = _product(z, zn, side).norm()
    if annihilation > ANNIHILATION_TOL * max(z.norm(), 1.0):
        return NotFound(f"kernel vector not exact enough (||product|| = {annihilation:.3g})")
    if in_open_ball(model, BallSpec(alg.zero(), r, t), zn):
        return NotFound(f"unit-norm terms lie inside B(theta, {r}, {t}); no separation for this (r, t)")
    decay, sep = _traces(model, z, rule, side, t, horizon)
    return TDZWitness(z, side, rule, r, t, decay, sep, annihilation)


def replay_tdz_witness(model: IFNormModel, witness: TDZWitness, tol: float = REPLAY_TOL) -> dict[str, Any]:
    """Recompute both traces from ``(z, sequence_rule)`` and re-check the invariants."""
    horizon = len(witness.decay_trace)
    decay, sep = _traces(model, witness.z, witness.sequence_rule, witness.side, witness.t, horizon)
    max_dev = 0.0
    for old, new in zip(witness.decay_trace + witness.separation_trace, decay + sep):
        max_dev = max(max_dev, abs(old[1] - new[1]), abs(old[2] - new[2]))
    separated = all(mu <= 1.0 - witness.r or nu >= witness.r for _, mu, nu in sep)
    _, mu_end, nu_end = decay[-1]
    decays = abs(1.0 - mu_end) <= DECAY_TOL and nu_end <= DECAY_TOL
    return {
        "max_deviation": max_dev,
        "traces_match": max_dev <= tol,
        "separated": separated,
        "decays": decays,
        "valid": max_dev <= tol and separated and decays,
    }


def _random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def tdz_population(model: IFNormModel, sample_count: int, seed: int):
    """Seeded mixed population: ``(element, constructed_singular)`` pairs.

    Half are dense U[-1, 1] matrices (invertible with probability one); the
    rest are ``Q1 D Q2`` with orthogonal ``Q``s and at least one zero in ``D``.
    """
    alg = model.algebra
    n = alg.dim
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(sample_count):
        if rng.random() < 0.5:
            m = rng.uniform(-1.0, 1.0, size=(n, n))
            out.append((alg.element(m), False))
        else:
            d = rng.uniform(0.5, 2.0, size=n)
            d[rng.permutation(n)[: rng.integers(1, n + 1)]] = 0.0
            m = _random_orthogonal(rng, n) @ np.diag(d) @ _random_orthogonal(rng, n)
            out.append((alg.element(m), True))
    return out


def verify_tdz_subset_singular(
    model: IFNormModel,
    sample_count: int = 1000,
    seed: int = 0,
    r: float = 0.4,
    t: float = 1.0,
    horizon: int = 10,
) -> dict[str, Any]:
    """Every element with a witness must be non-invertible; counts are reported.

    ``holds`` is False on any violation, which the CLI turns into exit 1.
    """
    if model.algebra.kind is not ModelKind.MATRIX:
        raise UnsupportedOperation("population check runs on matrix models")
    if sample_count < 1:
        raise DomainError("samples", f"must be >= 1, got {sample_count}")
    witnesses = constructed = oracle_singular = 0
    violations: list[dict[str, Any]] = []
    mismatches = 0
    for k, (z, singular) in enumerate(tdz_population(model, sample_count, seed)):
        constructed += singular
        noninv = not is_invertible(z)
        oracle_singular += noninv
        found = find_tdz_witness(model, z, r, t, horizon)
        if found:
            witnesses += 1
            if not noninv:
                violations.append({"index": k, "z": z.tolist()})
        if bool(found) != singular:
            mismatches += 1
    return {
        "seed": seed,
        "samples": sample_count,
        "r": r,
        "t": t,
        "population": "mixed: dense U[-1,1] and Q1 D Q2 with a rank-deficient diagonal D",
        "witness_count": witnesses,
        "constructed_singular_count": constructed,
        "oracle_noninvertible_count": oracle_singular,
        "witness_construction_mismatches": mismatches,
        "violation_count": len(violations),
        "violations": violations,
        "holds": not violations,
    }

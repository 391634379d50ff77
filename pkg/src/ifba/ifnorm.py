"""Induced intuitionistic fuzzy norms, fuzzy open balls and the axiom checker.

The induced construction lifts a crisp norm to the pair

    mu(x, t) = t / (t + ||x||),    nu(x, t) = ||x|| / (t + ||x||).

The smaller of the two is computed directly and the larger as its
complement, so ``mu + nu == 1`` holds exactly in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple

import numpy as np

from .algebra import AlgebraElement, AlgebraModel, ModelKind
from .errors import DomainError, StructuralError
from .report import AxiomRecord, AxiomReport
from .triangular import AXIOM_TOL, TriangularConorm, TriangularNorm, is_idempotent

AXIOM_IDS = ("i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x", "xi", "xii", "xiii", "xiv")

#: sampled element entries are uniform in this interval
ELEMENT_RANGE = (-10.0, 10.0)
#: sampled times are log-uniform in this interval
TIME_RANGE = (1e-2, 1e2)
#: scaling constants c are uniform in this interval, |c| >= SCALE_FLOOR
SCALE_RANGE = (-10.0, 10.0)
SCALE_FLOOR = 1e-3
#: dimensionless t-ladder for the limit axioms, t = ||x|| * LIMIT_LADDER
LIMIT_LADDER = np.logspace(-3.0, 3.0, 13)
#: largest allowed distance to the limit at the ladder ends
LIMIT_TOL = 0.01
#: candidate pairs tried by the targeted counterexample search
TARGETED_PAIRS = 1000


class FuzzyDegreePair(NamedTuple):
    mu: float
    nu: float


def induced_degrees(norms, t):
    """Vectorized induced (mu, nu) for crisp norms ``norms`` at times ``t``."""
    n = np.asarray(norms, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    n, t = np.broadcast_arrays(n, t)
    denom = t + n
    small_norm = n <= t
    with np.errstate(divide="ignore", invalid="ignore"):
        nu_direct = n / denom
        mu_direct = t / denom
    nu = np.where(small_norm, nu_direct, 1.0 - mu_direct)
    mu = np.where(small_norm, 1.0 - nu_direct, mu_direct)
    return mu, nu


@dataclass(frozen=True)
class IFNormModel:
    """An algebra together with the induced fuzzy norm and a (t-norm, t-conorm) pair."""

    algebra: AlgebraModel
    tnorm: TriangularNorm = field(default_factory=lambda: TriangularNorm("minimum"))
    tconorm: TriangularConorm = field(default_factory=lambda: TriangularConorm("maximum"))
    construction: str = "induced"

    def __post_init__(self):
        if self.construction != "induced":
            raise ValueError(f"unsupported construction {self.construction!r}")

    def degrees(self, norms, t):
        return induced_degrees(norms, t)

    def batch_degrees(self, payloads, t):
        return induced_degrees(self.algebra.batch_norm(payloads), t)

    def membership(self, x: AlgebraElement, t: float) -> FuzzyDegreePair:
        return membership(self, x, t)

    def describe(self) -> dict[str, Any]:
        return {
            "algebra": self.algebra.tag,
            "norm": self.algebra.norm_kind.value,
            "construction": self.construction,
            "tnorm": self.tnorm.kind.value,
            "tconorm": self.tconorm.kind.value,
        }


def membership(model: IFNormModel, x: AlgebraElement, t: float) -> FuzzyDegreePair:
    if not t > 0:
        raise DomainError("t", f"must be positive, got {t!r}")
    if x.model != model.algebra:
        raise StructuralError(f"element of {x.model.tag} used with {model.algebra.tag}")
    mu, nu = induced_degrees(x.norm(), t)
    return FuzzyDegreePair(float(mu), float(nu))


@dataclass(frozen=True)
class BallSpec:
    center: AlgebraElement
    r: float
    t: float

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise DomainError("r", f"must lie in (0, 1), got {self.r!r}")
        if not self.t > 0.0:
            raise DomainError("t", f"must be positive, got {self.t!r}")

    def to_dict(self):
        return {"center": self.center.tolist(), "r": self.r, "t": self.t}


def in_open_ball(model: IFNormModel, ball: BallSpec, y: AlgebraElement) -> bool:
    """Membership of ``y`` in ``B(center, r, t)``: mu > 1 - r and nu < r."""
    if y.model != ball.center.model or y.model != model.algebra:
        raise StructuralError("ball center, point and model must share one algebra")
    mu, nu = membership(model, ball.center - y, ball.t)
    return mu > 1.0 - ball.r and nu < ball.r


def crisp_ball_radius(ball: BallSpec) -> float:
    """Crisp radius of an induced fuzzy ball: ``||y - center|| < t r / (1 - r)``."""
    return ball.t * ball.r / (1.0 - ball.r)


# ---------------------------------------------------------------------------
# axiom checker
# ---------------------------------------------------------------------------


@dataclass
class _Batch:
    x: np.ndarray
    y: np.ndarray
    c: np.ndarray
    s: np.ndarray
    t: np.ndarray

    def __len__(self):
        return self.s.shape[0]


def _log_uniform(rng, lo, hi, size):
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size=size))


def _random_batch(alg: AlgebraModel, rng: np.random.Generator, n: int) -> _Batch:
    x = alg.random_batch(rng, n, *ELEMENT_RANGE)
    y = alg.random_batch(rng, n, *ELEMENT_RANGE)
    c = rng.uniform(*SCALE_RANGE, size=n)
    c = np.where(np.abs(c) < SCALE_FLOOR, np.copysign(SCALE_FLOOR, c), c)
    s = _log_uniform(rng, *TIME_RANGE, n)
    t = _log_uniform(rng, *TIME_RANGE, n)
    return _Batch(x, y, c, s, t)


def _targeted_batch(alg: AlgebraModel, rng: np.random.Generator, limit: int) -> _Batch:
    """Pairs with very unbalanced norms: a large x against a tiny y.

    Directions start with the unit element (when there is one) and continue
    with seeded random unit directions.
    """
    big = (10.0, 100.0, 1000.0, 1.0)
    small = (1e-3, 1e-4, 1e-2, 1e-1)
    times = (1.0, 0.1, 10.0)
    per_dir = len(big) * len(small) * len(times)
    n_dirs = -(-limit // per_dir)
    dirs = []
    if alg.unital:
        u = alg.unit().payload
        dirs.append((u, u))
    while len(dirs) < n_dirs:
        dirs.append((alg.random_direction(rng).payload, alg.random_direction(rng).payload))
    xs, ys, ss, ts = [], [], [], []
    for dx, dy in dirs:
        for a in big:
            for b in small:
                for tau in times:
                    xs.append(a * dx)
                    ys.append(b * dy)
                    ss.append(tau)
                    ts.append(tau)
    xs, ys = np.array(xs[:limit]), np.array(ys[:limit])
    ss, ts = np.array(ss[:limit]), np.array(ts[:limit])
    return _Batch(xs, ys, np.ones(len(ss)), ss, ts)


class _Eval(NamedTuple):
    fail: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    relation: str


def _eval_pointwise(model: IFNormModel, axiom: str, b: _Batch) -> _Eval:
    alg = model.algebra
    deg = model.batch_degrees
    mu_x, nu_x = deg(b.x, b.t)
    if axiom == "i":
        total = mu_x + nu_x
        return _Eval(total > 1.0 + AXIOM_TOL, total, np.ones_like(total), "lhs <= rhs")
    if axiom == "ii":
        return _Eval(~(mu_x > 0.0), mu_x, np.zeros_like(mu_x), "lhs > rhs")
    if axiom == "viii":
        return _Eval(~(nu_x < 1.0), nu_x, np.ones_like(nu_x), "lhs < rhs")
    if axiom in ("iii", "ix"):
        mu_0, nu_0 = deg(np.zeros_like(b.x), b.t)
        zero = alg.batch_norm(b.x) == 0.0
        if axiom == "iii":
            fail = np.where(zero, mu_x != 1.0, mu_x == 1.0) | (mu_0 != 1.0)
            return _Eval(fail, mu_x, mu_0, "lhs == 1 iff x == theta; rhs = mu(theta, t)")
        fail = np.where(zero, nu_x != 0.0, nu_x == 0.0) | (nu_0 != 0.0)
        return _Eval(fail, nu_x, nu_0, "lhs == 0 iff x == theta; rhs = nu(theta, t)")
    if axiom in ("iv", "x"):
        cx = b.c.reshape((-1,) + (1,) * len(alg.shape)) * b.x
        mu_c, nu_c = deg(cx, b.t)
        mu_r, nu_r = deg(b.x, b.t / np.abs(b.c))
        lhs, rhs = (mu_c, mu_r) if axiom == "iv" else (nu_c, nu_r)
        return _Eval(np.abs(lhs - rhs) > AXIOM_TOL, lhs, rhs, "lhs == rhs")
    mu_xs, nu_xs = deg(b.x, b.s)
    mu_yt, nu_yt = deg(b.y, b.t)
    if axiom in ("v", "xi"):
        mu_sum, nu_sum = deg(b.x + b.y, b.s + b.t)
        if axiom == "v":
            lhs = model.tnorm.raw(mu_xs, mu_yt)
            return _Eval(lhs > mu_sum + AXIOM_TOL, lhs, mu_sum, "lhs <= rhs")
        lhs = model.tconorm.raw(nu_xs, nu_yt)
        return _Eval(lhs < nu_sum - AXIOM_TOL, lhs, nu_sum, "lhs >= rhs")
    if axiom in ("vi", "xii"):
        mu_p, nu_p = deg(alg.batch_mul(b.x, b.y), b.s + b.t)
        if axiom == "vi":
            lhs = np.maximum(mu_xs, mu_yt)
            return _Eval(lhs > mu_p + AXIOM_TOL, lhs, mu_p, "lhs <= rhs")
        lhs = np.minimum(nu_xs, nu_yt)
        return _Eval(lhs < nu_p - AXIOM_TOL, lhs, nu_p, "lhs >= rhs")
    raise KeyError(axiom)


def _ladder_values(model: IFNormModel, payloads: np.ndarray, which: str):
    norms = model.algebra.batch_norm(payloads)
    times = norms[:, None] * LIMIT_LADDER[None, :]
    mu, nu = model.degrees(norms[:, None], times)
    return times, (mu if which == "mu" else nu)


def _eval_limit(model: IFNormModel, axiom: str, payloads: np.ndarray) -> _Eval:
    """Monotone approach plus end-point distances on the scaled ladder."""
    _, vals = _ladder_values(model, payloads, "mu" if axiom == "vii" else "nu")
    steps = np.diff(vals, axis=1)
    if axiom == "vii":
        monotone_err = np.max(np.maximum(-steps, 0.0), axis=1)
        inf_err = 1.0 - vals[:, -1]
        zero_err = vals[:, 0]
    else:
        monotone_err = np.max(np.maximum(steps, 0.0), axis=1)
        inf_err = vals[:, -1]
        zero_err = 1.0 - vals[:, 0]
    worst = np.maximum(np.maximum(inf_err, zero_err) - LIMIT_TOL, monotone_err - AXIOM_TOL)
    lhs = np.maximum(inf_err, zero_err)
    return _Eval(worst > 0.0, lhs, np.full_like(lhs, LIMIT_TOL), "end-point distance <= rhs and monotone ladder")


def _witness(model: IFNormModel, axiom: str, b: _Batch, ev: _Eval, k: int, phase: str) -> dict[str, Any]:
    w: dict[str, Any] = {"phase": phase, "index": int(k), "x": b.x[k].tolist()}
    if axiom in ("v", "vi", "xi", "xii"):
        w["y"] = b.y[k].tolist()
        w["s"] = float(b.s[k])
    if axiom in ("iv", "x"):
        w["c"] = float(b.c[k])
    if axiom in ("vii", "xiii"):
        w["ladder"] = (LIMIT_LADDER * float(model.algebra.batch_norm(b.x[k]))).tolist()
    else:
        w["t"] = float(b.t[k])
    w["lhs"] = float(ev.lhs[k])
    w["rhs"] = float(ev.rhs[k])
    w["relation"] = ev.relation
    return w


def _check_axiom(model, axiom, batches) -> AxiomRecord:
    used = 0
    failures = 0
    witness = None
    for phase, b in batches:
        if axiom in ("vii", "xiii"):
            ev = _eval_limit(model, axiom, b.x)
        else:
            ev = _eval_pointwise(model, axiom, b)
        used += len(b)
        bad = np.flatnonzero(ev.fail)
        failures += bad.size
        if bad.size and witness is None:
            witness = _witness(model, axiom, b, ev, int(bad[0]), phase)
    if witness is not None:
        return AxiomRecord(axiom, "fail", used, failures, witness)
    if axiom in ("vi", "xii") and model.algebra.kind is ModelKind.NULLPROD:
        return AxiomRecord(axiom, "vacuous", used, 0, note="xy = theta for all x, y: mu(xy, .) = 1, nu(xy, .) = 0")
    note = "sampled x != theta only; mu(theta, t) = 1 for all t" if axiom in ("vii", "xiii") else None
    return AxiomRecord(axiom, "pass", used, 0, note=note)


def targeted_counterexample_search(model: IFNormModel, axiom: str, max_pairs: int = TARGETED_PAIRS, seed: int = 0):
    """Run only the unbalanced-norm pair search for one binary axiom.

    Returns ``(witness, pairs_tried)``; ``witness`` is ``None`` when no
    candidate violates the axiom.
    """
    if axiom not in ("v", "vi", "xi", "xii"):
        raise DomainError("axiom", f"targeted search covers v, vi, xi, xii; got {axiom!r}")
    b = _targeted_batch(model.algebra, np.random.default_rng(seed), max_pairs)
    ev = _eval_pointwise(model, axiom, b)
    bad = np.flatnonzero(ev.fail)
    if not bad.size:
        return None, len(b)
    k = int(bad[0])
    return _witness(model, axiom, b, ev, k, "targeted"), k + 1


def check_ifna_axioms(
    model: IFNormModel,
    sample_count: int = 10_000,
    seed: int = 0,
    targeted_pairs: int = TARGETED_PAIRS,
) -> AxiomReport:
    """Evaluate axioms (i)-(xiv) on seeded samples and report witnesses.

    Binary axioms (v), (vi), (xi), (xii) see the targeted candidates first,
    then the random samples; the witness is the first failing candidate in
    that order.
    """
    if sample_count < 1:
        raise DomainError("samples", f"must be >= 1, got {sample_count}")
    alg = model.algebra
    rng = np.random.default_rng(seed)
    random_b = _random_batch(alg, rng, sample_count)
    targeted_b = _targeted_batch(alg, np.random.default_rng([seed, 1]), targeted_pairs) if targeted_pairs else None
    records = []
    for axiom in AXIOM_IDS[:-1]:
        batches = [("random", random_b)]
        if targeted_b is not None and axiom in ("v", "vi", "xi", "xii"):
            batches.insert(0, ("targeted", targeted_b))
        records.append(_check_axiom(model, axiom, batches))
    records.append(_check_idempotence(model))
    constants = {
        "ifn_model": model.describe(),
        "element_law": f"entries uniform in [{ELEMENT_RANGE[0]}, {ELEMENT_RANGE[1]}]",
        "time_law": f"log-uniform in [{TIME_RANGE[0]}, {TIME_RANGE[1]}]",
        "scale_law": f"uniform in [{SCALE_RANGE[0]}, {SCALE_RANGE[1]}], |c| >= {SCALE_FLOOR}",
        "limit_ladder": "t = ||x|| * 10^k, k = -3, -2.5, ..., 3",
        "limit_tolerance": LIMIT_TOL,
        "tolerance": AXIOM_TOL,
        "targeted_pairs": targeted_pairs,
    }
    return AxiomReport(model=alg.tag, seed=seed, samples=sample_count, axioms=records, constants=constants)


def _check_idempotence(model: IFNormModel, grid_resolution: int = 11) -> AxiomRecord:
    for op in (model.tnorm, model.tconorm):
        res = is_idempotent(op, grid_resolution)
        if not res.idempotent:
            w = {"operation": op.family, "kind": op.kind.value, "a": res.witness, "lhs": res.value, "rhs": res.witness, "relation": "lhs == rhs"}
            return AxiomRecord("xiv", "fail", 2 * grid_resolution, 1, w)
    return AxiomRecord("xiv", "pass", 2 * grid_resolution)


def replay_witness(model: IFNormModel, axiom: str, witness: dict[str, Any]) -> tuple[float, float, bool]:
    """Recompute ``(lhs, rhs, violated)`` for a stored witness, element by element."""
    alg = model.algebra
    if axiom == "xiv":
        op = model.tnorm if witness["operation"] == model.tnorm.family else model.tconorm
        a = witness["a"]
        val = float(op.raw(a, a))
        return val, a, abs(val - a) > AXIOM_TOL
    x = alg.element(witness["x"])
    mem: Callable = lambda e, tau: membership(model, e, tau)  # noqa: E731
    if axiom in ("vii", "xiii"):
        b = _Batch(x.payload[None], x.payload[None], np.ones(1), np.ones(1), np.ones(1))
        ev = _eval_limit(model, axiom, b.x)
        return float(ev.lhs[0]), float(ev.rhs[0]), bool(ev.fail[0])
    t = witness["t"]
    if axiom in ("i", "ii", "viii"):
        mu, nu = mem(x, t)
        if axiom == "i":
            return mu + nu, 1.0, mu + nu > 1.0 + AXIOM_TOL
        if axiom == "ii":
            return mu, 0.0, not mu > 0.0
        return nu, 1.0, not nu < 1.0
    if axiom in ("iii", "ix"):
        mu, nu = mem(x, t)
        mu0, nu0 = mem(alg.zero(), t)
        if axiom == "iii":
            return mu, mu0, (mu == 1.0) != x.is_zero() or mu0 != 1.0
        return nu, nu0, (nu == 0.0) != x.is_zero() or nu0 != 0.0
    if axiom in ("iv", "x"):
        c = witness["c"]
        left = mem(c * x, t)
        right = mem(x, t / abs(c))
        k = 0 if axiom == "iv" else 1
        return left[k], right[k], abs(left[k] - right[k]) > AXIOM_TOL
    y = alg.element(witness["y"])
    s = witness["s"]
    mxs, nxs = mem(x, s)
    myt, nyt = mem(y, t)
    if axiom in ("v", "xi"):
        msum, nsum = mem(x + y, s + t)
        if axiom == "v":
            lhs = float(model.tnorm.raw(mxs, myt))
            return lhs, msum, lhs > msum + AXIOM_TOL
        lhs = float(model.tconorm.raw(nxs, nyt))
        return lhs, nsum, lhs < nsum - AXIOM_TOL
    mp, np_ = mem(x * y, s + t)
    if axiom == "vi":
        lhs = max(mxs, myt)
        return lhs, mp, lhs > mp + AXIOM_TOL
    if axiom == "xii":
        lhs = min(nxs, nyt)
        return lhs, np_, lhs < np_ - AXIOM_TOL
    raise KeyError(axiom)

"""Finite-size Monte Carlo checks of the capacity analytics.

Randomness
----------
Every trial draws from its own Philox (counter-based) generator keyed by
``SeedSequence([seed, trial, stream, size])``, so results do not depend on
execution order.  ``stream`` separates the pattern matrix, the Gaussian vector
``g`` and the auxiliary vectors; ``size`` keys sweeps over ``m``.  Gaussians
come from numpy's ziggurat transform of the generator's uniform words.

Feasibility
-----------
For ``kappa >= 0`` the kept constraints ``H_i . x >= kappa`` on the unit
sphere are satisfiable iff the ball margin ``max_{|x|<=1} min_i H_i . x`` is
at least ``kappa``.  That margin is the distance from the origin to the
convex hull of the kept rows, computed exactly by Wolfe's minimum-norm-point
algorithm.  A margin equal to zero is infeasible: with ``kappa = 0`` every
kept pattern needs a strictly positive activation.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np

from .exceptions import CombinatorialBlowupError, ConvergenceError, DomainError
from .types import LiftPoint

__all__ = [
    "McConfig",
    "McInstance",
    "McReport",
    "sample_instance",
    "f_err_oracle",
    "f_err_concentration",
    "margin_subproblem",
    "feasibility_check",
    "capacity_sweep",
    "i_wb_1_sampled",
    "EXACT_CAP",
    "FEASIBILITY_TOL",
]

logger = logging.getLogger(__name__)

EXACT_CAP = 10**6
# a margin must exceed kappa by this much to count as feasible
FEASIBILITY_TOL = 1e-9

_STREAM_H, _STREAM_G, _STREAM_D, _STREAM_X, _STREAM_LAMBDA, _STREAM_IWB = range(6)


@dataclass(frozen=True)
class McConfig:
    seed: int
    trials: int
    n: int
    m: int
    kappa: float = 0.0
    f_wb: float = 0.0
    entries: str = "gaussian"

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        for name in ("trials", "n", "m"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be a positive integer, got {getattr(self, name)!r}")
        if not math.isfinite(self.kappa):
            raise DomainError(f"kappa must be finite, got {self.kappa!r}")
        if not 0.0 <= self.f_wb < 1.0:
            raise DomainError(f"f_wb must lie in [0, 1), got {self.f_wb!r}")
        if self.entries not in ("gaussian", "rademacher"):
            raise DomainError(f"entries must be 'gaussian' or 'rademacher', got {self.entries!r}")

    @property
    def errors_allowed(self):
        return math.floor(self.f_wb * self.m)


@dataclass(frozen=True)
class McInstance:
    H: np.ndarray
    g: np.ndarray
    d: np.ndarray
    x: np.ndarray
    lam: np.ndarray


@dataclass(frozen=True)
class McReport:
    mean: float
    std_error: float
    trials_used: int
    per_trial: Optional[List[float]] = None


def _rng(seed, trial, stream, size=0):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial, stream, size])))


def _patterns(config, trial, m):
    rng = _rng(config.seed, trial, _STREAM_H, m)
    if config.entries == "rademacher":
        return rng.choice(np.array([-1.0, 1.0]), size=(m, config.n))
    return rng.standard_normal((m, config.n))


def _unit(v):
    return v / np.linalg.norm(v)


def sample_instance(config, trial_index):
    """Draw the random objects of one trial.

    ``d`` keeps the ``m - errors_allowed`` patterns with the smallest
    ``max(g + kappa, 0)^2`` (the selector attaining :func:`f_err_oracle`);
    ``x`` and ``lam`` are uniform on the unit sphere and on its nonnegative
    orthant.
    """
    if not 0 <= trial_index < config.trials:
        raise DomainError(f"trial_index {trial_index} outside [0, {config.trials})")
    H = _patterns(config, trial_index, config.m)
    g = _rng(config.seed, trial_index, _STREAM_G, config.m).standard_normal(config.m)
    order = np.argsort(np.maximum(g + config.kappa, 0.0), kind="stable")
    d = np.zeros(config.m, dtype=np.int8)
    d[order[: config.m - config.errors_allowed]] = 1
    x = _unit(_rng(config.seed, trial_index, _STREAM_X, config.n).standard_normal(config.n))
    lam = _unit(np.abs(_rng(config.seed, trial_index, _STREAM_LAMBDA, config.m).standard_normal(config.m)))
    return McInstance(H, g, d, x, lam)


def f_err_oracle(g, kappa, errors_allowed):
    """``min_d |(diag(d)(g + kappa))_+|_2`` over selectors dropping ``errors_allowed`` entries.

    The objective is a sum of independent per-coordinate terms, so dropping
    the largest squared positive parts is optimal.
    """
    g = np.asarray(g, dtype=float)
    m = g.size
    if not 0 <= errors_allowed < m:
        raise DomainError(f"errors_allowed={errors_allowed} outside [0, {m})")
    v = np.sort(np.maximum(g + kappa, 0.0) ** 2)
    return math.sqrt(float(np.sum(v[: m - errors_allowed])))


def _report(values, keep=True):
    values = np.asarray(values, dtype=float)
    t = values.size
    std_error = float(np.std(values, ddof=1) / math.sqrt(t)) if t > 1 else 0.0
    return McReport(float(np.mean(values)), std_error, t, values.tolist() if keep else None)


def f_err_concentration(config):
    """Mean and standard error of ``f_err_oracle(g) / sqrt(m)`` over trials.

    For large ``m`` the mean approaches ``sqrt(f_err_hat(kappa, f_wb))``.
    """
    if config.m < 100:
        raise DomainError(f"f_err_concentration needs m >= 100, got {config.m}")
    b = config.errors_allowed
    root_m = math.sqrt(config.m)
    values = [
        f_err_oracle(_rng(config.seed, t, _STREAM_G, config.m).standard_normal(config.m), config.kappa, b)
        / root_m
        for t in range(config.trials)
    ]
    return _report(values)


def _affine_min_norm(P):
    # minimize |mu @ P| subject to sum(mu) = 1
    k = P.shape[0]
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = P @ P.T
    K[:k, k] = 1.0
    K[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    return sol[:k]


def _wolfe(P, tol=1e-12, max_iter=1000):
    """Minimum-norm point of conv(rows of P); returns (point, support indices, weights)."""
    scale = float(np.max(np.sum(P * P, axis=1)))
    start = int(np.argmin(np.sum(P * P, axis=1)))
    S = [start]
    lam = np.array([1.0])
    x = P[start].copy()
    for _ in range(max_iter):
        j = int(np.argmin(P @ x))
        if x @ x - P[j] @ x <= tol * scale or j in S:
            return x, S, lam
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            mu = _affine_min_norm(P[S])
            if np.all(mu > tol):
                lam = mu
                x = mu @ P[S]
                break
            neg = mu <= tol
            theta = np.min(lam[neg] / (lam[neg] - mu[neg]))
            lam = (1.0 - theta) * lam + theta * mu
            keep = lam > tol
            keep[np.argmax(lam)] = True
            S = [s for s, k in zip(S, keep) if k]
            lam = lam[keep] / np.sum(lam[keep])
            x = lam @ P[S]
    raise ConvergenceError("minimum-norm-point iteration did not converge")


def _subgradient(H, iterations, step):
    n = H.shape[1]
    x = np.zeros(n)
    avg = np.zeros(n)
    best, best_x = -math.inf, x.copy()
    history = np.empty(iterations)
    for t in range(1, iterations + 1):
        i = int(np.argmin(H @ x))
        x = x + step / math.sqrt(t) * H[i]
        norm = np.linalg.norm(x)
        if norm > 1.0:
            x /= norm
        avg += (x - avg) / t
        for cand in (x, avg):
            value = float(np.min(H @ cand))
            if value > best:
                best, best_x = value, cand.copy()
        history[t - 1] = best
    window = history[-max(1, iterations // 10) :]
    if window[-1] - window[0] > 1e-3:
        logger.warning("subgradient margin still moving by %.3g in the final window", window[-1] - window[0])
    return best, best_x


def margin_subproblem(H_kept, method="wolfe", iterations=5000, step=1.0):
    """``max_{|x|<=1} min_i H_i . x`` and a maximizer.

    ``method="wolfe"`` is exact up to rounding.  ``method="subgradient"`` runs
    projected subgradient ascent with iterate averaging for ``iterations``
    steps of size ``step / sqrt(t)`` and reports the best iterate.  The
    returned ``x`` is a unit vector when the margin is positive and the
    origin otherwise (which attains the ball optimum 0).
    """
    H = np.atleast_2d(np.asarray(H_kept, dtype=float))
    if H.shape[0] < 1 or not np.all(np.isfinite(H)):
        raise DomainError("margin_subproblem needs at least one finite row")
    if method == "subgradient":
        return _subgradient(H, iterations, step)
    if method != "wolfe":
        raise DomainError(f"unknown method {method!r}")
    p, _, _ = _wolfe(H)
    norm = float(np.linalg.norm(p))
    if norm <= 1e-12 * math.sqrt(float(np.max(np.sum(H * H, axis=1)))):
        return 0.0, np.zeros(H.shape[1])
    return norm, p / norm


def _support(H, kept):
    P = H[list(kept)]
    p, S, lam = _wolfe(P)
    kept = list(kept)
    return float(np.linalg.norm(p)), [kept[s] for s in S], lam


def _disjoint_count(sets):
    # size of a greedy packing of pairwise disjoint sets: a lower bound on any hitting set
    used = set()
    count = 0
    for s in sorted(sets, key=len):
        if not used & s:
            used |= s
            count += 1
    return count


def _exact(H, kappa, budget, node_cap):
    # Every infeasible kept set has an infeasible support ("certificate"), and
    # any superset of a certificate is infeasible too, so a feasible selector
    # must drop a row from every certificate found so far.
    certificates = []
    seen = set()
    nodes = 0

    def search(dropped, b):
        nonlocal nodes
        if dropped in seen:
            return False
        seen.add(dropped)
        nodes += 1
        if nodes > node_cap:
            raise CombinatorialBlowupError(f"exact feasibility search exceeded {node_cap} nodes")
        unhit = [c for c in certificates if not c & dropped]
        if _disjoint_count(unhit) > b:
            return False
        if unhit:
            branch = min(unhit, key=len)
        else:
            kept = [i for i in range(H.shape[0]) if i not in dropped]
            margin, active, _ = _support(H, kept)
            if margin > kappa + FEASIBILITY_TOL:
                return True
            branch = frozenset(active)
            certificates.append(branch)
        if b == 0:
            return False
        return any(search(dropped | {a}, b - 1) for a in sorted(branch))

    return search(frozenset(), budget)


def _greedy(H, kappa, budget):
    kept = list(range(H.shape[0]))
    for step in range(budget + 1):
        margin, active, lam = _support(H, kept)
        if margin > kappa + FEASIBILITY_TOL:
            return True
        if step == budget:
            break
        kept.remove(active[int(np.argmax(lam))])
    return False


def feasibility_check(H, kappa, errors_allowed, mode="exact"):
    """Whether some ``m - errors_allowed`` rows of ``H`` admit ``H_i . x > kappa`` on the sphere.

    ``exact`` searches over dropped rows, branching only on rows of the
    minimum-norm support (a kept support leaves the margin unchanged), which
    decides the same question as enumerating every selector.  It requires
    ``C(m, errors_allowed) <= EXACT_CAP``.  ``greedy`` repeatedly drops the
    support row of largest weight; ``True`` is a certificate, ``False`` is
    inconclusive.
    """
    H = np.atleast_2d(np.asarray(H, dtype=float))
    m = H.shape[0]
    if kappa < 0.0:
        raise DomainError(f"feasibility_check requires kappa >= 0, got {kappa!r}")
    if not 0 <= errors_allowed < m:
        raise DomainError(f"errors_allowed={errors_allowed} outside [0, {m})")
    if mode == "greedy":
        return _greedy(H, kappa, errors_allowed)
    if mode != "exact":
        raise DomainError(f"unknown mode {mode!r}")
    if math.comb(m, errors_allowed) > EXACT_CAP:
        raise CombinatorialBlowupError(
            f"C({m}, {errors_allowed}) = {math.comb(m, errors_allowed)} exceeds {EXACT_CAP}"
        )
    return _exact(H, kappa, errors_allowed, EXACT_CAP)


def capacity_sweep(config, alpha_grid, mode="auto"):
    """Empirical feasibility probability at each ``alpha`` with ``m = round(alpha n)``.

    Returns a list of ``(alpha, probability, std_error)``.  ``mode="auto"``
    uses the exact check when ``C(m, errors_allowed) <= EXACT_CAP`` and the
    greedy one otherwise (so probabilities are then lower estimates).
    """
    rows = []
    for alpha in alpha_grid:
        m = int(round(alpha * config.n))
        if m < 1:
            raise DomainError(f"alpha={alpha} gives m={m} patterns at n={config.n}")
        cfg = replace(config, m=m)
        b = cfg.errors_allowed
        use = mode
        if mode == "auto":
            use = "exact" if math.comb(m, b) <= EXACT_CAP else "greedy"
        hits = sum(
            feasibility_check(_patterns(cfg, t, m), cfg.kappa, b, use) for t in range(cfg.trials)
        )
        p = hits / cfg.trials
        rows.append((float(alpha), p, math.sqrt(p * (1.0 - p) / cfg.trials)))
    return rows


def i_wb_1_sampled(point, kappa, samples, seed, chunk=1_000_000):
    """Sample mean of ``exp(-c3 min(0, max(g+kappa,0)^2 - nu) / (4 gamma))``."""
    if samples < 10**4:
        raise DomainError(f"i_wb_1_sampled needs samples >= 1e4, got {samples}")
    if not isinstance(point, LiftPoint):
        raise DomainError("point must be a LiftPoint")
    rate = point.c3_s / (4.0 * point.gamma_wb_s)
    rng = _rng(seed, 0, _STREAM_IWB, samples)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        size = min(chunk, samples - done)
        g = rng.standard_normal(size)
        v = np.maximum(g + kappa, 0.0) ** 2
        w = np.exp(rate * np.maximum(point.nu_wb - v, 0.0))
        total += float(np.sum(w))
        total_sq += float(np.sum(w * w))
        done += size
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    return McReport(mean, math.sqrt(var / samples), samples)

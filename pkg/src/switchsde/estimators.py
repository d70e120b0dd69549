"""Monte Carlo functionals and the verification harness.

Estimators orchestrate replicas in fixed contiguous batches; each batch's
outputs are written into its own slice of a full, replica-ordered array and
the statistics are reduced over that assembled array. Together with the
counter-addressed noise this makes every estimate bit-identical under any
thread count or batch completion order.

Bound checkers share one report shape: ``margin >= 0`` if and only if the
check passed, where the margin already folds in the stated statistical slack
(3 sigma everywhere, Wilson intervals for proportions). Orientation varies
by checker -- an upper-bound check uses ``rhs - (mean + 3 se)``, a holding
probability check uses ``wilson_lower - bound`` -- and is documented on each
function.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .engine import (EVENT_DRIVEN, FROZEN_RATE, DEFAULT_SEED, SimConfig,
                     run_chain, run_event_driven, simulate_path,
                     simulate_truncated)
from .errors import InvalidModelError, NumericalBlowupError, UnsupportedSchemeError
from .markov import transition_matrix
from .models import (HARNACK_PREREQUISITES, ModelSpec, SamplingPlan,
                     check_assumptions)
from .noise import NoiseStream
from .qmatrix import (as_point, displacement_lp_bound, displacement_lp_distance,
                      random_banded_q)

BATCH_REPLICAS = 16384
_SALT_FIRST_JUMP = 0x464A


# --- estimate containers ------------------------------------------------------

@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_replicas: int
    n_aborted: int = 0

    @property
    def flagged(self) -> bool:
        """More than 0.1% of replicas aborted: treat the estimate as suspect."""
        return self.n_aborted > 0.001 * self.n_replicas


def mc_from_values(values: np.ndarray, aborted: Optional[np.ndarray] = None) -> McEstimate:
    values = np.asarray(values, dtype=float)
    bad = ~np.isfinite(values)
    if aborted is not None:
        bad |= np.asarray(aborted, dtype=bool)
    good = values[~bad]
    n_ab = int(bad.sum())
    if len(good) == 0:
        return McEstimate(math.nan, math.nan, len(values), n_ab)
    mean = float(good.mean())
    se = float(good.std(ddof=1) / math.sqrt(len(good))) if len(good) > 1 else 0.0
    return McEstimate(mean, se, len(values), n_ab)


@dataclass(frozen=True)
class BoundReport:
    checker: str
    lhs: McEstimate
    rhs: float
    margin: float
    passed: bool
    params: dict = field(default_factory=dict)


def _bound_report(checker, lhs, rhs, margin, **params) -> BoundReport:
    return BoundReport(checker=checker, lhs=lhs, rhs=float(rhs),
                       margin=float(margin), passed=bool(margin >= 0),
                       params=params)


@dataclass(frozen=True)
class GapEstimate:
    radius: float
    gap: float
    stderr: float
    n_replicas: int
    n_aborted: int
    mean_signed: float


def wilson_lower(successes: int, n: int, z: float = 3.0) -> float:
    """Lower Wilson score bound for a binomial proportion."""
    if n <= 0:
        return 0.0
    p = successes / n
    den = 1.0 + z * z / n
    center = p + z * z / (2 * n)
    rad = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return max(0.0, (center - rad) / den)


# --- batched execution ---------------------------------------------------------

def _spans(n: int):
    return [(lo, min(lo + BATCH_REPLICAS, n)) for lo in range(0, n, BATCH_REPLICAS)]


def _run_batches(n: int, threads: int, kernel) -> dict:
    """Run ``kernel(lo, hi) -> dict[str, array]`` over fixed replica spans and
    concatenate outputs in span order (independent of completion order)."""
    spans = _spans(n)
    results: list = [None] * len(spans)
    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            futs = {ex.submit(kernel, lo, hi): k for k, (lo, hi) in enumerate(spans)}
            for fut in futs:
                results[futs[fut]] = fut.result()
    else:
        for k, (lo, hi) in enumerate(spans):
            results[k] = kernel(lo, hi)
    return {key: np.concatenate([r[key] for r in results]) for key in results[0]}


def _stacked_event_run(model, starts, i0, T, n, cfg, threads, *, salt=0,
                       trunc_level=None, track_xmax=False):
    """One event-driven run covering several start points under common random
    numbers: block ``b`` holds replicas 0..n-1 started from ``starts[b]``,
    and the replica ids repeat across blocks so paired rows share all draws.

    Returns a dict of arrays shaped (n_blocks, n).
    """
    starts = [as_point(s) for s in starts]
    nb = len(starts)
    stream = NoiseStream(cfg.seed, salt=salt)

    def kernel(lo, hi):
        m = hi - lo
        ids = np.tile(np.arange(lo, hi, dtype=np.uint64), nb)
        x0 = np.vstack([np.tile(s, (m, 1)) for s in starts])
        out = run_event_driven(model, x0, i0, T, cfg.dt, stream, ids,
                               trunc_level=trunc_level, track_xmax=track_xmax)
        res = {}
        for key, val in out.items():
            val = np.asarray(val)
            res[key] = val.reshape(nb, m, *val.shape[1:])
        return res

    spans = _spans(n)
    results: list = [None] * len(spans)
    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            futs = {ex.submit(kernel, lo, hi): k for k, (lo, hi) in enumerate(spans)}
            for fut in futs:
                results[futs[fut]] = fut.result()
    else:
        for k, (lo, hi) in enumerate(spans):
            results[k] = kernel(lo, hi)
    return {key: np.concatenate([r[key] for r in results], axis=1)
            for key in results[0]}


def _frozen_final_states(model, x, i, T, n, cfg, threads, salt=0):
    """Per-replica final states under the frozen-rate scheme (python loop)."""
    stream = NoiseStream(cfg.seed, salt=salt)
    cfg_t = replace(cfg, horizon=T, scheme=FROZEN_RATE)
    d = model.dim

    def kernel(lo, hi):
        m = hi - lo
        xs = np.full((m, d), np.nan)
        lams = np.zeros(m, dtype=np.int64)
        etas = np.full(m, np.inf)
        xmaxs = np.full(m, np.nan)
        lmaxs = np.full(m, np.nan)
        taus = np.full(m, np.inf)
        ab = np.zeros(m, dtype=bool)
        for k in range(m):
            try:
                traj = simulate_path(model, x, i, cfg_t, replica=lo + k,
                                     stream=stream)
            except NumericalBlowupError:
                ab[k] = True
                continue
            xs[k] = traj.x[-1]
            lams[k] = traj.regime[-1]
            etas[k] = traj.eta
            taus[k] = traj.tau_k
            xmaxs[k] = float(np.max(np.linalg.norm(traj.x, axis=1)))
            lmaxs[k] = float(traj.regime.max())
        return {"x": xs, "regime": lams, "eta": etas, "xnorm_max": xmaxs,
                "regime_max": lmaxs, "tau_k": taus, "aborted": ab}

    return _run_batches(n, threads, kernel)


def _chain_etas(model, i, T, n, cfg, threads, salt=0):
    stream = NoiseStream(cfg.seed, salt=salt)

    def kernel(lo, hi):
        reps = np.arange(lo, hi, dtype=np.uint64)
        out = run_chain(model.q, i, T, stream, reps)
        return {"eta": out["eta"]}

    return _run_batches(n, threads, kernel)["eta"]


# --- semigroup and first-jump estimators ---------------------------------------

def semigroup_estimate(model: ModelSpec, f: Callable, t: float, x, i: int,
                       n: int, cfg: SimConfig, threads: int = 1) -> McEstimate:
    """Replica mean of ``f(X_t, Lambda_t)`` started from ``(x, i)``.

    ``f`` is vectorized: ``f(X, lam)`` with ``X`` of shape (m, d) and ``lam``
    of shape (m,) returns (m,) values.
    """
    if cfg.scheme == EVENT_DRIVEN:
        out = _stacked_event_run(model, [x], i, t, n, cfg, threads)
        vals = np.asarray(f(out["x"][0], out["regime"][0]), dtype=float)
        return mc_from_values(vals, out["aborted"][0])
    out = _frozen_final_states(model, x, i, t, n, cfg, threads)
    good = ~out["aborted"]
    vals = np.full(n, np.nan)
    if good.any():
        vals[good] = np.asarray(f(out["x"][good], out["regime"][good]), dtype=float)
    return mc_from_values(vals, out["aborted"])


@dataclass(frozen=True)
class FirstJumpEstimate:
    total: McEstimate
    no_switch_component: McEstimate
    switch_component: McEstimate
    hold_probability: float


def first_jump_estimate(model: ModelSpec, f: Callable, t: float, x, i: int,
                        n: int, cfg: SimConfig, threads: int = 1,
                        components: bool = False):
    """Estimate ``E[f(X_t, Lambda_t)]`` by conditioning on the first switch.

    The switching skeleton is drawn on its own (possible because the rates
    are state-independent); replicas whose first switch lands after ``t``
    contribute the frozen-regime diffusion value, the rest integrate the
    frozen regime to the switch time and then continue the full process.
    Uses a salted substream, so the estimate is statistically independent of
    ``semigroup_estimate`` at the same seed -- comparing the two exercises
    the first-switch decomposition as an identity check.
    """
    if not model.q.state_independent:
        raise UnsupportedSchemeError(
            "the first-switch decomposition needs state-independent rates")
    out = _stacked_event_run(model, [x], i, t, n, cfg, threads,
                             salt=_SALT_FIRST_JUMP)
    vals = np.asarray(f(out["x"][0], out["regime"][0]), dtype=float)
    aborted = out["aborted"][0]
    total = mc_from_values(vals, aborted)
    if not components:
        return total
    eta = out["eta"][0]
    hold = eta >= t
    no_sw = mc_from_values(np.where(hold, vals, 0.0), aborted)
    sw = mc_from_values(np.where(hold, 0.0, vals), aborted)
    return FirstJumpEstimate(total, no_sw, sw, float(hold.mean()))


# --- moment bound ----------------------------------------------------------------

def second_moment_envelope(model: ModelSpec, x, i: int, T: float,
                           c1: float = 3.0, *, drop_position_term: bool = False) -> float:
    """Closed-form envelope for ``E[sup|X|^2 + sup Lambda^2]`` on [0, T]:

    ``(4/3 |x|^2 + 4 i^2) * exp((4 + 4/3 c1^2) int_0^T c(s) ds
    + 8 kappa^2 (alpha^2 + beta^2 + 2)(T+1) T)``

    ``c1`` is any valid constant for the L1 maximal martingale inequality;
    the envelope is monotone in it, so a conservative value only loosens the
    bound. With ``drop_position_term`` the rate growth certificate is used in
    its position-free form (beta = 0), which is the variant the truncation
    exit bound is stated with.
    """
    q = model.q
    integral_c, _ = quad(model.growth_c, 0.0, T, limit=200)
    beta_sq = 0.0 if drop_position_term else q.linear_bound_beta ** 2
    expo = ((4.0 + 4.0 / 3.0 * c1 * c1) * integral_c
            + 8.0 * q.kappa ** 2 * (q.linear_bound_alpha ** 2 + beta_sq + 2.0)
            * (T + 1.0) * T)
    lead = (4.0 / 3.0) * float(np.dot(as_point(x), as_point(x))) + 4.0 * i * i
    with np.errstate(over="ignore"):
        return float(lead * np.exp(expo))


def moment_bound_check(model: ModelSpec, x, i: int, T: float, n: int,
                       cfg: SimConfig, c1: float = 3.0,
                       threads: int = 1) -> BoundReport:
    """Upper-bound check: MC estimate of ``sup|X|^2 + sup Lambda^2`` (running
    maxima over the sampled times) against the closed-form envelope.
    ``margin = rhs - (mean + 3 se)``."""
    if math.isnan(model.q.linear_bound_alpha) or model.growth_c is None:
        raise InvalidModelError("moment bound needs alpha/beta/c(t) metadata")
    if model.q.state_independent:
        out = _stacked_event_run(model, [x], i, T, n, cfg, threads,
                                 track_xmax=True)
        vals = out["xnorm_max"][0] ** 2 + out["regime_max"][0] ** 2
        aborted = out["aborted"][0]
    else:
        out = _frozen_final_states(model, x, i, T, n, cfg, threads)
        vals = out["xnorm_max"] ** 2 + out["regime_max"] ** 2
        aborted = out["aborted"]
    lhs = mc_from_values(vals, aborted)
    rhs = second_moment_envelope(model, x, i, T, c1)
    margin = rhs - (lhs.mean + 3.0 * lhs.stderr)
    return _bound_report("moments", lhs, rhs, margin, model=model.model_id,
                         x=as_point(x).tolist(), i=i, T=T, c1=c1, n=n)


# --- holding-time bound -----------------------------------------------------------

def holding_probability_floor(model: ModelSpec, k: int, K: int, t: float) -> float:
    """``exp(-(min(kappa, k-1) + kappa) * alpha * K * t)`` -- the dominating
    chain's survival probability, a floor for P(no switch by t) whenever
    ``k <= K``."""
    q = model.q
    rate = (min(q.kappa, k - 1) + q.kappa) * q.linear_bound_alpha * K
    return math.exp(-rate * t)


def holding_time_check(model: ModelSpec, x, k: int, K: int,
                       t_grid: Sequence[float], n: int, cfg: SimConfig,
                       threads: int = 1) -> list[BoundReport]:
    """Per grid time: 99.7% Wilson lower bound for P(eta >= t | start (x, k))
    against the dominating-chain floor. ``margin = wilson_lower - floor``."""
    if k > K:
        raise ValueError(f"need k <= K, got k={k} > K={K}")
    horizon = float(max(t_grid))
    if model.q.state_independent:
        eta = _chain_etas(model, k, horizon, n, cfg, threads)
    else:
        out = _frozen_final_states(model, x, k, horizon, n, cfg, threads)
        eta = out["eta"]
    reports = []
    for t in t_grid:
        cnt = int(np.sum(eta >= t))
        p_hat = cnt / n
        # a sure empirical event is scored at probability one (the t = 0 edge,
        # where survival is almost sure and the floor equals one exactly)
        wl = 1.0 if cnt == n else wilson_lower(cnt, n, 3.0)
        floor = holding_probability_floor(model, k, K, t)
        lhs = McEstimate(p_hat, math.sqrt(max(p_hat * (1 - p_hat), 0.0) / n), n)
        reports.append(_bound_report("holding", lhs, floor, wl - floor,
                                     model=model.model_id, k=k, K=K, t=float(t),
                                     wilson_lower=wl, n=n))
    return reports


# --- log-Harnack check --------------------------------------------------------------

def harnack_cost_values(model: ModelSpec, lam_T: np.ndarray, T: float,
                        dist_sq: float) -> np.ndarray:
    """Per-replica transport cost ``C_k(T) phi(|x-y|^2) /
    (lambda(T) (1 - exp(-2 C_k(T) T / gamma)))`` evaluated at ``k = Lambda_T``."""
    ucls = model.u_class()
    phi_v = ucls.phi(dist_sq)
    lam_t = float(model.ellipticity_lambda(T))
    if lam_t <= 0:
        raise InvalidModelError("ellipticity floor must be positive")
    out = np.empty(len(lam_T))
    for kk in np.unique(lam_T):
        c = float(model.dissipativity_c(T, int(kk)))
        denom = lam_t * (1.0 - math.exp(-2.0 * c * T / ucls.gamma))
        out[lam_T == kk] = c * phi_v / denom
    return out


def harnack_check(model: ModelSpec, f: Callable, x, y, i: int, T: float,
                  n: int, cfg: SimConfig, threads: int = 1,
                  f_floor: float = 1e-6, verify: bool = True) -> BoundReport:
    """Check ``E[log f](from y) <= log E[f](from x) + transport cost``.

    Both sides run under common random numbers in one stacked batch; the
    cost expectation over the terminal regime reuses the left side's chain
    skeleton (the cost depends only on ``Lambda_T``). The pass rule inflates
    both sides by 3 sigma: ``margin = (rhs + 3 se_rhs) - (lhs - 3 se_lhs)``
    where ``se_rhs`` combines the delta-method error of the log term with the
    cost term's error. ``params["sigma_gap"]`` reports the raw gap in
    combined-sigma units for classifying statistical misses.
    """
    if not model.q.state_independent:
        raise UnsupportedSchemeError("the coupling argument needs "
                                     "state-independent rates")
    ucls = model.u_class()
    if not ucls.u_prime_nonpositive:
        raise InvalidModelError(
            f"modulus class {ucls.name!r} is not nonincreasing")
    if verify:
        plan = SamplingPlan(n_pairs=512, n_rate_pairs=32, max_regime=8,
                            times=(0.0, T))
        rep = check_assumptions(model, plan)
        if not rep.passed("uniform_ellipticity"):
            raise InvalidModelError(
                f"ellipticity check failed: {rep['uniform_ellipticity'].witness}")

    x = as_point(x)
    y = as_point(y)
    out = _stacked_event_run(model, [y, x], i, T, n, cfg, threads)

    def clamp(vals):
        return np.maximum(np.asarray(vals, dtype=float), f_floor)

    fy = clamp(f(out["x"][0], out["regime"][0]))
    fx = clamp(f(out["x"][1], out["regime"][1]))
    lhs = mc_from_values(np.log(fy), out["aborted"][0])
    pf = mc_from_values(fx, out["aborted"][1])
    dist_sq = float(np.sum((x - y) ** 2))
    cost = mc_from_values(harnack_cost_values(model, out["regime"][0], T, dist_sq),
                          out["aborted"][0])
    rhs = math.log(pf.mean) + cost.mean
    se_rhs = math.sqrt((pf.stderr / pf.mean) ** 2 + cost.stderr ** 2)
    margin = (rhs + 3.0 * se_rhs) - (lhs.mean - 3.0 * lhs.stderr)
    comb = math.sqrt(lhs.stderr ** 2 + se_rhs ** 2)
    sigma_gap = (lhs.mean - rhs) / comb if comb > 0 else 0.0
    return _bound_report("harnack", lhs, rhs, margin, model=model.model_id,
                         x=x.tolist(), y=y.tolist(), i=i, T=T, n=n,
                         log_mean=math.log(pf.mean), cost_mean=cost.mean,
                         se_rhs=se_rhs, sigma_gap=sigma_gap)


def gauss_function(scale: float = 1.0, center=None) -> Callable:
    """Strictly positive bounded observable ``exp(-scale |x - center|^2)``."""
    def f(X, lam):
        X = np.asarray(X, dtype=float)
        c = 0.0 if center is None else np.asarray(center, dtype=float)
        return np.exp(-scale * np.sum((X - c) ** 2, axis=1))
    return f


def harnack_sweep(model: ModelSpec, n_cases: int, n: int, cfg: SimConfig,
                  threads: int = 1, seed: Optional[int] = None,
                  T_choices: Sequence[float] = (0.25, 0.5, 1.0),
                  x_radius: float = 1.0) -> list[BoundReport]:
    """Randomized (x, y, T, f) sweep of the log-transport inequality.

    Model assumptions are verified once up front; individual cases reuse the
    verification. Case ``c`` runs at seed ``cfg.seed + c`` so the sweep is
    reproducible case-by-case.
    """
    rep0 = check_assumptions(model, SamplingPlan(n_pairs=1024, n_rate_pairs=32,
                                                 max_regime=8))
    if not rep0.passed(*[p for p in HARNACK_PREREQUISITES if p in rep0.results]):
        raise InvalidModelError(f"model fails prerequisites: {rep0.failed()}")
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    n_reg = model.q.n_regimes or 3
    cases = []
    for case in range(n_cases):
        x = rng.uniform(-x_radius, x_radius, size=model.dim)
        y = rng.uniform(-x_radius, x_radius, size=model.dim)
        T = float(rng.choice(np.asarray(T_choices)))
        f = gauss_function(scale=float(rng.uniform(0.3, 2.0)),
                           center=rng.uniform(-1.0, 1.0, size=model.dim))
        i = int(rng.integers(1, min(n_reg, 3) + 1))
        cases.append((case, x, y, T, f, i))

    def one(args):
        case, x, y, T, f, i = args
        return harnack_check(model, f, x, y, i, T, n,
                             replace(cfg, seed=cfg.seed + case), threads=1,
                             verify=False)

    # cases are the parallel unit: each runs on its own derived seed, so the
    # result set is identical under any thread count or completion order
    reports: list = [None] * n_cases
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            futs = {ex.submit(one, c): c[0] for c in cases}
            for fut in futs:
                reports[futs[fut]] = fut.result()
    else:
        for c in cases:
            reports[c[0]] = one(c)
    return reports


def harnack_sweep_summary(reports: Sequence[BoundReport],
                          min_pass_rate: float = 0.99,
                          hard_sigma: float = 4.0) -> dict:
    """Sweep verdict: pass rate above threshold and every residual miss
    within ``hard_sigma`` combined standard errors (a statistical miss, not a
    counterexample)."""
    n = len(reports)
    passed = sum(r.passed for r in reports)
    hard = [k for k, r in enumerate(reports)
            if not r.passed and r.params.get("sigma_gap", 0.0) > hard_sigma]
    rate = passed / n if n else 1.0
    return {"cases": n, "passed": passed, "pass_rate": rate,
            "hard_failures": len(hard), "hard_cases": hard,
            "ok": bool(rate >= min_pass_rate and not hard)}


# --- strong-Feller modulus probe ------------------------------------------------------

def feller_modulus(model: ModelSpec, f: Callable, t: float, x, i: int,
                   radii: Sequence[float], n: int, cfg: SimConfig,
                   threads: int = 1) -> list[GapEstimate]:
    """Common-random-number gaps ``|E f(from x + r e1) - E f(from x)|``.

    All starts run in one stacked batch with repeated replica ids, so the
    paired difference per replica is the variance-reduced CRN estimator.
    """
    x = as_point(x)
    e1 = np.zeros(model.dim)
    e1[0] = 1.0
    starts = [x] + [x + float(r) * e1 for r in radii]
    out = _stacked_event_run(model, starts, i, t, n, cfg, threads)
    f0 = np.asarray(f(out["x"][0], out["regime"][0]), dtype=float)
    ab0 = out["aborted"][0]
    gaps = []
    for b, r in enumerate(radii, start=1):
        fr = np.asarray(f(out["x"][b], out["regime"][b]), dtype=float)
        est = mc_from_values(fr - f0, ab0 | out["aborted"][b])
        gaps.append(GapEstimate(radius=float(r), gap=abs(est.mean),
                                stderr=est.stderr, n_replicas=est.n_replicas,
                                n_aborted=est.n_aborted, mean_signed=est.mean))
    return gaps


def gap_trend_pass(gaps: Sequence[GapEstimate]) -> bool:
    """Monotone-decrease trend at 3 sigma: each gap below the previous one
    plus combined noise (radii assumed listed in decreasing order)."""
    for prev, cur in zip(gaps, gaps[1:]):
        slack = 3.0 * math.sqrt(prev.stderr ** 2 + cur.stderr ** 2)
        if cur.gap > prev.gap + slack:
            return False
    return True


def discontinuity_certificate(gaps: Sequence[GapEstimate],
                              floor: float = 0.05) -> dict:
    """Certify a non-vanishing CRN gap at the smallest radius.

    The certificate holds when the gap minus 3 sigma stays above ``floor``:
    the semigroup provably fails to smooth bounded measurable data at this
    point, i.e. a strong-Feller counterexample witness.
    """
    smallest = min(gaps, key=lambda g: g.radius)
    lower = smallest.gap - 3.0 * smallest.stderr
    return {"radius": smallest.radius, "gap": smallest.gap,
            "stderr": smallest.stderr, "lower_3sigma": lower,
            "floor": floor, "certified": bool(lower > floor)}


# --- chain marginal oracle ------------------------------------------------------------

@dataclass(frozen=True)
class MarginalCheck:
    model_id: str
    entries: int
    within: int
    records: list

    @property
    def fraction_within(self) -> float:
        return self.within / self.entries if self.entries else 1.0

    def passed(self, threshold: float = 0.99) -> bool:
        return self.fraction_within >= threshold


def chain_generator_matrix(q, size: Optional[int] = None) -> np.ndarray:
    """Dense conservative generator of a finite state-independent spec."""
    if not q.state_independent:
        raise UnsupportedSchemeError("need state-independent rates")
    n = size or q.n_regimes
    if n is None:
        raise ValueError("need a finite regime count")
    zero = np.zeros(1)
    G = np.zeros((n, n))
    for i in range(1, n + 1):
        for j in q.band(i):
            if j <= n:
                G[i - 1, j - 1] = float(q.rate(zero, i, j))
        G[i - 1, i - 1] = -G[i - 1].sum()
    return G


def chain_marginal_check(model: ModelSpec, times: Sequence[float], n: int,
                         cfg: SimConfig, threads: int = 1,
                         starts: Optional[Sequence[int]] = None) -> MarginalCheck:
    """Empirical chain marginals vs the matrix-exponential oracle.

    For every start regime and grid time, each entry of the empirical
    distribution must sit within 3 binomial standard errors of the
    uniformization value.
    """
    q = model.q
    G = chain_generator_matrix(q)
    size = G.shape[0]
    starts = list(starts or range(1, size + 1))
    horizon = float(max(times))
    records = []
    within = 0
    entries = 0
    oracle = {t: transition_matrix(G, t) for t in times}
    for i0 in starts:
        def kernel(lo, hi, i0=i0):
            reps = np.arange(lo, hi, dtype=np.uint64)
            out = run_chain(q, i0, horizon, NoiseStream(cfg.seed + i0), reps,
                            t_marks=times)
            return {"regime_at": out["regime_at"].T}

        lam_at = _run_batches(n, threads, kernel)["regime_at"].T
        for ti, t in enumerate(times):
            counts = np.bincount(lam_at[ti], minlength=size + 1)[1:size + 1]
            emp = counts / n
            for j in range(size):
                p = float(oracle[t][i0 - 1, j])
                se = math.sqrt(max(p * (1.0 - p), 0.0) / n)
                ok = abs(emp[j] - p) <= 3.0 * se + 1e-12
                entries += 1
                within += ok
                records.append({"start": i0, "t": float(t), "regime": j + 1,
                                "empirical": float(emp[j]), "oracle": p,
                                "stderr": se, "within_3se": bool(ok)})
    return MarginalCheck(model_id=model.model_id, entries=entries,
                         within=within, records=records)


# --- truncation consistency --------------------------------------------------------

def truncation_identity_check(model: ModelSpec, x0, i0: int, K: int,
                              cfg: SimConfig, replica: int = 0) -> dict:
    """Shared-noise comparison of the K-truncated and plain paths.

    Both runs use the identical stream; they must agree sample-for-sample
    (times, positions, regimes, bitwise) up to and including the first
    sampled time where ``|X_t| + Lambda_t > K``.
    """
    cfg_f = replace(cfg, truncation=K, scheme=FROZEN_RATE)
    full = simulate_path(model, x0, i0, cfg_f, replica=replica,
                         stream=NoiseStream(cfg.seed))
    trunc = simulate_truncated(model, x0, i0, K, cfg, replica=replica,
                               stream=NoiseStream(cfg.seed))
    tau = min(full.tau_k, trunc.tau_k)
    ka = np.searchsorted(full.times, tau, side="right") if math.isfinite(tau) \
        else len(full.times)
    kb = np.searchsorted(trunc.times, tau, side="right") if math.isfinite(tau) \
        else len(trunc.times)
    same = (ka == kb
            and np.array_equal(full.times[:ka], trunc.times[:kb])
            and np.array_equal(full.x[:ka], trunc.x[:kb])
            and np.array_equal(full.regime[:ka], trunc.regime[:kb]))
    return {"identical": bool(same), "tau_k": float(tau),
            "n_compared": int(ka), "tau_full": full.tau_k,
            "tau_trunc": trunc.tau_k}


def truncation_exit_bound_check(model: ModelSpec, x0, i0: int, K: int, t: float,
                                n: int, cfg: SimConfig, c1: float = 3.0,
                                threads: int = 1) -> BoundReport:
    """Markov-type exit bound: empirical ``P(tau_K <= t)`` against the
    second-moment envelope divided by K (position-free rate certificate).
    ``margin = rhs - (p_hat + 3 se)``."""
    out = _stacked_event_run(model, [x0], i0, t, n, cfg, threads,
                             trunc_level=float(K))
    hit = out["tau_k"][0] <= t
    p_hat = float(hit.mean())
    se = math.sqrt(max(p_hat * (1 - p_hat), 0.0) / n)
    rhs = second_moment_envelope(model, x0, i0, t, c1,
                                 drop_position_term=True) / K
    lhs = McEstimate(p_hat, se, n, int(out["aborted"][0].sum()))
    margin = rhs - (p_hat + 3.0 * se)
    return _bound_report("truncation", lhs, min(rhs, 1e308), margin,
                         model=model.model_id, K=K, t=float(t), n=n)


# --- jump-kernel Lipschitz sweep ------------------------------------------------------

def displacement_lipschitz_sweep(n_cases: int = 1000, seed: int = DEFAULT_SEED,
                                 p_values: Sequence[float] = (1.0, 2.0),
                                 i_max: int = 20, dim: int = 1,
                                 radius: float = 3.0) -> list[dict]:
    """Randomized exact check of the jump-kernel L^p Lipschitz envelope.

    Each case draws a banded spec whose Lipschitz constant is certified by
    construction, two points, a row and an exponent, and compares the exact
    interval-sweep distance against the closed-form envelope.
    """
    rng = np.random.default_rng(seed)
    records = []
    for case in range(n_cases):
        q = random_banded_q(rng, dim=dim, max_regime=i_max + 4)
        x = rng.uniform(-radius, radius, size=dim)
        y = rng.uniform(-radius, radius, size=dim)
        i = int(rng.integers(1, i_max + 1))
        p = float(p_values[case % len(p_values)])
        lhs = displacement_lp_distance(q, x, y, i, p)
        rhs = displacement_lp_bound(q, i, p, float(np.linalg.norm(x - y)))
        records.append({"case": case, "kappa": q.kappa, "i": i, "p": p,
                        "lhs": lhs, "rhs": rhs, "margin": rhs - lhs,
                        "passed": bool(lhs <= rhs)})
    return records

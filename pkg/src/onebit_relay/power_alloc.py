r"""Sum-rate power allocation under a total budget, one-bit converters.

The per-user SINR of the quantized system is a ratio gamma_k = p_S,k / xi_k
where xi_k is affine in the source powers and in their quotients by the relay
power:

    xi_k = sum_i a[k,i] p_S,i + (sum_i b[k,i] p_S,i + c[k]) / p_R + d[k]

with positive coefficients determined by the large-scale statistics.  Sum-rate
maximization over (p_S, p_R) subject to sum(p_S) + p_R <= P_T is therefore a
signomial problem; it is solved by the standard successive geometric-program
approximation: bound each 1 + gamma_k below by the monomial
omega_k gamma_k^mu_k fitted at the current SINR point (exact there, with
mu_k = gamma_hat_k / (1 + gamma_hat_k)), solve the resulting GP inside a
trust region gamma_hat/theta <= gamma <= theta*gamma_hat, re-center, repeat.

The GP subproblems are small (2K+1 variables), so they are solved in-house:
in log-variables each posynomial constraint is a log-sum-exp inequality and
the problem is convex; a log-barrier damped-Newton method handles it without
bringing in an external solver.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import logsumexp

from .channel import SystemConfig, est_variances
from .rate_closed import ONE_BIT, HardwareCase, closed_form_sinr

HALF_PI = 0.5 * np.pi
QUARTER_PI_SQ = 0.25 * np.pi**2


class GpInfeasibleError(ValueError):
    """The supplied starting point violates a constraint (with certificate)."""


class GpConvergenceError(RuntimeError):
    """The barrier Newton iteration hit its cap before reaching tolerance."""


@dataclass
class SinrCoefficients:
    """Positive coefficients of the per-user SINR denominator xi_k.

    a and b are K x K (row k collects the weights on every source power),
    c and d length K.  gamma(p_S, p_R) reproduces the closed-form SINR of
    the one-bit system identically in the powers.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def xi(self, p_S: np.ndarray, p_R: float) -> np.ndarray:
        return self.a @ p_S + (self.b @ p_S + self.c) / p_R + self.d

    def gamma(self, p_S: np.ndarray, p_R: float) -> np.ndarray:
        return p_S / self.xi(p_S, p_R)


def sinr_coefficients(config: SystemConfig) -> SinrCoefficients:
    """Exact SINR coefficients of the one-bit system for the given scenario.

    Derived by regrouping the closed-form SINR denominator by powers of
    p_S,i and 1/p_R; one expression covers diagonal and off-diagonal entries
    alike.
    """
    M = config.M
    s, r = est_variances(config)
    beta_SR, beta_RD = config.beta_SR, config.beta_RD
    S = np.sum(s * r)
    denom_k = M * s**2 * r**2
    a = (
        HALF_PI
        * (beta_SR[np.newaxis, :] * (s * r**2)[:, np.newaxis]
           + beta_RD[:, np.newaxis] * (s**2 * r)[np.newaxis, :])
        / denom_k[:, np.newaxis]
        + QUARTER_PI_SQ
        * beta_SR[np.newaxis, :]
        * beta_RD[:, np.newaxis]
        * S
        / (M**2 * (s**2 * r**2))[:, np.newaxis]
    )
    b = (
        HALF_PI * (s**2 * r)[np.newaxis, :] / denom_k[:, np.newaxis]
        + QUARTER_PI_SQ * beta_SR[np.newaxis, :] * S / (M**2 * (s**2 * r**2))[:, np.newaxis]
    )
    c = QUARTER_PI_SQ * S / (M**2 * s**2 * r**2)
    d = HALF_PI / (M * s) + QUARTER_PI_SQ * beta_RD * S / (M**2 * s**2 * r**2)
    return SinrCoefficients(a=a, b=b, c=c, d=d)


def monomial_fit(gamma_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Best monomial lower bound of 1 + gamma near gamma_hat.

    Returns (mu, omega) with omega * gamma^mu <= 1 + gamma for all gamma > 0
    and equality at gamma_hat.
    """
    gamma_hat = np.asarray(gamma_hat, dtype=float)
    mu = gamma_hat / (1.0 + gamma_hat)
    omega = (1.0 + gamma_hat) / gamma_hat**mu
    return mu, omega


@dataclass
class Posynomial:
    """Sum of monomials c_m * prod_n v_n^(E[m, n]) over positive variables."""

    coeffs: np.ndarray
    exponents: np.ndarray

    def log_value(self, log_v: np.ndarray) -> float:
        """log of the posynomial at the point with the given log-variables."""
        return float(logsumexp(self.exponents @ log_v + np.log(self.coeffs)))


@dataclass
class GpProblem:
    """minimize objective s.t. every constraint posynomial <= 1, variables > 0."""

    objective: Posynomial
    constraints: list[Posynomial]
    start: np.ndarray


@dataclass
class GpSolution:
    variables: np.ndarray
    objective_value: float
    iterations: int
    stationarity: float
    constraint_values: np.ndarray


def _lse_grad_hess(posy: Posynomial, log_v: np.ndarray):
    """Value, gradient, Hessian of log(posynomial) in log-variables."""
    h = posy.exponents @ log_v + np.log(posy.coeffs)
    val = logsumexp(h)
    w = np.exp(h - val)
    grad = posy.exponents.T @ w
    EW = posy.exponents * w[:, np.newaxis]
    hess = posy.exponents.T @ EW - np.outer(grad, grad)
    return float(val), grad, hess


def solve_gp(problem: GpProblem, max_iters: int = 500) -> GpSolution:
    """Interior-point solution of a geometric program in log-variables.

    Log-barrier with damped Newton steps; the barrier parameter grows by
    15x per stage until the duality-gap bound m/t drops below 1e-9, and the
    last stage is polished until the KKT residual (with the implicit duals
    1/(t * slack)) falls below 1e-7.  The start must satisfy every
    constraint strictly.
    """
    v = np.log(np.asarray(problem.start, dtype=float))
    n = v.size
    cons = problem.constraints
    m = len(cons)
    for j, g in enumerate(cons):
        if g.log_value(v) >= 0.0:
            raise GpInfeasibleError(
                f"starting point violates constraint {j} "
                f"(posynomial value {np.exp(g.log_value(v)):.6g} >= 1)"
            )

    def barrier(vv: np.ndarray, t: float) -> float:
        vals = [g.log_value(vv) for g in cons]
        if max(vals) >= 0.0:
            return np.inf
        f0 = problem.objective.log_value(vv)
        return t * f0 - np.sum(np.log([-x for x in vals]))

    total = 0
    t = 1.0
    while True:
        # once the gap bound m/t is below tolerance this stage is the last
        final = m / t < 1e-9
        prev_dec = np.inf
        for _ in range(max_iters):
            f0, g0, H0 = _lse_grad_hess(problem.objective, v)
            grad = t * g0
            hess = t * H0
            for g in cons:
                val, gg, gh = _lse_grad_hess(g, v)
                grad += gg / (-val)
                hess += np.outer(gg, gg) / val**2 + gh / (-val)
            # grad / t is the KKT residual at the implicit dual estimates,
            # zero at the exact center of any stage
            if final and np.abs(grad).max() / t < 1e-7:
                break
            # Jacobi scaling keeps the solve usable when the barrier terms
            # spread the Hessian over many orders of magnitude
            d = 1.0 / np.sqrt(np.maximum(np.diag(hess), 1e-300))
            hs = hess * np.outer(d, d)
            try:
                step = d * np.linalg.solve(hs, -(d * grad))
            except np.linalg.LinAlgError:
                step = d * np.linalg.solve(hs + 1e-10 * np.eye(n), -(d * grad))
            decrement = float(-grad @ step)
            total += 1
            if total > max_iters:
                raise GpConvergenceError(
                    f"no convergence within {max_iters} Newton iterations"
                )
            if decrement / 2.0 < (1e-15 if final else 1e-9):
                break
            if decrement < 1e-6 and decrement >= prev_dec:
                # floating-point floor: steps no longer shrink the residual
                break
            prev_dec = decrement
            if decrement < 1e-2:
                # quadratic-convergence region: barrier changes are below
                # line-search resolution, take the undamped step
                v = v + step
                continue
            base = barrier(v, t)
            s = 1.0
            while s > 1e-14 and barrier(v + s * step, t) > base + 0.25 * s * (grad @ step):
                s *= 0.5
            if s <= 1e-14:
                # floating-point floor of the line search; accept the center
                break
            v = v + s * step
        if final:
            break
        t *= 15.0

    cvals = np.array([g.log_value(v) for g in cons])
    # dual estimates from the barrier give the KKT stationarity residual
    _, g0, _ = _lse_grad_hess(problem.objective, v)
    resid = g0.copy()
    for val, g in zip(cvals, cons):
        _, gg, _ = _lse_grad_hess(g, v)
        resid += gg / (t * (-val))
    return GpSolution(
        variables=np.exp(v),
        objective_value=np.exp(problem.objective.log_value(v)),
        iterations=total,
        stationarity=float(np.abs(resid).max()),
        constraint_values=np.exp(cvals),
    )


@dataclass
class AllocationResult:
    """Outcome of a power-allocation run.

    trace holds one (gamma_hat, objective) pair per outer iteration, where
    the objective is the bound-tight sum rate at that iteration's powers;
    notes records any trust-region restarts.
    """

    p_S: np.ndarray
    p_R: float
    gamma: np.ndarray
    sum_rate: float
    trace: list
    converged: bool
    notes: list = field(default_factory=list)


def _sum_rate(config: SystemConfig, gamma: np.ndarray) -> float:
    return float(config.rate_prefactor() * np.log2(1.0 + gamma).sum())


def uniform_allocation(
    config: SystemConfig, P_T: float, hw_case: HardwareCase = ONE_BIT
) -> AllocationResult:
    """Baseline split: p_S,k = P_T / (2K) for every source, p_R = P_T / 2."""
    if P_T <= 0:
        raise ValueError("P_T must be positive")
    p_S = np.full(config.K, P_T / (2 * config.K))
    p_R = P_T / 2.0
    gamma = closed_form_sinr(replace(config, p_S=p_S, p_R=p_R), hw_case)
    return AllocationResult(
        p_S=p_S,
        p_R=p_R,
        gamma=gamma,
        sum_rate=_sum_rate(config, gamma),
        trace=[],
        converged=True,
    )


def _build_subproblem(
    coeffs: SinrCoefficients,
    K: int,
    P_T: float,
    gamma_hat: np.ndarray,
    theta: float,
    p_start: np.ndarray,
    gamma_start: np.ndarray,
) -> GpProblem:
    """Assemble one GP: variables (p_S (K), p_R, gamma (K)) in that order."""
    n = 2 * K + 1
    mu, _ = monomial_fit(gamma_hat)

    def unit(i):
        e = np.zeros(n)
        e[i] = 1.0
        return e

    obj = Posynomial(
        coeffs=np.array([1.0]),
        exponents=-np.concatenate([np.zeros(K + 1), mu])[np.newaxis, :],
    )
    constraints = []
    for k in range(K):
        rows, cc = [], []
        for i in range(K):
            e = unit(K + 1 + k) - unit(k) + unit(i)
            rows.append(e)
            cc.append(coeffs.a[k, i])
            rows.append(e - unit(K))
            cc.append(coeffs.b[k, i])
        rows.append(unit(K + 1 + k) - unit(k) - unit(K))
        cc.append(coeffs.c[k])
        rows.append(unit(K + 1 + k) - unit(k))
        cc.append(coeffs.d[k])
        constraints.append(Posynomial(np.array(cc), np.stack(rows)))
    # total power budget
    constraints.append(
        Posynomial(
            np.full(K + 1, 1.0 / P_T),
            np.stack([unit(i) for i in range(K + 1)]),
        )
    )
    # trust region around the expansion point
    for k in range(K):
        constraints.append(
            Posynomial(np.array([1.0 / (theta * gamma_hat[k])]),
                       unit(K + 1 + k)[np.newaxis, :])
        )
        constraints.append(
            Posynomial(np.array([gamma_hat[k] / theta]),
                       -unit(K + 1 + k)[np.newaxis, :])
        )
    # keep powers bounded away from zero so the log-space search stays sane
    floor = 1e-12 * P_T
    for i in range(K + 1):
        constraints.append(
            Posynomial(np.array([floor]), -unit(i)[np.newaxis, :])
        )
    start = np.concatenate([p_start, gamma_start])
    return GpProblem(objective=obj, constraints=constraints, start=start)


def successive_approx(
    config: SystemConfig,
    P_T: float,
    epsilon: float = 1e-3,
    theta: float = 1.1,
    max_outer: int = 200,
) -> AllocationResult:
    """Successive GP approximation of the sum-rate-optimal allocation.

    Starts from the uniform split, fits the monomial bound at the current
    SINR point, solves the GP inside the trust region, re-centers, and stops
    once the SINR point moves less than epsilon in every coordinate.  The
    bound is exact at the expansion point, so the true objective cannot
    decrease between iterations.
    """
    if P_T <= 0 or theta <= 1 or epsilon <= 0:
        raise ValueError("need P_T > 0, theta > 1, epsilon > 0")
    coeffs = sinr_coefficients(config)
    K = config.K
    p_S = np.full(K, P_T / (2 * K))
    p_R = P_T / 2.0
    gamma_hat = coeffs.gamma(p_S, p_R)
    trace: list = []
    notes: list = []
    converged = False
    for _ in range(max_outer):
        trace.append((gamma_hat.copy(), _sum_rate(config, gamma_hat)))
        # strictly feasible start: step just inside the budget and bound
        shrink = 1.0 - 1e-6
        p_start = np.concatenate([p_S, [p_R]]) * shrink
        gamma_start = coeffs.gamma(p_start[:K], p_start[K]) * (1.0 - 1e-9)
        problem = _build_subproblem(
            coeffs, K, P_T, gamma_hat, theta, p_start, gamma_start
        )
        try:
            sol = solve_gp(problem)
        except GpInfeasibleError as err:
            # re-center more conservatively and try again
            gamma_hat = gamma_hat * 0.5
            notes.append(f"trust region restarted: {err}")
            if len(notes) > 8:
                raise
            continue
        p_S, p_R = sol.variables[:K], float(sol.variables[K])
        gamma_new = coeffs.gamma(p_S, p_R)
        # absolute test, per the algorithm's published stopping rule; it
        # presumes at least one user operates at a non-negligible SINR
        if np.max(np.abs(gamma_new - gamma_hat)) < epsilon:
            gamma_hat = gamma_new
            converged = True
            break
        gamma_hat = gamma_new
    trace.append((gamma_hat.copy(), _sum_rate(config, gamma_hat)))
    return AllocationResult(
        p_S=p_S,
        p_R=p_R,
        gamma=gamma_hat,
        sum_rate=_sum_rate(config, gamma_hat),
        trace=trace,
        converged=converged,
        notes=notes,
    )

"""Fit (alpha, beta) of the generalized distribution to a standard fractional target.

Two routes: equating mean/variance (damped Newton on the 2x2 system, with a
coarse grid fallback) and least-squares matching of the mass functions
(Nelder-Mead simplex; derivative-free because the objective runs through
series evaluations).  Both are deterministic for a fixed configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .distributions import (
    GfpdParams,
    SfpdParams,
    gfpd_mean_variance,
    gfpd_pmf,
    sfpd_mean_variance,
    sfpd_pmf,
)
from .errors import (
    InvalidParams,
    MlPoissonError,
    NoSolution,
    NotConverged,
)
from .special_functions import DEFAULT_CONTROL, SeriesControl

__all__ = [
    "ALPHA_S_SWEEP",
    "FitConfig",
    "FitResult",
    "fit_least_squares",
    "fit_moment_match",
    "fit_table1",
    "fit_to_pmf",
]

# alpha_s values of the full sweep, high to low.
ALPHA_S_SWEEP = tuple(round(0.1 * i, 1) for i in range(10, 0, -1))

_PENALTY = 1e6
_TAIL_MASS = 1e-8
_TARGET_K_CAP = 400


@dataclass(frozen=True)
class FitConfig:
    method: str = "least_squares"          # or "moment_match"
    k_range: Optional[tuple[int, int]] = None  # None: k_hi from target tail < 1e-8
    weight: str = "uniform"                # or "near_maximum"
    weight_width: int = 3
    init: Optional[tuple[float, float]] = None  # None: (alpha_s, 1.0)
    tol: float = 1e-9
    max_iter: int = 600

    def __post_init__(self):
        if self.method not in ("least_squares", "moment_match"):
            raise InvalidParams(f"FitConfig: unknown method {self.method!r}")
        if self.weight not in ("uniform", "near_maximum"):
            raise InvalidParams(f"FitConfig: unknown weight {self.weight!r}")
        if self.weight_width < 1:
            raise InvalidParams(f"FitConfig: weight_width must be >= 1, got {self.weight_width}")
        if self.k_range is not None:
            lo, hi = self.k_range
            if lo < 0 or lo > hi:
                raise InvalidParams(f"FitConfig: need 0 <= k_lo <= k_hi, got {self.k_range}")
        if not (self.tol > 0.0):
            raise InvalidParams(f"FitConfig: tol must be > 0, got {self.tol}")
        if self.max_iter < 1:
            raise InvalidParams(f"FitConfig: max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class FitResult:
    alpha: float
    beta: float
    objective: float
    iterations: int
    converged: bool
    method: str
    history: tuple[float, ...] = ()  # best objective after each iteration


def _target_pmf(target: SfpdParams, cfg: FitConfig, ctl: SeriesControl) -> tuple[int, list[float]]:
    """(k_lo, target masses over the fit range)."""
    if cfg.k_range is not None:
        lo, hi = cfg.k_range
        return lo, [sfpd_pmf(target, k, ctl) for k in range(lo, hi + 1)]
    probs: list[float] = []
    cum = 0.0
    k = 0
    while True:
        pk = sfpd_pmf(target, k, ctl)
        probs.append(pk)
        cum += pk
        if cum >= 1.0 - _TAIL_MASS:
            break
        k += 1
        if k > _TARGET_K_CAP:
            raise NoSolution(
                f"fit: target tail mass did not drop below {_TAIL_MASS} by k={_TARGET_K_CAP}"
            )
    return 0, probs


def _fit_weights(probs: Sequence[float], cfg: FitConfig) -> list[float]:
    if cfg.weight == "uniform":
        return [1.0] * len(probs)
    mode = max(range(len(probs)), key=probs.__getitem__)
    return [1.0 if abs(i - mode) <= cfg.weight_width else 0.0 for i in range(len(probs))]


def fit_to_pmf(target_probs: Sequence[float], k_lo: int, lam: float,
               cfg: FitConfig, ctl: SeriesControl = DEFAULT_CONTROL) -> FitResult:
    """Nelder-Mead least squares of the generalized family against any target pmf.

    Simplex coefficients: reflection 1, expansion 2, contraction 0.5, shrink
    0.5; initial simplex at cfg.init with edge lengths (0.05, 1.0) in
    (alpha, beta).  Domain violations and series failures cost +1e6.
    """
    if cfg.init is None:
        raise InvalidParams("fit_to_pmf: cfg.init must be set")
    weights = _fit_weights(target_probs, cfg)
    ks = range(k_lo, k_lo + len(target_probs))

    def objective(alpha: float, beta: float) -> float:
        if alpha <= 0.0 or not (math.isfinite(alpha) and math.isfinite(beta)):
            return _PENALTY
        try:
            params = GfpdParams(lam, alpha, beta)
            return math.fsum(
                w * (pt - gfpd_pmf(params, k, ctl)) ** 2
                for k, pt, w in zip(ks, target_probs, weights)
            )
        except MlPoissonError:
            return _PENALTY

    verts = [
        (cfg.init[0], cfg.init[1]),
        (cfg.init[0] + 0.05, cfg.init[1]),
        (cfg.init[0], cfg.init[1] + 1.0),
    ]
    vals = [objective(*v) for v in verts]
    history: list[float] = []
    iterations = 0
    converged = False
    while iterations < cfg.max_iter:
        order = sorted(range(3), key=vals.__getitem__)
        verts = [verts[i] for i in order]
        vals = [vals[i] for i in order]
        diameter = max(
            math.dist(verts[i], verts[j]) for i in range(3) for j in range(i + 1, 3)
        )
        if diameter <= cfg.tol:
            converged = True
            break
        iterations += 1
        cx = ((verts[0][0] + verts[1][0]) / 2.0, (verts[0][1] + verts[1][1]) / 2.0)
        worst = verts[2]
        xr = (cx[0] + (cx[0] - worst[0]), cx[1] + (cx[1] - worst[1]))
        fr = objective(*xr)
        if fr < vals[0]:
            xe = (cx[0] + 2.0 * (cx[0] - worst[0]), cx[1] + 2.0 * (cx[1] - worst[1]))
            fe = objective(*xe)
            if fe < fr:
                verts[2], vals[2] = xe, fe
            else:
                verts[2], vals[2] = xr, fr
        elif fr < vals[1]:
            verts[2], vals[2] = xr, fr
        else:
            if fr < vals[2]:
                xc = (cx[0] + 0.5 * (xr[0] - cx[0]), cx[1] + 0.5 * (xr[1] - cx[1]))
                fc = objective(*xc)
                accepted = fc <= fr
            else:
                xc = (cx[0] - 0.5 * (cx[0] - worst[0]), cx[1] - 0.5 * (cx[1] - worst[1]))
                fc = objective(*xc)
                accepted = fc < vals[2]
            if accepted:
                verts[2], vals[2] = xc, fc
            else:
                for i in (1, 2):
                    verts[i] = (
                        verts[0][0] + 0.5 * (verts[i][0] - verts[0][0]),
                        verts[0][1] + 0.5 * (verts[i][1] - verts[0][1]),
                    )
                    vals[i] = objective(*verts[i])
        history.append(min(vals))
    order = sorted(range(3), key=vals.__getitem__)
    best = verts[order[0]]
    result = FitResult(
        alpha=best[0],
        beta=best[1],
        objective=vals[order[0]],
        iterations=iterations,
        converged=converged,
        method="least_squares",
        history=tuple(history),
    )
    if not converged:
        raise NotConverged(
            f"fit_least_squares: simplex diameter above {cfg.tol} after "
            f"{cfg.max_iter} iterations",
            result=result,
        )
    return result


def fit_least_squares(target: SfpdParams, cfg: FitConfig = FitConfig(),
                      ctl: SeriesControl = DEFAULT_CONTROL) -> FitResult:
    """Least-squares (alpha, beta) for the generalized family against a
    standard fractional target at the same lambda."""
    if cfg.init is None:
        cfg = replace(cfg, init=(target.alpha_s, 1.0))
    k_lo, probs = _target_pmf(target, cfg, ctl)
    return fit_to_pmf(probs, k_lo, target.lam, cfg, ctl)


def _mean_var_residual(lam: float, alpha: float, beta: float,
                       mt: float, vt: float, ctl: SeriesControl):
    mg, vg = gfpd_mean_variance(GfpdParams(lam, alpha, beta), ctl)
    return (mg / mt - 1.0, vg / vt - 1.0)


def fit_moment_match(target: SfpdParams, cfg: FitConfig = FitConfig(method="moment_match"),
                     ctl: SeriesControl = DEFAULT_CONTROL) -> FitResult:
    """Solve mean/variance equality for (alpha, beta) by damped Newton.

    Finite-difference Jacobian with relative step 1e-6; residuals are scaled
    by the target moments.  If Newton stalls, a coarse grid over
    alpha in (0.05, 1.99) x beta in (-5, 100) seeds a second Newton run.
    """
    mt, vt = sfpd_mean_variance(target)
    lam = target.lam

    def residual(a: float, b: float):
        try:
            return _mean_var_residual(lam, a, b, mt, vt, ctl)
        except MlPoissonError:
            return None

    def newton(x0: tuple[float, float]):
        x = x0
        r = residual(*x)
        if r is None:
            return None, math.inf, 0
        nit = 0
        while math.hypot(*r) > cfg.tol and nit < cfg.max_iter:
            nit += 1
            jac = [[0.0, 0.0], [0.0, 0.0]]
            ok = True
            for j in range(2):
                h = 1e-6 * max(1.0, abs(x[j]))
                xp = (x[0] + h, x[1]) if j == 0 else (x[0], x[1] + h)
                rp = residual(*xp)
                if rp is None:
                    ok = False
                    break
                jac[0][j] = (rp[0] - r[0]) / h
                jac[1][j] = (rp[1] - r[1]) / h
            if not ok:
                break
            det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0]
            if det == 0.0 or not math.isfinite(det):
                break
            dx = (
                -(jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
                -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
            )
            base = math.hypot(*r)
            step = 1.0
            moved = False
            while step > 1e-10:
                xn = (x[0] + step * dx[0], x[1] + step * dx[1])
                if xn[0] > 0.0:
                    rn = residual(*xn)
                    if rn is not None and math.hypot(*rn) < base:
                        x, r = xn, rn
                        moved = True
                        break
                step /= 2.0
            if not moved:
                break
        return x, math.hypot(*r), nit

    init = cfg.init if cfg.init is not None else (target.alpha_s, 1.0)
    best_x, best_norm, iters = newton(init)

    if best_norm > cfg.tol:
        # coarse grid, then refine from the best cell
        grid_best, grid_norm = None, math.inf
        for i in range(40):
            a = 0.05 + (1.99 - 0.05) * i / 39.0
            for j in range(64):
                b = -5.0 + 105.0 * j / 63.0
                r = residual(a, b)
                if r is not None:
                    nr = math.hypot(*r)
                    if nr < grid_norm:
                        grid_best, grid_norm = (a, b), nr
        if grid_best is not None:
            x2, n2, it2 = newton(grid_best)
            if n2 < best_norm:
                best_x, best_norm, iters = x2, n2, iters + it2

    converged = best_norm <= cfg.tol
    result = FitResult(
        alpha=best_x[0] if best_x else math.nan,
        beta=best_x[1] if best_x else math.nan,
        objective=best_norm,
        iterations=iters,
        converged=converged,
        method="moment_match",
    )
    if not converged:
        raise NoSolution(
            f"fit_moment_match: residual norm {best_norm:.3e} above tol {cfg.tol} "
            f"after Newton and grid search",
            result=result,
        )
    return result


def fit_table1(lam: float, nu: float = 1.0, cfg: FitConfig = FitConfig(),
               ctl: SeriesControl = DEFAULT_CONTROL) -> list[tuple[float, FitResult]]:
    """Least-squares sweep over alpha_s = 1.0, 0.9, ..., 0.1 at fixed lambda, nu.

    Each row warm-starts from the previous converged row (the fitted pair
    drifts smoothly along the sweep); the first row starts at (alpha_s, 1).
    Per-row failures are collected, not fatal.
    """
    rows: list[tuple[float, FitResult]] = []
    prev: Optional[tuple[float, float]] = None
    for alpha_s in ALPHA_S_SWEEP:
        target = SfpdParams(alpha_s, nu, lam)
        row_cfg = replace(cfg, init=prev if prev is not None else (alpha_s, 1.0))
        try:
            result = fit_least_squares(target, row_cfg, ctl)
        except (NotConverged, NoSolution) as exc:
            result = exc.result
        except MlPoissonError:
            result = FitResult(math.nan, math.nan, math.inf, 0, False, "least_squares")
        rows.append((alpha_s, result))
        if result is not None and result.converged:
            prev = (result.alpha, result.beta)
    return rows

"""Model-based trust-region minimizer without derivatives.

The driver keeps ``npt`` interpolation points (default ``2n+1``), models the
objective by least-change updates of a quadratic, and alternates trust-region
steps with geometry-improving steps.  The trust-region lower bound ``rho``
starts at ``rhobeg`` and is divided by 10 whenever progress stalls with good
geometry; reaching ``rhoend`` and demanding one more reduction terminates
the run, so ``rhoend`` sets the solution accuracy.

Control constants (step acceptance at ratio 0, radius halving at 0.1,
doubling above 0.7, short-step threshold ``rho/2``, geometry threshold
``2 * delta``) are fixed so runs are reproducible; the driver is fully
deterministic and mathematically invariant under permutation of the
variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryFailureError, InconsistentDataError, NotPoisedError
from .interpolation import (
    InterpolationSet,
    lagrange_functions,
    lagrange_values,
    system_is_solvable,
)
from .quadratic import QuadraticModel, _as_point, zero_model
from .update import SigmaRule, UpdateContext, least_change_update, resolve_sigma

STATUS_CONVERGED = "converged"
STATUS_MAXFUN = "maxfun"
STATUS_STALLED = "stalled"
STATUS_ERROR = "error"

_RATIO_SHRINK = 0.1
_RATIO_EXPAND = 0.7
_GEOMETRY_FACTOR = 2.0
_RHO_DIV = 10.0
_RCOND_VET = 1e-8  # conditioning margin demanded of working point sets


@dataclass(frozen=True)
class SolverConfig:
    """Run parameters; ``npt=None`` means the recommended ``2n+1``."""

    rhobeg: float = 0.5
    rhoend: float = 1e-6
    maxfun: int = 1000
    npt: int | None = None
    sigma_rule: SigmaRule = field(default_factory=SigmaRule)
    seed: int = 0

    def resolve_npt(self, n: int) -> int:
        npt = 2 * n + 1 if self.npt is None else int(self.npt)
        if not n + 2 <= npt <= (n + 1) * (n + 2) // 2:
            raise ValueError(
                f"npt must lie in [n+2, (n+1)(n+2)/2] = [{n + 2}, {(n + 1) * (n + 2) // 2}]"
            )
        return npt

    def validate(self, n: int) -> None:
        if not 0 < self.rhoend <= self.rhobeg:
            raise ValueError("need 0 < rhoend <= rhobeg")
        if self.maxfun < self.resolve_npt(n):
            raise ValueError("maxfun must cover the initial point set")


@dataclass(frozen=True)
class SolverReport:
    best_point: np.ndarray
    best_value: float
    nf: int
    status: str
    history: list
    message: str = ""


def initial_point_set(xhat, rhobeg: float, npt: int) -> InterpolationSet:
    """Starting stencil: the start, then +/- steps along each axis.

    The first point is the start itself; points ``x + rhobeg e_i`` follow in
    axis order, then ``x - rhobeg e_i``, truncated to ``npt`` points.
    """
    x = _as_point(xhat)
    n = x.size
    if not n + 2 <= npt <= (n + 1) * (n + 2) // 2:
        raise ValueError(f"npt {npt} out of range for n={n}")
    pts = np.tile(x, (npt, 1))
    for k in range(1, npt):
        if k <= n:
            pts[k, k - 1] += rhobeg
        else:
            pts[k, k - n - 1] -= rhobeg
    return InterpolationSet(pts)


def trust_region_step(model: QuadraticModel, center, radius: float) -> np.ndarray:
    """Approximate minimizer step of the model within the trust region.

    Truncated conjugate gradients: follows CG while the model stays convex
    along the path and the iterates stay interior, stopping on the boundary
    when either fails.  A zero gradient returns the zero step.
    """
    if not radius > 0:
        raise ValueError("trust-region radius must be positive")
    center = _as_point(center, model.n)
    g = model.gradient_at(center)
    n = g.size
    d = np.zeros(n)
    gnorm = float(np.linalg.norm(g))
    if gnorm == 0.0:
        return d
    r = -g
    p = r.copy()
    rr = float(r @ r)
    for _ in range(n):
        hp = model.hess @ p
        curv = float(p @ hp)
        if curv <= 0.0:
            return d + _boundary_step(d, p, radius) * p
        alpha = rr / curv
        d_next = d + alpha * p
        if float(np.linalg.norm(d_next)) >= radius:
            return d + _boundary_step(d, p, radius) * p
        d = d_next
        r = r - alpha * hp
        rr_next = float(r @ r)
        if math.sqrt(rr_next) <= 1e-14 * max(1.0, gnorm):
            break
        p = r + (rr_next / rr) * p
        rr = rr_next
    return d


def _boundary_step(d: np.ndarray, p: np.ndarray, radius: float) -> float:
    """Positive root of ``||d + tau p|| = radius``."""
    pp = float(p @ p)
    dp = float(d @ p)
    dd = float(d @ d)
    disc = max(dp * dp + pp * (radius * radius - dd), 0.0)
    return (-dp + math.sqrt(disc)) / pp


def select_replacement_point(
    s: InterpolationSet,
    x0,
    sigma: float,
    new_point,
    tr_center,
    tr_radius: float,
) -> int:
    """Index of the point to drop in favor of ``new_point``.

    Maximizes ``|l_j(new)| * max(1, ||y_j - center||^4 / radius^4)``, biasing
    toward far points, never dropping the incumbent best; the winner is
    verified to keep the interpolation system solvable, falling back to the
    farthest point and then the remaining candidates.
    """
    new_point = _as_point(new_point, s.n)
    tr_center = _as_point(tr_center, s.n)
    if s.values is None:
        raise ValueError("replacement selection needs stored values")
    best_idx = int(np.argmin(s.values))

    dist_new = np.linalg.norm(s.points - new_point, axis=1)
    nearest = int(np.argmin(dist_new))
    scale = 1.0 + float(np.max(np.linalg.norm(s.points, axis=1)))
    if dist_new[nearest] <= 1e-10 * scale:
        return nearest

    try:
        lvals = lagrange_values(s, x0, sigma, new_point)
    except NotPoisedError as exc:
        raise GeometryFailureError(f"current set already degenerate: {exc}") from None
    dists = np.linalg.norm(s.points - tr_center, axis=1)
    weights = np.maximum(1.0, (dists / tr_radius) ** 4)
    crit = np.abs(lvals) * weights
    crit[best_idx] = -np.inf

    order = list(np.argsort(-crit, kind="stable"))
    farthest = int(np.argmax(np.where(np.arange(s.m1) == best_idx, -np.inf, dists)))
    if farthest in order:
        order.remove(farthest)
        order.insert(1, farthest)
    for idx in order:
        idx = int(idx)
        if idx == best_idx:
            continue
        candidate = s.points.copy()
        candidate[idx] = new_point
        if system_is_solvable(candidate, x0, sigma, rcond_floor=_RCOND_VET):
            return idx
    raise GeometryFailureError("every replacement leaves the system singular")


def geometry_step_point(
    s: InterpolationSet,
    x0,
    sigma: float,
    worst_index: int,
    tr_center,
    tr_radius: float,
) -> np.ndarray:
    """Point at trust-region distance that re-anchors one Lagrange function.

    Moves from the center along the gradient of the Lagrange function of
    the point being replaced, choosing the sign with the larger function
    magnitude (a simple model-improvement move; zero gradient falls back to
    the first coordinate axis).
    """
    tr_center = _as_point(tr_center, s.n)
    l_worst = lagrange_functions(s, x0, sigma)[worst_index]
    grad = l_worst.gradient_at(tr_center)
    gnorm = float(np.linalg.norm(grad))
    if gnorm > 0.0:
        direction = grad / gnorm
    else:
        direction = np.zeros(s.n)
        direction[0] = 1.0
    plus = tr_center + tr_radius * direction
    minus = tr_center - tr_radius * direction
    if abs(l_worst.evaluate(plus)) >= abs(l_worst.evaluate(minus)):
        return plus
    return minus


class _Budget:
    """Objective wrapper: counts calls, tracks the best, records history."""

    def __init__(self, objective, maxfun: int):
        self.objective = objective
        self.maxfun = maxfun
        self.nf = 0
        self.best_value = math.inf
        self.best_point = None
        self.history: list[tuple[int, float]] = []

    @property
    def exhausted(self) -> bool:
        return self.nf >= self.maxfun

    def __call__(self, x: np.ndarray) -> float:
        value = float(self.objective(x.copy()))
        self.nf += 1
        if not math.isfinite(value):
            raise _NonFiniteValue(x, value)
        if value < self.best_value:
            self.best_value = value
            self.best_point = x.copy()
        self.history.append((self.nf, self.best_value))
        return value


class _NonFiniteValue(Exception):
    def __init__(self, x, value):
        super().__init__(f"objective returned {value} at {x}")


def minimize(objective, xhat, config: SolverConfig | None = None, callback=None) -> SolverReport:
    """Minimize ``objective`` from ``xhat`` under ``config``.

    Deterministic: identical inputs give identical reports.  ``callback``,
    when given, is invoked after every model update with a dict of the
    internal state (used by tests and diagnostics).
    """
    if config is None:
        config = SolverConfig()
    x = _as_point(xhat)
    n = x.size
    config.validate(n)
    npt = config.resolve_npt(n)
    rule = config.sigma_rule

    budget = _Budget(objective, config.maxfun)
    try:
        return _run(budget, x, n, npt, rule, config, callback)
    except _NonFiniteValue as exc:
        return _report(budget, STATUS_ERROR, str(exc))
    except (GeometryFailureError, NotPoisedError, InconsistentDataError) as exc:
        return _report(budget, STATUS_ERROR, f"{type(exc).__name__}: {exc}")


def _report(budget: _Budget, status: str, message: str = "") -> SolverReport:
    return SolverReport(
        best_point=None if budget.best_point is None else budget.best_point.copy(),
        best_value=budget.best_value,
        nf=budget.nf,
        status=status,
        history=list(budget.history),
        message=message,
    )


def _run(budget, x, n, npt, rule, config, callback) -> SolverReport:
    stencil = initial_point_set(x, config.rhobeg, npt)
    points = stencil.points
    values = np.array([budget(points[k]) for k in range(npt)])
    s = InterpolationSet(points, values)

    center_idx = int(np.argmin(values))
    center = s.points[center_idx].copy()
    f_center = float(values[center_idx])

    rho = config.rhobeg
    delta = config.rhobeg
    ctx = UpdateContext(center, delta, s, zero_model(n, center), new_index=None)
    model = least_change_update(ctx, rule, s.values)

    stall_limit = 5 * n
    stall_count = 0

    while True:
        if callback is not None:
            callback(
                {
                    "model": model,
                    "set": s,
                    "center": center.copy(),
                    "delta": delta,
                    "rho": rho,
                    "nf": budget.nf,
                }
            )
        step = trust_region_step(model, center, delta)
        step_norm = float(np.linalg.norm(step))
        best_before = budget.best_value

        if step_norm >= 0.5 * rho:
            if budget.exhausted:
                return _report(budget, STATUS_MAXFUN)
            x_new = center + step
            f_new = budget(x_new)
            predicted = model.evaluate(center) - model.evaluate(x_new)
            if predicted > 0.0:
                ratio = (f_center - f_new) / predicted
            else:
                ratio = -math.inf
            success = ratio > 0.0

            if ratio <= _RATIO_SHRINK:
                delta = 0.5 * delta
            elif ratio > _RATIO_EXPAND:
                delta = max(delta, 2.0 * step_norm)
            delta = max(delta, rho)

            x0_sel, sigma_sel = resolve_sigma(
                UpdateContext(center, delta, s, model, new_index=None), rule
            )
            try:
                j = select_replacement_point(s, x0_sel, sigma_sel, x_new, center, delta)
            except GeometryFailureError:
                # No swap keeps the system solvable.  A successful trial this
                # close to the incumbent refreshes the center in place; a
                # failed one is dropped and the evaluation spent on repair.
                j = center_idx if success else None
            if j is None:
                if budget.exhausted:
                    return _report(budget, STATUS_MAXFUN)
                s, model, center, center_idx, f_center = _repair_geometry(
                    budget, s, model, center, center_idx, f_center, delta, rule
                )
            else:
                s = s.replaced(j, x_new, f_new)
                if success and f_new < f_center:
                    center = x_new.copy()
                    center_idx = j
                    f_center = f_new
                ctx = UpdateContext(center, delta, s, model, new_index=j)
                model = least_change_update(ctx, rule, s.values)

            if not success and delta <= rho * (1.0 + 1e-12) and _geometry_good(s, center, delta):
                if rho <= config.rhoend * (1.0 + 1e-12):
                    return _report(budget, STATUS_CONVERGED)
                rho = max(rho / _RHO_DIV, config.rhoend)
                delta = max(0.5 * delta, rho)
        else:
            if not _geometry_good(s, center, delta):
                if budget.exhausted:
                    return _report(budget, STATUS_MAXFUN)
                s, model, center, center_idx, f_center = _repair_geometry(
                    budget, s, model, center, center_idx, f_center, delta, rule
                )
            else:
                if rho <= config.rhoend * (1.0 + 1e-12):
                    return _report(budget, STATUS_CONVERGED)
                rho = max(rho / _RHO_DIV, config.rhoend)
                delta = max(0.5 * delta, rho)

        if rho <= config.rhoend * (1.0 + 1e-12):
            stall_count = 0 if budget.best_value < best_before else stall_count + 1
            if stall_count >= stall_limit:
                return _report(budget, STATUS_STALLED)


def _geometry_good(s: InterpolationSet, center, delta: float, model, rule) -> bool:
    """Points close enough to the center and a comfortably solvable system."""
    dists = np.linalg.norm(s.points - center, axis=1)
    if float(np.max(dists)) > _GEOMETRY_FACTOR * delta:
        return False
    x0_sel, sigma_sel = resolve_sigma(
        UpdateContext(center, delta, s, model, new_index=None), rule
    )
    return system_is_solvable(s.points, x0_sel, sigma_sel, rcond_floor=_RCOND_VET)


def _repair_geometry(budget, s, model, center, center_idx, f_center, delta, rule):
    """Spend one evaluation moving the farthest point to a model-improving spot.

    Candidates are tried in order (Lagrange-gradient point, then steps
    along the least-covered directions of the current spread) and the swap
    is vetted for solvability before the evaluation is spent.
    """
    dists = np.linalg.norm(s.points - center, axis=1)
    dists[center_idx] = -math.inf
    worst = int(np.argmax(dists))
    x0_sel, sigma_sel = resolve_sigma(
        UpdateContext(center, delta, s, model, new_index=None), rule
    )
    candidates = []
    try:
        candidates.append(geometry_step_point(s, x0_sel, sigma_sel, worst, center, delta))
    except NotPoisedError:
        pass
    _, _, vt = np.linalg.svd(s.points - center, full_matrices=True)
    for v in vt[::-1]:
        candidates.append(center + delta * v)
        candidates.append(center - delta * v)
    p = candidates[0]
    for cand in candidates:
        trial_pts = s.points.copy()
        trial_pts[worst] = cand
        if system_is_solvable(trial_pts, x0_sel, sigma_sel, rcond_floor=_RCOND_VET):
            p = cand
            break
    f_p = budget(p)
    s = s.replaced(worst, p, f_p)
    if f_p < f_center:
        center = np.asarray(p, dtype=float).copy()
        center_idx = worst
        f_center = f_p
    ctx = UpdateContext(center, delta, s, model, new_index=worst)
    model = least_change_update(ctx, rule, s.values)
    return s, model, center, center_idx, f_center


def sigma_rule_for(name: str, m_factor: float = 10.0) -> SigmaRule:
    """Solver identifiers: geometric / eta-xi surrogate / plain fixed-zero."""
    if name == "esymbs":
        return SigmaRule(kind="geometric", M=m_factor)
    if name == "esymbp":
        return SigmaRule(kind="eta_xi", M=m_factor)
    if name == "symb":
        return SigmaRule(kind="fixed", M=m_factor, fixed_value=0.0)
    raise KeyError(name)


SOLVER_NAMES = ("symb", "esymbs", "esymbp")

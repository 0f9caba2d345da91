"""Benchmark harness: permutation-replicated runs, statistics, profiles.

Each (problem, dimension) pair is replicated under N random variable
permutations; every solver faces the identical permuted instances, whose
seeds derive only from the base seed and the instance key.  The cost of a
solver on an instance family is the number of objective evaluations #F; its
mean and relative standard deviation over the replicas measure average cost
and stability under rounding.  Performance profiles compare solvers by the
fraction of instance families on which their cost stays within a factor tau
of the best (Dolan & More, 2002).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .problems import get_problem, permute_problem, random_permutation
from .solver import SolverConfig, minimize, sigma_rule_for

STATUSES = ("converged", "maxfun", "stalled", "error")

CSV_HEADER = "solver,problem,n,perm,seed,rhoend,nf,fbest,status"
PROFILE_HEADER = "solver,tau,rho"

COST_EPS = 1e-12

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class RunRecord:
    solver: str
    problem: str
    n: int
    perm_index: int
    seed: int
    nf: int
    fbest: float
    status: str
    rhoend: float


@dataclass(frozen=True)
class StatSummary:
    mean: float
    std: float
    rstd: float
    count: int


@dataclass(frozen=True)
class ProfileCurve:
    """Right-continuous step function tau -> fraction of instances solved
    within cost factor tau of the best solver."""

    solver: str
    breakpoints: tuple

    def value_at(self, tau: float) -> float:
        out = 0.0
        for t, frac in self.breakpoints:
            if t <= tau:
                out = frac
            else:
                break
        return out


def permutation_seed(base_seed: int, problem: str, dim: int, perm_index: int) -> int:
    """Deterministic permutation seed from the instance key only.

    FNV-1a of ``"problem:dim:perm_index"`` xored with the base seed; does
    not involve the solver, so all solvers face identical instances.
    """
    h = _FNV_OFFSET
    for byte in f"{problem}:{dim}:{perm_index}".encode():
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return (h ^ int(base_seed)) & _MASK64


def run_suite(
    solvers,
    problems,
    dims,
    n_perms: int,
    base_seed: int,
    config: SolverConfig,
    m_factor: float = 10.0,
) -> list[RunRecord]:
    """One record per (solver, problem, dim, permutation), in that key order.

    Individual run failures become status="error" records; the suite never
    aborts.  Output is deterministic for a fixed base seed.
    """
    if n_perms < 1:
        raise ValueError("need at least one permutation")
    records = []
    for solver in solvers:
        rule = sigma_rule_for(solver, m_factor)
        for problem in problems:
            for dim in dims:
                prob = get_problem(problem, dim)
                for k in range(n_perms):
                    seed = permutation_seed(base_seed, prob.name, dim, k)
                    perm = random_permutation(dim, seed)
                    inst = permute_problem(prob, perm)
                    cfg = SolverConfig(
                        rhobeg=config.rhobeg,
                        rhoend=config.rhoend,
                        maxfun=config.maxfun,
                        npt=config.npt,
                        sigma_rule=rule,
                        seed=config.seed,
                    )
                    try:
                        rep = minimize(inst.objective, inst.start, cfg)
                        nf, fbest, status = rep.nf, rep.best_value, rep.status
                    except Exception:
                        nf, fbest, status = 1, math.inf, "error"
                    records.append(
                        RunRecord(
                            solver=solver,
                            problem=prob.name,
                            n=dim,
                            perm_index=k,
                            seed=seed,
                            nf=max(int(nf), 1),
                            fbest=float(fbest),
                            status=status,
                            rhoend=config.rhoend,
                        )
                    )
    return records


def summarize(values) -> StatSummary:
    """Population mean/std of evaluation counts plus their ratio."""
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("cannot summarize an empty list")
    count = len(vals)
    mean = sum(vals) / count
    var = sum((v - mean) ** 2 for v in vals) / count
    std = math.sqrt(var)
    rstd = std / mean if mean > 0 else 0.0
    return StatSummary(mean=mean, std=std, rstd=rstd, count=count)


def run_is_solved(record: RunRecord, known_fmin: float | None) -> bool:
    """Whether a run counts as solved for profile purposes.

    With a known optimum: terminated cleanly (converged or stalled) within
    an absolute/relative band of it; otherwise clean convergence alone.
    """
    if known_fmin is not None:
        if record.status not in ("converged", "stalled"):
            return False
        return record.fbest <= known_fmin + max(1e-6, 1e-4 * abs(known_fmin))
    return record.status == "converged"


def performance_profile(costs, solvers=None) -> list[ProfileCurve]:
    """Profile curves from a (problems x solvers) cost matrix.

    Failures are marked by non-finite entries and receive an infinite
    ratio; rows where every solver failed are kept.  Costs are clamped
    below at 1e-12 so exact ties (e.g. zero spread) count for every tied
    solver.
    """
    costs = np.asarray(costs, dtype=float)
    if costs.ndim != 2 or costs.size == 0:
        raise ValueError("cost matrix must be 2-D and nonempty")
    n_prob, n_sol = costs.shape
    if solvers is None:
        solvers = [f"s{i}" for i in range(n_sol)]
    if len(solvers) != n_sol:
        raise ValueError("solver name count does not match matrix")

    work = np.where(np.isfinite(costs), np.maximum(costs, COST_EPS), np.inf)
    best = np.min(work, axis=1)
    ratios = np.full_like(work, np.inf)
    solvable = np.isfinite(best)
    ratios[solvable] = work[solvable] / best[solvable, None]

    curves = []
    for j, name in enumerate(solvers):
        finite = np.sort(ratios[np.isfinite(ratios[:, j]), j])
        pts = []
        frac = 0.0
        # Right-continuous steps at 1 and at every distinct finite ratio.
        taus = sorted(set([1.0]) | set(finite.tolist()))
        for tau in taus:
            frac = float(np.sum(finite <= tau)) / n_prob
            pts.append((float(tau), frac))
        curves.append(ProfileCurve(solver=str(name), breakpoints=tuple(pts)))
    return curves


def profile_from_records(records, metric: str):
    """Aggregate records into a cost matrix and profile curves.

    Rows are (problem, n, rhoend) instance families, columns solvers; the
    cell cost is the mean or rstd of #F over the family's permutations.  A
    cell fails when any of its runs is unsolved.  Returns
    ``(curves, row_keys, solvers)``.
    """
    if metric not in ("mean", "rstd"):
        raise ValueError("metric must be 'mean' or 'rstd'")
    solvers = sorted({r.solver for r in records})
    row_keys = sorted({(r.problem, r.n, r.rhoend) for r in records})
    fmin_cache = {}
    groups = {}
    for r in records:
        groups.setdefault(((r.problem, r.n, r.rhoend), r.solver), []).append(r)

    costs = np.full((len(row_keys), len(solvers)), np.inf)
    for i, key in enumerate(row_keys):
        problem, dim, _ = key
        if problem not in fmin_cache:
            fmin_cache[problem] = get_problem(problem, dim).known_fmin
        fmin = fmin_cache[problem]
        for j, solver in enumerate(solvers):
            runs = groups.get((key, solver))
            if not runs:
                continue
            if all(run_is_solved(r, fmin) for r in runs):
                stats = summarize([r.nf for r in runs])
                costs[i, j] = stats.mean if metric == "mean" else stats.rstd
    return performance_profile(costs, solvers), row_keys, solvers


# --- persistence --------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def records_to_csv(records) -> str:
    """Serialize records; floats keep 17 significant digits (lossless)."""
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            f"{r.solver},{r.problem},{r.n},{r.perm_index},{r.seed},"
            f"{_fmt(r.rhoend)},{r.nf},{_fmt(r.fbest)},{r.status}"
        )
    return "\n".join(lines) + "\n"


def records_from_csv(text: str) -> list[RunRecord]:
    """Inverse of :func:`records_to_csv`; malformed rows name their line."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ValueError(f"bad or missing header; expected {CSV_HEADER!r}")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 9:
            raise ValueError(f"line {lineno}: expected 9 fields, got {len(parts)}")
        try:
            records.append(
                RunRecord(
                    solver=parts[0],
                    problem=parts[1],
                    n=int(parts[2]),
                    perm_index=int(parts[3]),
                    seed=int(parts[4]),
                    rhoend=float(parts[5]),
                    nf=int(parts[6]),
                    fbest=float(parts[7]),
                    status=parts[8],
                )
            )
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return records


def profile_to_csv(curves) -> str:
    lines = [PROFILE_HEADER]
    for curve in curves:
        for tau, frac in curve.breakpoints:
            lines.append(f"{curve.solver},{_fmt(tau)},{_fmt(frac)}")
    return "\n".join(lines) + "\n"


_SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def profile_svg(curves, width: int = 640, height: int = 420) -> str:
    """Minimal standalone SVG rendering of profile step curves."""
    tau_max = 1.0
    for curve in curves:
        if curve.breakpoints:
            tau_max = max(tau_max, curve.breakpoints[-1][0])
    tau_max = max(tau_max, 1.0 + 1e-9)
    left, right, top, bottom = 60, 20, 20, 50
    pw = width - left - right
    ph = height - top - bottom

    def sx(tau):
        return left + pw * (tau - 1.0) / (tau_max - 1.0)

    def sy(frac):
        return top + ph * (1.0 - frac)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle" '
        f'font-size="13">tau</text>',
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">fraction within tau of best</text>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = sy(frac)
        parts.append(
            f'<text x="{left - 8}" y="{y + 4:.1f}" text-anchor="end" font-size="11">{frac:g}</text>'
        )
    for k, tau in enumerate(np.linspace(1.0, tau_max, 5)):
        x = sx(tau)
        parts.append(
            f'<text x="{x:.1f}" y="{top + ph + 16}" text-anchor="middle" '
            f'font-size="11">{tau:.3g}</text>'
        )
    for idx, curve in enumerate(curves):
        color = _SVG_COLORS[idx % len(_SVG_COLORS)]
        path = []
        prev_frac = 0.0
        for tau, frac in curve.breakpoints:
            path.append((tau, prev_frac))
            path.append((tau, frac))
            prev_frac = frac
        path.append((tau_max, prev_frac))
        coords = " ".join(f"{sx(t):.2f},{sy(f):.2f}" for t, f in path)
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.8"/>'
        )
        parts.append(
            f'<text x="{left + pw - 6}" y="{top + 16 + 16 * idx}" text-anchor="end" '
            f'font-size="12" fill="{color}">{curve.solver}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

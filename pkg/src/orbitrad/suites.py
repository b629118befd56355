"""Randomized verification suites and the commutant-rigidity witness.

Each suite draws seeded instances, evaluates both sides of an orbit-radius
statement, and records one row per trial.  No suite ever compares two
heuristic optima at face value: verdicts rest on an oracle (the n=2 grid),
a rigorous bound, or an explicit slack, and apparent optimizer-side
violations are re-run at 8x the multistart budget before they are recorded
as failures, since both sides are lower bounds and asymmetric
under-optimization would otherwise fabricate counterexamples.

All randomness flows from the suite seed through per-trial derived seeds,
so a failing row reproduces standalone from its recorded seed.  CSV
summaries contain no timing data and are byte-identical across reruns.
"""

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Optional

import numpy as np

from .aluthge import aluthge
from .core import (
    Polynomial,
    as_operator,
    check_same_dim,
    derive_seed,
    frobenius,
    ginibre,
    haar_unitary,
    normalized_trace,
    poly_apply,
    polar_decompose,
    fractional_power,
    singular_values,
)
from .hull import FwBudget, Verdict, fw_project
from .matio import matrix_to_dict
from .optimize import OptimizerConfig, grid_oracle_2x2, maximize_modulus, riemannian_ascent
from .radius import c_numerical_radius

LAMBDA_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
GRID_K = 60
GRID_SLACK = 3e-2
OPT_SLACK = 1e-6
ESCALATION_FACTOR = 8

_SUITE_TAGS = {"t51": 51, "p52": 52, "p53": 53, "c41": 41}

SUITE_NAMES = tuple(_SUITE_TAGS)


@dataclass
class Report:
    """Outcome of one suite run; passes + len(failures) == trials."""

    suite: str
    seed: int
    trials: int
    passes: int
    failures: list
    config: dict
    wall_time: float
    rows: list
    counters: dict


def thread_workers() -> int:
    """Worker cap from ORBITRAD_THREADS (unset/1 = serial, 0 = auto)."""
    raw = os.environ.get("ORBITRAD_THREADS", "").strip()
    if not raw:
        return 1
    try:
        v = int(raw)
    except ValueError:
        return 1
    if v == 0:
        return os.cpu_count() or 1
    return max(1, v)


def _run_indexed(fn, count: int) -> list:
    """Evaluate fn(0..count-1), possibly in parallel, reduced in index order."""
    workers = thread_workers()
    if workers <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


# ---------------------------------------------------------------------------
# instance sampling
# ---------------------------------------------------------------------------

def sample_invertible(rng: np.random.Generator, n: int, rel_floor: float = 0.05) -> np.ndarray:
    """Ginibre sample with a relative smallest-singular-value floor.

    A deficient draw is first shifted by (1 + deficit) * I, then resampled.
    """
    for _ in range(64):
        g = ginibre(rng, n)
        s = singular_values(g)
        if s[-1] >= rel_floor * s[0]:
            return g
        shifted = g + (1.0 + rel_floor * s[0] - s[-1]) * np.eye(n)
        s2 = singular_values(shifted)
        if s2[-1] >= rel_floor * s2[0]:
            return shifted
    raise RuntimeError("could not sample a well-conditioned invertible matrix")


def sample_disc_poly(rng: np.random.Generator, max_degree: int = 3) -> Polynomial:
    """Random polynomial, degree <= max_degree, coefficients in the unit disc."""
    deg = int(rng.integers(0, max_degree + 1))
    coeffs = []
    for _ in range(deg + 1):
        radius = np.sqrt(rng.uniform())
        angle = rng.uniform(0.0, 2.0 * np.pi)
        coeffs.append(radius * np.exp(1j * angle))
    return Polynomial(coeffs)


def _trial_shape(i: int, n_range) -> tuple[int, float]:
    n = n_range[i % len(n_range)]
    lam = LAMBDA_GRID[(i // len(n_range)) % len(LAMBDA_GRID)]
    return n, lam


# ---------------------------------------------------------------------------
# inequality suites
# ---------------------------------------------------------------------------

def _inequality_trial(suite, i, n, lam, c, lhs_op, rhs_op, cfg, trial_seed, artifacts):
    opt_cfg = replace(cfg, seed=derive_seed(trial_seed, 1))
    lhs_opt = maximize_modulus(c, lhs_op, opt_cfg).value
    rhs_opt = maximize_modulus(c, rhs_op, opt_cfg).value
    escalated = False
    if lhs_opt > rhs_opt + OPT_SLACK:
        big = opt_cfg.scaled(ESCALATION_FACTOR)
        lhs_opt = maximize_modulus(c, lhs_op, big).value
        rhs_opt = maximize_modulus(c, rhs_op, big).value
        escalated = True
    ok = lhs_opt <= rhs_opt + OPT_SLACK
    lhs, rhs, slack = lhs_opt, rhs_opt, OPT_SLACK
    if n == 2:
        lhs_grid = grid_oracle_2x2(c, lhs_op, GRID_K)
        rhs_grid = grid_oracle_2x2(c, rhs_op, GRID_K)
        ok = ok and (lhs_grid <= rhs_grid + GRID_SLACK)
        lhs, rhs, slack = lhs_grid, rhs_grid, GRID_SLACK
    row = {
        "suite": suite,
        "trial": i,
        "n": n,
        "lambda": lam,
        "lhs": lhs,
        "rhs": rhs,
        "margin": rhs - lhs,
        "verdict": "pass" if ok else "fail",
    }
    failure = None
    if not ok:
        failure = {
            "trial": i,
            "n": n,
            "lambda": lam,
            "margin": rhs - lhs,
            "slack": slack,
            "seed": trial_seed,
            "escalated": escalated,
            "artifacts": artifacts,
        }
    return row, failure


def _t51_trial(i: int, n_range, cfg: OptimizerConfig):
    trial_seed = derive_seed(cfg.seed, _SUITE_TAGS["t51"], i)
    rng = np.random.default_rng(trial_seed)
    n, lam = _trial_shape(i, n_range)
    t = sample_invertible(rng, n)
    g = sample_disc_poly(rng)
    b = poly_apply(g, t)  # polynomial in T, so B commutes with T exactly
    c = ginibre(rng, n)
    u, p = polar_decompose(t)
    lhs_op = fractional_power(p, lam) @ b @ u @ fractional_power(p, 1.0 - lam)
    rhs_op = b @ t
    artifacts = {
        "T": matrix_to_dict(t),
        "C": matrix_to_dict(c),
        "poly_re": [z.real for z in g.coeffs],
        "poly_im": [z.imag for z in g.coeffs],
    }
    return _inequality_trial("t51", i, n, lam, c, lhs_op, rhs_op, cfg, trial_seed, artifacts)


def _p52_trial(i: int, n_range, cfg: OptimizerConfig):
    trial_seed = derive_seed(cfg.seed, _SUITE_TAGS["p52"], i)
    rng = np.random.default_rng(trial_seed)
    n, lam = _trial_shape(i, n_range)
    t = sample_invertible(rng, n)
    f = sample_disc_poly(rng)
    c = ginibre(rng, n)
    lhs_op = poly_apply(f, aluthge(t, lam).transformed)
    rhs_op = poly_apply(f, t)
    artifacts = {
        "T": matrix_to_dict(t),
        "C": matrix_to_dict(c),
        "poly_re": [z.real for z in f.coeffs],
        "poly_im": [z.imag for z in f.coeffs],
    }
    return _inequality_trial("p52", i, n, lam, c, lhs_op, rhs_op, cfg, trial_seed, artifacts)


def _assemble(suite, cfg_dict, seed, results, t_start, counters=None) -> Report:
    rows = [r for r, _ in results]
    failures = [f for _, f in results if f is not None]
    report = Report(
        suite=suite,
        seed=seed,
        trials=len(results),
        passes=len(results) - len(failures),
        failures=failures,
        config=cfg_dict,
        wall_time=time.perf_counter() - t_start,
        rows=rows,
        counters=counters or {},
    )
    assert report.passes + len(report.failures) == report.trials
    return report


def suite_theorem51(trials: int, n_range, cfg: Optional[OptimizerConfig] = None) -> Report:
    """Orbit-radius inequality for |T|^lam B U |T|^(1-lam) against B T,
    with B a polynomial in T."""
    cfg = cfg or OptimizerConfig()
    n_range = tuple(n_range)
    t0 = time.perf_counter()
    results = _run_indexed(lambda i: _t51_trial(i, n_range, cfg), trials)
    return _assemble("t51", {**asdict(cfg), "n_range": list(n_range)}, cfg.seed, results, t0)


def suite_prop52(trials: int, n_range, cfg: Optional[OptimizerConfig] = None) -> Report:
    """Orbit-radius inequality for f of the transform against f of T."""
    cfg = cfg or OptimizerConfig()
    n_range = tuple(n_range)
    t0 = time.perf_counter()
    results = _run_indexed(lambda i: _p52_trial(i, n_range, cfg), trials)
    return _assemble("p52", {**asdict(cfg), "n_range": list(n_range)}, cfg.seed, results, t0)


# ---------------------------------------------------------------------------
# membership suite
# ---------------------------------------------------------------------------

def _p53_trial(i: int, n_range, budget: FwBudget, seed: int):
    trial_seed = derive_seed(seed, _SUITE_TAGS["p53"], i)
    rng = np.random.default_rng(trial_seed)
    n, lam = _trial_shape(i, n_range)
    t = sample_invertible(rng, n)
    f = sample_disc_poly(rng)
    a = poly_apply(f, aluthge(t, lam).transformed)
    b = poly_apply(f, t)
    fw_budget = replace(
        budget, lmo_cfg=replace(budget.lmo_cfg, seed=derive_seed(trial_seed, 2))
    )
    out = fw_project(a, b, fw_budget)
    row = {
        "suite": "p53",
        "trial": i,
        "n": n,
        "lambda": lam,
        "lhs": out.final_distance,
        "rhs": budget.member_tol,
        "margin": budget.member_tol - out.final_distance,
        "verdict": out.verdict.value,
    }
    failure = None
    if out.verdict == Verdict.SEPARATED:
        failure = {
            "trial": i,
            "n": n,
            "lambda": lam,
            "margin": out.separation_margin,
            "seed": trial_seed,
            "artifacts": {
                "T": matrix_to_dict(t),
                "poly_re": [z.real for z in f.coeffs],
                "poly_im": [z.imag for z in f.coeffs],
            },
        }
    return row, failure


def suite_prop53(trials: int, n_range, budget: Optional[FwBudget] = None, seed: int = 0) -> Report:
    """Membership of f(transform) in the orbit hull of f(T).

    Separated contradicts the statement and is a hard failure; Undecided is
    recorded as inconclusive, not a failure.
    """
    budget = budget or FwBudget()
    n_range = tuple(n_range)
    t0 = time.perf_counter()
    results = _run_indexed(lambda i: _p53_trial(i, n_range, budget, seed), trials)
    members = sum(1 for r, _ in results if r["verdict"] == Verdict.MEMBER.value)
    undecided = sum(1 for r, _ in results if r["verdict"] == Verdict.UNDECIDED.value)
    cfg_dict = {
        "max_fw_iters": budget.max_fw_iters,
        "member_tol": budget.member_tol,
        "lmo": asdict(budget.lmo_cfg),
        "n_range": list(n_range),
        "seed": seed,
    }
    return _assemble(
        "p53", cfg_dict, seed, results, t0,
        counters={"members": members, "undecided": undecided},
    )


# ---------------------------------------------------------------------------
# norm-admissibility suite
# ---------------------------------------------------------------------------

_C41_DIMS = (2, 3)


def _c41_trial(i: int, cfg: OptimizerConfig):
    trial_seed = derive_seed(cfg.seed, _SUITE_TAGS["c41"], i)
    rng = np.random.default_rng(trial_seed)
    n = _C41_DIMS[i % len(_C41_DIMS)]
    kind = (i // len(_C41_DIMS)) % 3
    opt_cfg = replace(cfg, seed=derive_seed(trial_seed, 1))
    eye = np.eye(n, dtype=np.complex128)

    if kind == 0:  # scalar C: radius collapses to |scale| * |tau(A)| exactly
        scale = (0.25 + 1.5 * rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        a = ginibre(rng, n)
        val = c_numerical_radius(scale * eye, a, opt_cfg).value
        ref = abs(scale) * abs(normalized_trace(a))
        ok = abs(val - ref) <= 1e-9
        label = "scalar"
    elif kind == 1:  # traceless C: radius vanishes at the identity
        c = ginibre(rng, n)
        c = c - normalized_trace(c) * eye
        val = c_numerical_radius(c, eye, opt_cfg).value
        ref = 0.0
        ok = val <= 1e-10
        label = "traceless"
    else:  # admissible C: positivity, with |tau(C A)| as the rigorous floor
        c = ginibre(rng, n)
        if abs(normalized_trace(c)) <= 1e-10:
            c = c + eye / n
        a = ginibre(rng, n)
        val = c_numerical_radius(c, a, opt_cfg).value
        ref = abs(normalized_trace(c @ a))
        ok = (val >= ref) and (val > 1e-8)
        label = "admissible"

    row = {
        "suite": "c41",
        "trial": i,
        "n": n,
        "lambda": None,
        "lhs": val,
        "rhs": ref,
        "margin": val - ref,
        "verdict": "pass" if ok else "fail",
    }
    failure = None
    if not ok:
        failure = {
            "trial": i,
            "n": n,
            "kind": label,
            "margin": val - ref,
            "seed": trial_seed,
            "artifacts": {},
        }
    return row, failure


def suite_corollary41(trials: int, cfg: Optional[OptimizerConfig] = None) -> Report:
    """Degenerate directions of norm admissibility plus sampled positivity.

    Cycles scalar-C, traceless-C, and admissible-C checks over n in {2, 3}.
    """
    cfg = cfg or OptimizerConfig()
    t0 = time.perf_counter()
    results = _run_indexed(lambda i: _c41_trial(i, cfg), trials)
    return _assemble("c41", asdict(cfg), cfg.seed, results, t0)


# ---------------------------------------------------------------------------
# commutant-rigidity witness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessResult:
    u: np.ndarray
    commutator_norm: float


def commutant_witness(
    a: np.ndarray, b: np.ndarray, cfg: Optional[OptimizerConfig] = None
) -> WitnessResult:
    """Search for U making [U A U*, B] large.

    Ascends h(U) = ||[U A U*, B]||_F^2 with the same retraction/backtracking
    machinery as the radius optimizer; the gradient direction is the skew
    part of -[M, [B, W*]] with M = U A U* and W the commutator.  When both A
    and B are genuinely non-scalar a positive commutator is always found;
    for scalar A or B the functional is identically ~0.
    """
    a, b = as_operator(a), as_operator(b)
    n = check_same_dim(a, b)
    if cfg is None:
        cfg = OptimizerConfig(starts=8, max_iters=200)

    def value_grad(u):
        m = u @ a @ u.conj().T
        w = m @ b - b @ m
        h = float(np.vdot(w, w).real)
        wc = w.conj().T
        inner = b @ wc - wc @ b
        gmat = m @ inner - inner @ m
        return h, gmat.conj().T - gmat

    starts = [np.eye(n, dtype=np.complex128)]
    starts.extend(haar_unitary(n, derive_seed(cfg.seed, k)) for k in range(cfg.starts))
    best_h, best_u = -1.0, starts[0]
    for u0 in starts:
        u, h, _, _ = riemannian_ascent(value_grad, u0, cfg)
        if h > best_h:
            best_h, best_u = h, u
    return WitnessResult(u=best_u, commutator_norm=float(np.sqrt(max(best_h, 0.0))))


# ---------------------------------------------------------------------------
# dispatch and serialization
# ---------------------------------------------------------------------------

def run_suite(
    name: str,
    trials: int,
    n_range,
    seed: int,
    cfg: Optional[OptimizerConfig] = None,
    budget: Optional[FwBudget] = None,
) -> Report:
    if name not in _SUITE_TAGS:
        raise ValueError(f"unknown suite '{name}' (expected one of {SUITE_NAMES})")
    if name == "t51":
        return suite_theorem51(trials, n_range, cfg or OptimizerConfig(seed=seed))
    if name == "p52":
        return suite_prop52(trials, n_range, cfg or OptimizerConfig(seed=seed))
    if name == "p53":
        return suite_prop53(trials, n_range, budget, seed=seed)
    return suite_corollary41(trials, cfg or OptimizerConfig(seed=seed))


CSV_HEADER = "suite,trial,n,lambda,lhs,rhs,margin,verdict"


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def reports_to_csv(reports) -> str:
    """One row per trial; floats at 17 significant digits, no timing data."""
    lines = [CSV_HEADER]
    for rep in reports:
        for row in rep.rows:
            lines.append(
                ",".join(
                    [
                        row["suite"],
                        str(row["trial"]),
                        str(row["n"]),
                        _fmt(row["lambda"]),
                        _fmt(row["lhs"]),
                        _fmt(row["rhs"]),
                        _fmt(row["margin"]),
                        row["verdict"],
                    ]
                )
            )
    return "\n".join(lines) + "\n"


def report_to_dict(rep: Report) -> dict:
    return {
        "suite": rep.suite,
        "seed": rep.seed,
        "config": rep.config,
        "trials": [
            {
                "id": row["trial"],
                "inputs": {"n": row["n"], "lambda": row["lambda"]},
                "outputs": {"lhs": row["lhs"], "rhs": row["rhs"]},
                "margin": row["margin"],
                "verdict": row["verdict"],
            }
            for row in rep.rows
        ],
        "passes": rep.passes,
        "failures": rep.failures,
        "counters": rep.counters,
        "wall_time": rep.wall_time,
    }

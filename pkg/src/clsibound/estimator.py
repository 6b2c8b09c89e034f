"""Numeric MLSI/CpSI estimation by ratio minimization, entropy-decay curves,
and the sandwich harness that reconciles certified bounds with brute-force
estimates.

States are parametrized as rho(H) = n exp(H)/tr exp(H) over Hermitian H
(strictly positive, unit normalized trace by construction), the local search
is a deterministic Nelder-Mead, and restart r draws its start from a
generator seeded with ``seed XOR r``.  Every reported value is the objective
evaluated at the reported witness, hence a true upper bound on the infimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels, serialize
from .exceptions import DegenerateStartError, NumericalIntegrityError
from .graphs import WeightedGraph, certified_bound, graph_laplacian
from .lindblad import ConditionalExpectation, fixed_point_dim, graph_lindblad
from .spectral import (
    SpectralSuperoperator,
    semigroup_apply,
    spectral_gap,
    tensor_with_identity,
    unvec,
    vec,
)

SANDWICH_BASE_SLACK = 1e-6
DECAY_MONOTONE_TOL = 1e-10
DECAY_VALUE_FLOOR = 1e-12
GAP_SEED_SCALE = 1e-3


@dataclass(frozen=True)
class EstimateOptions:
    restarts: int = 200
    seed: int = 0
    tol: float = 1e-8
    max_iters: int = 2000
    init_scale: float = 1.0
    resample_limit: int = 10

    def to_json_dict(self) -> dict:
        return {
            "restarts": self.restarts,
            "seed": self.seed,
            "tol": self.tol,
            "max_iters": self.max_iters,
            "init_scale": self.init_scale,
            "resample_limit": self.resample_limit,
        }


@dataclass
class EstimateReport:
    """Outcome of one ratio minimization.

    ``value`` is a numeric upper bound on the target infimum; ``witness``
    is the state (or positive vertex function) realizing it, and
    ``witness_theta`` the raw parameter vector so the value can be
    reproduced bit-for-bit through the same objective.
    """

    target: str
    kind: str                     # "mlsi" | "cpsi" | "classical-mlsi"
    value: float
    fisher: float
    entropy: float
    witness: np.ndarray
    witness_theta: np.ndarray
    per_restart: list
    restarts: int
    seed: int
    options: EstimateOptions
    backend: str
    p: Optional[float] = None
    sandwich: Optional[dict] = None

    def to_json_dict(self) -> dict:
        doc = {
            "schema_version": 1,
            "target": self.target,
            "kind": self.kind,
            "value": self.value,
            "fisher": self.fisher,
            "entropy": self.entropy,
            "restarts": self.restarts,
            "seed": self.seed,
            "backend": self.backend,
            "options": self.options.to_json_dict(),
            "per_restart": [v if math.isfinite(v) else None for v in self.per_restart],
            "witness_theta": serialize.vector_to_json(self.witness_theta),
        }
        if self.witness.ndim == 2:
            doc["witness"] = serialize.matrix_to_json(self.witness)
        else:
            doc["witness"] = serialize.vector_to_json(self.witness)
        if self.p is not None:
            doc["p"] = self.p
        if self.sandwich is not None:
            doc["sandwich"] = self.sandwich
        return doc

    def to_json(self) -> str:
        return serialize.dumps(self.to_json_dict(), indent=2) + "\n"


def nelder_mead(fn: Callable[[np.ndarray], float], x0: np.ndarray,
                step: float = 0.25, tol: float = 1e-8,
                max_iters: int = 2000):
    """Deterministic Nelder-Mead with the standard reflect/expand/contract/
    shrink moves; the running best value is monotone non-increasing and the
    search stops when the simplex f-spread falls below tol (relative) or the
    iteration budget runs out.  Returns (x_best, f_best, evaluations)."""
    d = len(x0)
    xs = [np.array(x0, dtype=float)]
    for i in range(d):
        x = np.array(x0, dtype=float)
        x[i] += step
        xs.append(x)
    fs = [fn(x) for x in xs]
    nfev = d + 1
    for _ in range(max_iters):
        order = np.argsort(fs, kind="stable")
        xs = [xs[i] for i in order]
        fs = [fs[i] for i in order]
        f_best, f_worst, f_second = fs[0], fs[-1], fs[-2]
        if np.isfinite(f_worst) and abs(f_worst - f_best) <= tol * (abs(f_best) + tol):
            break
        centroid = np.mean(xs[:-1], axis=0)
        reflected = centroid + (centroid - xs[-1])
        f_reflected = fn(reflected)
        nfev += 1
        if f_reflected < f_best:
            expanded = centroid + 2.0 * (centroid - xs[-1])
            f_expanded = fn(expanded)
            nfev += 1
            if f_expanded < f_reflected:
                xs[-1], fs[-1] = expanded, f_expanded
            else:
                xs[-1], fs[-1] = reflected, f_reflected
        elif f_reflected < f_second:
            xs[-1], fs[-1] = reflected, f_reflected
        else:
            contracted = centroid + 0.5 * (xs[-1] - centroid)
            f_contracted = fn(contracted)
            nfev += 1
            if f_contracted < f_worst:
                xs[-1], fs[-1] = contracted, f_contracted
            else:
                for i in range(1, d + 1):
                    xs[i] = xs[0] + 0.5 * (xs[i] - xs[0])
                    fs[i] = fn(xs[i])
                    nfev += 1
    best = int(np.argmin(fs))
    return xs[best], fs[best], nfev


def _expectation_matrix(e_fix, n: int) -> np.ndarray:
    if isinstance(e_fix, ConditionalExpectation):
        mat = e_fix.superop_matrix()
    else:
        mat = np.asarray(e_fix, dtype=complex)
    if mat.shape != (n * n, n * n):
        raise ValueError(
            f"fixed-point projection must be {n*n}x{n*n}, got {mat.shape}")
    return np.ascontiguousarray(mat)


def _state_from_theta(theta: np.ndarray, n: int) -> np.ndarray:
    h = _kernels.hermitian_from_params(theta, n)
    w, u = np.linalg.eigh(h)
    z = np.exp(w)
    p = n * z / z.sum()
    return (u * p) @ u.conj().T


class _MatrixObjective:
    """Callable wrapper binding a superoperator and fixed-point projection
    to the jitted ratio kernel."""

    def __init__(self, s: SpectralSuperoperator, e_fix, p: Optional[float] = None):
        self.n = s.dim
        self.superop = np.ascontiguousarray(s.matrix, dtype=complex)
        self.eproj = _expectation_matrix(e_fix, s.dim)
        self.p = p

    def terms(self, theta: np.ndarray):
        theta = np.ascontiguousarray(theta, dtype=np.float64)
        if self.p is None:
            return _kernels.mlsi_terms(theta, self.superop, self.eproj, self.n)
        return _kernels.cpsi_terms(theta, self.superop, self.eproj, self.n, self.p)

    def __call__(self, theta: np.ndarray) -> float:
        return self.terms(theta)[0]

    def dof(self) -> int:
        return self.n * self.n

    def witness(self, theta: np.ndarray) -> np.ndarray:
        return _state_from_theta(theta, self.n)


class _ClassicalObjective:
    """Ratio of the edge Fisher information to the entropy against the
    measure average, over positive vertex functions f = exp(theta)."""

    def __init__(self, g: WeightedGraph):
        self.g = g
        self.mu = np.ascontiguousarray(g.measure, dtype=np.float64)
        self.edge_u = np.ascontiguousarray([u for u, _, _ in g.edges], dtype=np.int64)
        self.edge_v = np.ascontiguousarray([v for _, v, _ in g.edges], dtype=np.int64)
        self.edge_w = np.ascontiguousarray([w for _, _, w in g.edges], dtype=np.float64)

    def terms(self, theta: np.ndarray):
        theta = np.ascontiguousarray(theta, dtype=np.float64)
        return _kernels.classical_terms(theta, self.mu, self.edge_u,
                                        self.edge_v, self.edge_w)

    def __call__(self, theta: np.ndarray) -> float:
        return self.terms(theta)[0]

    def dof(self) -> int:
        return self.g.n

    def witness(self, theta: np.ndarray) -> np.ndarray:
        return np.exp(np.asarray(theta, dtype=float))


def _multistart(objective, opts: EstimateOptions, target: str, kind: str,
                extra_starts: Sequence[np.ndarray], backend: str,
                p: Optional[float] = None) -> EstimateReport:
    dof = objective.dof()
    per_restart = []
    best_value = np.inf
    best_theta = None
    starts = [np.asarray(t, dtype=float) for t in extra_starts]
    degenerate = 0

    def run_one(theta0):
        nonlocal best_value, best_theta
        theta, value, _ = nelder_mead(objective, theta0, tol=opts.tol,
                                      max_iters=opts.max_iters)
        per_restart.append(float(value))
        if value < best_value:
            best_value = value
            best_theta = theta

    for theta0 in starts:
        if len(theta0) != dof:
            raise ValueError(f"extra start has length {len(theta0)}, expected {dof}")
        run_one(theta0)

    for r in range(opts.restarts):
        rng = np.random.default_rng(np.uint64(opts.seed) ^ np.uint64(r))
        theta0 = None
        for _ in range(opts.resample_limit):
            cand = rng.normal(scale=opts.init_scale, size=dof)
            if np.isfinite(objective(cand)):
                theta0 = cand
                break
        if theta0 is None:
            degenerate += 1
            per_restart.append(np.inf)
            continue
        run_one(theta0)

    if best_theta is None or not np.isfinite(best_value):
        raise DegenerateStartError(
            f"all {opts.restarts} restarts landed on the fixed-point manifold "
            f"({degenerate} never left it)")

    ratio, fisher, entropy = objective.terms(best_theta)
    return EstimateReport(target=target, kind=kind, value=float(ratio),
                          fisher=float(fisher), entropy=float(entropy),
                          witness=objective.witness(best_theta),
                          witness_theta=np.asarray(best_theta, dtype=float),
                          per_restart=per_restart,
                          restarts=opts.restarts, seed=opts.seed, options=opts,
                          backend=backend, p=p)


def mlsi_estimate(s: SpectralSuperoperator, e_fix, opts: Optional[EstimateOptions] = None,
                  extra_starts: Sequence[np.ndarray] = (),
                  target: str = "") -> EstimateReport:
    """Multistart upper estimate of the MLSI constant inf I(rho)/D(rho||E rho)."""
    opts = opts or EstimateOptions()
    objective = _MatrixObjective(s, e_fix)
    return _multistart(objective, opts, target or s.label or "superoperator",
                       "mlsi", extra_starts, _kernels.BACKEND)


def cpsi_estimate(s: SpectralSuperoperator, e_fix, p: float,
                  opts: Optional[EstimateOptions] = None,
                  extra_starts: Sequence[np.ndarray] = (),
                  target: str = "") -> EstimateReport:
    """Multistart upper estimate of the p-Sobolev constant
    inf I^p(rho)/d^p(rho||E rho) for p in (1, 2)."""
    if not 1.0 < p < 2.0:
        raise ValueError(f"p must lie in (1, 2), got {p}")
    opts = opts or EstimateOptions()
    objective = _MatrixObjective(s, e_fix, p=p)
    return _multistart(objective, opts, target or s.label or "superoperator",
                       "cpsi", extra_starts, _kernels.BACKEND, p=p)


def classical_mlsi_estimate(g: WeightedGraph, opts: Optional[EstimateOptions] = None,
                            extra_starts: Sequence[np.ndarray] = (),
                            target: str = "") -> EstimateReport:
    """Estimate over diagonal (classical) states of the graph generator.

    This is an MLSI-only estimate: whether amplified diagonal states can
    push the classical infimum lower is not settled, so reports label it
    separately from the matrix estimate.
    """
    opts = opts or EstimateOptions()
    objective = _ClassicalObjective(g)
    return _multistart(objective, opts, target or f"graph(n={g.n})",
                       "classical-mlsi", extra_starts, _kernels.BACKEND)


def evaluate_ratio(s: SpectralSuperoperator, e_fix, theta: np.ndarray,
                   p: Optional[float] = None):
    """Re-evaluate the exact objective at a parameter vector (used to confirm
    reported values reproduce)."""
    return _MatrixObjective(s, e_fix, p=p).terms(np.asarray(theta, dtype=float))


def evaluate_classical_ratio(g: WeightedGraph, theta: np.ndarray):
    return _ClassicalObjective(g).terms(np.asarray(theta, dtype=float))


def lift_expectation_matrix(e_fix, n: int, m: int) -> np.ndarray:
    """E (x) id_m as a projection matrix on vectorized M_{nm}."""
    return tensor_with_identity(_expectation_matrix(e_fix, n), n, m)


def clsi_probe(s: SpectralSuperoperator, e_fix, m: int,
               opts: Optional[EstimateOptions] = None,
               target: str = "") -> EstimateReport:
    """MLSI estimate of S (x) id on M_n (x) M_m: by definition these values
    are non-increasing in m and probe the complete (amplified) constant.

    For m >= 2 the unamplified witness is embedded as rho (x) 1 and used as
    a warm start, so the probe never reports more than the m = 1 value (up
    to local-search refinement).
    """
    if m < 1:
        raise ValueError("amplification must be >= 1")
    if m * s.dim > 12:
        raise ValueError(f"amplified dimension {m * s.dim} exceeds the cap 12")
    opts = opts or EstimateOptions()
    if m == 1:
        return mlsi_estimate(s, e_fix, opts, target=target or f"{s.label}[m=1]")
    base = mlsi_estimate(s, e_fix, opts, target=f"{s.label}[m=1]")
    h_base = _kernels.hermitian_from_params(base.witness_theta, s.dim)
    embedded = _kernels.params_from_hermitian(np.kron(h_base, np.eye(m)))
    nm = s.dim * m
    lifted = SpectralSuperoperator.from_matrix(
        tensor_with_identity(s.matrix, s.dim, m), nm,
        label=f"{s.label}(x)id_{m}")
    eproj = lift_expectation_matrix(e_fix, s.dim, m)
    return mlsi_estimate(lifted, eproj, opts, extra_starts=[embedded],
                         target=target or lifted.label)


@dataclass(frozen=True)
class DecayCurve:
    ts: np.ndarray
    values: np.ndarray
    log_values: np.ndarray
    fitted_rate: float

    def to_csv(self) -> str:
        return serialize.decay_csv(self.ts, self.values, self.log_values)


def _entropy_against(rho, sigma_dec, n: int) -> float:
    """D(rho || sigma) via the overlap Bregman form, sigma prediagonalized."""
    w, u = np.linalg.eigh(rho)
    w = np.clip(w, DECAY_VALUE_FLOOR * 1e-6, None)
    mu, v = sigma_dec
    overlap = np.abs(u.conj().T @ v) ** 2
    r = w[:, None] / mu[None, :]
    return float((overlap * mu[None, :] * (r * np.log1p(r - 1.0) - (r - 1.0))).sum()) / n


def decay_curve(s: SpectralSuperoperator, e_fix, rho0, t_grid) -> DecayCurve:
    """Entropy decay rows (t, D(T_t rho0 || E rho0), ln D) and the
    least-squares rate of ln D (only points with D above the floor enter the
    fit).  D must be non-increasing along the grid."""
    rho0 = np.asarray(rho0, dtype=complex)
    n = s.dim
    if np.linalg.eigvalsh(0.5 * (rho0 + rho0.conj().T)).min() <= 0:
        raise ValueError("initial state must be strictly positive")
    e_mat = _expectation_matrix(e_fix, n)
    sigma = unvec(e_mat @ vec(rho0), n)
    sigma = 0.5 * (sigma + sigma.conj().T)
    sigma *= n / np.trace(sigma).real
    mu, v = np.linalg.eigh(sigma)
    if mu.min() <= 0:
        raise NumericalIntegrityError("fixed-point projection is not positive")
    sigma_dec = (mu, v)

    ts = np.asarray(t_grid, dtype=float)
    if len(ts) < 2 or np.any(np.diff(ts) <= 0):
        raise ValueError("t grid must be strictly increasing with >= 2 points")
    if ts[0] < 0:
        raise ValueError("t grid must be nonnegative")
    d0 = _entropy_against(rho0, sigma_dec, n)
    if d0 < DECAY_VALUE_FLOOR:
        raise DegenerateStartError(
            f"initial state is a fixed point (D = {d0:.3e})")

    values = []
    for t in ts:
        rho_t = semigroup_apply(s, float(t), rho0)
        values.append(_entropy_against(rho_t, sigma_dec, n))
    values = np.asarray(values)
    rises = np.diff(values)
    if np.any(rises > DECAY_MONOTONE_TOL):
        worst = float(rises.max())
        raise NumericalIntegrityError(
            f"relative entropy increased by {worst:.3e} along the semigroup")

    keep = values > DECAY_VALUE_FLOOR
    log_values = np.where(keep, np.log(np.clip(values, 1e-300, None)), np.nan)
    if keep.sum() >= 2:
        slope = np.polyfit(ts[keep], np.log(values[keep]), 1)[0]
        rate = -float(slope)
    else:
        rate = math.nan
    return DecayCurve(ts=ts, values=values, log_values=log_values, fitted_rate=rate)


def _hermitian_gap_direction(s: SpectralSuperoperator) -> Optional[np.ndarray]:
    """A unit-norm Hermitian matrix in the spectral-gap eigenspace; seeds a
    near-fixed-point start whose ratio sits at 2*gap."""
    w = s.eigenvalues
    idx = np.where(w > 1e-9)[0]
    if len(idx) == 0:
        return None
    b = unvec(s.eigenvectors[:, idx[0]], s.dim)
    h = 0.5 * (b + b.conj().T)
    if np.linalg.norm(h) < 1e-6:
        h = 0.5j * (b - b.conj().T)
    norm = np.linalg.norm(h)
    if norm < 1e-12:
        return None
    return h / norm


def gap_seed_matrix(s: SpectralSuperoperator) -> Optional[np.ndarray]:
    """Parameter vector for a start along the spectral-gap direction."""
    h = _hermitian_gap_direction(s)
    if h is None:
        return None
    return _kernels.params_from_hermitian(GAP_SEED_SCALE * h)


def gap_seed_classical(a: np.ndarray) -> np.ndarray:
    """Classical analogue: exp(eps * gap eigenvector) of the graph generator."""
    w, u = np.linalg.eigh(a)
    idx = np.where(w > 1e-9)[0][0]
    return GAP_SEED_SCALE * u[:, idx]


@dataclass
class SandwichReport:
    """Certified bounds vs numeric estimates vs spectral-gap caps for one
    graph, with every required ordering."""

    graph_label: str
    certificate_best: float
    lindblad_certified: float
    classical: EstimateReport
    matrix: EstimateReport
    gap_classical: float
    gap_matrix: float
    slack: float
    orderings: list  # (name, lhs, rhs, ok)

    @property
    def passed(self) -> bool:
        return all(ok for _, _, _, ok in self.orderings)

    @property
    def failed_pairs(self) -> list:
        return [name for name, _, _, ok in self.orderings if not ok]

    def to_json_dict(self) -> dict:
        return {
            "graph": self.graph_label,
            "certificate_best": self.certificate_best,
            "lindblad_certified": self.lindblad_certified,
            "classical_estimate": self.classical.value,
            "matrix_estimate": self.matrix.value,
            "gap_classical": self.gap_classical,
            "gap_matrix": self.gap_matrix,
            "slack": self.slack,
            "orderings": [
                {"name": name, "lhs": lhs, "rhs": rhs, "ok": ok}
                for name, lhs, rhs, ok in self.orderings
            ],
            "passed": self.passed,
        }


def sandwich_check(g: WeightedGraph, opts: Optional[EstimateOptions] = None,
                   label: str = "") -> SandwichReport:
    """Assemble certified bounds, classical and matrix numeric estimates, and
    spectral gaps for a connected graph, then assert the ordering chain:

        lindblad-certified <= matrix estimate,
        matrix estimate <= classical estimate (diagonal states are a subset),
        graph-certified <= classical estimate,
        classical estimate <= 2 * classical gap,
        matrix estimate <= 2 * matrix gap,

    each up to slack = 1e-6 + optimizer tol.  The matrix search is warm
    started with the classical witness embedded diagonally, so the subset
    ordering is inherited rather than hoped for.
    """
    opts = opts or EstimateOptions()
    if g.n > 5:
        raise ValueError("sandwich harness is desk-scale: n <= 5")
    cert = certified_bound(g)

    a = graph_laplacian(g)
    gap_c = spectral_gap(a)
    classical = classical_mlsi_estimate(
        g, opts, extra_starts=[gap_seed_classical(a)], target=label or f"graph(n={g.n})")

    s = graph_lindblad(g)
    gap_m = spectral_gap(s)
    e_fix = fixed_point_dim(s).expectation
    matrix_starts = []
    diag_embed = np.zeros(g.n * g.n)
    diag_embed[:g.n] = np.log(classical.witness)
    matrix_starts.append(diag_embed)
    gap_start = gap_seed_matrix(s)
    if gap_start is not None:
        matrix_starts.append(gap_start)
    matrix = mlsi_estimate(s, e_fix, opts, extra_starts=matrix_starts,
                           target=(label or f"graph(n={g.n})") + ":matrix")

    slack = SANDWICH_BASE_SLACK + opts.tol
    orderings = []

    def add(name, lhs, rhs):
        orderings.append((name, float(lhs), float(rhs), bool(lhs <= rhs + slack)))

    add("lindblad-certified<=matrix-estimate", cert.lindblad_lower, matrix.value)
    add("matrix-estimate<=classical-estimate", matrix.value, classical.value)
    add("graph-certified<=classical-estimate", cert.best, classical.value)
    add("classical-estimate<=2*classical-gap", classical.value, 2.0 * gap_c)
    add("matrix-estimate<=2*matrix-gap", matrix.value, 2.0 * gap_m)

    report = SandwichReport(
        graph_label=label or f"graph(n={g.n},edges={g.edge_count})",
        certificate_best=cert.best,
        lindblad_certified=cert.lindblad_lower,
        classical=classical,
        matrix=matrix,
        gap_classical=gap_c,
        gap_matrix=gap_m,
        slack=slack,
        orderings=orderings,
    )
    classical.sandwich = report.to_json_dict()
    matrix.sandwich = report.to_json_dict()
    return report

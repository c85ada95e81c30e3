"""Entanglement criteria for Gaussian states relative to a mode partition.

Three witnesses are provided, all functions of the covariance matrix alone:

``qfi_witness``
    Largest eigenvalue of ``inv(G) - 4 Omega^T G_part Omega`` where ``G_part``
    is the block-decorrelated covariance. Positive means entangled.
``squeezing_coefficient``
    ``xi^2 = min_g 4 (g^T Omega^T G_part Omega g)(g^T G g)`` over unit ``g``.
    ``xi^-2 > 1`` means entangled.
``ppt_criterion``
    Smallest normalized symplectic eigenvalue after flipping the momenta of
    one block of a bipartition. Below one means entangled.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .errors import (
    DegenerateHError,
    NotABipartitionError,
    OptimizationDidNotConvergeError,
    PartitionMismatchError,
)
from .partitions import ModePartition, as_partition, project_block_diagonal
from .symplectic import (
    as_covariance,
    canonical_sign,
    invert,
    n_modes_of,
    symplectic_eigenvalues,
    symplectic_form,
)

VERDICT_TOL = 1e-9
DEGENERACY_TOL = 1e-9
CRITERIA = ("qfi_witness", "squeezing", "ppt")


@dataclass(frozen=True)
class SearchConfig:
    """Options for the squeezing-coefficient minimization.

    ``restriction_mask`` is a length-2N boolean sequence; components where it is
    False are fixed to zero. ``certify`` runs a brute-force sphere grid (only
    for searches over at most four components) to confirm the multistart
    optimum.
    """

    seed: int = 0
    n_random_starts: int = 64
    max_iters: int = 500
    tol: float = 1e-12
    restriction_mask: Optional[tuple] = None
    certify: bool = False
    grid_step_deg: float = 0.5
    n_polish: int = 4
    strict: bool = False

    def __post_init__(self):
        if self.restriction_mask is not None:
            object.__setattr__(self, "restriction_mask", tuple(bool(m) for m in self.restriction_mask))
        if self.n_random_starts < 0 or self.max_iters < 1:
            raise ValueError("n_random_starts must be >= 0 and max_iters >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "SearchConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            from .errors import ConfigError

            raise ConfigError(f"unknown search option(s) {sorted(unknown)}", field=sorted(unknown)[0])
        return cls(**data)

    def with_mask(self, mask) -> "SearchConfig":
        return SearchConfig(**{**self.__dict__, "restriction_mask": None if mask is None else tuple(mask)})


@dataclass
class CriterionResult:
    criterion: str
    value: float
    entangled: bool
    partition: ModePartition
    optimal_direction: Optional[np.ndarray] = None
    #: Dimension of the top eigenspace (qfi_witness only).
    degeneracy: int = 1
    #: First-order optimality reached (squeezing only).
    converged: bool = True
    #: Brute-force grid confirmed the optimum (squeezing, opt-in).
    certified: Optional[bool] = None
    extra: dict = field(default_factory=dict)


# -- quantum Fisher information ------------------------------------------------


def qfi(gamma, g) -> float:
    """Gaussian quantum Fisher information for displacements along ``g``."""
    gm = as_covariance(gamma)
    g = np.asarray(g, dtype=float)
    omega = symplectic_form(n_modes_of(gm))
    v = omega @ g
    return float(v @ invert(gm) @ v)


def qfi_lower_bound(gamma, g, h) -> float:
    """``(h^T Omega g)^2 / (h^T G h)``, a lower bound on :func:`qfi`."""
    gm = as_covariance(gamma)
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    denom = float(h @ gm @ h)
    if denom < 1e-14:
        raise DegenerateHError(f"h^T G h = {denom:.3e} is too small")
    omega = symplectic_form(n_modes_of(gm))
    return float(h @ omega @ g) ** 2 / denom


def local_bound_matrix(gamma, partition) -> np.ndarray:
    """``Omega^T G_part Omega``; ``4 g^T (.) g`` bounds the QFI of separable states."""
    gm = np.asarray(gamma, dtype=float)
    omega = symplectic_form(n_modes_of(gm))
    return omega.T @ project_block_diagonal(gm, partition) @ omega


def witness_matrix(gamma, partition) -> np.ndarray:
    gm = as_covariance(gamma)
    p = as_partition(partition, n_modes_of(gm))
    w = invert(gm) - 4.0 * local_bound_matrix(gm, p)
    return 0.5 * (w + w.T)


def qfi_witness(gamma, partition, support=None) -> CriterionResult:
    """Largest eigenvalue of the witness matrix and its eigenvector.

    ``support`` optionally restricts directions to the given quadrature
    components (boolean mask), giving the best value within that subspace.
    """
    gm = as_covariance(gamma)
    p = as_partition(partition, n_modes_of(gm))
    w = witness_matrix(gm, p)
    idx = np.arange(w.shape[0]) if support is None else np.flatnonzero(np.asarray(support, bool))
    evals, evecs = np.linalg.eigh(w[np.ix_(idx, idx)])
    lam = float(evals[-1])
    degeneracy = int(np.sum(evals >= lam - DEGENERACY_TOL * max(1.0, abs(lam))))
    e = np.zeros(w.shape[0])
    e[idx] = evecs[:, -1]
    return CriterionResult(
        criterion="qfi_witness",
        value=lam,
        entangled=lam > VERDICT_TOL,
        partition=p,
        optimal_direction=canonical_sign(e),
        degeneracy=degeneracy,
    )


# -- squeezing coefficient -------------------------------------------------------


def _objective(g, m, gm):
    n = g @ g
    return 4.0 * (g @ m @ g) * (g @ gm @ g) / n**2


def _gradient(g, m, gm):
    n = g @ g
    a, b = g @ m @ g, g @ gm @ g
    return 8.0 * (b * (m @ g) + a * (gm @ g)) / n**2 - 16.0 * a * b * g / n**3


def _fixed_point(m, gm, starts, max_iters, tol, patience=25):
    """Batched iteration ``g <- smallest eigenvector of (g'Gg) M + (g'Mg) G``.

    A start stops when its step falls below ``tol`` or, on degenerate optimal
    manifolds where ``g`` keeps drifting, when its best objective has not
    improved for ``patience`` iterations. Returns per-start best objective,
    best iterate and a flag telling whether the step criterion was met.
    """
    g = starts / np.linalg.norm(starts, axis=1, keepdims=True)
    best_f = np.full(len(g), np.inf)
    best_g = g.copy()
    converged = np.zeros(len(g), dtype=bool)
    active = np.ones(len(g), dtype=bool)
    stale = np.zeros(len(g), dtype=int)
    for _ in range(max_iters):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        ga = g[idx]
        a = np.einsum("si,ij,sj->s", ga, m, ga)
        b = np.einsum("si,ij,sj->s", ga, gm, ga)
        f = 4.0 * a * b
        better = f < best_f[idx] * (1.0 - 1e-14)
        stale[idx] = np.where(better, 0, stale[idx] + 1)
        improved = idx[f < best_f[idx]]
        best_f[improved] = f[f < best_f[idx]]
        best_g[improved] = g[improved]
        pencil = b[:, None, None] * m + a[:, None, None] * gm
        _, vecs = np.linalg.eigh(pencil)
        new = vecs[:, :, 0]
        sign = np.sign(np.einsum("si,si->s", new, ga))
        sign[sign == 0] = 1.0
        new *= sign[:, None]
        step = np.linalg.norm(new - ga, axis=1)
        g[idx] = new
        converged[idx] |= step < tol
        active[idx] = ~((step < tol) | (stale[idx] >= patience))
    # Score the final iterates too.
    f = 4.0 * np.einsum("si,ij,sj->s", g, m, g) * np.einsum("si,ij,sj->s", g, gm, g)
    improved = f < best_f
    best_f[improved] = f[improved]
    best_g[improved] = g[improved]
    return best_f, best_g, converged


def _polish(g, m, gm):
    res = minimize(_objective, g, args=(m, gm), jac=_gradient, method="BFGS", options={"gtol": 1e-13, "maxiter": 500})
    x = res.x / np.linalg.norm(res.x)
    return float(_objective(x, m, gm)), x


def _tangent_gradient_norm(g, m, gm) -> float:
    return float(np.linalg.norm(_gradient(g, m, gm)))


def _grid_values(pts, m, gm):
    return 4.0 * np.sum((pts @ m) * pts, axis=1) * np.sum((pts @ gm) * pts, axis=1)


def sphere_grid_minimum(m, gm, step_deg: float = 0.5):
    """Brute-force minimum of the squeezing objective on a hyperspherical grid.

    Supports two to four components. Antipodal symmetry halves the grid.
    Returns ``(value, direction)`` of the best grid point.
    """
    d = m.shape[0]
    h = math.radians(step_deg)
    if d == 1:
        g = np.ones(1)
        return float(_objective(g, m, gm)), g
    if d == 2:
        t = np.arange(0.0, math.pi, h)
        pts = np.column_stack([np.cos(t), np.sin(t)])
        f = _grid_values(pts, m, gm)
        k = int(np.argmin(f))
        return float(f[k]), pts[k]
    if d == 3:
        t1 = np.arange(0.0, math.pi / 2 + h / 2, h)
        phi = np.arange(0.0, 2 * math.pi, h)
        a, b = np.meshgrid(t1, phi, indexing="ij")
        pts = np.column_stack([np.cos(a).ravel(), (np.sin(a) * np.cos(b)).ravel(), (np.sin(a) * np.sin(b)).ravel()])
        f = _grid_values(pts, m, gm)
        k = int(np.argmin(f))
        return float(f[k]), pts[k]
    if d != 4:
        raise ValueError("grid certification supports at most four components")
    t2 = np.arange(0.0, math.pi + h / 2, h)
    phi = np.arange(0.0, 2 * math.pi, h)
    b2, ph = np.meshgrid(t2, phi, indexing="ij")
    sb, cb = np.sin(b2).ravel(), np.cos(b2).ravel()
    sp, cp = np.sin(ph).ravel(), np.cos(ph).ravel()
    best = (np.inf, None)
    for t1 in np.arange(0.0, math.pi / 2 + h / 2, h):
        s1 = math.sin(t1)
        pts = np.column_stack([np.full(sb.shape, math.cos(t1)), s1 * cb, s1 * sb * cp, s1 * sb * sp])
        f = _grid_values(pts, m, gm)
        k = int(np.argmin(f))
        if f[k] < best[0]:
            best = (float(f[k]), pts[k].copy())
    return best


def squeezing_coefficient(gamma, partition, search: SearchConfig | None = None) -> CriterionResult:
    """Multi-mode squeezing coefficient for ``partition``.

    ``value`` is ``xi^-2``; ``extra['xi2']`` holds ``xi^2``. Any trial direction
    gives an upper bound on ``xi^2``, so a non-converged result is still a
    valid (conservative) witness; it is flagged via ``converged=False``.
    """
    cfg = search or SearchConfig()
    gm_full = as_covariance(gamma)
    n = n_modes_of(gm_full)
    p = as_partition(partition, n)
    m_full = local_bound_matrix(gm_full, p)
    d = 2 * n
    if cfg.restriction_mask is not None:
        if len(cfg.restriction_mask) != d:
            raise PartitionMismatchError(f"restriction mask has length {len(cfg.restriction_mask)}, need {d}")
        idx = np.flatnonzero(cfg.restriction_mask)
        if idx.size == 0:
            raise ValueError("restriction mask excludes every component")
    else:
        idx = np.arange(d)
    m = m_full[np.ix_(idx, idx)]
    gm = gm_full[np.ix_(idx, idx)]
    k = idx.size

    starts = [np.linalg.eigh(a)[1].T for a in (m, gm, m + gm)]
    rng = np.random.default_rng(cfg.seed)
    starts.append(rng.standard_normal((cfg.n_random_starts, k)))
    starts = np.vstack(starts)

    best_f, best_g, done = _fixed_point(m, gm, starts, cfg.max_iters, cfg.tol)

    # Polish the best distinct candidates; BFGS on the scale-invariant objective.
    order = np.argsort(best_f)
    picked = []
    for i in order:
        gi = best_g[i]
        if all(abs(abs(gi @ gj) - 1.0) > 1e-6 for gj in picked):
            picked.append(gi)
        if len(picked) >= cfg.n_polish:
            break
    f_star, g_star = float(best_f[order[0]]), best_g[order[0]]
    for gi in picked:
        f_i, g_i = _polish(gi, m, gm)
        if f_i < f_star:
            f_star, g_star = f_i, g_i
    scale = max(1.0, abs(f_star))
    converged = _tangent_gradient_norm(g_star, m, gm) < 1e-7 * scale

    certified = None
    if cfg.certify:
        if k > 4:
            certified = False
        else:
            f_grid, g_grid = sphere_grid_minimum(m, gm, cfg.grid_step_deg)
            f_ref, g_ref = _polish(g_grid, m, gm)
            certified = abs(f_ref - f_star) <= 1e-6 * abs(f_star)
            if f_ref < f_star - 1e-12 * scale:
                f_star, g_star = f_ref, g_ref

    if not converged:
        msg = f"squeezing search for {p} did not reach first-order optimality"
        if cfg.strict:
            raise OptimizationDidNotConvergeError(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)

    direction = np.zeros(d)
    direction[idx] = g_star / np.linalg.norm(g_star)
    inv_xi2 = 1.0 / f_star if f_star > 0 else math.inf
    return CriterionResult(
        criterion="squeezing",
        value=inv_xi2,
        entangled=inv_xi2 > 1.0 + VERDICT_TOL,
        partition=p,
        optimal_direction=canonical_sign(direction),
        converged=converged,
        certified=certified,
        extra={"xi2": f_star, "fixed_point_converged": float(done.mean())},
    )


# -- PPT ------------------------------------------------------------------------


def partial_transpose(gamma, partition) -> np.ndarray:
    """Flip the sign of every momentum quadrature in the second block."""
    gm = as_covariance(gamma)
    p = as_partition(partition, n_modes_of(gm))
    if p.n_blocks != 2:
        raise NotABipartitionError(f"PPT needs exactly two subsystems, {p} has {p.n_blocks}")
    flip = np.ones(gm.shape[0])
    for mode in p.blocks[1]:
        flip[2 * mode + 1] = -1.0
    return flip[:, None] * gm * flip[None, :]


def ppt_criterion(gamma, partition) -> CriterionResult:
    """Smallest normalized symplectic eigenvalue of the partially transposed state."""
    pt = partial_transpose(gamma, partition)
    p = as_partition(partition, n_modes_of(pt))
    value = float(symplectic_eigenvalues(pt)[-1])
    return CriterionResult(criterion="ppt", value=value, entangled=value < 1.0 - VERDICT_TOL, partition=p)


def evaluate(gamma, partition, criterion: str, search: SearchConfig | None = None) -> CriterionResult:
    if criterion == "qfi_witness":
        return qfi_witness(gamma, partition)
    if criterion == "squeezing":
        return squeezing_coefficient(gamma, partition, search)
    if criterion == "ppt":
        return ppt_criterion(gamma, partition)
    raise ValueError(f"unknown criterion {criterion!r}; choose from {CRITERIA}")


def quadrature_mask(n_modes: int, x_modes=(), p_modes=()) -> tuple:
    """Restriction mask allowing ``x`` of ``x_modes`` and ``p`` of ``p_modes``."""
    mask = [False] * (2 * n_modes)
    for k in x_modes:
        mask[2 * k] = True
    for k in p_modes:
        mask[2 * k + 1] = True
    return tuple(mask)

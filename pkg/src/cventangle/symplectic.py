"""Phase-space conventions, the symplectic form and covariance-matrix checks.

Conventions used everywhere in the package:

* quadratures are ordered ``(x1, p1, x2, p2, ..., xN, pN)``;
* the vacuum covariance matrix is ``0.5 * I`` (vacuum variance 1/2);
* symplectic eigenvalues are reported *normalized* as ``2 * nu`` so that the
  vacuum has eigenvalue exactly 1 and physicality means ``2 * nu >= 1``.

Covariance matrices are plain ``numpy`` arrays. :func:`as_covariance` is the
single entry point that validates and symmetrizes user input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    NonSymmetricError,
    NotPositiveDefiniteError,
    SingularMatrixError,
    ShapeMismatchError,
    IndexOutOfRangeError,
)

VACUUM_VARIANCE = 0.5
SYMMETRY_TOL = 1e-12
PHYSICAL_TOL = 1e-9
MAX_CONDITION = 1e14
ORDERING = "x1p1...xNpN"

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form with 2x2 blocks ``[[0, 1], [-1, 0]]``."""
    if n_modes < 1:
        raise ValueError("n_modes must be positive")
    return np.kron(np.eye(n_modes), _J)


def vacuum(n_modes: int) -> np.ndarray:
    return VACUUM_VARIANCE * np.eye(2 * n_modes)


def n_modes_of(gamma: np.ndarray) -> int:
    return np.shape(gamma)[0] // 2


def quadrature_indices(modes) -> np.ndarray:
    """Zero-based quadrature rows ``(2k, 2k+1)`` for zero-based mode indices."""
    modes = np.asarray(list(modes), dtype=int)
    return np.column_stack([2 * modes, 2 * modes + 1]).ravel()


def as_covariance(gamma, tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Validate a covariance matrix and return a symmetrized float copy.

    Asymmetry below ``tol`` (max absolute) is treated as floating-point noise
    and removed via ``(G + G.T) / 2``; anything larger raises
    :class:`NonSymmetricError`.
    """
    g = np.array(gamma, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] % 2 or g.shape[0] == 0:
        raise ShapeMismatchError(f"expected a non-empty 2N x 2N matrix, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise ValueError("covariance matrix has non-finite entries")
    asym = np.max(np.abs(g - g.T))
    if asym >= tol:
        raise NonSymmetricError(f"max asymmetry {asym:.3e} exceeds {tol:.0e}")
    return 0.5 * (g + g.T)


def is_positive_definite(gamma: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(gamma)
    except np.linalg.LinAlgError:
        return False
    return True


def _require_pd(g: np.ndarray) -> None:
    if not is_positive_definite(g):
        raise NotPositiveDefiniteError("covariance matrix is not positive definite")


def _paired_moduli(w: np.ndarray, rtol: float = 1e-8) -> np.ndarray:
    """Collapse the +-i*nu pairs returned by a generic eigensolver.

    Sorted moduli come in adjacent equal pairs; a pair that disagrees beyond
    ``rtol`` means ``Omega @ Gamma`` had real eigenvalues, i.e. the input was
    not a valid covariance matrix.
    """
    nu = np.sort(np.abs(w.imag))
    a, b = nu[0::2], nu[1::2]
    scale = np.maximum(np.maximum(a, b), 1.0)
    if np.any(np.abs(a - b) > rtol * scale) or np.any(np.abs(w.real) > rtol * scale.max()):
        raise NotPositiveDefiniteError("Omega @ Gamma does not have a purely imaginary spectrum")
    return 0.5 * (a + b)


def symplectic_eigenvalues(gamma) -> np.ndarray:
    """Normalized symplectic spectrum ``2 * nu_i`` in descending order.

    ``+-i nu_i`` are the eigenvalues of ``Omega @ Gamma``.

    Raises
    ------
    NonSymmetricError, NotPositiveDefiniteError
    """
    g = as_covariance(gamma)
    _require_pd(g)
    omega = symplectic_form(n_modes_of(g))
    nu = _paired_moduli(np.linalg.eigvals(omega @ g))
    return np.sort(2.0 * nu)[::-1]


@dataclass(frozen=True)
class PhysicalityReport:
    physical: bool
    margin: float

    def __bool__(self) -> bool:
        return self.physical


def check_physical(gamma, tol: float = PHYSICAL_TOL) -> PhysicalityReport:
    """Uncertainty-principle check.

    ``margin`` is the smallest normalized symplectic eigenvalue minus one.
    For matrices that are not even positive definite there is no symplectic
    spectrum; the margin is then ``2 * lambda_min(Gamma) - 1`` (always <= -1
    or close to it), which keeps the sign convention.
    """
    g = as_covariance(gamma)
    if not is_positive_definite(g):
        margin = 2.0 * float(np.linalg.eigvalsh(g)[0]) - 1.0
        return PhysicalityReport(False, margin)
    margin = float(symplectic_eigenvalues(g)[-1] - 1.0)
    return PhysicalityReport(margin >= -tol, margin)


def invert(gamma) -> np.ndarray:
    """Inverse of a positive-definite covariance matrix (symmetrized)."""
    g = as_covariance(gamma)
    cond = np.linalg.cond(g)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularMatrixError(f"condition number {cond:.3e} exceeds {MAX_CONDITION:.0e}")
    inv = np.linalg.solve(g, np.eye(g.shape[0]))
    return 0.5 * (inv + inv.T)


def is_symplectic(s: np.ndarray, tol: float = 1e-12) -> bool:
    s = np.asarray(s, dtype=float)
    omega = symplectic_form(s.shape[0] // 2)
    return bool(np.max(np.abs(s @ omega @ s.T - omega)) < tol)


def unit(g) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    norm = np.linalg.norm(g)
    if norm == 0:
        raise ValueError("zero vector has no direction")
    return g / norm


def canonical_sign(g, tol: float = 1e-10) -> np.ndarray:
    """Flip ``g`` so its first component with ``|g_i| > tol`` is positive."""
    g = np.array(g, dtype=float)
    big = np.flatnonzero(np.abs(g) > tol)
    if big.size and g[big[0]] < 0:
        g = -g
    return g + 0.0


def reduce_modes(gamma, keep) -> np.ndarray:
    """Submatrix for zero-based modes ``keep`` (order preserved)."""
    g = np.asarray(gamma, dtype=float)
    n = n_modes_of(g)
    keep = list(keep)
    if any(k < 0 or k >= n for k in keep):
        raise IndexOutOfRangeError(f"mode index out of range for {n} modes: {keep}")
    q = quadrature_indices(keep)
    return g[np.ix_(q, q)].copy()


# -- JSON ---------------------------------------------------------------------


def covariance_to_dict(gamma) -> dict:
    g = as_covariance(gamma)
    return {
        "n_modes": n_modes_of(g),
        "ordering": ORDERING,
        "vacuum_variance": VACUUM_VARIANCE,
        "matrix": g.tolist(),
    }


def covariance_from_dict(data: dict) -> np.ndarray:
    if "matrix" not in data:
        raise ShapeMismatchError("covariance JSON needs a 'matrix' field")
    g = as_covariance(data["matrix"])
    if "n_modes" in data and int(data["n_modes"]) != n_modes_of(g):
        raise ShapeMismatchError(
            f"n_modes={data['n_modes']} does not match a {g.shape[0]}x{g.shape[0]} matrix"
        )
    vv = float(data.get("vacuum_variance", VACUUM_VARIANCE))
    if vv != VACUUM_VARIANCE:
        # Rescale foreign conventions (e.g. vacuum variance 1) to ours.
        g = g * (VACUUM_VARIANCE / vv)
    ordering = data.get("ordering", ORDERING)
    if ordering != ORDERING:
        raise ShapeMismatchError(f"unsupported quadrature ordering {ordering!r}")
    return g


def save_covariance(path, gamma, **extra) -> None:
    payload = covariance_to_dict(gamma)
    payload.update(extra)
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_covariance(path) -> np.ndarray:
    return covariance_from_dict(json.loads(Path(path).read_text()))

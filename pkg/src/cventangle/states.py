"""Analytic covariance matrices of the two-, three- and four-mode states.

The three families are produced by squeezed vacua on beam-splitter networks
(see :mod:`cventangle.network` for the circuits) with a pure-loss channel of
transmission ``eta`` on mode A. Mode A is always index 0 (letter ``A``).

``c = cosh(2r)`` and ``s = sinh(2r)`` abbreviate the squeezing dependence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ConfigError,
    EfficiencyOutOfRangeError,
    EmptySubsetError,
    IndexOutOfRangeError,
    UnsupportedLossPatternError,
    WeightOutOfRangeError,
)
from .symplectic import VACUUM_VARIANCE, as_covariance, n_modes_of, reduce_modes

FAMILIES = ("two_mode_epr", "ghz3", "cluster4", "vacuum_mixed_epr")
FAMILY_MODES = {"two_mode_epr": 2, "ghz3": 3, "cluster4": 4, "vacuum_mixed_epr": 2}
FAMILY_ALIASES = {"epr": "two_mode_epr", "ghz": "ghz3", "cluster": "cluster4", "vacuum_mixed": "vacuum_mixed_epr"}

#: Exactly halved quadrature variance, e^{-2r} = 1/2.
R_HALF = math.log(2.0) / 2.0
#: Squeezing level quoted for the experiment.
PAPER_DB = -3.0


def db_to_r(db: float) -> float:
    """Squeezing parameter for a level in dB: ``e^{-2r} = 10^{db/10}``."""
    return -math.log(10.0 ** (db / 20.0))


def r_to_db(r: float) -> float:
    return -20.0 * r / math.log(10.0)


#: Squeezing parameter of a literal -3 dB squeezer (0.34539), used for the
#: loss sweeps that are compared against the reported thresholds.
R_PAPER = db_to_r(PAPER_DB)


@dataclass(frozen=True)
class StateSpec:
    """Parameters of one analytic state.

    ``eta`` holds per-mode transmissions (length N); a scalar is taken as the
    transmission of mode A with the other modes lossless.
    """

    family: str
    r: float = R_HALF
    eta: tuple = ()
    p: float = 1.0

    def __post_init__(self):
        family = FAMILY_ALIASES.get(self.family, self.family)
        if family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}; choose from {FAMILIES}", field="family")
        object.__setattr__(self, "family", family)
        if not math.isfinite(self.r):
            raise ConfigError("r must be finite", field="r")
        n = FAMILY_MODES[family]
        eta = self.eta
        if np.isscalar(eta):
            eta = (float(eta),) + (1.0,) * (n - 1)
        eta = tuple(float(e) for e in eta) or (1.0,) * n
        if len(eta) != n:
            raise ConfigError(f"{family} needs {n} transmissions, got {len(eta)}", field="eta")
        if any(not 0.0 <= e <= 1.0 for e in eta):
            raise EfficiencyOutOfRangeError(f"transmissions must lie in [0, 1]: {eta}")
        object.__setattr__(self, "eta", eta)
        if not 0.0 <= self.p <= 1.0:
            raise WeightOutOfRangeError(f"p={self.p} outside [0, 1]")

    @property
    def n_modes(self) -> int:
        return FAMILY_MODES[self.family]

    @classmethod
    def from_dict(cls, data: dict) -> "StateSpec":
        """Build from a config block ``{family, r | db, eta, p}``."""
        data = dict(data)
        unknown = set(data) - {"family", "r", "db", "eta", "p"}
        if unknown:
            raise ConfigError(f"unknown keys {sorted(unknown)}", field=sorted(unknown)[0])
        if "family" not in data:
            raise ConfigError("missing state family", field="family")
        if "r" in data and "db" in data:
            raise ConfigError("give either r or db, not both", field="db")
        try:
            r = db_to_r(float(data["db"])) if "db" in data else float(data.get("r", R_HALF))
            eta = data.get("eta", ())
            eta = float(eta) if np.isscalar(eta) else tuple(float(e) for e in eta)
            p = float(data.get("p", 1.0))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        return cls(family=data["family"], r=r, eta=eta, p=p)

    def to_dict(self) -> dict:
        out = {"family": self.family, "r": self.r, "eta": list(self.eta)}
        if self.family == "vacuum_mixed_epr":
            out["p"] = self.p
        return out

    def covariance(self) -> np.ndarray:
        """Covariance matrix for this spec, routing loss appropriately."""
        if self.family == "vacuum_mixed_epr":
            return apply_loss(vacuum_mixed(self.r, self.p), self.eta)
        if all(e == 1.0 for e in self.eta[1:]):
            return analytic_covariance(self.family, self.r, self.eta[0])
        return apply_loss(analytic_covariance(self.family, self.r, 1.0), self.eta)


def _epr(c, s, eta):
    a = (1 - eta) + eta * c
    q = math.sqrt(eta) * s
    return 0.5 * np.array(
        [
            [a, 0, -q, 0],
            [0, a, 0, q],
            [-q, 0, c, 0],
            [0, q, 0, c],
        ]
    )


def _ghz(r, c, s, eta):
    # Entries transcribed term by term; the A-mode diagonals are written in
    # two different but equivalent forms on purpose.
    q = s * math.sqrt(eta) / 3
    em, ep = math.exp(-2 * r), math.exp(2 * r)
    xa = ((-3 + 2 * em + ep) * eta + 3) / 6
    pa = (3 * c * eta + s * eta - 3 * eta + 3) / 6
    xb = em * (2 + math.exp(4 * r)) / 6
    pb = (3 * c + s) / 6
    t = s / 3
    return np.array(
        [
            [xa, 0, q, 0, q, 0],
            [0, pa, 0, -q, 0, -q],
            [q, 0, xb, 0, t, 0],
            [0, -q, 0, pb, 0, -t],
            [q, 0, t, 0, xb, 0],
            [0, -q, 0, -t, 0, pb],
        ]
    )


def _cluster(c, s, eta):
    q = math.sqrt(eta) * s
    xa = (5 * c * eta + s * eta - 5 * eta + 5) / 10
    pa = (5 * c * eta - s * eta - 5 * eta + 5) / 10
    xx = (5 * c + s) / 10
    pp = (5 * c - s) / 10
    return np.array(
        [
            [xa, 0, -2 * q / 5, 0, 0, q / 5, 0, q / 5],
            [0, pa, 0, 2 * q / 5, q / 5, 0, q / 5, 0],
            [-2 * q / 5, 0, xx, 0, 0, s / 5, 0, s / 5],
            [0, 2 * q / 5, 0, pp, s / 5, 0, s / 5, 0],
            [0, q / 5, 0, s / 5, xx, 0, -2 * s / 5, 0],
            [q / 5, 0, s / 5, 0, 0, pp, 0, 2 * s / 5],
            [0, q / 5, 0, s / 5, -2 * s / 5, 0, xx, 0],
            [q / 5, 0, s / 5, 0, 0, 2 * s / 5, 0, pp],
        ]
    )


def analytic_covariance(family: str, r: float, eta: float | Sequence[float] = 1.0) -> np.ndarray:
    """Closed-form covariance of ``two_mode_epr``, ``ghz3`` or ``cluster4``.

    ``eta`` is the transmission of mode A. A per-mode sequence is accepted as
    long as every mode other than A is lossless; other loss patterns must go
    through :func:`apply_loss`.
    """
    family = FAMILY_ALIASES.get(family, family)
    if family not in ("two_mode_epr", "ghz3", "cluster4"):
        raise ConfigError(f"no closed form for family {family!r}", field="family")
    if not np.isscalar(eta):
        eta = [float(e) for e in eta]
        if len(eta) != FAMILY_MODES[family]:
            raise UnsupportedLossPatternError(f"{family} needs {FAMILY_MODES[family]} transmissions")
        if any(e != 1.0 for e in eta[1:]):
            raise UnsupportedLossPatternError("closed forms only cover loss on mode A; use apply_loss")
        eta = eta[0]
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise EfficiencyOutOfRangeError(f"eta={eta} outside [0, 1]")
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    if family == "two_mode_epr":
        return _epr(c, s, eta)
    if family == "ghz3":
        return _ghz(r, c, s, eta)
    return _cluster(c, s, eta)


def apply_loss(gamma, etas) -> np.ndarray:
    """Pure-loss channel on every mode: ``X G X^T + Y``.

    ``X = diag(sqrt(eta_k))`` on both quadratures of mode k and
    ``Y = diag((1 - eta_k) / 2)``.
    """
    g = as_covariance(gamma)
    n = n_modes_of(g)
    etas = np.atleast_1d(np.asarray(etas, dtype=float))
    if etas.shape != (n,):
        raise IndexOutOfRangeError(f"need {n} transmissions, got {etas.shape[0]}")
    if np.any((etas < 0) | (etas > 1)) or not np.all(np.isfinite(etas)):
        raise EfficiencyOutOfRangeError(f"transmissions must lie in [0, 1]: {etas}")
    x = np.repeat(np.sqrt(etas), 2)
    y = np.repeat((1.0 - etas) * VACUUM_VARIANCE, 2)
    return x[:, None] * g * x[None, :] + np.diag(y)


def reduce(gamma, keep) -> np.ndarray:
    """Reduced state on zero-based modes ``keep`` (partial trace is exact for Gaussians)."""
    keep = list(keep)
    if not keep:
        raise EmptySubsetError("need at least one mode to keep")
    if len(set(keep)) != len(keep):
        raise IndexOutOfRangeError(f"repeated mode in {keep}")
    return reduce_modes(as_covariance(gamma), keep)


def vacuum_mixed(r: float, p: float) -> np.ndarray:
    """Lossless two-mode state mixed with vacuum, weight ``p`` on the entangled part."""
    if not 0.0 <= p <= 1.0:
        raise WeightOutOfRangeError(f"p={p} outside [0, 1]")
    return p * analytic_covariance("two_mode_epr", r, 1.0) + (1.0 - p) * VACUUM_VARIANCE * np.eye(4)


R_UNDETECTED = math.atanh(0.5)  # arccoth(2)


def p_max_threshold(r: float) -> float:
    """Largest mixing weight for which the witnesses miss the entanglement.

    Zero for ``|r| <= arccoth(2)``, approaching 1 as ``|r|`` grows.
    """
    r = abs(float(r))
    if r <= R_UNDETECTED:
        return 0.0
    coth = 1.0 / math.tanh(r)
    return min(max(0.5 * (2.0 - coth) * (1.0 + coth), 0.0), 1.0)

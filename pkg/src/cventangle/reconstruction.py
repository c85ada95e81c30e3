"""Covariance matrices from measured quadrature variances.

Off-diagonal entries follow from single and pair variances::

    G_ij =  (Var(r_i + r_j) - Var(r_i) - Var(r_j)) / 2
    G_ij = -(Var(r_i - r_j) - Var(r_i) - Var(r_j)) / 2

Either sign may be supplied; when both are present they are averaged after a
consistency check. Repeated record sets give elementwise means and sample
standard deviations (``ddof=1``).

Measurement CSV columns are ``kind,i,j,sign,value`` with one-based quadrature
indices in ``x1,p1,...`` order, ``kind`` in ``{single, pair}`` and ``sign`` in
``{+, -, na}``. A manifest is a text file listing one CSV path per line,
relative to the manifest; blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .criteria import SearchConfig, evaluate
from .errors import (
    IndexOutOfRangeError,
    InconsistentPairError,
    NegativeVarianceError,
    ShapeMismatchError,
)
from .symplectic import as_covariance, check_physical

CONSISTENCY_TOL = 0.10
SIGNS = ("+", "-")


@dataclass
class MeasurementRecord:
    """Single variances for all ``2N`` quadratures and signed pair variances.

    ``pairs`` maps a zero-based pair ``(i, j)`` with ``i < j`` to a dict keyed
    by ``"+"`` and/or ``"-"``.
    """

    n_modes: int
    single: np.ndarray
    pairs: dict = field(default_factory=dict)

    def __post_init__(self):
        self.single = np.asarray(self.single, dtype=float)
        d = 2 * self.n_modes
        if self.single.shape != (d,):
            raise ShapeMismatchError(f"need {d} single variances, got {self.single.shape}")
        clean = {}
        for (i, j), by_sign in self.pairs.items():
            i, j = int(i), int(j)
            if i == j or not (0 <= i < d and 0 <= j < d):
                raise IndexOutOfRangeError(f"invalid quadrature pair ({i}, {j}) for {d} quadratures")
            key = (min(i, j), max(i, j))
            for s in by_sign:
                if s not in SIGNS:
                    raise ValueError(f"pair sign must be '+' or '-', got {s!r}")
            clean.setdefault(key, {}).update({s: float(v) for s, v in by_sign.items()})
        self.pairs = clean
        bad = [v for v in self.single if not v > 0]
        bad += [v for by in self.pairs.values() for v in by.values() if not v > 0]
        if bad:
            raise NegativeVarianceError(f"variances must be positive, got {bad[:3]}")

    def missing_pairs(self) -> list:
        d = 2 * self.n_modes
        return [(i, j) for i in range(d) for j in range(i + 1, d) if (i, j) not in self.pairs]


@dataclass
class Reconstruction:
    gamma: np.ndarray
    missing: list
    physical: bool
    margin: float


def synthesize_record(gamma, signs=("+",)) -> MeasurementRecord:
    """Exact variances a measurement of ``gamma`` would return."""
    g = as_covariance(gamma)
    d = g.shape[0]
    diag = np.diag(g).copy()
    pairs = {}
    for i in range(d):
        for j in range(i + 1, d):
            by = {}
            if "+" in signs:
                by["+"] = diag[i] + diag[j] + 2.0 * g[i, j]
            if "-" in signs:
                by["-"] = diag[i] + diag[j] - 2.0 * g[i, j]
            pairs[(i, j)] = by
    return MeasurementRecord(d // 2, diag, pairs)


def reconstruct(record: MeasurementRecord, consistency: float = CONSISTENCY_TOL) -> Reconstruction:
    """Rebuild the covariance matrix of one record.

    Entries without pair data are set to zero and listed in ``missing`` (a
    ``RuntimeWarning`` is issued). When both signs are given their estimates
    must agree within ``consistency`` relative to ``sqrt(G_ii G_jj)``.
    Physicality is reported, not enforced.
    """
    v = record.single
    g = np.diag(v).astype(float)
    for (i, j), by in record.pairs.items():
        est = []
        if "+" in by:
            est.append(0.5 * (by["+"] - v[i] - v[j]))
        if "-" in by:
            est.append(-0.5 * (by["-"] - v[i] - v[j]))
        if len(est) == 2 and abs(est[0] - est[1]) > consistency * np.sqrt(v[i] * v[j]):
            raise InconsistentPairError(
                f"pair ({i + 1}, {j + 1}): sum gives {est[0]:.6g}, difference gives {est[1]:.6g}"
            )
        g[i, j] = g[j, i] = float(np.mean(est))
    missing = record.missing_pairs()
    if missing:
        warnings.warn(f"{len(missing)} quadrature pair(s) unmeasured; entries set to 0", RuntimeWarning, stacklevel=2)
    report = check_physical(g)
    if not report.physical:
        warnings.warn(f"reconstructed matrix is unphysical (margin {report.margin:.3e})", RuntimeWarning, stacklevel=2)
    return Reconstruction(g, missing, report.physical, report.margin)


@dataclass
class Aggregate:
    mean: np.ndarray
    std: np.ndarray
    gammas: list


def aggregate(records) -> Aggregate:
    """Elementwise mean and sample standard deviation over repeated records."""
    gammas = [r.gamma if isinstance(r, Reconstruction) else reconstruct(r).gamma for r in records]
    if not gammas:
        raise ShapeMismatchError("need at least one record")
    shapes = {g.shape for g in gammas}
    if len(shapes) != 1:
        raise ShapeMismatchError(f"records have different shapes {sorted(shapes)}")
    stack = np.stack(gammas)
    std = stack.std(axis=0, ddof=1) if len(gammas) > 1 else np.zeros_like(stack[0])
    return Aggregate(stack.mean(axis=0), std, gammas)


def criterion_spread(gammas, partition, criterion: str, search: SearchConfig | None = None):
    """Criterion on each matrix; returns ``(mean, std, values)`` with ``ddof=1``."""
    vals = np.array([evaluate(g, partition, criterion, search).value for g in gammas])
    std = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
    return float(vals.mean()), std, vals


# -- CSV ----------------------------------------------------------------------

_SIGN_IN = {"+": "+", "-": "-", "−": "-", "na": None, "": None}


def write_record_csv(path, record: MeasurementRecord) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kind", "i", "j", "sign", "value"])
        for i, v in enumerate(record.single):
            w.writerow(["single", i + 1, i + 1, "na", repr(float(v))])
        for (i, j), by in sorted(record.pairs.items()):
            for s in SIGNS:
                if s in by:
                    w.writerow(["pair", i + 1, j + 1, s, repr(float(by[s]))])


def read_record_csv(path, n_modes: int | None = None) -> MeasurementRecord:
    singles, pairs = {}, {}
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if rows and rows[0] and rows[0][0].strip().lower() == "kind":
        rows = rows[1:]
    for line, row in enumerate(rows, start=2):
        if not row or row[0].startswith("#"):
            continue
        try:
            kind, i, j, sign, value = (c.strip() for c in row)
            i, j, value = int(i) - 1, int(j) - 1, float(value)
        except ValueError as exc:
            raise ValueError(f"{path}: line {line}: {exc}") from None
        if kind == "single":
            singles[i] = value
        elif kind == "pair":
            s = _SIGN_IN.get(sign)
            if s is None:
                raise ValueError(f"{path}: line {line}: pair rows need sign '+' or '-'")
            pairs.setdefault((i, j), {})[s] = value
        else:
            raise ValueError(f"{path}: line {line}: unknown kind {kind!r}")
    d = 2 * n_modes if n_modes else max(singles, default=-1) + 1
    if sorted(singles) != list(range(d)) or d % 2:
        raise ShapeMismatchError(f"{path}: single variances must cover quadratures 1..{d} of an even count")
    return MeasurementRecord(d // 2, np.array([singles[k] for k in range(d)]), pairs)


def read_manifest(path) -> list:
    base = Path(path).parent
    out = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(base / line)
    return out

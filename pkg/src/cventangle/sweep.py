"""Parameter sweeps over states, reductions, partitions and criteria.

A :class:`SweepSpec` (JSON or TOML) names a state template, one swept
variable (``eta_A``, ``eta_multi``, ``p`` or ``r``) with a linear grid, the
reduced subsystems and partitions to analyse, and the criteria to run.
:func:`run_sweep` returns flat rows that :func:`write_table` emits as CSV or
JSON.

:func:`build_summary` condenses loss sweeps of the two-, three- and four-mode
states and all their reduced states into one verdict row per partition.
"""

from __future__ import annotations

import itertools
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .criteria import CRITERIA, SearchConfig, evaluate
from .errors import ConfigError, IncompleteScopeError
from .partitions import LETTERS, enumerate_partitions, parse_partition
from .states import FAMILY_MODES, R_PAPER, StateSpec, reduce
from .transitions import detection_threshold, optimal_direction_trace

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

FORMAT_VERSION = "cventangle-sweep/1"
VARIABLES = ("eta_A", "eta_multi", "p", "r")
FULL = "full"


def fmt(x) -> str:
    """Floats with 12 significant digits; booleans as lowercase words."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def modes_label(modes) -> str:
    return "".join(LETTERS[m] for m in modes)


def parse_modes(text: str, n_modes: int) -> tuple:
    text = text.strip().upper()
    if text in ("", FULL.upper()):
        return tuple(range(n_modes))
    modes = []
    for c in text:
        if c not in LETTERS[:n_modes]:
            raise ConfigError(f"mode {c!r} not among {LETTERS[:n_modes]}", field="reductions")
        modes.append(LETTERS.index(c))
    if len(set(modes)) != len(modes):
        raise ConfigError(f"repeated mode in {text!r}", field="reductions")
    return tuple(sorted(modes))


@dataclass
class SweepSpec:
    state: StateSpec
    variable: str = "eta_A"
    grid: tuple = (0.0, 1.0, 101)
    #: Modes whose transmission follows the grid when ``variable == "eta_multi"``.
    lossy_modes: tuple = ()
    partitions: object = "all"
    reductions: tuple = (FULL,)
    criteria: tuple = CRITERIA
    search: SearchConfig = field(default_factory=SearchConfig)
    output: str | None = None
    format: str = "csv"
    workers: int = 1

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise ConfigError(f"sweep variable must be one of {VARIABLES}", field="variable")
        start, stop, points = self.grid
        if int(points) < 1 or (int(points) > 1 and start == stop):
            raise ConfigError("grid needs points >= 1 and start != stop", field="grid")
        self.grid = (float(start), float(stop), int(points))
        if self.variable == "p" and self.state.family != "vacuum_mixed_epr":
            raise ConfigError("sweeping p needs the vacuum_mixed_epr family", field="variable")
        if self.variable in ("eta_A", "eta_multi", "p") and not (0 <= min(start, stop) and max(start, stop) <= 1):
            raise ConfigError(f"{self.variable} grid must lie in [0, 1]", field="grid")
        bad = [c for c in self.criteria if c not in CRITERIA]
        if bad:
            raise ConfigError(f"unknown criteria {bad}; choose from {CRITERIA}", field="criteria")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json", field="format")
        n = self.state.n_modes
        self.lossy_modes = tuple(self.lossy_modes) or tuple(range(n))
        if isinstance(self.reductions, str):
            self.reductions = (self.reductions,)
        self.reductions = tuple(self.reductions)
        for red in self.subsystems():
            for p in self.partitions_for(red):
                if p.modes != red:
                    raise ConfigError(f"partition {p} does not match subsystem {modes_label(red)}", field="partitions")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(*self.grid)

    def subsystems(self) -> list:
        n = self.state.n_modes
        if self.reductions == ("all",):
            return [tuple(c) for k in range(n, 1, -1) for c in itertools.combinations(range(n), k)]
        return [parse_modes(r, n) for r in self.reductions]

    def partitions_for(self, modes: tuple) -> list:
        spec = self.partitions
        if spec == "all":
            return [p.relabel(modes) for p in enumerate_partitions(len(modes))]
        if isinstance(spec, dict):
            if set(spec) != {"class"}:
                raise ConfigError("partition filter must be {'class': [...]}", field="partitions")
            return [p.relabel(modes) for p in enumerate_partitions(len(modes), spec["class"])]
        if isinstance(spec, str):
            spec = [spec]
        try:
            return [parse_partition(s) for s in spec]
        except Exception as exc:
            raise ConfigError(str(exc), field="partitions") from None

    def state_at(self, value: float) -> StateSpec:
        s = self.state
        if self.variable == "eta_A":
            return replace(s, eta=(value,) + tuple(s.eta[1:]))
        if self.variable == "eta_multi":
            return replace(s, eta=tuple(value if k in self.lossy_modes else e for k, e in enumerate(s.eta)))
        if self.variable == "p":
            return replace(s, p=value)
        return replace(s, r=value)

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        data = dict(data)
        known = {"state", "sweep", "partitions", "reductions", "criteria", "search", "output", "format", "workers"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown keys {sorted(unknown)}", field=sorted(unknown)[0])
        if "state" not in data:
            raise ConfigError("missing [state] block", field="state")
        kw = {"state": StateSpec.from_dict(data["state"])}
        sweep = dict(data.get("sweep", {}))
        if sweep:
            unknown = set(sweep) - {"variable", "start", "stop", "points", "modes"}
            if unknown:
                raise ConfigError(f"unknown sweep keys {sorted(unknown)}", field=sorted(unknown)[0])
            kw["variable"] = sweep.get("variable", "eta_A")
            kw["grid"] = (sweep.get("start", 0.0), sweep.get("stop", 1.0), sweep.get("points", 101))
            if "modes" in sweep:
                kw["lossy_modes"] = parse_modes(sweep["modes"], kw["state"].n_modes)
        for key in ("partitions", "output", "format", "workers"):
            if key in data:
                kw[key] = data[key]
        if "reductions" in data:
            kw["reductions"] = data["reductions"]
        if "criteria" in data:
            kw["criteria"] = tuple(data["criteria"])
        if "search" in data:
            kw["search"] = SearchConfig.from_dict(data["search"])
        return cls(**kw)


def _line_of(text: str, key: str):
    pat = re.compile(r'(^|[\s{,"])' + re.escape(key) + r'("?\s*[:=])')
    for k, line in enumerate(text.splitlines(), start=1):
        if pat.search(line):
            return k
    return None


def load_sweep_spec(path) -> SweepSpec:
    """Read a JSON or TOML sweep file; errors carry line and field information."""
    path = Path(path)
    text = path.read_text()
    try:
        if path.suffix.lower() == ".toml":
            data = tomllib.loads(text)
        else:
            data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path.name}: {exc.msg}", line=exc.lineno) from None
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError(f"{path.name}: {exc}", line=int(m.group(1)) if m else None) from None
    try:
        return SweepSpec.from_dict(data)
    except ConfigError as exc:
        if exc.line is None and exc.field:
            raise ConfigError(exc.message, field=exc.field, line=_line_of(text, exc.field)) from None
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path.name}: {exc}") from None


# -- running --------------------------------------------------------------------


def _task(args):
    spec, value, modes, partition, criterion = args
    gamma = reduce(spec.state_at(value).covariance(), modes)
    local = partition.localize(modes)
    res = evaluate(gamma, local, criterion, spec.search)
    return res.value, res.entangled, res.optimal_direction


def run_sweep(spec: SweepSpec) -> list:
    """Evaluate every (grid value, subsystem, partition, criterion).

    Rows come back in grid, subsystem, partition, criterion order regardless
    of the number of workers. PPT is skipped for partitions with more than two
    blocks.
    """
    tasks = []
    for value in spec.values:
        for modes in spec.subsystems():
            for p in spec.partitions_for(modes):
                for c in spec.criteria:
                    if c == "ppt" and p.n_blocks != 2:
                        continue
                    tasks.append((spec, float(value), modes, p, c))
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            results = list(pool.map(_task, tasks, chunksize=8))
    else:
        results = [_task(t) for t in tasks]
    rows = []
    for (_, value, modes, p, c), (val, ent, d) in zip(tasks, results):
        rows.append(
            {
                "sweep_value": value,
                "reduction": modes_label(modes),
                "partition": str(p),
                "criterion": c,
                "value": val,
                "entangled": bool(ent),
                "direction": None if d is None else [float(x) for x in d],
            }
        )
    return rows


def write_table(rows: list, path=None, fmt_name: str = "csv", variable: str = "value") -> str:
    """Serialize sweep rows; returns the text and writes it when ``path`` is set."""
    if fmt_name == "json":
        text = json.dumps({"format": FORMAT_VERSION, "variable": variable, "rows": rows}, indent=1) + "\n"
    else:
        width = max((len(r["direction"]) for r in rows if r["direction"] is not None), default=0)
        head = ["sweep_value", "reduction", "partition", "criterion", "value", "entangled"]
        head += [f"g{k + 1}" for k in range(width)]
        lines = [f"# {FORMAT_VERSION} variable={variable}", ",".join(head)]
        for r in rows:
            d = r["direction"] or []
            cells = [fmt(r["sweep_value"]), r["reduction"], r["partition"], r["criterion"], fmt(r["value"]), fmt(r["entangled"])]
            cells += [fmt(x) for x in d] + [""] * (width - len(d))
            lines.append(",".join(cells))
        text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


# -- summary table ----------------------------------------------------------------


def paper_scope() -> list:
    """(state label, family, kept modes) for every state in the summary."""
    scope = [("EPR", "two_mode_epr", (0, 1)), ("GHZ", "ghz3", (0, 1, 2))]
    scope += [("GHZ", "ghz3", m) for m in itertools.combinations(range(3), 2)]
    scope += [("Cluster", "cluster4", (0, 1, 2, 3))]
    scope += [("Cluster", "cluster4", m) for m in itertools.combinations(range(4), 3)]
    scope += [("Cluster", "cluster4", m) for m in itertools.combinations(range(4), 2)]
    return scope


def scope_keys() -> list:
    keys = []
    for label, _, modes in paper_scope():
        for p in enumerate_partitions(len(modes)):
            keys.append((label, modes_label(modes), str(p.relabel(modes))))
    return keys


@dataclass
class SummaryRow:
    state: str
    reduction: str
    partition: str
    qfi: str
    squeezing: str
    ppt: str
    disc: str
    #: Loss threshold above which squeezing detects, when it exists.
    threshold: float | None = None

    @property
    def detected(self) -> str:
        """Combined witness column: ``"yes"`` or ``"qfi / squeezing"`` when they differ."""
        return self.qfi if self.qfi == self.squeezing else f"{self.qfi} / {self.squeezing}"

    def as_dict(self) -> dict:
        return {
            "state": self.state,
            "reduction": self.reduction,
            "partition": self.partition,
            "qfi": self.qfi,
            "squeezing": self.squeezing,
            "detected": self.detected,
            "ppt": self.ppt,
            "disc": self.disc,
            "threshold": self.threshold,
        }


@dataclass
class RowData:
    """Everything :func:`build_summary` needs for one (state, subsystem, partition)."""

    state: str
    reduction: str
    partition: str
    etas: np.ndarray
    verdicts: dict
    thresholds: dict
    discontinuous: bool


def _verdict(etas, detected, thr) -> str:
    live = detected[etas > 0]
    if live.all():
        return "yes"
    if not live.any():
        return "no"
    if thr is not None:
        return f"eta>{thr:.3f}"
    return "partial"


def _upper_threshold(etas, detected, state_at, partition, criterion, search):
    """Bisected onset when detection holds exactly on an upper tail of the grid."""
    mask = etas > 0
    e, d = etas[mask], detected[mask]
    if d.all() or not d.any():
        return None
    first = int(np.argmax(d))
    if not d[first:].all():
        return None
    return detection_threshold(state_at, partition, criterion, float(e[first - 1]), float(e[first]), search=search)


def collect_row(label, family, modes, partition, r=R_PAPER, etas=None, search=None) -> RowData:
    etas = np.linspace(0.0, 1.0, 101) if etas is None else np.asarray(etas, dtype=float)
    n = FAMILY_MODES[family]

    def state_at(eta):
        return reduce(StateSpec(family, r=r, eta=(eta,) + (1.0,) * (n - 1)).covariance(), modes)

    local = partition.localize(modes)
    verdicts, thresholds, disc = {}, {}, False
    for c in ("qfi_witness", "squeezing"):
        trace = optimal_direction_trace(state_at, etas, local, c, search)
        det = np.array([p.entangled for p in trace.points])
        thr = _upper_threshold(etas, det, state_at, local, c, search)
        verdicts[c] = det
        thresholds[c] = thr
        disc = disc or trace.discontinuous
    if local.n_blocks == 2:
        verdicts["ppt"] = np.array([evaluate(state_at(e), local, "ppt").entangled for e in etas])
        thresholds["ppt"] = _upper_threshold(etas, verdicts["ppt"], state_at, local, "ppt", search)
    return RowData(label, modes_label(modes), str(partition), etas, verdicts, thresholds, disc)


def collect_summary(r: float = R_PAPER, etas=None, search=None, workers: int = 1) -> list:
    jobs = []
    for label, family, modes in paper_scope():
        for p in enumerate_partitions(len(modes)):
            jobs.append((label, family, modes, p.relabel(modes), r, etas, search))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_collect_job, jobs))
    return [_collect_job(j) for j in jobs]


def _collect_job(job):
    return collect_row(*job)


def build_summary(data: list) -> list:
    """One :class:`SummaryRow` per partition of the summary scope.

    Raises
    ------
    IncompleteScopeError
        When ``data`` lacks any (state, subsystem, partition) of the scope.
    """
    have = {(d.state, d.reduction, d.partition): d for d in data}
    missing = [k for k in scope_keys() if k not in have]
    if missing:
        raise IncompleteScopeError(missing)
    rows = []
    for key in scope_keys():
        d = have[key]
        v = {c: _verdict(d.etas, det, d.thresholds.get(c)) for c, det in d.verdicts.items()}
        ppt = v.get("ppt", "N.A.")
        if d.discontinuous:
            disc = "yes"
        elif v["qfi_witness"] == "yes" and v["squeezing"].startswith("eta>"):
            disc = "no*"
        else:
            disc = "no"
        thr = d.thresholds.get("squeezing") if v["squeezing"].startswith("eta>") else None
        rows.append(SummaryRow(d.state, d.reduction, d.partition, v["qfi_witness"], v["squeezing"], ppt, disc, thr))
    return rows


def summary_table(rows: list, fmt_name: str = "csv") -> str:
    if fmt_name == "json":
        return json.dumps({"format": FORMAT_VERSION, "rows": [r.as_dict() for r in rows]}, indent=1) + "\n"
    head = ["state", "reduction", "partition", "qfi", "squeezing", "detected", "ppt", "disc", "threshold"]
    lines = [f"# {FORMAT_VERSION} summary", ",".join(head)]
    for r in rows:
        d = r.as_dict()
        d["threshold"] = "" if r.threshold is None else fmt(r.threshold)
        lines.append(",".join(str(d[h]) for h in head))
    return "\n".join(lines) + "\n"

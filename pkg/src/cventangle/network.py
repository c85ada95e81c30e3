"""Symplectic circuits acting on the multi-mode vacuum.

Element conventions (mode indices are zero-based in Python, one-based in
JSON):

* ``squeeze_x`` on mode k: ``diag(e^{-r}, e^{r})`` on that mode's block;
* ``squeeze_p``: ``diag(e^{r}, e^{-r})``;
* ``beam_splitter`` with transmissivity ``T`` on ``(i, j)``:
  ``[[sqrt(T) I, sqrt(1-T) I], [-sqrt(1-T) I, sqrt(T) I]]``;
* ``phase_shift`` by ``phi``: ``[[cos, sin], [-sin, cos]]``;
* ``loss`` with transmission ``eta``: ``X = sqrt(eta) I``, ``Y = (1-eta)/2 I``
  (not symplectic).

The recipes shipped in ``cventangle/recipes`` fix beam-splitter orientation
and phase shifts so that the lossless outputs equal the closed forms in
:mod:`cventangle.states` exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import InvalidElementError
from .symplectic import VACUUM_VARIANCE, vacuum

KINDS = ("squeeze_x", "squeeze_p", "beam_splitter", "phase_shift", "loss")
RECIPES = ("two_mode_epr", "ghz3", "cluster4")


@dataclass(frozen=True)
class CircuitElement:
    kind: str
    modes: tuple
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidElementError(f"unknown element kind {self.kind!r}")
        modes = tuple(int(m) for m in self.modes)
        object.__setattr__(self, "modes", modes)
        want = 2 if self.kind == "beam_splitter" else 1
        if len(modes) != want:
            raise InvalidElementError(f"{self.kind} acts on {want} mode(s), got {modes}")
        if want == 2 and modes[0] == modes[1]:
            raise InvalidElementError(f"beam splitter needs two distinct modes, got {modes}")
        if any(m < 0 for m in modes):
            raise InvalidElementError(f"negative mode index in {modes}")
        if not math.isfinite(self.value):
            raise InvalidElementError(f"{self.kind} parameter must be finite")
        if self.kind in ("beam_splitter", "loss") and not 0.0 <= self.value <= 1.0:
            raise InvalidElementError(f"{self.kind} parameter {self.value} outside [0, 1]")

    @property
    def is_symplectic(self) -> bool:
        return self.kind != "loss"

    # JSON uses one-based modes and kind-specific parameter names.
    _PARAM = {"squeeze_x": "r", "squeeze_p": "r", "beam_splitter": "T", "phase_shift": "phi", "loss": "eta"}

    @classmethod
    def from_dict(cls, data: dict, parameters: dict | None = None) -> "CircuitElement":
        kind = data.get("kind")
        if kind not in KINDS:
            raise InvalidElementError(f"unknown element kind {kind!r}")
        if "modes" in data:
            modes = tuple(int(m) - 1 for m in data["modes"])
        elif "mode" in data:
            modes = (int(data["mode"]) - 1,)
        else:
            raise InvalidElementError(f"{kind} element needs 'mode' or 'modes'")
        key = cls._PARAM[kind]
        if key not in data:
            raise InvalidElementError(f"{kind} element needs parameter {key!r}")
        value = data[key]
        if isinstance(value, str) and value.startswith("$"):
            name = value[1:]
            if not parameters or name not in parameters:
                raise InvalidElementError(f"unbound parameter {value!r}")
            value = parameters[name]
        return cls(kind, modes, float(value))

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if len(self.modes) == 1:
            out["mode"] = self.modes[0] + 1
        else:
            out["modes"] = [m + 1 for m in self.modes]
        out[self._PARAM[self.kind]] = self.value
        return out


@dataclass
class GaussianCircuit:
    n_modes: int
    elements: list = field(default_factory=list)

    def __post_init__(self):
        if self.n_modes < 1:
            raise InvalidElementError("circuit needs at least one mode")
        for e in self.elements:
            if max(e.modes) >= self.n_modes:
                raise InvalidElementError(f"{e.kind} on modes {e.modes} exceeds {self.n_modes} modes")

    @classmethod
    def from_dict(cls, data: dict, **overrides) -> "GaussianCircuit":
        params = dict(data.get("parameters", {}))
        params.update(overrides)
        elements = [CircuitElement.from_dict(e, params) for e in data.get("elements", [])]
        return cls(int(data["n_modes"]), elements)

    def to_dict(self) -> dict:
        return {"n_modes": self.n_modes, "elements": [e.to_dict() for e in self.elements]}

    @property
    def lossless(self) -> bool:
        return all(e.is_symplectic for e in self.elements)


def element_symplectic(e: CircuitElement, n_modes: int):
    """Return ``(X, Y)`` for one element; ``Y`` is ``None`` for symplectic ones."""
    if max(e.modes) >= n_modes:
        raise InvalidElementError(f"{e.kind} on modes {e.modes} exceeds {n_modes} modes")
    d = 2 * n_modes
    s = np.eye(d)
    k = e.modes[0]
    blk = slice(2 * k, 2 * k + 2)
    if e.kind == "squeeze_x":
        s[blk, blk] = np.diag([math.exp(-e.value), math.exp(e.value)])
    elif e.kind == "squeeze_p":
        s[blk, blk] = np.diag([math.exp(e.value), math.exp(-e.value)])
    elif e.kind == "phase_shift":
        c, sn = math.cos(e.value), math.sin(e.value)
        s[blk, blk] = [[c, sn], [-sn, c]]
    elif e.kind == "beam_splitter":
        i, j = e.modes
        t, u = math.sqrt(e.value), math.sqrt(1.0 - e.value)
        bi, bj = slice(2 * i, 2 * i + 2), slice(2 * j, 2 * j + 2)
        s[bi, bi] = t * np.eye(2)
        s[bi, bj] = u * np.eye(2)
        s[bj, bi] = -u * np.eye(2)
        s[bj, bj] = t * np.eye(2)
    else:  # loss
        s[blk, blk] = math.sqrt(e.value) * np.eye(2)
        y = np.zeros((d, d))
        y[blk, blk] = (1.0 - e.value) * VACUUM_VARIANCE * np.eye(2)
        return s, y
    return s, None


def run_circuit(circuit: GaussianCircuit) -> np.ndarray:
    """Covariance matrix produced by ``circuit`` acting on the vacuum."""
    gamma = vacuum(circuit.n_modes)
    for e in circuit.elements:
        x, y = element_symplectic(e, circuit.n_modes)
        gamma = x @ gamma @ x.T
        if y is not None:
            gamma = gamma + y
    return 0.5 * (gamma + gamma.T)


def circuit_symplectic(circuit: GaussianCircuit) -> np.ndarray:
    """Total symplectic matrix of a lossless circuit."""
    if not circuit.lossless:
        raise InvalidElementError("circuit contains loss; it has no single symplectic matrix")
    total = np.eye(2 * circuit.n_modes)
    for e in circuit.elements:
        total = element_symplectic(e, circuit.n_modes)[0] @ total
    return total


def load_circuit(path, **parameters) -> GaussianCircuit:
    return GaussianCircuit.from_dict(json.loads(Path(path).read_text()), **parameters)


def recipe(name: str, r: float | None = None, eta_a: float | None = None) -> GaussianCircuit:
    """Shipped preparation circuit for ``two_mode_epr``, ``ghz3`` or ``cluster4``.

    ``eta_a`` appends a loss element on mode A.
    """
    if name not in RECIPES:
        raise InvalidElementError(f"no recipe named {name!r}; available: {RECIPES}")
    text = resources.files("cventangle.recipes").joinpath(f"{name}.json").read_text()
    overrides = {} if r is None else {"r": r}
    circuit = GaussianCircuit.from_dict(json.loads(text), **overrides)
    if eta_a is not None:
        circuit.elements.append(CircuitElement("loss", (0,), eta_a))
    return circuit

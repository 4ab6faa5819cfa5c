"""Run configuration: JSON in, validated dataclass out.

A config is one human-editable JSON document.  All energies and rates are
in units of gamma.  Validation aggregates every complaint into a single
error instead of failing on the first.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from importlib import resources

from .lattice import ModelParams, geometry_from_size

ENV_OUTPUT_DIR = "CATLATTICE_OUTDIR"

_SOLVER_METHODS = ("auto", "direct", "eigen", "time", "corner")


@dataclass
class SolverConfig:
    method: str = "auto"
    tol: float = 1e-10
    exact_dim_cap: int = 130     # largest Hilbert dimension solved exactly
    time_t_final: float = 60.0
    seed: int = 7

    def to_dict(self):
        return {"method": self.method, "tol": self.tol,
                "exact_dim_cap": self.exact_dim_cap,
                "time_t_final": self.time_t_final, "seed": self.seed}


@dataclass
class CornerConfig:
    m_list: list = field(default_factory=lambda: [32, 48, 64])
    leaf_sites_max: int = 2
    drift_tol: float = 1e-3

    def to_dict(self):
        return {"m_list": list(self.m_list),
                "leaf_sites_max": self.leaf_sites_max,
                "drift_tol": self.drift_tol}


@dataclass
class RunConfig:
    label: str
    u: float
    j_hop: float
    sizes: list                  # size specs: int, "LxL", or [lx, ly]
    n_max: int
    g_values: list
    gamma: float = 1.0
    eta: float | None = None     # None -> resonant convention eta = gamma
    delta: float | None = None   # None -> resonant convention delta = -|J|
    resonant_convention: bool = True
    solver: SolverConfig = field(default_factory=SolverConfig)
    corner: CornerConfig = field(default_factory=CornerConfig)
    output_dir: str | None = None

    # -- construction ------------------------------------------------

    @classmethod
    def from_dict(cls, d):
        errors = []
        required = ("label", "u", "j_hop", "sizes", "n_max", "g_values")
        for key in required:
            if key not in d:
                errors.append("missing required field '%s'" % key)
        known = set(required) | {
            "gamma", "eta", "delta", "resonant_convention", "solver", "corner",
            "output_dir",
        }
        for key in d:
            if key not in known:
                errors.append("unknown field '%s'" % key)
        if errors:
            raise ConfigError(errors)

        solver = SolverConfig(**d.get("solver", {}))
        corner = CornerConfig(**d.get("corner", {}))
        cfg = cls(
            label=str(d["label"]),
            u=float(d["u"]),
            j_hop=float(d["j_hop"]),
            sizes=list(d["sizes"]),
            n_max=int(d["n_max"]),
            g_values=[float(g) for g in d["g_values"]],
            gamma=float(d.get("gamma", 1.0)),
            eta=None if d.get("eta") is None else float(d["eta"]),
            delta=None if d.get("delta") is None else float(d["delta"]),
            resonant_convention=bool(d.get("resonant_convention", True)),
            solver=solver,
            corner=corner,
            output_dir=d.get("output_dir"),
        )
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def validate(self):
        errors = []
        if self.gamma <= 0:
            errors.append("gamma must be > 0")
        if self.u < 0:
            errors.append("u must be >= 0")
        if self.eta is not None and self.eta < 0:
            errors.append("eta must be >= 0")
        if self.n_max < 1:
            errors.append("n_max must be >= 1")
        if not self.g_values:
            errors.append("g_values is empty")
        if any(g < 0 for g in self.g_values):
            errors.append("g_values must be >= 0 (real drive amplitudes)")
        if len(set(self.g_values)) != len(self.g_values):
            errors.append("g_values contains duplicates")
        if not self.sizes:
            errors.append("sizes is empty")
        for s in self.sizes:
            try:
                geometry_from_size(s if not isinstance(s, list) else tuple(s))
            except (ValueError, TypeError) as e:
                errors.append("bad size %r: %s" % (s, e))
        if self.solver.method not in _SOLVER_METHODS:
            errors.append("solver.method must be one of %s"
                          % (_SOLVER_METHODS,))
        if self.solver.tol <= 0:
            errors.append("solver.tol must be > 0")
        if not self.corner.m_list or any(m < 1 for m in self.corner.m_list):
            errors.append("corner.m_list must be nonempty positive")
        if sorted(self.corner.m_list) != list(self.corner.m_list):
            errors.append("corner.m_list must be ascending")
        if not self.resonant_convention and self.delta is None:
            errors.append("delta is required when resonant_convention is off")
        if errors:
            raise ConfigError(errors)

    # -- derived views -----------------------------------------------

    def effective_delta(self):
        if self.resonant_convention or self.delta is None:
            return -abs(self.j_hop)
        return self.delta

    def effective_eta(self):
        if self.resonant_convention or self.eta is None:
            return self.gamma
        return self.eta

    def model_params(self, g):
        return ModelParams(delta=self.effective_delta(), u=self.u, g=g,
                           j_hop=self.j_hop, gamma=self.gamma,
                           eta=self.effective_eta())

    def geometries(self):
        out = []
        for s in self.sizes:
            out.append(geometry_from_size(tuple(s) if isinstance(s, list)
                                          else s))
        return out

    def resolved_output_dir(self):
        if self.output_dir:
            return self.output_dir
        return os.environ.get(ENV_OUTPUT_DIR, os.path.join(".", "runs"))

    def to_dict(self):
        return {
            "label": self.label,
            "u": self.u,
            "j_hop": self.j_hop,
            "sizes": self.sizes,
            "n_max": self.n_max,
            "g_values": list(self.g_values),
            "gamma": self.gamma,
            "eta": self.eta,
            "delta": self.delta,
            "resonant_convention": self.resonant_convention,
            "solver": self.solver.to_dict(),
            "corner": self.corner.to_dict(),
            "output_dir": self.output_dir,
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    def config_hash(self):
        """Hash of the per-point physics: model parameters, truncation and
        solver controls.  Paths, label and the sweep schedule (sizes,
        g_values) do not enter, so a moved store still resumes and a grid
        can be extended without recomputing the points already done."""
        d = self.to_dict()
        for key in ("output_dir", "label", "sizes", "g_values"):
            d.pop(key)
        text = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


class ConfigError(ValueError):
    """All validation complaints for a config, aggregated."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid config:\n  - " + "\n  - ".join(self.problems))


def preset_names():
    pkg = resources.files("catlattice") / "presets"
    return sorted(p.name[:-5] for p in pkg.iterdir()
                  if p.name.endswith(".json"))


def load_preset(name):
    pkg = resources.files("catlattice") / "presets"
    path = pkg / (name + ".json")
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise KeyError("unknown preset %r; available: %s"
                       % (name, ", ".join(preset_names())))
    return RunConfig.from_dict(json.loads(text))

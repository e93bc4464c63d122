"""Physical and experiment configuration types, units and validation.

All config-facing frequencies and rates are ordinary frequencies in MHz;
``validate_params`` is the single boundary where the angular (rad/us)
view is derived. Types are immutable values after construction and safe
to share across parallel sweep workers.
"""

import json
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DispersiveRegimeWarning, ParseError, ValidationError
from .units import to_angular


@dataclass(frozen=True)
class AngularParams:
    """SystemParams converted to angular units (rad/us)."""

    omega_q: float
    omega_c: float
    alpha: float
    kerr_c: float
    chi: float
    kappa_q: float
    kappa_c: float
    kappa_d: float


@dataclass(frozen=True)
class SystemParams:
    """Device constants in MHz: mode frequencies, nonlinearities, decay rates.

    omega_q, omega_c : qubit / cavity mode frequencies
    alpha            : qubit anharmonicity (positive by convention)
    kerr_c           : cavity self-Kerr
    chi              : dispersive shift
    kappa_q/c/d      : qubit decay, cavity decay, qubit dephasing rates
    """

    omega_q: float
    omega_c: float
    alpha: float
    kerr_c: float
    chi: float
    kappa_q: float = 0.0
    kappa_c: float = 0.0
    kappa_d: float = 0.0

    @cached_property
    def ang(self):
        """Angular-unit view, computed once per validated instance."""
        return AngularParams(
            omega_q=to_angular(self.omega_q),
            omega_c=to_angular(self.omega_c),
            alpha=to_angular(self.alpha),
            kerr_c=to_angular(self.kerr_c),
            chi=to_angular(self.chi),
            kappa_q=to_angular(self.kappa_q),
            kappa_c=to_angular(self.kappa_c),
            kappa_d=to_angular(self.kappa_d),
        )


@dataclass(frozen=True)
class DriveTone:
    """One CW drive tone: target mode, amplitude, detuning from the mode
    frequency, and phase. Amplitude/detuning in MHz, phase in radians."""

    target: str  # "qubit" | "cavity"
    epsilon: float
    detuning: float
    phase: float = 0.0

    @cached_property
    def ang(self):
        return AngularTone(
            target=self.target,
            epsilon=to_angular(self.epsilon),
            detuning=to_angular(self.detuning),
            phase=self.phase,
        )


@dataclass(frozen=True)
class AngularTone:
    target: str
    epsilon: float
    detuning: float
    phase: float


@dataclass(frozen=True)
class HilbertSpec:
    """Truncation dimensions. Anharmonic qubit physics needs n_q >= 3."""

    n_q: int = 4
    n_c: int = 12

    def __post_init__(self):
        if self.n_q < 3:
            raise ValidationError("n_q", "n_q must be >= 3 (anharmonic physics)")
        if self.n_c < 2:
            raise ValidationError("n_c", "n_c must be >= 2")

    @property
    def dim(self):
        return self.n_q * self.n_c


@dataclass(frozen=True)
class SolverOptions:
    """Integrator tolerances and step cap. max_step_ns caps the raw step."""

    rtol: float = 1e-8
    atol: float = 1e-10
    max_step_ns: float = 1000.0

    @property
    def max_step_us(self):
        return self.max_step_ns * 1e-3


@dataclass(frozen=True)
class ExperimentConfig:
    """Full run configuration: system constants, drive tones, truncation,
    solver settings and an optional experiment block."""

    system: SystemParams
    drives: tuple = ()
    hilbert: HilbertSpec = field(default_factory=HilbertSpec)
    solver: SolverOptions = field(default_factory=SolverOptions)
    experiment: dict | None = None


def validate_params(raw):
    """Validate SystemParams and derive the angular view.

    Returns the same record if every invariant holds; raises
    ValidationError naming the first violated field (no partial
    acceptance). chi >= alpha only warns: the model does not require the
    dispersive regime, it just expects it.
    """
    for name in ("omega_q", "omega_c", "alpha"):
        if not getattr(raw, name) > 0:
            raise ValidationError(name, f"{name} must be positive")
    for name in ("kerr_c", "chi", "kappa_q", "kappa_c", "kappa_d"):
        if getattr(raw, name) < 0:
            raise ValidationError(name, f"{name} must be >= 0")
    if not all(np.isfinite(getattr(raw, f)) for f in (
            "omega_q", "omega_c", "alpha", "kerr_c", "chi",
            "kappa_q", "kappa_c", "kappa_d")):
        raise ValidationError("system", "system parameters must be finite")
    if raw.chi >= raw.alpha:
        warnings.warn(
            f"chi = {raw.chi} MHz >= alpha = {raw.alpha} MHz: outside the "
            "dispersive regime", DispersiveRegimeWarning, stacklevel=2)
    raw.ang  # derive angular units once at this boundary
    return raw


def validate_tone(tone, params):
    """Validate one drive tone against the system it drives."""
    if tone.target not in ("qubit", "cavity"):
        raise ValidationError("target", f"unknown drive target {tone.target!r}")
    if tone.epsilon < 0:
        raise ValidationError("epsilon", "drive amplitude must be >= 0")
    if not abs(tone.detuning) < min(params.omega_q, params.omega_c):
        raise ValidationError(
            "detuning",
            "|detuning| must stay below the mode frequencies "
            "(drive frequency must remain positive)")
    if not np.isfinite(tone.phase):
        raise ValidationError("phase", "phase must be finite")
    tone.ang
    return tone


# --------------------------------------------------------------------------
# Config schema (JSON tree). Field names as in the type definitions, with a
# _MHz suffix on frequency/rate fields and phase_rad for phases. Unknown
# keys are rejected to prevent silent unit or parameter typos.
# --------------------------------------------------------------------------

_SYSTEM_KEYS = {
    "omega_q_MHz": "omega_q",
    "omega_c_MHz": "omega_c",
    "alpha_MHz": "alpha",
    "kerr_c_MHz": "kerr_c",
    "chi_MHz": "chi",
    "kappa_q_MHz": "kappa_q",
    "kappa_c_MHz": "kappa_c",
    "kappa_d_MHz": "kappa_d",
}
_SYSTEM_REQUIRED = {"omega_q_MHz", "omega_c_MHz", "alpha_MHz", "kerr_c_MHz", "chi_MHz"}
_DRIVE_KEYS = {
    "target": "target",
    "epsilon_MHz": "epsilon",
    "detuning_MHz": "detuning",
    "phase_rad": "phase",
}
_HILBERT_KEYS = {"n_q": "n_q", "n_c": "n_c"}
_SOLVER_KEYS = {"rtol": "rtol", "atol": "atol", "max_step_ns": "max_step_ns"}
_EXPERIMENT_KEYS = {
    "kind", "axes", "gate_time_us", "initial_state", "target", "photon_index",
    "delta_MHz", "detuning_MHz", "eps_q_MHz", "eps_c_MHz", "nu_corr_MHz",
    "tau_cal_us", "models", "guard_MHz",
}
_EXPERIMENT_KINDS = {"stark_amp", "stark_detuning", "chevron", "beamsplit", "calibrate"}


def _require_mapping(node, path):
    if not isinstance(node, dict):
        raise ParseError(f"expected an object at '{path}'", field=path)


def _reject_unknown(node, allowed, path):
    for key in node:
        if key not in allowed:
            raise ParseError(f"unknown key '{key}'", field=f"{path}.{key}" if path else key)


def _number(node, path):
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ParseError("expected a number", field=path)
    return float(node)


def _expand_axis(node, path):
    """An axis is either an explicit list of values or {start, stop, count}."""
    if isinstance(node, dict):
        _reject_unknown(node, {"start", "stop", "count"}, path)
        for key in ("start", "stop", "count"):
            if key not in node:
                raise ParseError(f"axis needs '{key}'", field=path)
        count = node["count"]
        if isinstance(count, bool) or not isinstance(count, int) or count < 1:
            raise ParseError("axis count must be a positive integer", field=f"{path}.count")
        values = np.linspace(_number(node["start"], path), _number(node["stop"], path), count)
        return tuple(float(v) for v in values)
    if isinstance(node, list):
        return tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(node))
    raise ParseError("axis must be a list or {start, stop, count}", field=path)


def _validate_axis(values, path):
    if len(values) == 0:
        raise ParseError("sweep axis is empty", field=path)
    diffs = np.diff(values)
    if len(values) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ParseError("sweep axis must be strictly monotone", field=path)


def _parse_experiment(node, path="experiment"):
    _require_mapping(node, path)
    _reject_unknown(node, _EXPERIMENT_KEYS, path)
    block = dict(node)
    if "kind" in block and block["kind"] not in _EXPERIMENT_KINDS:
        raise ParseError(
            f"unknown experiment kind {block['kind']!r}", field=f"{path}.kind")
    if "axes" in block:
        _require_mapping(block["axes"], f"{path}.axes")
        axes = {}
        for name, spec in block["axes"].items():
            values = _expand_axis(spec, f"{path}.axes.{name}")
            _validate_axis(values, f"{path}.axes.{name}")
            axes[name] = values
        block["axes"] = axes
    if "gate_time_us" in block:
        gate = _number(block["gate_time_us"], f"{path}.gate_time_us")
        if not gate > 0:
            raise ParseError("gate time must be > 0", field=f"{path}.gate_time_us")
        block["gate_time_us"] = gate
    if "models" in block:
        models = block["models"]
        if not isinstance(models, list) or not all(isinstance(m, str) for m in models):
            raise ParseError("models must be a list of strings", field=f"{path}.models")
        block["models"] = list(models)
    return block


def load_config(text):
    """Parse a JSON config document into a fully validated ExperimentConfig.

    Defaults applied: kappa_* = 0, phase_rad = 0, n_q = 4, n_c = 12, and
    documented solver defaults. Unknown keys are rejected.
    """
    try:
        tree = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    _require_mapping(tree, "")
    _reject_unknown(tree, {"system", "drives", "hilbert", "solver", "experiment"}, "")

    if "system" not in tree:
        raise ParseError("missing required 'system' block", field="system")
    _require_mapping(tree["system"], "system")
    _reject_unknown(tree["system"], set(_SYSTEM_KEYS), "system")
    for key in _SYSTEM_REQUIRED:
        if key not in tree["system"]:
            raise ParseError(f"missing required key '{key}'", field=f"system.{key}")
    system = SystemParams(**{
        attr: _number(tree["system"][key], f"system.{key}")
        for key, attr in _SYSTEM_KEYS.items() if key in tree["system"]
    })
    system = validate_params(system)

    drives = []
    for i, node in enumerate(tree.get("drives", [])):
        path = f"drives[{i}]"
        _require_mapping(node, path)
        _reject_unknown(node, set(_DRIVE_KEYS), path)
        for key in ("target", "epsilon_MHz", "detuning_MHz"):
            if key not in node:
                raise ParseError(f"missing required key '{key}'", field=f"{path}.{key}")
        if not isinstance(node["target"], str):
            raise ParseError("target must be a string", field=f"{path}.target")
        tone = DriveTone(
            target=node["target"],
            epsilon=_number(node["epsilon_MHz"], f"{path}.epsilon_MHz"),
            detuning=_number(node["detuning_MHz"], f"{path}.detuning_MHz"),
            phase=_number(node.get("phase_rad", 0.0), f"{path}.phase_rad"),
        )
        drives.append(validate_tone(tone, system))

    hilbert_node = tree.get("hilbert", {})
    _require_mapping(hilbert_node, "hilbert")
    _reject_unknown(hilbert_node, set(_HILBERT_KEYS), "hilbert")
    for key in hilbert_node:
        if isinstance(hilbert_node[key], bool) or not isinstance(hilbert_node[key], int):
            raise ParseError("truncation must be an integer", field=f"hilbert.{key}")
    hilbert = HilbertSpec(**hilbert_node)

    solver_node = tree.get("solver", {})
    _require_mapping(solver_node, "solver")
    _reject_unknown(solver_node, set(_SOLVER_KEYS), "solver")
    solver = SolverOptions(**{
        k: _number(v, f"solver.{k}") for k, v in solver_node.items()
    })

    experiment = None
    if "experiment" in tree:
        experiment = _parse_experiment(tree["experiment"])

    return ExperimentConfig(
        system=system, drives=tuple(drives), hilbert=hilbert,
        solver=solver, experiment=experiment)


def config_to_tree(cfg):
    """ExperimentConfig -> plain JSON-compatible tree (inverse of load)."""
    tree = {
        "system": {key: getattr(cfg.system, attr) for key, attr in _SYSTEM_KEYS.items()},
        "drives": [
            {
                "target": t.target,
                "epsilon_MHz": t.epsilon,
                "detuning_MHz": t.detuning,
                "phase_rad": t.phase,
            }
            for t in cfg.drives
        ],
        "hilbert": {"n_q": cfg.hilbert.n_q, "n_c": cfg.hilbert.n_c},
        "solver": {
            "rtol": cfg.solver.rtol,
            "atol": cfg.solver.atol,
            "max_step_ns": cfg.solver.max_step_ns,
        },
    }
    if cfg.experiment is not None:
        block = dict(cfg.experiment)
        if "axes" in block:
            block["axes"] = {name: list(vals) for name, vals in block["axes"].items()}
        tree["experiment"] = block
    return tree


def serialize_config(cfg):
    """Serialize to JSON text such that load_config(serialize(cfg)) == cfg."""
    return json.dumps(config_to_tree(cfg), indent=2)


"""Experiment configuration: JSON files, validation, and shipped presets."""

import copy
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .core import ConfigurationError
from .kernels import validate_asgld

MODEL_KEYS = {
    "gaussian": {"kind", "cov", "noise_scale"},
    "mixture5": {"kind", "means", "noise_scale"},
    "ravine": {"kind", "n_data", "data_seed", "theta_true", "prior_var", "data_path"},
    "mlp": {"kind", "layers", "prior", "train_path", "test_path"},
}
PRIOR_KEYS = {
    "gaussian": {"kind", "variance"},
    "mixture": {"kind", "weight", "slab_var", "spike_var"},
}
SAMPLER_KEYS = {
    "sgld": {"kind", "learning_rate", "temperature"},
    "msgld": {"kind", "learning_rate", "temperature", "bias_factor", "beta1"},
    "asgld": {"kind", "learning_rate", "temperature", "bias_factor", "beta1", "beta2", "lam"},
    "psgld": {"kind", "learning_rate", "temperature", "beta", "lam"},
    "sghmc": {"kind", "learning_rate", "temperature", "beta1"},
    "sgd": {"kind", "learning_rate", "weight_decay"},
    "adam": {"kind", "learning_rate", "beta1", "beta2", "lam", "weight_decay"},
}
SCHEDULE_KEYS = {"constant": {"kind"}, "step-decay": {"kind", "gamma", "step_epochs"}}
TOP_KEYS = {
    "name", "description", "model", "sampler", "schedule", "n_iter", "epochs", "burn_in",
    "thinning", "batch_size", "seeds", "output_dir", "max_seconds", "prior_switch",
    "check_invariants", "diagnostics",
}


def _check_keys(section, allowed, where):
    if not isinstance(section, dict):
        raise ConfigurationError(f"{where} must be an object")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigurationError(f"unknown key(s) in {where}: {sorted(unknown)}")


def _kind(section, table, where):
    kind = section.get("kind")
    if kind not in table:
        raise ConfigurationError(f"{where}.kind must be one of {sorted(table)}, got {kind!r}")
    _check_keys(section, table[kind], where)
    return kind


def _positive(value, name, integer=False):
    ok = isinstance(value, int) and not isinstance(value, bool) if integer else isinstance(value, (int, float))
    if not ok or isinstance(value, bool) or value <= 0:
        kind = "positive integer" if integer else "positive number"
        raise ConfigurationError(f"{name} must be a {kind}, got {value!r}")


def _prob(value, name, closed_right=False):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigurationError(f"{name} must be a number")
    if not (0 < value <= 1 if closed_right else 0 <= value < 1):
        raise ConfigurationError(f"{name} out of range: {value}")


@dataclass
class ExperimentConfig:
    """Validated experiment description.

    ``n_iter`` counts iterations; ``epochs`` (MLP only) is converted to
    iterations using ``ceil(N / batch_size)`` per epoch at run time.
    """

    name: str
    model: dict
    sampler: dict
    schedule: dict = field(default_factory=lambda: {"kind": "constant"})
    n_iter: int = None
    epochs: int = None
    burn_in: int = 0
    thinning: int = 1
    batch_size: int = None
    seeds: list = field(default_factory=lambda: [1, 2, 3, 4, 5])
    output_dir: str = None
    max_seconds: float = None
    prior_switch: dict = None
    check_invariants: bool = False
    diagnostics: dict = field(default_factory=dict)
    description: str = ""

    def __post_init__(self):
        self.validate()

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigurationError("config must be a JSON object")
        _check_keys(d, TOP_KEYS, "config")
        for key in ("name", "model", "sampler"):
            if key not in d:
                raise ConfigurationError(f"config is missing required key {key!r}")
        return cls(**copy.deepcopy(d))

    def to_dict(self):
        out = {
            "name": self.name,
            "description": self.description,
            "model": copy.deepcopy(self.model),
            "sampler": copy.deepcopy(self.sampler),
            "schedule": copy.deepcopy(self.schedule),
            "burn_in": self.burn_in,
            "thinning": self.thinning,
            "seeds": list(self.seeds),
            "check_invariants": self.check_invariants,
            "diagnostics": copy.deepcopy(self.diagnostics),
        }
        for key in ("n_iter", "epochs", "batch_size", "output_dir", "max_seconds", "prior_switch"):
            value = getattr(self, key)
            if value is not None:
                out[key] = copy.deepcopy(value)
        return out

    @classmethod
    def from_json(cls, path):
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise OSError(f"cannot read config {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(data)

    def to_json(self, path=None):
        text = json.dumps(self.to_dict(), indent=2) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text

    def replace(self, **changes):
        d = self.to_dict()
        d.update(changes)
        return ExperimentConfig.from_dict(d)

    # validation

    def validate(self):
        if not isinstance(self.name, str) or not self.name:
            raise ConfigurationError("name must be a non-empty string")
        self._validate_model()
        self._validate_sampler()
        self._validate_schedule()
        if (self.n_iter is None) == (self.epochs is None):
            raise ConfigurationError("exactly one of n_iter and epochs must be given")
        if self.n_iter is not None:
            _positive(self.n_iter, "n_iter", integer=True)
        if self.epochs is not None:
            _positive(self.epochs, "epochs", integer=True)
            if self.model["kind"] not in ("mlp", "ravine"):
                raise ConfigurationError("epochs only make sense for data-backed models; use n_iter")
        if not isinstance(self.burn_in, int) or isinstance(self.burn_in, bool) or self.burn_in < 0:
            raise ConfigurationError("burn_in must be a non-negative integer")
        _positive(self.thinning, "thinning", integer=True)
        if self.n_iter is not None and self.burn_in >= self.n_iter:
            raise ConfigurationError("burn_in must be smaller than n_iter")
        if self.batch_size is not None:
            _positive(self.batch_size, "batch_size", integer=True)
            if self.model["kind"] in ("gaussian", "mixture5"):
                raise ConfigurationError("batch_size is only meaningful for data-backed models")
        if not isinstance(self.seeds, list) or not self.seeds:
            raise ConfigurationError("seeds must be a non-empty list of integers")
        for s in self.seeds:
            if not isinstance(s, int) or isinstance(s, bool) or s < 0:
                raise ConfigurationError(f"seeds must be non-negative integers, got {s!r}")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigurationError("seeds must be distinct")
        if self.max_seconds is not None:
            _positive(self.max_seconds, "max_seconds")
        if not isinstance(self.check_invariants, bool):
            raise ConfigurationError("check_invariants must be true or false")
        if self.prior_switch is not None:
            self._validate_prior_switch()
        self._validate_diagnostics()

    def _validate_model(self):
        kind = _kind(self.model, MODEL_KEYS, "model")
        m = self.model
        if kind == "gaussian" and "cov" in m:
            cov = m["cov"]
            if not (isinstance(cov, list) and len(cov) == 2 and all(isinstance(r, list) and len(r) == 2 for r in cov)):
                raise ConfigurationError("model.cov must be a 2x2 nested list")
        if kind == "mixture5" and "means" in m:
            if not all(isinstance(r, list) and len(r) == 2 for r in m["means"]):
                raise ConfigurationError("model.means must be a list of 2-vectors")
        if "noise_scale" in m and (not isinstance(m["noise_scale"], (int, float)) or m["noise_scale"] < 0):
            raise ConfigurationError("model.noise_scale must be non-negative")
        if kind == "ravine":
            if "n_data" in m:
                _positive(m["n_data"], "model.n_data", integer=True)
            if "prior_var" in m:
                _positive(m["prior_var"], "model.prior_var")
            if "theta_true" in m and not (isinstance(m["theta_true"], list) and len(m["theta_true"]) == 2):
                raise ConfigurationError("model.theta_true must be a 2-vector")
        if kind == "mlp":
            layers = m.get("layers")
            if not isinstance(layers, list) or len(layers) < 2:
                raise ConfigurationError("model.layers must list at least input and output sizes")
            for s in layers:
                _positive(s, "model.layers entry", integer=True)
            self._validate_prior(m.get("prior", {"kind": "gaussian"}), "model.prior")

    def _validate_prior(self, prior, where):
        kind = _kind(prior, PRIOR_KEYS, where)
        if kind == "gaussian" and "variance" in prior:
            _positive(prior["variance"], f"{where}.variance")
        if kind == "mixture":
            w = prior.get("weight", 1e-7)
            _prob(w, f"{where}.weight", closed_right=True)
            s1 = prior.get("slab_var", 0.02)
            s0 = prior.get("spike_var", 1e-5)
            _positive(s1, f"{where}.slab_var")
            _positive(s0, f"{where}.spike_var")
            if s0 >= s1:
                raise ConfigurationError(f"{where}: spike_var must be smaller than slab_var")

    def _validate_sampler(self):
        kind = _kind(self.sampler, SAMPLER_KEYS, "sampler")
        s = self.sampler
        if "learning_rate" not in s:
            raise ConfigurationError("sampler.learning_rate is required")
        _positive(s["learning_rate"], "sampler.learning_rate")
        if "temperature" in s and (not isinstance(s["temperature"], (int, float)) or s["temperature"] < 0):
            raise ConfigurationError("sampler.temperature must be non-negative")
        if kind == "msgld":
            _prob(s.get("beta1", 0.9), "sampler.beta1", closed_right=True)
        if kind in ("sghmc",):
            _prob(s.get("beta1", 0.9), "sampler.beta1")
        if kind == "psgld":
            _prob(s.get("beta", 0.99), "sampler.beta")
            _positive(s.get("lam", 1e-5), "sampler.lam")
        if kind == "asgld":
            validate_asgld(s.get("beta1", 0.9), s.get("beta2", 0.999), s.get("lam", 1e-8))
        if kind == "adam":
            _prob(s.get("beta1", 0.9), "sampler.beta1")
            _prob(s.get("beta2", 0.999), "sampler.beta2")
            _positive(s.get("lam", 1e-8), "sampler.lam")
        if "weight_decay" in s and (not isinstance(s["weight_decay"], (int, float)) or s["weight_decay"] < 0):
            raise ConfigurationError("sampler.weight_decay must be non-negative")

    def _validate_schedule(self):
        kind = _kind(self.schedule, SCHEDULE_KEYS, "schedule")
        if kind == "step-decay":
            gamma = self.schedule.get("gamma")
            if not isinstance(gamma, (int, float)) or not 0 < gamma <= 1:
                raise ConfigurationError("schedule.gamma must lie in (0, 1]")
            _positive(self.schedule.get("step_epochs"), "schedule.step_epochs", integer=True)

    def _validate_prior_switch(self):
        ps = self.prior_switch
        _check_keys(ps, {"epoch", "prior"}, "prior_switch")
        if self.model["kind"] != "mlp":
            raise ConfigurationError("prior_switch requires an mlp model")
        _positive(ps.get("epoch"), "prior_switch.epoch", integer=True)
        if "prior" not in ps:
            raise ConfigurationError("prior_switch.prior is required")
        self._validate_prior(ps["prior"], "prior_switch.prior")
        if self.epochs is not None and ps["epoch"] >= self.epochs:
            raise ConfigurationError("prior_switch.epoch must fall before the last epoch")

    def _validate_diagnostics(self):
        _check_keys(self.diagnostics, {"cov_checkpoints", "contour", "mode_radius"}, "diagnostics")
        cps = self.diagnostics.get("cov_checkpoints")
        if cps is not None:
            if not isinstance(cps, list) or any(not isinstance(c, int) or c < 2 for c in cps):
                raise ConfigurationError("diagnostics.cov_checkpoints must be integers >= 2")
            if any(b <= a for a, b in zip(cps, cps[1:])):
                raise ConfigurationError("diagnostics.cov_checkpoints must be increasing")
        contour = self.diagnostics.get("contour")
        if contour is not None:
            _check_keys(contour, {"xlim", "ylim", "resolution", "bandwidth"}, "diagnostics.contour")
            if "bandwidth" in contour:
                _positive(contour["bandwidth"], "diagnostics.contour.bandwidth")
            if "resolution" in contour:
                _positive(contour["resolution"], "diagnostics.contour.resolution", integer=True)
        if "mode_radius" in self.diagnostics:
            _positive(self.diagnostics["mode_radius"], "diagnostics.mode_radius")


def list_presets():
    files = resources.files("adaptive_sgld").joinpath("presets")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def load_preset(name):
    path = resources.files("adaptive_sgld").joinpath("presets").joinpath(f"{name}.json")
    if not path.is_file():
        raise ConfigurationError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return ExperimentConfig.from_dict(json.loads(path.read_text()))


def load_config(spec):
    """Load ``spec`` as a file path, falling back to a preset name."""
    path = Path(spec)
    if path.suffix == ".json" or path.exists():
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        return ExperimentConfig.from_json(path)
    return load_preset(str(spec))

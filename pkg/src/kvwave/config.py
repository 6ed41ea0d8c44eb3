"""Run configuration: a dotted key-value text format and object builders.

The format is one `section.key = value` assignment per line, `#` comments,
blank lines allowed. Values are numbers, names, paths, or comma-separated
lists. Unknown keys are hard errors (silent typos corrupt studies), reported
with line and column. The SHA-256 of the newline-normalized text is the
config hash used for manifests and sweep deduplication.
"""

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .basis import Domain, build_basis, h1_norm, l2_norm, to_spectral
from .damping import _load_grid_array, make_profile
from .dynamics import SchemeConfig, State
from .nonlinearity import Truncation


class ConfigError(ValueError):
    """Malformed or invalid configuration; carries line/column when known."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f", column {column}"
            loc = f" ({loc})"
        super().__init__(message + loc)
        self.line = line
        self.column = column


_F, _I, _S, _B = "float", "int", "str", "bool"
_FL, _SL = "float_list", "str_list"

SCHEMA = {
    "domain.dimension": (_I, None),
    "domain.edge_lengths": (_FL, None),
    "basis.modes_per_axis": (_I, None),
    "basis.grid_per_axis": (_I, 0),  # 0 means the 4*M default
    "damping.preset": (_S, None),
    "damping.alpha": (_F, 1.0),
    "damping.eta": (_F, 1.0),
    "damping.center": (_FL, []),
    "damping.radius": (_FL, []),
    "damping.axis": (_I, 0),
    "damping.width": (_F, 0.0),
    "damping.measure": (_F, 0.0),
    "damping.count": (_I, 1),
    "damping.harmonic": (_I, 1),
    "damping.slope": (_F, 1.0),
    "damping.path": (_S, ""),
    "truncation.k": (_F, None),
    "initial.preset": (_S, None),
    "initial.mode": (_I, 1),
    "initial.amplitude": (_F, 1.0),
    "initial.velocity_amplitude": (_F, 0.0),
    "initial.seed": (_I, 0),
    "initial.decay": (_F, 2.0),
    "initial.velocity_fraction": (_F, 0.0),
    "initial.path_u0": (_S, ""),
    "initial.path_u1": (_S, ""),
    "scheme.name": (_S, "imex_cn"),
    "scheme.dt": (_F, None),
    "scheme.newton_tol": (_F, 1e-10),
    "scheme.newton_max_iters": (_I, 25),
    "run.T": (_F, None),
    "run.sample_every": (_I, 1),
    "run.N_list": (_FL, []),
    "run.out_dir": (_S, "out"),
    "run.seed": (_I, 0),
    "checks.run": (_SL, []),
    "checks.energy.rel_tol": (_F, 1e-5),
    "checks.energy.ratio_lo": (_F, 3.5),
    "checks.energy.ratio_hi": (_F, 4.5),
    "checks.decay.window_start": (_F, 0.2),
    "checks.decay.window_end": (_F, 0.9),
    "checks.decay.min_r2": (_F, 0.95),
    "checks.bernstein.n_fields": (_I, 1000),
    "checks.bernstein.N_list": (_FL, [2.0, 4.0, 8.0, 16.0, 32.0]),
    "checks.partition.n_fields": (_I, 1000),
    "checks.tail.N_list": (_FL, []),
    "checks.commutator.N_list": (_FL, [4.0, 8.0, 16.0, 32.0, 64.0]),
    "checks.commutator.probes": (_I, 8),
    "checks.commutator.slope_tol": (_F, 0.1),
    "checks.truncation.k_list": (_FL, [2.0, 4.0, 8.0]),
    "checks.stability.delta": (_F, 1e-3),
    "checks.bernoulli.coarse_modes": (_I, 0),  # 0 means modes_per_axis // 2
    "checks.bernoulli.stability_tol": (_F, 0.10),
    "checks.split.ratio_bound": (_F, 0.0),  # 0 means report-only
    "checks.aliasing.tol": (_F, 1e-8),
    "sweep.mode": (_S, "cartesian"),
    "sweep.axes": (_SL, []),
    "sweep.workers": (_I, 0),
}

# sweep.values.<i> keys are validated dynamically against sweep.axes
_SWEEP_VALUES_PREFIX = "sweep.values."

KNOWN_CHECKS = (
    "structural",
    "energy_identity",
    "bernstein",
    "partition",
    "tail",
    "commutator",
    "decay_fit",
    "bernoulli",
    "truncation_convergence",
    "stability",
    "frequency_split",
    "aliasing",
)


def _convert(kind, raw, line):
    try:
        if kind == _F:
            return float(raw)
        if kind == _I:
            f = float(raw)
            if f != int(f):
                raise ValueError
            return int(f)
        if kind == _B:
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError
        if kind == _FL:
            return [float(v.strip()) for v in raw.split(",") if v.strip()]
        if kind == _SL:
            return [v.strip() for v in raw.split(",") if v.strip()]
        return raw
    except ValueError:
        raise ConfigError(f"cannot parse {raw!r} as {kind}", line=line) from None


@dataclass
class RunConfig:
    """Parsed configuration plus the exact source text it came from."""

    values: dict
    text: str
    sweep_values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    @property
    def hash(self):
        return config_hash(self.text)


def config_hash(text):
    return hashlib.sha256(text.replace("\r\n", "\n").replace("\r", "\n").encode()).hexdigest()


def parse_config_text(text, require=("domain.dimension",)):
    values = {}
    sweep_values = {}
    seen = set()
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        stripped = rawline.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError("expected 'key = value'", line=lineno, column=len(rawline) - len(rawline.lstrip()) + 1)
        key, raw = stripped.split("=", 1)
        key = key.strip()
        raw = raw.strip()
        if key.startswith(_SWEEP_VALUES_PREFIX):
            idx_text = key[len(_SWEEP_VALUES_PREFIX):]
            try:
                idx = int(idx_text)
            except ValueError:
                raise ConfigError(f"bad sweep values index {idx_text!r}", line=lineno) from None
            sweep_values[idx] = [v.strip() for v in raw.split(",") if v.strip()]
            continue
        if key not in SCHEMA:
            raise ConfigError(f"unknown key {key!r}", line=lineno, column=rawline.find(key) + 1)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r}", line=lineno)
        seen.add(key)
        kind, _default = SCHEMA[key]
        values[key] = _convert(kind, raw, lineno)

    for key, (kind, default) in SCHEMA.items():
        if key not in values:
            if default is None and key in require:
                raise ConfigError(f"missing required key {key!r}")
            values[key] = default
    return RunConfig(values, text, sweep_values)


_RUN_REQUIRED = (
    "domain.dimension",
    "domain.edge_lengths",
    "basis.modes_per_axis",
    "damping.preset",
    "truncation.k",
    "initial.preset",
    "scheme.dt",
    "run.T",
)


def load_config(path, require=_RUN_REQUIRED):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_config_text(text, require=require)


def build_domain(cfg):
    d = cfg["domain.dimension"]
    lengths = cfg["domain.edge_lengths"]
    if lengths is None or len(lengths) != d:
        raise ConfigError(
            f"domain.edge_lengths must list {d} lengths, got {lengths}"
        )
    return Domain(tuple(lengths))


def build_basis_from(cfg):
    domain = build_domain(cfg)
    M = cfg["basis.modes_per_axis"]
    G = cfg["basis.grid_per_axis"] or None
    try:
        return build_basis(domain, M, G)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_profile(cfg, basis):
    preset = cfg["damping.preset"]
    d = basis.domain.dimension
    params = {}
    if preset == "constant":
        params["alpha"] = cfg["damping.alpha"]
    elif preset in ("squared_bump",):
        params["eta"] = cfg["damping.eta"]
        if cfg["damping.center"]:
            params["center"] = cfg["damping.center"] if len(cfg["damping.center"]) == d else cfg["damping.center"][0]
        if not cfg["damping.radius"]:
            raise ConfigError("squared_bump needs damping.radius")
        params["radius"] = (
            cfg["damping.radius"] if len(cfg["damping.radius"]) == d else cfg["damping.radius"][0]
        )
    elif preset == "strip":
        params["eta"] = cfg["damping.eta"]
        params["axis"] = cfg["damping.axis"]
        if cfg["damping.width"]:
            params["width"] = cfg["damping.width"]
        elif cfg["damping.measure"]:
            params["measure"] = cfg["damping.measure"]
        else:
            raise ConfigError("strip needs damping.width or damping.measure")
        if cfg["damping.center"]:
            params["center"] = cfg["damping.center"][0]
    elif preset == "bump_union":
        params["eta"] = cfg["damping.eta"]
        params["count"] = cfg["damping.count"]
        if not cfg["damping.measure"]:
            raise ConfigError("bump_union needs damping.measure")
        params["measure"] = cfg["damping.measure"]
    elif preset == "sine_bump":
        params["eta"] = cfg["damping.eta"]
        params["harmonic"] = cfg["damping.harmonic"]
    elif preset == "linear_ramp":
        params["slope"] = cfg["damping.slope"]
        params["axis"] = cfg["damping.axis"]
    elif preset == "grid_file":
        if not cfg["damping.path"]:
            raise ConfigError("grid_file needs damping.path")
        params["path"] = cfg["damping.path"]
    else:
        raise ConfigError(f"unknown damping preset {preset!r}")
    try:
        return make_profile(basis, preset, **params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_truncation(cfg):
    try:
        return Truncation(cfg["truncation.k"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_scheme(cfg):
    try:
        return SchemeConfig(
            dt=cfg["scheme.dt"],
            scheme=cfg["scheme.name"],
            newton_tol=cfg["scheme.newton_tol"],
            newton_max_iters=cfg["scheme.newton_max_iters"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_initial(cfg, basis):
    preset = cfg["initial.preset"]
    n = basis.n_modes
    if preset == "single_mode":
        mode = cfg["initial.mode"]
        if not 1 <= mode <= n:
            raise ConfigError(f"initial.mode must be in [1, {n}], got {mode}")
        u0 = np.zeros(n)
        v0 = np.zeros(n)
        u0[mode - 1] = cfg["initial.amplitude"]
        v0[mode - 1] = cfg["initial.velocity_amplitude"]
        return State(u0, v0)
    if preset == "random_h1":
        rng = np.random.default_rng(cfg["initial.seed"])
        lam = basis.eigenvalues
        decay = cfg["initial.decay"]
        u0 = rng.standard_normal(n) * lam ** (-0.5 * decay)
        nrm = h1_norm(u0, basis)
        if nrm > 0:
            u0 *= cfg["initial.amplitude"] / nrm
        v0 = np.zeros(n)
        frac = cfg["initial.velocity_fraction"]
        if frac:
            v0 = rng.standard_normal(n) * lam ** (-0.5 * decay)
            vn = l2_norm(v0, basis)
            if vn > 0:
                v0 *= frac * cfg["initial.amplitude"] / vn
        return State(u0, v0)
    if preset == "grid_file":
        if not cfg["initial.path_u0"]:
            raise ConfigError("grid_file initial data needs initial.path_u0")
        u0 = to_spectral(_load_grid_array(cfg["initial.path_u0"], basis.grid_shape), basis)
        if cfg["initial.path_u1"]:
            v0 = to_spectral(_load_grid_array(cfg["initial.path_u1"], basis.grid_shape), basis)
        else:
            v0 = np.zeros(n)
        return State(u0, v0)
    raise ConfigError(f"unknown initial-data preset {preset!r}")


def validate_checks(cfg):
    names = cfg["checks.run"]
    for name in names:
        if name not in KNOWN_CHECKS:
            raise ConfigError(
                f"unknown check {name!r}; known: {', '.join(KNOWN_CHECKS)}"
            )
    return names

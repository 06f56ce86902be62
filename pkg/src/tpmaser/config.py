"""Flat key=value configuration files and built-in scenario presets."""

from dataclasses import dataclass

from .dynamics import AtomPrep, ModelParams
from .errors import ConfigError
from .experiments import RunConfig
from .fock import FockSpace
from .observables import QGridSpec

# Every key a config file may contain, with its parser.  Unknown keys are a
# hard error so that a typo cannot silently fall back to a default.
_FLOAT_KEYS = (
    "n_bar", "chi_over_lambda", "delta_over_lambda", "eps_re", "eps_im",
    "tau", "atom_a", "atom_b", "atom_phi",
    "q_xmin", "q_xmax", "q_ymin", "q_ymax",
    "tau_scan_lo", "tau_scan_hi", "tau_scan_step",
)
_INT_KEYS = ("cutoff", "n_atoms", "q_nx", "q_ny")
_LIST_KEYS = ("snapshots",)
KNOWN_KEYS = frozenset(_FLOAT_KEYS + _INT_KEYS + _LIST_KEYS)

DEFAULTS = {
    "n_bar": 5.0,
    "cutoff": 64,
    "chi_over_lambda": 1.0,
    "delta_over_lambda": 1.0,
    "eps_re": 1.0,
    "eps_im": 0.0,
    "tau": 8.9,
    "atom_a": 1.0,
    "atom_b": 0.0,
    "atom_phi": 0.0,
    "n_atoms": 100,
    "snapshots": (),
    "q_xmin": -5.5,
    "q_xmax": 5.5,
    "q_ymin": -5.5,
    "q_ymax": 5.5,
    "q_nx": 121,
    "q_ny": 121,
    "tau_scan_lo": 0.0,
    "tau_scan_hi": 12.0,
    "tau_scan_step": 0.05,
}

_KEY_ORDER = (
    "n_bar", "cutoff", "chi_over_lambda", "delta_over_lambda",
    "eps_re", "eps_im", "tau", "atom_a", "atom_b", "atom_phi",
    "n_atoms", "snapshots",
    "q_xmin", "q_xmax", "q_ymin", "q_ymax", "q_nx", "q_ny",
    "tau_scan_lo", "tau_scan_hi", "tau_scan_step",
)


@dataclass(frozen=True)
class ScenarioConfig:
    """Parsed configuration plus the set of keys that were given explicitly."""

    values: dict
    explicit: frozenset

    def __getitem__(self, key):
        return self.values[key]

    def has_explicit(self, key):
        return key in self.explicit


def _parse_value(key, raw):
    raw = raw.strip()
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        # snapshot list: comma-separated atom indices, empty allowed
        if raw == "":
            return ()
        return tuple(int(tok.strip()) for tok in raw.split(","))
    except ValueError as exc:
        raise ConfigError(f"cannot parse value for key '{key}': {raw!r}") from exc


def parse_config_text(text):
    """Parse a flat key=value document ('#' comments, one pair per line)."""
    values = dict(DEFAULTS)
    explicit = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key=value, got {stripped!r}")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in explicit:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        values[key] = _parse_value(key, raw)
        explicit.add(key)
    return ScenarioConfig(values=values, explicit=frozenset(explicit))


def parse_config_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text)


def render_config(values, header=None):
    """Canonical text form; parse_config_text(render_config(v)) round-trips."""
    lines = []
    if header:
        lines.append(f"# {header}")
    for key in _KEY_ORDER:
        v = values[key]
        if key in _LIST_KEYS:
            lines.append(f"{key}={','.join(str(int(i)) for i in v)}")
        elif key in _INT_KEYS:
            lines.append(f"{key}={int(v)}")
        else:
            lines.append(f"{key}={float(v):g}")
    return "\n".join(lines) + "\n"


def to_run_config(cfg):
    """Build the immutable run description from a parsed configuration."""
    v = cfg.values
    try:
        space = FockSpace(v["cutoff"])
        params = ModelParams(
            chi_over_lambda=v["chi_over_lambda"],
            delta_over_lambda=v["delta_over_lambda"],
            eps=complex(v["eps_re"], v["eps_im"]),
            tau=v["tau"],
            space=space,
        )
        atom = AtomPrep(a=v["atom_a"], b=v["atom_b"], phi=v["atom_phi"])
        qgrid = QGridSpec(x_min=v["q_xmin"], x_max=v["q_xmax"],
                          y_min=v["q_ymin"], y_max=v["q_ymax"],
                          nx=v["q_nx"], ny=v["q_ny"])
        return RunConfig(params=params, atom=atom, n_atoms=v["n_atoms"],
                         n_bar=v["n_bar"], record_snapshots_at=v["snapshots"],
                         qgrid=qgrid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _preset(**overrides):
    values = dict(DEFAULTS)
    values.update(overrides)
    return values


# Bundled scenarios: thermal field with n_bar = 5, excited-state atoms, unit
# Stark and detuning ratios, 100 atoms at the optimal interaction time, for
# the three drive amplitudes studied plus a snapshot variant for the
# number-distribution and Husimi portraits of the final state.
PRESETS = {
    "paper-fig2-eps1": _preset(eps_re=1.0),
    "paper-fig2-eps2": _preset(eps_re=2.0),
    "paper-fig2-eps3": _preset(eps_re=3.0),
    "paper-fig5-7": _preset(eps_re=1.0, snapshots=(100,)),
}


def preset_text(name):
    if name not in PRESETS:
        raise ConfigError(f"unknown preset '{name}' (have: {', '.join(sorted(PRESETS))})")
    return render_config(PRESETS[name], header=f"preset: {name}")

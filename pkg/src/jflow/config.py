"""Run configuration: a small key-value text format and its validation.

The format is line-oriented: ``key = value``, ``#`` starts a comment,
blank lines are ignored.  Unknown keys are rejected.  Every key appears at
most once except ``psi0_mode``, which may repeat to accumulate modes.

Schema (defaults in brackets):

    grid              = n1 n2 n3 n4        four even integers >= 4
    G                 = a11 a22 re12 im12 r5 r6   six reals; the last two
                                            slots are reserved and ignored
    H                 = a11 a22 re12 im12 r5 r6
    psi0_mode         = k1 k2 k3 k4 amplitude phase   [none]
    sigma             = ...                 in (0, 1]            [0.2]
    tol_stop          = ...                 > 0                  [1e-10]
    t_max             = ...                 >= 0                 [200.0]
    sample_interval   = ...                 integer >= 1         [25]
    snapshot_interval = ...                 integer >= 0, 0=off  [0]
    A_override        = ...                 real                 [absent]
    seed              = ...                 integer              [0]
    output_dir        = ...                 path                 [out]

The potential is specified as a finite list of cosine modes rather than
raw samples so configs stay tiny and the field is band-limited by
construction, keeping spectral derivatives exact.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ConfigError, ValidationError

_DEFAULTS = {
    "sigma": 0.2,
    "tol_stop": 1e-10,
    "t_max": 200.0,
    "sample_interval": 25,
    "snapshot_interval": 0,
    "seed": 0,
    "output_dir": "out",
}

_KNOWN_KEYS = frozenset({
    "grid", "G", "H", "psi0_mode", "sigma", "tol_stop", "t_max",
    "sample_interval", "snapshot_interval", "A_override", "seed",
    "output_dir",
})


@dataclass(frozen=True)
class RunConfig:
    """Validated experiment configuration."""

    grid: tuple
    g_values: tuple          # six reals, first four consumed
    h_values: tuple
    psi0_modes: tuple = ()   # (k1, k2, k3, k4, amplitude, phase) each
    sigma: float = _DEFAULTS["sigma"]
    tol_stop: float = _DEFAULTS["tol_stop"]
    t_max: float = _DEFAULTS["t_max"]
    sample_interval: int = _DEFAULTS["sample_interval"]
    snapshot_interval: int = _DEFAULTS["snapshot_interval"]
    a_override: float = None
    seed: int = _DEFAULTS["seed"]
    output_dir: str = _DEFAULTS["output_dir"]


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _parse_tokens(key, value, count, conv, line_no):
    tokens = value.split()
    if len(tokens) != count:
        raise ConfigError(
            f"line {line_no}: key '{key}' expects {count} values, "
            f"got {len(tokens)}")
    out = []
    for tok in tokens:
        try:
            out.append(conv(tok))
        except ValueError:
            raise ConfigError(
                f"line {line_no}: key '{key}': cannot parse '{tok}'") from None
    return tuple(out)


def _parse_scalar(key, value, conv, line_no):
    return _parse_tokens(key, value, 1, conv, line_no)[0]


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document."""
    seen = {}
    modes = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {line_no}: unknown key '{key}'")
        if key == "psi0_mode":
            tokens = value.split()
            if len(tokens) != 6:
                raise ConfigError(
                    f"line {line_no}: psi0_mode expects 6 values "
                    f"(k1 k2 k3 k4 amplitude phase), got {len(tokens)}")
            try:
                mode = tuple(int(t) for t in tokens[:4]) + \
                    tuple(float(t) for t in tokens[4:])
            except ValueError:
                raise ConfigError(
                    f"line {line_no}: psi0_mode: cannot parse "
                    f"'{value}'") from None
            modes.append(mode)
            continue
        if key in seen:
            raise ConfigError(f"line {line_no}: duplicate key '{key}'")
        seen[key] = (value, line_no)

    for required in ("grid", "G", "H"):
        if required not in seen:
            raise ValidationError(f"missing required key '{required}'")

    value, ln = seen["grid"]
    grid = _parse_tokens("grid", value, 4, int, ln)
    value, ln = seen["G"]
    g_values = _parse_tokens("G", value, 6, float, ln)
    value, ln = seen["H"]
    h_values = _parse_tokens("H", value, 6, float, ln)

    scalar_keys = {
        "sigma": ("sigma", float),
        "tol_stop": ("tol_stop", float),
        "t_max": ("t_max", float),
        "sample_interval": ("sample_interval", int),
        "snapshot_interval": ("snapshot_interval", int),
        "A_override": ("a_override", float),
        "seed": ("seed", int),
    }
    kwargs = {}
    for key, (attr, conv) in scalar_keys.items():
        if key in seen:
            value, ln = seen[key]
            kwargs[attr] = _parse_scalar(key, value, conv, ln)
    if "output_dir" in seen:
        kwargs["output_dir"] = seen["output_dir"][0]

    cfg = RunConfig(grid=grid, g_values=g_values, h_values=h_values,
                    psi0_modes=tuple(modes), **kwargs)
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig) -> None:
    """Check every field contract; raises ValidationError with key context."""
    if len(cfg.grid) != 4:
        raise ValidationError("grid: must have 4 dimensions")
    for n in cfg.grid:
        if n < 4:
            raise ValidationError(f"grid: dims must be >= 4, got {n}")
        if n % 2 != 0:
            raise ValidationError(f"grid: dims must be even, got {n}")
    for name, values in (("G", cfg.g_values), ("H", cfg.h_values)):
        if len(values) != 6:
            raise ValidationError(f"{name}: expected six reals")
    if not (0.0 < cfg.sigma <= 1.0):
        raise ValidationError(f"sigma: must be in (0, 1], got {cfg.sigma}")
    if cfg.tol_stop <= 0.0:
        raise ValidationError(f"tol_stop: must be > 0, got {cfg.tol_stop}")
    if cfg.t_max < 0.0:
        raise ValidationError(f"t_max: must be >= 0, got {cfg.t_max}")
    if cfg.sample_interval < 1:
        raise ValidationError(
            f"sample_interval: must be >= 1, got {cfg.sample_interval}")
    if cfg.snapshot_interval < 0:
        raise ValidationError(
            f"snapshot_interval: must be >= 0, got {cfg.snapshot_interval}")
    for mode in cfg.psi0_modes:
        if len(mode) != 6:
            raise ValidationError("psi0_mode: expected 6 values per mode")
        for k, n in zip(mode[:4], cfg.grid):
            if abs(int(k)) >= n // 2:
                raise ValidationError(
                    f"psi0_mode: frequency {k} not band-limited for grid "
                    f"dim {n} (need |k| < {n // 2})")


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form; parse(serialize(cfg)) == cfg on all fields."""
    lines = [
        "grid = " + " ".join(str(n) for n in cfg.grid),
        "G = " + " ".join(_fmt(v) for v in cfg.g_values),
        "H = " + " ".join(_fmt(v) for v in cfg.h_values),
    ]
    for mode in cfg.psi0_modes:
        k1, k2, k3, k4, amp, phase = mode
        lines.append(f"psi0_mode = {int(k1)} {int(k2)} {int(k3)} {int(k4)} "
                     f"{_fmt(amp)} {_fmt(phase)}")
    lines.append(f"sigma = {_fmt(cfg.sigma)}")
    lines.append(f"tol_stop = {_fmt(cfg.tol_stop)}")
    lines.append(f"t_max = {_fmt(cfg.t_max)}")
    lines.append(f"sample_interval = {cfg.sample_interval}")
    lines.append(f"snapshot_interval = {cfg.snapshot_interval}")
    if cfg.a_override is not None:
        lines.append(f"A_override = {_fmt(cfg.a_override)}")
    lines.append(f"seed = {cfg.seed}")
    lines.append(f"output_dir = {cfg.output_dir}")
    return "\n".join(lines) + "\n"


def with_overrides(cfg: RunConfig, **kwargs) -> RunConfig:
    """Functional update helper used by the command line layer."""
    cfg = replace(cfg, **kwargs)
    validate_config(cfg)
    return cfg

"""Run configuration: flat dotted-key text files, presets, canonical emission.

Format: one ``key = value`` assignment per line; ``#`` starts a comment;
blank lines are skipped.  Keys are dotted paths (``geometry.length``) and
values are plain SI numbers, except ``preset`` and ``run.out_dir`` which are
strings.  A ``preset`` key expands to a complete named configuration and
explicit keys then override individual fields; without a preset the full
geometry/materials/stimulus set is required.

``emit_config`` writes every resolved field at 17 significant digits, which
round-trips IEEE doubles exactly, so ``load_config(emit_config(cfg)) == cfg``
holds bit-for-bit.  ``config_hash`` digests that canonical text; the CLI
stamps it into every output file so results can be traced to the exact
configuration that produced them.  The output directory is execution
context, not configuration: it is excluded from emission, hashing, and
equality.
"""
from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .geometry import CavityGeometry, MaterialParams, Stimulus, Truncation
from .geometry import preset as _preset_bundle

_PRESET_NAMES = ("gecko", "varanus")
_PRESET_WINDOW = {"gecko": 5e-3, "varanus": 25e-3}
_DEFAULT_WINDOW = 5e-3
_DEFAULT_SAMPLES = 512

_FLOAT_KEYS = frozenset({
    "geometry.length", "geometry.radius_cavity", "geometry.radius_membrane",
    "geometry.beta",
    "materials.c", "materials.c_m", "materials.rho0", "materials.rho_m",
    "materials.d", "materials.alpha",
    "stimulus.p0", "stimulus.omega", "stimulus.k_axial",
    "run.window",
})
_INT_KEYS = frozenset({
    "truncation.n1_max", "truncation.n2_max", "truncation.n3_max",
    "truncation.k1_max", "truncation.k2_max",
    "run.samples",
})
_STR_KEYS = frozenset({"preset", "run.out_dir"})

_REQUIRED_KEYS = (
    "geometry.length", "geometry.radius_cavity", "geometry.radius_membrane",
    "geometry.beta",
    "materials.c", "materials.c_m", "materials.rho0", "materials.rho_m",
    "materials.d", "materials.alpha",
    "stimulus.p0", "stimulus.omega",
)


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved run: physics inputs plus time window and sampling."""

    geometry: CavityGeometry
    materials: MaterialParams
    stimulus: Stimulus
    truncation: Truncation
    window: float
    samples: int
    preset: str | None = None
    out_dir: str = field(default=".", compare=False)
    ignored: tuple[str, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.window > 0.0:
            raise ConfigError("run.window must be positive")
        if self.samples < 2:
            raise ConfigError("run.samples must be >= 2")


def _parse_lines(text: str) -> dict[str, tuple[str, int]]:
    """Split config text into ``{key: (raw value, line number)}``."""
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(
                f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in entries:
            raise ConfigError(
                f"line {lineno}: duplicate key {key} "
                f"(first set on line {entries[key][1]})")
        entries[key] = (value, lineno)
    return entries


def _typed_values(entries: dict[str, tuple[str, int]],
                  strict: bool) -> tuple[dict, tuple[str, ...]]:
    values: dict[str, object] = {}
    ignored: list[str] = []
    for key, (raw, lineno) in entries.items():
        if key in _FLOAT_KEYS:
            try:
                values[key] = float(raw)
            except ValueError:
                raise ConfigError(
                    f"line {lineno}: {key} expects a number, got {raw!r}"
                ) from None
        elif key in _INT_KEYS:
            try:
                values[key] = int(raw)
            except ValueError:
                raise ConfigError(
                    f"line {lineno}: {key} expects an integer, got {raw!r}"
                ) from None
        elif key in _STR_KEYS:
            values[key] = raw
        elif strict:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        else:
            ignored.append(key)
    return values, tuple(ignored)


def _build(values: dict, ignored: tuple[str, ...]) -> RunConfig:
    name = values.get("preset")
    base: dict[str, object] = {}
    window = _DEFAULT_WINDOW
    if name is not None:
        try:
            bundle = _preset_bundle(str(name))
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
        name = bundle.name
        g, m, s = bundle.geometry, bundle.materials, bundle.stimulus
        base = {
            "geometry.length": g.length,
            "geometry.radius_cavity": g.radius_cavity,
            "geometry.radius_membrane": g.radius_membrane,
            "geometry.beta": g.beta,
            "materials.c": m.c, "materials.c_m": m.c_m,
            "materials.rho0": m.rho0, "materials.rho_m": m.rho_m,
            "materials.d": m.d, "materials.alpha": m.alpha,
            "stimulus.p0": s.p0, "stimulus.omega": s.omega,
        }
        window = _PRESET_WINDOW[bundle.name]

    def pick(key, default=None):
        if key in values:
            return values[key]
        return base.get(key, default)

    missing = [key for key in _REQUIRED_KEYS if pick(key) is None]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))

    try:
        geometry = CavityGeometry(
            length=pick("geometry.length"),
            radius_cavity=pick("geometry.radius_cavity"),
            radius_membrane=pick("geometry.radius_membrane"),
            beta=pick("geometry.beta"))
        materials = MaterialParams(
            c=pick("materials.c"), c_m=pick("materials.c_m"),
            rho0=pick("materials.rho0"), rho_m=pick("materials.rho_m"),
            d=pick("materials.d"), alpha=pick("materials.alpha"))
        omega = pick("stimulus.omega")
        k_axial = values.get("stimulus.k_axial")
        if k_axial is None:
            k_axial = omega / materials.c
        stimulus = Stimulus(p0=pick("stimulus.p0"), omega=omega,
                            k_axial=k_axial)
        truncation = Truncation(
            n1_max=pick("truncation.n1_max", 5),
            n2_max=pick("truncation.n2_max", 5),
            n3_max=pick("truncation.n3_max", 8),
            k1_max=pick("truncation.k1_max", 5),
            k2_max=pick("truncation.k2_max", 5))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    return RunConfig(geometry=geometry, materials=materials,
                     stimulus=stimulus, truncation=truncation,
                     window=pick("run.window", window),
                     samples=pick("run.samples", _DEFAULT_SAMPLES),
                     preset=name,
                     out_dir=str(pick("run.out_dir", ".")),
                     ignored=ignored)


def load_config(source, strict: bool = False) -> RunConfig:
    """Resolve a configuration from a file path, raw text, or preset name.

    ``strict=True`` turns unknown keys into errors; otherwise they are
    collected on ``RunConfig.ignored`` for the caller to report.
    """
    text = str(source)
    try:
        is_file = os.path.isfile(text)
    except (OSError, ValueError):
        is_file = False
    if is_file:
        with open(text, encoding="utf-8") as handle:
            text = handle.read()
    elif "=" not in text and "\n" not in text:
        name = text.strip().lower()
        if name not in _PRESET_NAMES:
            raise ConfigError(f"no such config file or preset: {text!r}")
        text = f"preset = {name}\n"
    values, ignored = _typed_values(_parse_lines(text), strict)
    return _build(values, ignored)


def emit_config(cfg: RunConfig) -> str:
    """Canonical text form of a configuration (17 significant digits)."""
    def num(x: float) -> str:
        return f"{x:.17g}"

    g, m, s, tr = cfg.geometry, cfg.materials, cfg.stimulus, cfg.truncation
    lines = []
    if cfg.preset:
        lines.append(f"preset = {cfg.preset}")
    lines += [
        f"geometry.length = {num(g.length)}",
        f"geometry.radius_cavity = {num(g.radius_cavity)}",
        f"geometry.radius_membrane = {num(g.radius_membrane)}",
        f"geometry.beta = {num(g.beta)}",
        f"materials.c = {num(m.c)}",
        f"materials.c_m = {num(m.c_m)}",
        f"materials.rho0 = {num(m.rho0)}",
        f"materials.rho_m = {num(m.rho_m)}",
        f"materials.d = {num(m.d)}",
        f"materials.alpha = {num(m.alpha)}",
        f"stimulus.p0 = {num(s.p0)}",
        f"stimulus.omega = {num(s.omega)}",
        f"stimulus.k_axial = {num(s.k_axial)}",
        f"truncation.n1_max = {tr.n1_max}",
        f"truncation.n2_max = {tr.n2_max}",
        f"truncation.n3_max = {tr.n3_max}",
        f"truncation.k1_max = {tr.k1_max}",
        f"truncation.k2_max = {tr.k2_max}",
        f"run.window = {num(cfg.window)}",
        f"run.samples = {cfg.samples}",
    ]
    return "\n".join(lines) + "\n"


def config_hash(cfg: RunConfig) -> str:
    """Short content digest of the canonical emission (12 hex digits)."""
    return hashlib.sha256(emit_config(cfg).encode("utf-8")).hexdigest()[:12]


def time_grid(cfg: RunConfig) -> np.ndarray:
    """Uniform output grid: ``samples`` points spanning [0, window]."""
    return np.linspace(0.0, cfg.window, cfg.samples)

from __future__ import annotations

import dataclasses
import enum
import logging
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .dynamics import Method
from .errors import ClonerError, ConfigError
from .model import Coupling, QubitState, primed_bias

logger = logging.getLogger(__name__)

COMMANDS = ("fidelity", "photons", "avg-fidelity", "avg-photons")
AVERAGE = "average"
FRAMES = ("lab", "primed")


class BiasKind(str, enum.Enum):
    NONE = "none"
    MATCHED = "matched"
    LAB = "lab"


@dataclass(frozen=True)
class BiasMode:
    kind: BiasKind = BiasKind.NONE
    strength: float = 0.0
    lab: Coupling = (0j, 0j)

    @classmethod
    def parse(cls, text: str) -> BiasMode:
        """``none``, ``matched:<s>`` or ``lab:<g1>,<g2>``."""
        name, _, argument = text.strip().partition(":")
        try:
            kind = BiasKind(name.strip().lower())
            if kind is BiasKind.NONE:
                if argument:
                    raise ValueError("none takes no argument")
                return cls()
            if kind is BiasKind.MATCHED:
                strength = float(argument)
                if strength < 0:
                    raise ValueError("strength must be non-negative")
                return cls(kind, strength=strength)
            g1, g2 = (complex(part.strip()) for part in argument.split(","))
            return cls(kind, lab=(g1, g2))
        except ValueError as error:
            raise ConfigError(f"Invalid bias {text!r}: {error}") from None

    @property
    def is_none(self) -> bool:
        return self.kind is BiasKind.NONE

    def primed_for(self, q: QubitState, frame: str = "lab") -> Coupling:
        """(G'1, G'2) seen by the qubit ``q``."""
        if self.kind is BiasKind.NONE:
            return (0j, 0j)
        if self.kind is BiasKind.MATCHED:
            return (0j, complex(self.strength))
        if frame == "primed":
            return self.lab
        return primed_bias(q, self.lab)

    def fixed_field(self, frame: str = "lab") -> tuple[Coupling, str]:
        """Couplings held fixed while the qubit is averaged over, and their frame."""
        if self.kind is BiasKind.NONE:
            return ((0j, 0j), "primed")
        if self.kind is BiasKind.MATCHED:
            return ((0j, complex(self.strength)), "primed")
        return (self.lab, frame)

    def __str__(self) -> str:
        if self.kind is BiasKind.MATCHED:
            return f"matched:{self.strength:g}"
        if self.kind is BiasKind.LAB:
            return "lab:{:g},{:g}".format(*self.lab)
        return "none"


@dataclass(frozen=True)
class RunConfig:
    command: str = "fidelity"
    n_atoms: int = 1
    bias: BiasMode = field(default_factory=BiasMode)
    qubit: tuple[complex, complex] | str = (1 + 0j, 0j)
    tau_max: float = 12.0
    tau_points: int = 1000
    phase_grid: int = 4
    bloch_grid: tuple[int, int] = (16, 16)
    method: Method = Method.SPECTRAL
    bias_frame: str = "lab"
    output_path: str | None = None

    @property
    def averaged(self) -> bool:
        return self.command.startswith("avg-")

    def validate(self) -> RunConfig:
        if self.command not in COMMANDS:
            raise ConfigError(f"Unknown command {self.command!r}")
        if self.n_atoms not in (1, 2):
            raise ConfigError(f"Only 1 or 2 atoms are supported, got {self.n_atoms}")
        if not self.tau_max > 0:
            raise ConfigError(f"tau_max must be positive, got {self.tau_max}")
        if self.tau_points < 2:
            raise ConfigError(f"tau_points must be at least 2, got {self.tau_points}")
        if self.phase_grid < 2:
            raise ConfigError(f"phase_grid must be at least 2, got {self.phase_grid}")
        if min(self.bloch_grid) < 4:
            raise ConfigError(f"bloch_grid orders must be at least 4, got {self.bloch_grid}")
        if self.bias_frame not in FRAMES:
            raise ConfigError(f"bias_frame must be one of {FRAMES}, got {self.bias_frame!r}")
        if self.averaged != (self.qubit == AVERAGE):
            raise ConfigError(
                f"{self.command} needs qubit={AVERAGE!r}"
                if self.averaged
                else f"{self.command} needs an explicit qubit, not {AVERAGE!r}"
            )
        if not self.averaged:
            self.input_qubit()
        return self

    def input_qubit(self) -> QubitState:
        if self.qubit == AVERAGE:
            raise ConfigError("The qubit is averaged over, there is no single input")
        try:
            return QubitState(*self.qubit)
        except ClonerError as error:
            raise ConfigError(str(error)) from None

    def taus(self) -> np.ndarray:
        return np.linspace(0.0, self.tau_max, self.tau_points)

    def merge(self, overrides: Mapping[str, Any]) -> RunConfig:
        """Apply parsed overrides; qubit components patch the current qubit."""
        overrides = dict(overrides)
        components = {
            key: overrides.pop(key)
            for key in ("alpha_re", "alpha_im", "beta_re", "beta_im")
            if key in overrides
        }
        merged = dataclasses.replace(self, **overrides)
        if components:
            if merged.averaged:
                raise ConfigError(f"{merged.command} averages over the qubit; drop the qubit flags")
            alpha, beta = merged.qubit
            alpha = complex(
                components.get("alpha_re", alpha.real), components.get("alpha_im", alpha.imag)
            )
            beta = complex(
                components.get("beta_re", beta.real), components.get("beta_im", beta.imag)
            )
            merged = dataclasses.replace(merged, qubit=(alpha, beta))
        return merged


def _bloch_grid(text: str) -> tuple[int, int]:
    parts = text.replace("x", ",").split(",")
    if len(parts) == 1:
        parts = parts * 2
    chi, phi = (int(part) for part in parts)
    return (chi, phi)


FIELD_PARSERS: dict[str, tuple[str, Callable[[str], Any]]] = {
    "atoms": ("n_atoms", int),
    "bias": ("bias", BiasMode.parse),
    "alpha_re": ("alpha_re", float),
    "alpha_im": ("alpha_im", float),
    "beta_re": ("beta_re", float),
    "beta_im": ("beta_im", float),
    "tau_max": ("tau_max", float),
    "tau_points": ("tau_points", int),
    "phase_grid": ("phase_grid", int),
    "bloch_grid": ("bloch_grid", _bloch_grid),
    "method": ("method", Method),
    "bias_frame": ("bias_frame", str),
    "out": ("output_path", str),
}


def parse_overrides(pairs: Mapping[str, str]) -> dict[str, Any]:
    """Convert textual ``key=value`` settings into RunConfig field values."""
    overrides = {}
    for key, text in pairs.items():
        name = key.strip().lower().replace("-", "_")
        if name not in FIELD_PARSERS:
            raise ConfigError(f"Unknown setting {key!r}")
        target, parse = FIELD_PARSERS[name]
        try:
            overrides[target] = parse(text.strip())
        except ConfigError:
            raise
        except ValueError:
            raise ConfigError(f"Invalid value {text!r} for {key!r}") from None
    return overrides


def load_config_file(path: str | Path) -> dict[str, Any]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as error:
        raise ConfigError(f"Cannot read config file {path}: {error}") from None
    pairs = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, separator, value = line.partition("=")
        if not separator:
            raise ConfigError(f"{path}:{number}: expected key=value, got {line!r}")
        pairs[key] = value
    logger.debug("Loaded %d settings from %s", len(pairs), path)
    return parse_overrides(pairs)


PRESETS: dict[str, RunConfig] = {
    "fig2": RunConfig("fidelity", 1, BiasMode(BiasKind.MATCHED, 3.0)),
    "fig3a": RunConfig("photons", 1, BiasMode()),
    "fig3b": RunConfig("photons", 1, BiasMode(BiasKind.MATCHED, 3.0)),
    "fig3c": RunConfig("photons", 1, BiasMode(BiasKind.MATCHED, 8.0)),
    "fig4": RunConfig("fidelity", 2, BiasMode(BiasKind.MATCHED, 3.0)),
    "fig5a": RunConfig("photons", 2, BiasMode()),
    "fig5b": RunConfig("photons", 2, BiasMode(BiasKind.MATCHED, 3.0)),
    "fig6a": RunConfig(
        "avg-fidelity", 1, BiasMode(BiasKind.LAB, lab=(0j, 8 + 0j)), AVERAGE, 6.0, 601
    ),
    "fig6b": RunConfig(
        "avg-photons", 1, BiasMode(BiasKind.LAB, lab=(0j, 8 + 0j)), AVERAGE, 6.0, 601
    ),
}


def preset(name: str) -> RunConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"Unknown preset {name!r}; choose from {', '.join(PRESETS)}"
        ) from None

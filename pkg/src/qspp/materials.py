"""Metal permittivity models, layer stacks and the material registry."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.optimize import brentq

from .config import ConfigError, Section, parse_config
from .errors import DomainError, NotFoundError

C_LIGHT = 2.99792458e8  # m/s


@dataclass(frozen=True)
class PermittivityModel:
    """Drude metal with a real background term growing as omega**2 and a
    constant imaginary offset.

    eps(omega) = 1 - omega_p**2 / (omega**2 + i omega gamma)
                 + bg_real_coeff * omega**2 / omega_p**2 + i bg_imag
    """

    omega_p: float
    gamma: float = 0.0
    bg_real_coeff: float = 0.0
    bg_imag: float = 0.0

    def __post_init__(self):
        if not self.omega_p > 0:
            raise DomainError(f"omega_p must be positive, got {self.omega_p}")
        if self.gamma < 0:
            raise DomainError(f"gamma must be non-negative, got {self.gamma}")
        if self.bg_imag < 0:
            raise DomainError(f"bg_imag must be non-negative, got {self.bg_imag}")

    @property
    def is_lossless(self) -> bool:
        return self.gamma == 0 and self.bg_imag == 0

    def lossy(self, omega):
        return eval_lossy(self, omega)

    def lossless(self, omega):
        return eval_lossless(self, omega)


def _check_omega(omega):
    w = np.asarray(omega, dtype=float)
    if not np.all(w > 0):
        raise DomainError("frequency must be positive")
    return w


def eval_lossy(model: PermittivityModel, omega):
    """Complex permittivity including damping and the imaginary correction."""
    w = _check_omega(omega)
    wp2 = model.omega_p**2
    eps = 1.0 - wp2 / (w * w + 1j * w * model.gamma) + model.bg_real_coeff * w * w / wp2 + 1j * model.bg_imag
    return eps if eps.ndim else complex(eps)


def eval_lossless(model: PermittivityModel, omega):
    """Real permittivity with damping and the imaginary correction dropped."""
    w = _check_omega(omega)
    wp2 = model.omega_p**2
    eps = 1.0 - wp2 / (w * w) + model.bg_real_coeff * w * w / wp2
    return eps if eps.ndim else float(eps)


def surface_plasma_frequency(model: PermittivityModel) -> float:
    """Smallest omega with lossless eps(omega) = -1."""
    f = lambda w: eval_lossless(model, w) + 1.0
    lo, hi = min(1e12, 1e-4 * model.omega_p), model.omega_p
    flo, fhi = f(lo), f(hi)
    if flo > 0 or fhi < 0:
        raise NotFoundError("no root of eps = -1 in (0, omega_p]")
    if fhi == 0:
        return hi
    return brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


class Geometry(enum.Enum):
    OTTO = "otto"
    KRETSCHMANN = "kr"

    @classmethod
    def parse(cls, value) -> "Geometry":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"o": "otto", "otto": "otto", "kr": "kr", "k": "kr",
                   "kretschmann": "kr", "kretschmann-raether": "kr"}
        if key not in aliases:
            raise DomainError(f"unknown geometry {value!r} (expected otto or kr)")
        return cls(aliases[key])


@dataclass(frozen=True)
class LayerStack:
    """Prism (layer I) / layer II of thickness d / semi-infinite layer III.

    Otto puts air in the gap and metal beyond; Kretschmann-Raether puts the
    metal film in layer II and air beyond.
    """

    geometry: Geometry
    eps1: float
    d: float
    metal: PermittivityModel

    def __post_init__(self):
        object.__setattr__(self, "geometry", Geometry.parse(self.geometry))
        if not self.eps1 > 1:
            raise DomainError(f"prism permittivity must exceed 1, got {self.eps1}")
        if not self.d > 0:
            raise DomainError(f"layer thickness must be positive, got {self.d}")

    def with_d(self, d: float) -> "LayerStack":
        return LayerStack(self.geometry, self.eps1, d, self.metal)

    def layer_permittivities(self, omega):
        """(eps2, eps3, eps4) with the lossy metal permittivity."""
        em = eval_lossy(self.metal, omega)
        if self.geometry is Geometry.OTTO:
            return 1.0 + 0j, em, 1.0 + 0j
        return em, 1.0 + 0j, 1.0 + 0j


SILVER = PermittivityModel(omega_p=1.402e16, gamma=6.25e13, bg_real_coeff=29.0, bg_imag=0.22)
DEFAULT_PRISM_EPS = 1.51

_MATERIAL_KEYS = ("omega_p", "gamma", "bg_real_coeff", "bg_imag")


def materials_from_sections(sections: list[Section]) -> dict[str, PermittivityModel]:
    out = {}
    for sec in sections:
        if sec.kind != "material":
            continue
        if not sec.name:
            raise ConfigError("material section needs a quoted name", sec.line)
        for key in sec.values:
            if key not in _MATERIAL_KEYS:
                raise ConfigError(f"unknown material key {key!r}", sec.lines[key])
        try:
            model = PermittivityModel(
                omega_p=sec.get_float("omega_p"),
                gamma=sec.get_float("gamma", 0.0),
                bg_real_coeff=sec.get_float("bg_real_coeff", 0.0),
                bg_imag=sec.get_float("bg_imag", 0.0),
            )
        except DomainError as exc:
            raise ConfigError(str(exc), sec.line) from None
        if sec.name in out:
            raise ConfigError(f"duplicate material {sec.name!r}", sec.line)
        out[sec.name] = model
    return out


def load_materials(text: str) -> dict[str, PermittivityModel]:
    return materials_from_sections(parse_config(text))


def default_registry() -> dict[str, PermittivityModel]:
    text = resources.files("qspp").joinpath("data/materials.cfg").read_text(encoding="utf-8")
    return load_materials(text)


def get_material(name: str, extra: dict[str, PermittivityModel] | None = None) -> PermittivityModel:
    registry = default_registry()
    if extra:
        registry.update(extra)
    try:
        return registry[name]
    except KeyError:
        raise DomainError(f"unknown material {name!r}; known: {sorted(registry)}") from None


def wavelength_to_omega(lam: float) -> float:
    return 2 * math.pi * C_LIGHT / lam


def omega_to_wavelength(omega: float) -> float:
    return 2 * math.pi * C_LIGHT / omega

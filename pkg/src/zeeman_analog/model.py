"""Model parameters and derived constants.

Natural units throughout: c = hbar = 1, so masses, energies, frequencies
and inverse lengths share one unit. The particle charge follows the
convention e = -|e| < 0 with alpha = e**2 / (4 pi).
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .errors import DomainError, ParameterError

__all__ = [
    "ModelParams",
    "DerivedConstants",
    "charge_from_alpha",
    "larmor_frequency",
    "derived_constants",
    "validate_params",
    "load_config",
    "CONFIG_KEYS",
]

# keys accepted in a configuration mapping; ``T`` (field tension) is
# accepted but never used by the transparency-regime dynamics
CONFIG_KEYS = frozenset({"alpha", "alpha_inv", "m_p", "sigma", "B", "u0", "b_const", "T"})
_ALPHA_INV_MATCH_RTOL = 1e-12


def charge_from_alpha(alpha: float) -> float:
    """Signed particle charge for a fine-structure constant.

    Parameters
    ----------
    alpha : float
        Fine-structure constant, 0 < alpha < 1.

    Returns
    -------
    float
        ``-sqrt(4 pi alpha)``; always negative.
    """
    if not (isinstance(alpha, (int, float)) and math.isfinite(alpha)) or not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha out of range (0, 1): {alpha!r}")
    return -math.sqrt(4.0 * math.pi * alpha)


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the model.

    ``e_charge`` is derived from ``alpha`` and cannot be passed in.
    ``tension`` is carried for completeness; nothing in the transparency
    regime depends on it.
    """

    alpha: float
    m_p: float
    sigma: float
    B: float
    u0: float
    b_const: float = 1.0
    tension: float | None = None
    e_charge: float = field(init=False)

    def __post_init__(self):
        for name in ("alpha", "m_p", "sigma", "B", "u0", "b_const"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ParameterError(name, f"expected a real number, got {value!r}")
            if not math.isfinite(value):
                raise ParameterError(name, f"must be finite, got {value!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError("alpha", f"alpha out of range (0, 1): {self.alpha!r}")
        if self.m_p <= 0.0:
            raise ParameterError("m_p", f"must be positive, got {self.m_p!r}")
        if self.sigma < 0.0:
            raise ParameterError("sigma", f"must be non-negative, got {self.sigma!r}")
        if self.u0 <= 0.0:
            raise ParameterError("u0", f"must be positive, got {self.u0!r}")
        if self.b_const != 1.0:
            raise ParameterError("b_const", f"only b = 1 is supported, got {self.b_const!r}")
        if self.tension is not None and not math.isfinite(self.tension):
            raise ParameterError("T", f"must be finite, got {self.tension!r}")
        object.__setattr__(self, "e_charge", charge_from_alpha(float(self.alpha)))

    def with_field(self, B: float) -> "ModelParams":
        """Copy with a different magnetic field."""
        return dataclasses.replace(self, B=B)

    def with_alpha(self, alpha: float) -> "ModelParams":
        return dataclasses.replace(self, alpha=alpha)

    def to_dict(self) -> dict[str, Any]:
        out = {
            "alpha": self.alpha,
            "m_p": self.m_p,
            "sigma": self.sigma,
            "B": self.B,
            "u0": self.u0,
            "b_const": self.b_const,
            "e_charge": self.e_charge,
        }
        if self.tension is not None:
            out["T"] = self.tension
        return out


@dataclass(frozen=True)
class DerivedConstants:
    m_eff: float
    omega_L: float


def larmor_frequency(params: ModelParams, m_eff: float) -> float:
    """Larmor frequency ``-e B / (2 m_eff)``.

    Positive for B > 0 because the charge is negative.
    """
    if not m_eff > 0.0:
        raise DomainError(f"m_eff must be positive, got {m_eff!r}")
    return -params.e_charge * params.B / (2.0 * m_eff)


def derived_constants(params: ModelParams, m_eff: float) -> DerivedConstants:
    return DerivedConstants(m_eff=m_eff, omega_L=larmor_frequency(params, m_eff))


def _number(raw: Mapping[str, Any], key: str) -> float:
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParameterError(key, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(key, f"must be finite, got {value!r}")
    return value


def validate_params(raw: Mapping[str, Any], strict: bool = True) -> ModelParams:
    """Build a :class:`ModelParams` from a flat key-value mapping.

    ``alpha`` may be given directly or as ``alpha_inv``. When both are
    present they must agree to 1e-12 relative, and ``alpha_inv`` is used.
    In strict mode unknown keys are rejected.
    """
    if strict:
        unknown = sorted(set(raw) - CONFIG_KEYS)
        if unknown:
            raise ParameterError(unknown[0], f"unknown configuration key(s): {', '.join(unknown)}")

    alpha = None
    if "alpha_inv" in raw:
        alpha_inv = _number(raw, "alpha_inv")
        if alpha_inv <= 1.0:
            raise ParameterError("alpha", f"alpha out of range: alpha_inv = {alpha_inv!r}")
        alpha = 1.0 / alpha_inv
        if "alpha" in raw:
            given = _number(raw, "alpha")
            if abs(given - alpha) > _ALPHA_INV_MATCH_RTOL * alpha:
                raise ParameterError("alpha", f"alpha={given!r} inconsistent with alpha_inv={alpha_inv!r}")
    elif "alpha" in raw:
        alpha = _number(raw, "alpha")
    else:
        raise ParameterError("alpha", "missing (give alpha or alpha_inv)")
    if not 0.0 < alpha < 1.0:
        raise ParameterError("alpha", f"alpha out of range (0, 1): {alpha!r}")

    values = {}
    for key in ("m_p", "sigma", "B", "u0"):
        if key not in raw:
            raise ParameterError(key, "missing")
        values[key] = _number(raw, key)
    b_const = _number(raw, "b_const") if "b_const" in raw else 1.0
    tension = _number(raw, "T") if "T" in raw else None
    return ModelParams(alpha=alpha, b_const=b_const, tension=tension, **values)


def load_config(path: str | Path, strict: bool = True) -> ModelParams:
    """Read a flat JSON object and validate it."""
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParameterError("config", f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParameterError("config", "top level must be a JSON object")
    return validate_params(raw, strict=strict)

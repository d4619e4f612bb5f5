"""Domain types, collective quantities, system poles, and parity rules."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _formulas as fm


class Topology(Enum):
    """Coupling layout of the four connection points along the waveguide."""

    SEPARATE = "separate"
    BRAIDED = "braided"
    NESTED = "nested"

    @property
    def code(self) -> int:
        """Integer code used by the numeric kernels."""
        return _CODES[self]

    @classmethod
    def parse(cls, name: str) -> "Topology":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown topology {name!r}; expected separate, braided or nested"
            ) from None


_CODES = {Topology.SEPARATE: fm.SEPARATE, Topology.BRAIDED: fm.BRAIDED,
          Topology.NESTED: fm.NESTED}

TOPOLOGIES = (Topology.SEPARATE, Topology.BRAIDED, Topology.NESTED)


@dataclass(frozen=True)
class SystemParams:
    """Two-atom waveguide system parameters.

    All frequencies and rates are expressed in units of ``Gamma`` (the
    per-atom waveguide decay rate, kept as an explicit field so formulas stay
    dimensionally readable); the group velocity is 1.  Phases are radians and
    are *not* canonicalized: every formula is 2*pi-periodic.  ``gamma_e`` is
    stored for completeness but inert -- all in-scope formulas assume the
    high-coupling-efficiency limit where it is negligible.
    """

    omega0: float
    phi1: float
    phi2: float
    Gamma: float = 1.0
    gamma_e: float = 0.0

    def __post_init__(self):
        if not self.Gamma > 0:
            raise ValueError(f"Gamma must be > 0, got {self.Gamma}")
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be > 0, got {self.omega0}")
        if self.gamma_e < 0:
            raise ValueError(f"gamma_e must be >= 0, got {self.gamma_e}")


@dataclass(frozen=True)
class PhotonPair:
    """Two incident photon frequencies; E and Delta1 are derived exactly."""

    k1: float
    k2: float

    @property
    def E(self) -> float:
        return self.k1 + self.k2

    @property
    def Delta1(self) -> float:
        return 0.5 * (self.k1 - self.k2)

    @classmethod
    def degenerate(cls, k: float) -> "PhotonPair":
        return cls(k, k)


@dataclass(frozen=True)
class Poles:
    """Roots of D^c, ordered so lambda1 is the most sub-radiant (smallest |Im|)."""

    lambda1: complex
    lambda2: complex

    @property
    def subradiant_rate(self) -> float:
        """Decay rate of the longest-lived collective mode."""
        return abs(self.lambda1.imag)


def collective_shift_and_rate(
    topology: Topology, params: SystemParams, E: float
) -> tuple[complex, complex]:
    """Collective two-photon shift eta_c and complex rate Gamma~_c.

    For the nested layout the square root is taken on the principal branch
    (non-negative real part; +i side on the branch cut).  Downstream
    observables are invariant under the branch choice, so any fixed branch is
    correct; principal is reproducible.
    """
    code = topology.code
    eta = fm.collective_eta(code, params.omega0, params.Gamma, params.phi1,
                            params.phi2, E)
    gt = fm.gamma_tilde(code, params.Gamma, params.phi1, params.phi2)
    return complex(eta), complex(gt)


def system_poles(topology: Topology, params: SystemParams) -> Poles:
    """Both roots of D^c(k) = 0, solved in closed form."""
    code = topology.code
    a = fm.half_decay(code, params.Gamma, params.phi1, params.phi2)
    gt = fm.gamma_tilde(code, params.Gamma, params.phi1, params.phi2)
    roots = sorted(
        (complex(params.omega0 - 1j * a - 0.5j * gt),
         complex(params.omega0 - 1j * a + 0.5j * gt)),
        key=lambda z: (abs(z.imag), z.real),
    )
    return Poles(roots[0], roots[1])


def parity_map(topology: Topology) -> tuple[int, int]:
    """Index permutation giving left-moving atomic amplitudes from right-moving.

    ``(e1L, e2L) = (eR[i], eR[j])`` for the returned ``(i, j)`` with
    ``eR = (e1R, e2R)``.  Separate and braided layouts exchange the atoms
    under parity; the nested layout leaves them unchanged.
    """
    if topology is Topology.NESTED:
        return (0, 1)
    return (1, 0)


def d_value(topology: Topology, params: SystemParams, k) -> complex:
    """Single-photon denominator D^c(k)."""
    return fm.denominator(topology.code, params.omega0, params.Gamma,
                          params.phi1, params.phi2, k)


def dark_params(topology: Topology, params: SystemParams) -> bool:
    """True at exact decoupling points where D^c(omega0) = 0."""
    return bool(
        np.abs(d_value(topology, params, params.omega0))
        < 1e-14 * params.Gamma**2
    )

"""Two-photon bound states and transmission/reflection amplitudes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _formulas as fm
from . import _highprec
from .core import PhotonPair, SystemParams, Topology
from .errors import DenominatorCollision, SingularGreen


@dataclass(frozen=True)
class GreenElements:
    """Atomic-sector Green's-function elements.

    G21 = G12 always; G22 = G11 for the separate and braided layouts.  All
    elements are even functions of the collective rate, so they do not depend
    on the square-root branch used for the nested layout.
    """

    G11: complex
    G12: complex
    G22: complex

    @property
    def G21(self) -> complex:
        return self.G12

    @property
    def det(self) -> complex:
        return self.G11 * self.G22 - self.G12**2


@dataclass(frozen=True)
class BoundState:
    """Exponentially localized two-photon component of the scattering state.

    ``B(x) = Z_a exp((i eta - gt) x / 2) + Z_b exp((i eta + gt) x / 2)`` with
    weights (Z1, Z2) in the transmitted (RR) channel and (Z3, Z4) in the
    reflected (LL) channel.
    """

    topology: Topology
    pair: PhotonPair
    eta: complex
    gamma_tilde: complex
    Z1: complex
    Z2: complex
    Z3: complex
    Z4: complex

    @property
    def rates(self) -> tuple[complex, complex]:
        """The two exponent rates ((i eta -+ gt) / 2)."""
        return (
            0.5 * (1j * self.eta - self.gamma_tilde),
            0.5 * (1j * self.eta + self.gamma_tilde),
        )

    def branch_flipped(self) -> "BoundState":
        """Same bound state expressed on the opposite square-root branch."""
        return BoundState(
            self.topology, self.pair, self.eta, -self.gamma_tilde,
            self.Z2, self.Z1, self.Z4, self.Z3,
        )


def _guard_collective(params: SystemParams, eta: complex, gt: complex,
                      nested: bool) -> None:
    g = params.Gamma
    if abs(eta) < 1e-14 * g or abs(eta**2 + gt**2) < 1e-14 * g**2:
        raise SingularGreen(
            f"two-photon resonance degeneracy: eta = {eta:.3e}, "
            f"eta^2 + gt^2 = {eta**2 + gt**2:.3e}; perturb the total energy"
        )
    if abs(eta + 1j * gt) < 1e-14 * g or abs(eta - 1j * gt) < 1e-14 * g:
        raise DenominatorCollision(f"eta -+ i gt collided with zero: eta = {eta:.3e}")
    if nested and abs(gt) < 1e-14 * g:
        raise DenominatorCollision("nested collective rate vanished")


def green_elements(topology: Topology, params: SystemParams, E: float) -> GreenElements:
    """Green's-function elements at total two-photon energy E.

    Raises :class:`SingularGreen` at two-photon resonance degeneracies
    (vanishing eta_c or eta_c^2 + gt_c^2); the caller should perturb E.
    """
    code = topology.code
    eta = complex(fm.collective_eta(code, params.omega0, params.Gamma,
                                    params.phi1, params.phi2, E))
    gt = complex(fm.gamma_tilde(code, params.Gamma, params.phi1, params.phi2))
    g = params.Gamma
    if abs(eta) < 1e-14 * g or abs(eta**2 + gt**2) < 1e-14 * g**2:
        raise SingularGreen(
            f"two-photon resonance degeneracy at E = {E}: eta = {eta:.3e}"
        )
    g11, g12, g22 = fm.green_elements(code, g, params.phi1, params.phi2, eta, gt)
    return GreenElements(complex(g11), complex(g12), complex(g22))


def bound_state(
    topology: Topology,
    params: SystemParams,
    pair: PhotonPair,
    *,
    high_precision: bool | None = None,
    dps: int = 50,
) -> BoundState:
    """Bound-state weights for the given photon pair.

    ``high_precision=None`` (default) evaluates in double precision and
    switches to the mpmath path automatically when |eta_c| < 0.1 Gamma, where
    the weights suffer catastrophic cancellation; pass True/False to force a
    path.  The high-precision path re-evaluates the same closed forms at
    ``dps`` significant digits (>= 30).
    """
    code = topology.code
    eta = complex(fm.collective_eta(code, params.omega0, params.Gamma,
                                    params.phi1, params.phi2, pair.E))
    gt = complex(fm.gamma_tilde(code, params.Gamma, params.phi1, params.phi2))
    _guard_collective(params, eta, gt, nested=topology is Topology.NESTED)

    if high_precision is None:
        high_precision = abs(eta) < 0.1 * params.Gamma
    if high_precision:
        if dps < 30:
            raise ValueError("high-precision path requires dps >= 30")
        z1, z2, z3, z4, eta, gt = _highprec.z_chain_mp(
            code, params.omega0, params.Gamma, params.phi1, params.phi2,
            pair.k1, pair.k2, dps=dps,
        )
    else:
        out = fm.z_chain(code, params.omega0, params.Gamma, params.phi1,
                         params.phi2, pair.k1, pair.k2)
        z1, z2, z3, z4 = (complex(z) for z in out[:4])
    return BoundState(topology, pair, eta, gt, z1, z2, z3, z4)


def bound_state_eval(bound: BoundState, channel: str, x):
    """Evaluate B(x) in channel "RR" or "LL" at separation(s) x >= 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("separation x must be >= 0 (B is a function of |x|)")
    if channel == "RR":
        za, zb = bound.Z1, bound.Z2
    elif channel == "LL":
        za, zb = bound.Z3, bound.Z4
    else:
        raise ValueError(f"channel must be 'RR' or 'LL', got {channel!r}")
    out = fm.bound_state_value(x, bound.eta, bound.gamma_tilde, za, zb)
    return complex(out) if out.ndim == 0 else out


def two_photon_amplitude(
    topology: Topology,
    params: SystemParams,
    pair: PhotonPair,
    channel: str,
    x_c: float,
    x: float,
    *,
    bound: BoundState | None = None,
) -> complex:
    """Interacting two-photon amplitude f_RR or f_LL.

    ``x_c`` is the pair center position and ``x >= 0`` the separation.  The
    plane-wave factor carries exp(+i E x_c) in transmission and
    exp(-i E x_c) in reflection; its modulus is independent of ``x_c``.
    """
    from .single_photon import scatter_single

    if bound is None:
        bound = bound_state(topology, params, pair)
    sol1 = scatter_single(topology, params, pair.k1, allow_degenerate=True)
    sol2 = scatter_single(topology, params, pair.k2, allow_degenerate=True)
    if channel == "RR":
        plane = sol1.t4 * sol2.t4
        phase = np.exp(1j * pair.E * x_c)
    elif channel == "LL":
        plane = sol1.r1 * sol2.r1
        phase = np.exp(-1j * pair.E * x_c)
    else:
        raise ValueError(f"channel must be 'RR' or 'LL', got {channel!r}")
    b = bound_state_eval(bound, channel, x)
    return complex(
        phase / (np.sqrt(2.0) * np.pi)
        * (plane * np.cos(pair.Delta1 * x) + b)
    )

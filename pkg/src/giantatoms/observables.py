"""Incoherent spectra, inelastic flux, and photon-photon correlations."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from . import _formulas as fm
from . import kernels
from .core import PhotonPair, SystemParams, Topology
from .errors import DarkChannel, PoleOnGrid
from .single_photon import scatter_single
from .two_photon import BoundState, bound_state

_CHANNEL_ALIASES = {
    "transmission": "R", "reflection": "L",
    "r": "R", "l": "L", "rr": "R", "ll": "L", "t": "R",
}


def _channel(channel: str) -> str:
    try:
        return _CHANNEL_ALIASES[channel.strip().lower()]
    except (KeyError, AttributeError):
        raise ValueError(
            f"channel must be 'transmission' or 'reflection', got {channel!r}"
        ) from None


@dataclass
class SpectrumSeries:
    """Incoherent power spectra sampled on a frequency grid."""

    omega_grid: np.ndarray
    S_R: np.ndarray
    S_L: np.ndarray

    @property
    def S_total(self) -> np.ndarray:
        return self.S_R + self.S_L


@dataclass
class CorrelationSeries:
    """Normalized second-order correlation sampled on a separation grid."""

    x_grid: np.ndarray
    g2: np.ndarray
    channel: str


@dataclass(frozen=True)
class LossModel:
    """Beam-splitter waveguide loss with transmission efficiency eta_loss."""

    eta_loss: float

    def __post_init__(self):
        if not 0.0 <= self.eta_loss <= 1.0:
            raise ValueError(f"eta_loss must lie in [0, 1], got {self.eta_loss}")


def spectral_roots(
    topology: Topology, params: SystemParams, pair: PhotonPair
) -> tuple[complex, complex]:
    """Complex roots (omega1, omega2) of the pair-amplitude denominators.

    omega1 carries -i gt_c / 2, omega2 the opposite sign; their real parts
    set the spectral peak positions and imaginary parts the widths.
    """
    code = topology.code
    eta = complex(fm.collective_eta(code, params.omega0, params.Gamma,
                                    params.phi1, params.phi2, pair.E))
    gt = complex(fm.gamma_tilde(code, params.Gamma, params.phi1, params.phi2))
    half_e = 0.5 * pair.E
    return half_e - 0.5 * eta - 0.5j * gt, half_e - 0.5 * eta + 0.5j * gt


def pair_production_amplitude(
    topology: Topology,
    params: SystemParams,
    pair: PhotonPair,
    channel: str,
    omega,
    *,
    bound: BoundState | None = None,
):
    """Pair-production amplitude M_R(omega) or M_L(omega).

    Symmetric about omega = E/2: the scattered photons appear in pairs at
    frequencies mirrored around half the total energy.
    """
    if bound is None:
        bound = bound_state(topology, params, pair)
    w1, w2 = spectral_roots(topology, params, pair)
    for root in (w1, w2, pair.E - w1.conjugate(), pair.E - w2.conjugate()):
        if abs(root.imag) < 1e-12 * params.Gamma and np.any(
            np.abs(np.asarray(omega) - root.real) < 1e-12 * params.Gamma
        ):
            raise PoleOnGrid(f"omega grid touches a real pole at {root.real}")
    y = 0.5 * pair.E - np.asarray(omega, dtype=float)
    mr, ml = fm.pair_amplitudes(y, bound.eta, bound.gamma_tilde,
                                bound.Z1, bound.Z2, bound.Z3, bound.Z4)
    out = np.asarray(mr if _channel(channel) == "R" else ml)
    return complex(out) if out.ndim == 0 else out


def default_omega_grid(pair: PhotonPair, halfwidth: float = 6.0,
                       points: int = 2001) -> np.ndarray:
    """Frequency grid centred on E/2, covering every Table-style feature."""
    return np.linspace(0.5 * pair.E - halfwidth, 0.5 * pair.E + halfwidth, points)


def incoherent_spectrum(
    topology: Topology,
    params: SystemParams,
    pair: PhotonPair,
    omega_grid,
    *,
    bound: BoundState | None = None,
) -> SpectrumSeries:
    """Incoherent power spectra S_R, S_L on the given frequency grid."""
    omega_grid = np.asarray(omega_grid, dtype=float)
    if omega_grid.size == 0:
        raise ValueError("omega grid must be non-empty")
    if omega_grid.size > 1 and not np.all(np.diff(omega_grid) > 0):
        raise ValueError("omega grid must be strictly increasing")
    if bound is None:
        bound = bound_state(topology, params, pair)
    s_r, s_l = kernels.spectrum_pair(
        omega_grid, pair.E, bound.eta, bound.gamma_tilde,
        bound.Z1, bound.Z2, bound.Z3, bound.Z4,
    )
    return SpectrumSeries(omega_grid, s_r, s_l)


def coherent_weight(topology: Topology, params: SystemParams,
                    pair: PhotonPair, channel: str) -> float:
    """Scalar weight of the coherent (delta-function) spectral component.

    The delta peak itself is never represented on a numeric grid; this is the
    |t4(k1) t4(k2)|^2 (or reflection) weight it would carry.
    """
    s1 = scatter_single(topology, params, pair.k1, allow_degenerate=True)
    s2 = scatter_single(topology, params, pair.k2, allow_degenerate=True)
    if _channel(channel) == "R":
        return abs(s1.t4 * s2.t4) ** 2
    return abs(s1.r1 * s2.r1) ** 2


def total_flux(topology: Topology, params: SystemParams, k: float) -> float:
    """Closed-form total inelastic flux for a degenerate pair at k.

    Raises :class:`DenominatorCollision` when evaluated exactly on a
    decoherence-free phase line, where the closed form degenerates to a
    removable 0/0; :func:`total_flux_quadrature` remains finite there.
    """
    out = fm.z_chain(topology.code, params.omega0, params.Gamma,
                     params.phi1, params.phi2, float(k), float(k))
    z1, z2, z3, z4, eta, gt = (complex(v) for v in out[:6])
    if abs(z1) + abs(z2) + abs(z3) + abs(z4) < 1e-20:
        return 0.0
    with np.errstate(all="ignore"):
        f = float(fm.flux_closed_form_guarded(eta, gt, z1, z2, z3, z4))
    if not np.isfinite(f):
        from .errors import DenominatorCollision

        raise DenominatorCollision(
            "flux closed form is 0/0 on a decoherence-free line; "
            "use total_flux_quadrature"
        )
    return f


def total_flux_quadrature(
    topology: Topology,
    params: SystemParams,
    k: float,
    tol: float = 1e-9,
    *,
    window: float = 200.0,
) -> float:
    """Inelastic flux by adaptive quadrature of S_total over omega.

    The peak region |omega - E/2| <= ``window`` (in Gamma units) is integrated
    with subdivision points at the spectral peaks; the smooth ~1/y^4
    Lorentzian tails beyond it are handled by separate semi-infinite
    quadratures, so the truncation itself introduces no error beyond the
    quadrature tolerance (see :func:`flux_tail_bound` for the a-priori tail
    size).
    """
    pair = PhotonPair.degenerate(float(k))
    bound = bound_state(topology, params, pair)
    eta, gt = bound.eta, bound.gamma_tilde
    z = (bound.Z1, bound.Z2, bound.Z3, bound.Z4)
    if sum(abs(v) for v in z) < 1e-20:
        return 0.0

    def integrand(omega):
        mr, ml = fm.pair_amplitudes(0.5 * pair.E - omega, eta, gt, *z)
        return (abs(mr) ** 2 + abs(ml) ** 2) / np.pi**2

    w1, w2 = spectral_roots(topology, params, pair)
    half_e = 0.5 * pair.E
    lo, hi = half_e - window * params.Gamma, half_e + window * params.Gamma
    pts = sorted(
        {
            float(np.clip(p, lo, hi))
            for p in (w1.real, w2.real, pair.E - w1.real, pair.E - w2.real, half_e)
        }
    )
    epsrel = min(tol, 1e-8)
    with warnings.catch_warnings():
        # roundoff-limited refinement near very narrow peaks is fine as long
        # as the reported error estimate stays small against the result
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(integrand, lo, hi, points=pts, limit=400,
                        epsabs=1e-14, epsrel=epsrel)
        tail_hi, err_hi = quad(integrand, hi, np.inf, limit=200, epsrel=epsrel)
        tail_lo, err_lo = quad(integrand, -np.inf, lo, limit=200, epsrel=epsrel)
    total = val + tail_hi + tail_lo
    if (err + err_hi + err_lo) > 1e-4 * total + 1e-12:
        raise ArithmeticError(
            f"quadrature error estimate {err + err_hi + err_lo:.2e} too large "
            f"for F = {total:.6e}"
        )
    return float(total)


def flux_tail_bound(bound: BoundState, y_max: float) -> float:
    """Upper bound on the spectral weight beyond |omega - E/2| = y_max."""
    c1 = -0.5j * bound.eta + 0.5 * bound.gamma_tilde
    c2 = -0.5j * bound.eta - 0.5 * bound.gamma_tilde
    cmax = max(abs(c1), abs(c2))
    if y_max <= 2.0 * cmax:
        return np.inf
    margin = 1.0 / (1.0 - (cmax / y_max) ** 2) ** 2
    k_r = 2.0 * (abs(bound.Z1 * c1) + abs(bound.Z2 * c2))
    k_l = 2.0 * (abs(bound.Z3 * c1) + abs(bound.Z4 * c2))
    return margin * 2.0 * (k_r**2 + k_l**2) / (3.0 * y_max**3 * np.pi**2)


def differential_correlation(
    topology: Topology, params: SystemParams, k: float, channel: str
) -> float:
    """Differential correlation chi_R or chi_L for a degenerate pair at k.

    chi > 0 marks photon-induced tunneling (the bound state enhances joint
    detection, bunching); chi < 0 marks blockade.
    """
    pair = PhotonPair.degenerate(float(k))
    bound = bound_state(topology, params, pair)
    s = scatter_single(topology, params, float(k), allow_degenerate=True)
    if _channel(channel) == "R":
        w = s.t4 * s.t4 + bound.Z1 + bound.Z2
        return float(abs(w) ** 2 - abs(s.t4) ** 4)
    w = s.r1 * s.r1 + bound.Z3 + bound.Z4
    return float(abs(w) ** 2 - abs(s.r1) ** 4)


def default_x_grid(x_max: float = 12.0, points: int = 1200) -> np.ndarray:
    """Separation grid in 1/Gamma units."""
    return np.linspace(0.0, x_max, points)


def g2_normalized(
    topology: Topology,
    params: SystemParams,
    pair: PhotonPair,
    channel: str,
    x_grid,
    *,
    bound: BoundState | None = None,
) -> CorrelationSeries:
    """Normalized second-order correlation g2(x) over the separation grid.

    Raises :class:`DarkChannel` when the normalizing single-photon amplitude
    product is below 1e-12 (e.g. reflection at a decoupling point), where the
    normalized correlation is undefined.
    """
    x_grid = np.asarray(x_grid, dtype=float)
    if np.any(x_grid < 0):
        raise ValueError("separations must be >= 0")
    ch = _channel(channel)
    s1 = scatter_single(topology, params, pair.k1, allow_degenerate=True)
    s2 = scatter_single(topology, params, pair.k2, allow_degenerate=True)
    norm = s1.t4 * s2.t4 if ch == "R" else s1.r1 * s2.r1
    if abs(norm) <= 1e-12:
        raise DarkChannel(
            f"{'transmission' if ch == 'R' else 'reflection'} amplitude product "
            f"|{norm:.2e}| below threshold; normalized g2 undefined"
        )
    if bound is None:
        bound = bound_state(topology, params, pair)
    za, zb = (bound.Z1, bound.Z2) if ch == "R" else (bound.Z3, bound.Z4)
    g2 = kernels.g2_curve(x_grid, bound.eta, bound.gamma_tilde, za, zb, norm)
    return CorrelationSeries(
        x_grid, g2, "transmission" if ch == "R" else "reflection"
    )


def apply_loss(loss: LossModel, observable):
    """Propagate beam-splitter loss (vacuum noise) through an observable.

    Spectra scale by eta, differential correlations by eta^2, and normalized
    second-order correlations are unchanged.
    """
    eta = loss.eta_loss
    if isinstance(observable, SpectrumSeries):
        return replace(observable, S_R=eta * observable.S_R,
                       S_L=eta * observable.S_L)
    if isinstance(observable, CorrelationSeries):
        return observable
    if isinstance(observable, (float, int, np.floating)):
        return float(eta**2 * observable)
    raise TypeError(f"cannot apply loss to {type(observable).__name__}")

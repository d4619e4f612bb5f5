"""Hot grid kernels: numba-jitted loops with a vectorized numpy fallback.

Both implementations always exist side by side (``*_numba`` aliases are
``None`` when numba is unavailable); the public names dispatch to the backend
selected by the ``GIANTATOMS_BACKEND`` environment variable, see
:mod:`giantatoms._backend`.  The jitted path compiles clones of the pure
formula functions from :mod:`giantatoms._formulas` so the originals remain
plain python/numpy callables.

Grid evaluations are embarrassingly parallel but run sequentially so outputs
are deterministic and bit-stable regardless of backend availability.
"""

from __future__ import annotations

import types

import numpy as np

from . import _formulas as fm
from ._backend import HAVE_NUMBA, USE_NUMBA, backend_name, njit

_FLUX_ZERO_TOL = 1e-20  # all-|Z| threshold below which F is exactly 0

# ---------------------------------------------------------------------------
# vectorized numpy implementations
# ---------------------------------------------------------------------------


def spectrum_pair_numpy(omega_grid, E, eta, gt, z1, z2, z3, z4):
    """Incoherent spectra (S_R, S_L) = |M_{R,L}|^2 / pi^2 over omega_grid."""
    with np.errstate(all="ignore"):
        mr, ml = fm.pair_amplitudes(0.5 * E - omega_grid, eta, gt, z1, z2, z3, z4)
    pi2 = np.pi**2
    return (mr.real**2 + mr.imag**2) / pi2, (ml.real**2 + ml.imag**2) / pi2


def g2_curve_numpy(x_grid, eta, gt, za, zb, norm):
    """Normalized second-order correlation over x_grid."""
    with np.errstate(all="ignore"):
        return fm.g2_value(x_grid, eta, gt, za, zb, norm)


def bound_state_curve_numpy(x_grid, eta, gt, za, zb):
    """Bound-state wave function B(x) over x_grid."""
    return fm.bound_state_value(x_grid, eta, gt, za, zb)


def chi_phase_map_numpy(topo, om0, gamma, p1_grid, p2_grid, k):
    """(chi_R, chi_L) on the phase mesh p1_grid x p2_grid at k1 = k2 = k."""
    p1m, p2m = np.meshgrid(p1_grid, p2_grid, indexing="ij")
    with np.errstate(all="ignore"):
        return fm.chi_pair(topo, om0, gamma, p1m, p2m, k)


def _flux_guarded_arrays(eta, gt, z1, z2, z3, z4):
    # vectorized twin of _formulas.flux_closed_form_guarded: poison removable
    # 0/0 denominators (decoherence-free lines) with nan instead of noise
    dd = 1j * np.conj(eta) - 1j * eta
    a1 = z1.real**2 + z1.imag**2 + z3.real**2 + z3.imag**2
    a2 = z2.real**2 + z2.imag**2 + z4.real**2 + z4.imag**2
    c12 = np.conj(z1) * z2 + np.conj(z3) * z4
    f = np.zeros_like(np.broadcast_arrays(dd + 0j, a1 + 0j)[0])
    poison = np.zeros(f.shape, dtype=bool)
    for num, den in (
        (a1 + 0j, dd + np.conj(gt) + gt),
        (a2 + 0j, dd - np.conj(gt) - gt),
        (c12, dd + np.conj(gt) - gt),
        (np.conj(c12), dd - np.conj(gt) + gt),
    ):
        num, den = np.broadcast_arrays(num + 0 * f, den + 0 * f)
        small = np.abs(den) < 1e-12
        poison |= small & (num != 0)
        f = f + np.where(small, 0.0, num / np.where(small, 1.0, den))
    return np.where(poison, np.nan, (8.0 / np.pi) * f.real)


def flux_curve_numpy(topo, om0, gamma, p1, p2, k_grid):
    """Closed-form inelastic flux F(k) over k_grid (degenerate pair).

    Exactly on decoherence-free phase lines the closed form is a removable
    0/0 and the affected points come back as nan; integrate the pair
    spectrum instead there.
    """
    k_grid = np.asarray(k_grid, dtype=float)
    with np.errstate(all="ignore"):
        z1, z2, z3, z4, eta, gt = fm.z_chain(topo, om0, gamma, p1, p2,
                                             k_grid, k_grid)[:6]
        f = _flux_guarded_arrays(eta + 0 * k_grid * 1j, gt + 0 * k_grid * 1j,
                                 z1, z2, z3, z4)
    zmag = np.abs(z1) + np.abs(z2) + np.abs(z3) + np.abs(z4)
    return np.where(zmag < _FLUX_ZERO_TOL, 0.0, f)


def flux_phase_map_numpy(topo, om0, gamma, p1_grid, p2_grid, k):
    """Closed-form inelastic flux on a phase mesh at k1 = k2 = k."""
    p1m, p2m = np.meshgrid(p1_grid, p2_grid, indexing="ij")
    with np.errstate(all="ignore"):
        z1, z2, z3, z4, eta, gt = fm.z_chain(topo, om0, gamma, p1m, p2m, k, k)[:6]
        f = _flux_guarded_arrays(eta, gt, z1, z2, z3, z4)
    zmag = np.abs(z1) + np.abs(z2) + np.abs(z3) + np.abs(z4)
    return np.where(zmag < _FLUX_ZERO_TOL, 0.0, f)


# ---------------------------------------------------------------------------
# numba-jitted implementations
# ---------------------------------------------------------------------------

spectrum_pair_numba = None
g2_curve_numba = None
bound_state_curve_numba = None
chi_phase_map_numba = None
flux_curve_numba = None
flux_phase_map_numba = None

if HAVE_NUMBA:
    # Compile clones of the formula functions into a private namespace so
    # cross-calls resolve to the jitted versions while giantatoms._formulas
    # keeps its plain python/numpy callables for the fallback path.
    # __name__ must be a real importable module for numba's on-disk cache to
    # resolve the clones when a later process loads the cached artifacts.
    _JG: dict = {
        "np": np,
        "SEPARATE": fm.SEPARATE,
        "BRAIDED": fm.BRAIDED,
        "NESTED": fm.NESTED,
        "__name__": fm.__name__,
    }
    for _name in (
        "gamma_tilde",
        "collective_eta",
        "half_decay",
        "denominator",
        "amplitudes",
        "green_elements",
        "upsilons",
        "z_from_parts",
        "z_chain",
        "pair_amplitudes",
        "bound_state_value",
        "g2_value",
        "flux_closed_form",
        "flux_closed_form_guarded",
        "chi_pair",
    ):
        _pyfunc = getattr(fm, _name)
        _clone = types.FunctionType(
            _pyfunc.__code__, _JG, _pyfunc.__name__, _pyfunc.__defaults__
        )
        _JG[_name] = njit(cache=True)(_clone)

    _j_pair_amplitudes = _JG["pair_amplitudes"]
    _j_g2_value = _JG["g2_value"]
    _j_bound_state_value = _JG["bound_state_value"]
    _j_chi_pair = _JG["chi_pair"]
    _j_z_chain = _JG["z_chain"]
    _j_flux_guarded = _JG["flux_closed_form_guarded"]

    @njit(cache=True)
    def spectrum_pair_numba(omega_grid, E, eta, gt, z1, z2, z3, z4):
        n = omega_grid.shape[0]
        sr = np.empty(n)
        sl = np.empty(n)
        pi2 = np.pi**2
        for i in range(n):
            mr, ml = _j_pair_amplitudes(0.5 * E - omega_grid[i], eta, gt,
                                        z1, z2, z3, z4)
            sr[i] = (mr.real**2 + mr.imag**2) / pi2
            sl[i] = (ml.real**2 + ml.imag**2) / pi2
        return sr, sl

    @njit(cache=True)
    def g2_curve_numba(x_grid, eta, gt, za, zb, norm):
        n = x_grid.shape[0]
        out = np.empty(n)
        for i in range(n):
            out[i] = _j_g2_value(x_grid[i], eta, gt, za, zb, norm)
        return out

    @njit(cache=True)
    def bound_state_curve_numba(x_grid, eta, gt, za, zb):
        n = x_grid.shape[0]
        out = np.empty(n, dtype=np.complex128)
        for i in range(n):
            out[i] = _j_bound_state_value(x_grid[i], eta, gt, za, zb)
        return out

    @njit(cache=True)
    def chi_phase_map_numba(topo, om0, gamma, p1_grid, p2_grid, k):
        n1 = p1_grid.shape[0]
        n2 = p2_grid.shape[0]
        cr = np.empty((n1, n2))
        cl = np.empty((n1, n2))
        for i in range(n1):
            for j in range(n2):
                a, b = _j_chi_pair(topo, om0, gamma, p1_grid[i], p2_grid[j], k)
                cr[i, j] = a
                cl[i, j] = b
        return cr, cl

    @njit(cache=True)
    def flux_curve_numba(topo, om0, gamma, p1, p2, k_grid):
        n = k_grid.shape[0]
        out = np.empty(n)
        for i in range(n):
            z1, z2, z3, z4, eta, gt, _, _, _, _ = _j_z_chain(
                topo, om0, gamma, p1, p2, k_grid[i], k_grid[i]
            )
            zmag = abs(z1) + abs(z2) + abs(z3) + abs(z4)
            if zmag < _FLUX_ZERO_TOL:
                out[i] = 0.0
            else:
                out[i] = _j_flux_guarded(eta, gt, z1, z2, z3, z4)
        return out

    @njit(cache=True)
    def flux_phase_map_numba(topo, om0, gamma, p1_grid, p2_grid, k):
        n1 = p1_grid.shape[0]
        n2 = p2_grid.shape[0]
        out = np.empty((n1, n2))
        for i in range(n1):
            for j in range(n2):
                z1, z2, z3, z4, eta, gt, _, _, _, _ = _j_z_chain(
                    topo, om0, gamma, p1_grid[i], p2_grid[j], k, k
                )
                zmag = abs(z1) + abs(z2) + abs(z3) + abs(z4)
                if zmag < _FLUX_ZERO_TOL:
                    out[i, j] = 0.0
                else:
                    out[i, j] = _j_flux_guarded(eta, gt, z1, z2, z3, z4)
        return out


# ---------------------------------------------------------------------------
# public aliases, selected by GIANTATOMS_BACKEND
# ---------------------------------------------------------------------------

if USE_NUMBA:
    spectrum_pair = spectrum_pair_numba
    g2_curve = g2_curve_numba
    bound_state_curve = bound_state_curve_numba
    chi_phase_map = chi_phase_map_numba
    flux_curve = flux_curve_numba
    flux_phase_map = flux_phase_map_numba
else:
    spectrum_pair = spectrum_pair_numpy
    g2_curve = g2_curve_numpy
    bound_state_curve = bound_state_curve_numpy
    chi_phase_map = chi_phase_map_numpy
    flux_curve = flux_curve_numpy
    flux_phase_map = flux_phase_map_numpy

BACKEND = backend_name()

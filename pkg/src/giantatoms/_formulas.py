"""Closed-form scattering formulas shared by the numpy and numba paths.

Every function here is written so that it works elementwise on numpy arrays
(the vectorized fallback) and compiles under ``numba.njit`` for scalar
arguments (the jitted kernels in :mod:`giantatoms.kernels`).  That rules out
value-dependent branching; singular-point guards live in the callers.

Topology codes: 0 = separate, 1 = braided, 2 = nested.
"""

import numpy as np

SEPARATE = 0
BRAIDED = 1
NESTED = 2


def gamma_tilde(topo, gamma, p1, p2):
    """Complex collective rate for the given coupling layout."""
    if topo == SEPARATE:
        return gamma * np.exp(1j * p2) * (1.0 + np.exp(1j * p1)) ** 2
    elif topo == BRAIDED:
        return gamma * (
            2.0 * np.exp(1j * p1) + np.exp(1j * p2) + np.exp(1j * (2.0 * p1 + p2))
        )
    elif topo == NESTED:
        # principal square root: Re >= 0, +i side of the negative real axis
        return gamma * np.sqrt(
            np.exp(2j * p2) * (1.0 + np.exp(2j * p1)) ** 2
            + 4.0 * np.exp(2j * p1) * (1.0 + 2.0 * np.exp(1j * p2))
        )
    else:
        raise ValueError("unknown topology code")


def collective_eta(topo, om0, gamma, p1, p2, e_total):
    """Complex two-photon shift at total energy ``e_total``."""
    if topo == SEPARATE:
        return e_total - 2.0 * om0 + 2j * gamma * (1.0 + np.exp(1j * p1))
    elif topo == BRAIDED:
        return e_total - 2.0 * om0 + 2j * gamma * (1.0 + np.exp(1j * (p1 + p2)))
    elif topo == NESTED:
        return e_total - 2.0 * om0 + 2j * gamma * (
            1.0 + np.cos(p1) * np.exp(1j * (p1 + p2))
        )
    else:
        raise ValueError("unknown topology code")


def half_decay(topo, gamma, p1, p2):
    """Single-excitation complex half-width a in D = (om0 - k - i a)^2 + gt^2/4."""
    if topo == SEPARATE:
        return gamma * (1.0 + np.exp(1j * p1))
    elif topo == BRAIDED:
        return gamma * (1.0 + np.exp(1j * (p1 + p2)))
    elif topo == NESTED:
        return 0.5 * gamma * (2.0 + np.exp(1j * p2) + np.exp(1j * (2.0 * p1 + p2)))
    else:
        raise ValueError("unknown topology code")


def denominator(topo, om0, gamma, p1, p2, k):
    """Single-photon denominator D^c(k)."""
    a = half_decay(topo, gamma, p1, p2)
    gt = gamma_tilde(topo, gamma, p1, p2)
    return (om0 - k - 1j * a) ** 2 + 0.25 * gt**2


def amplitudes(topo, om0, gamma, p1, p2, k):
    """Single-photon amplitudes for a right-moving photon.

    Returns ``(t4, r1, e1, e2, D)`` with D the common denominator.
    """
    d = k - om0
    if topo == SEPARATE:
        gt = gamma_tilde(SEPARATE, gamma, p1, p2)
        dc = (om0 - k - 1j * gamma * (1.0 + np.exp(1j * p1))) ** 2 + 0.25 * gt**2
        t4 = (d - gamma * np.sin(p1)) ** 2 / dc
        r1 = (
            -4j
            * gamma
            * np.cos(0.5 * p1) ** 2
            * (d * np.cos(p1 + p2) + gamma * (np.sin(p2) + np.sin(p1 + p2)))
            / dc
        )
        e1 = (
            0.5
            * np.exp(-0.5j * p2)
            * np.sqrt(gamma / np.pi)
            * (1.0 + np.exp(-1j * p1))
            * (
                d
                + 1j * gamma * (1.0 + np.exp(1j * p1))
                - 0.5j * gt * np.exp(1j * (p1 + p2))
            )
            / dc
        )
        e2 = (
            0.5
            * np.exp(0.5j * p2)
            * np.sqrt(gamma / np.pi)
            * (1.0 + np.exp(1j * p1))
            * (d - gamma * np.sin(p1))
            / dc
        )
        return t4, r1, e1, e2, dc
    elif topo == BRAIDED:
        gt = gamma_tilde(BRAIDED, gamma, p1, p2)
        dc = (om0 - k - 1j * gamma * (1.0 + np.exp(1j * (p1 + p2)))) ** 2 + 0.25 * gt**2
        t4 = (
            d**2
            - 2.0 * gamma * d * np.sin(p1 + p2)
            + gamma**2 * np.sin(p1) * (np.sin(p1) - 2.0 * np.sin(p2))
        ) / dc
        r1 = (
            -4j
            * gamma
            * np.cos(0.5 * (p1 + p2)) ** 2
            * (d * np.cos(p1) + gamma * np.sin(p1))
            / dc
        )
        pre = 0.5 * np.exp(0.5j * p2) * np.sqrt(gamma / np.pi) * (
            1.0 + np.exp(-1j * (p1 + p2))
        )
        e1 = (
            pre
            * (
                d
                - 0.5j
                * gamma
                * (-1.0 + np.exp(2j * p1))
                * (2.0 + np.exp(1j * (p1 + p2)))
            )
            / dc
        )
        e2 = (
            pre
            * (
                np.exp(1j * p1) * d
                + 0.5j * gamma * np.exp(1j * p2) * (-1.0 + np.exp(2j * p1))
            )
            / dc
        )
        return t4, r1, e1, e2, dc
    elif topo == NESTED:
        gt = gamma_tilde(NESTED, gamma, p1, p2)
        dc = (
            om0
            - k
            - 0.5j * gamma * (2.0 + np.exp(1j * p2) + np.exp(1j * (2.0 * p1 + p2)))
        ) ** 2 + 0.25 * gt**2
        t4 = (
            (d - gamma * np.sin(p2)) * (d - gamma * np.sin(2.0 * p1 + p2))
            - gamma**2 * (np.sin(p1) + np.sin(p1 + p2)) ** 2
        ) / dc
        r1 = (
            -2j
            * gamma
            * (
                d * (1.0 + np.cos(p1) * np.cos(p1 + p2))
                + gamma * np.sin(p1) * (np.cos(p1) + np.cos(p1 + p2))
            )
            / dc
        )
        e1 = (
            np.sqrt(gamma / np.pi)
            * (
                d * np.cos(p1 + 0.5 * p2)
                + 2.0 * gamma * np.sin(p1) * np.cos(0.5 * p2)
            )
            / dc
        )
        e2 = np.sqrt(gamma / np.pi) * d * np.cos(0.5 * p2) / dc
        return t4, r1, e1, e2, dc
    else:
        raise ValueError("unknown topology code")


def green_elements(topo, gamma, p1, p2, eta, gt):
    """Atomic-sector Green's-function elements ``(G11, G12, G22)``."""
    if topo == SEPARATE or topo == BRAIDED:
        den = 2.0 * eta * (eta**2 + gt**2)
        g11 = (2.0 * eta**2 + gt**2) / den
        g12 = -(gt**2) / den
        return g11, g12, g11
    elif topo == NESTED:
        den = eta * (eta**2 + gt**2)
        w = 1j * gamma * eta * np.exp(1j * p2) * (1.0 - np.exp(2j * p1))
        q = 2.0 * gamma**2 * np.exp(2j * p1) * (1.0 + np.exp(1j * p2)) ** 2
        g11 = (eta**2 + w + q) / den
        g22 = (eta**2 - w + q) / den
        g12 = -q / den
        return g11, g12, g22
    else:
        raise ValueError("unknown topology code")


def upsilons(topo, om0, gamma, p1, p2, eta, gt):
    """Bound-state expansion coefficients ``(U1, U2, U3, U4)``."""
    if topo == SEPARATE:
        fp = np.exp(1j * (p1 + p2))
        fm = np.exp(-1j * (p1 + p2))
        c = 2j * gamma * (1.0 + np.cos(p1))
        dp = 2.0 * eta * (eta + 1j * gt)
        dm = 2.0 * eta * (eta - 1j * gt)
        u1 = (2.0 * eta + 1j * gt - c) / dp * (fp + 1.0)
        u2 = (2.0 * eta - 1j * gt - c) / dm * (fp - 1.0)
        u3 = (2.0 * eta + 1j * gt * (1.0 - fp)) / dp * (fm + 1.0)
        u4 = (2.0 * eta - 1j * gt * (1.0 + fp)) / dm * (fm - 1.0)
        return u1, u2, u3, u4
    elif topo == BRAIDED:
        f1 = np.exp(1j * p1)
        f1m = np.exp(-1j * p1)
        c = 2j * gamma * (1.0 + np.exp(1j * p2) * np.cos(p1))
        dp = 2.0 * eta * (eta + 1j * gt)
        dm = 2.0 * eta * (eta - 1j * gt)
        u1 = (2.0 * eta + 1j * gt - c) / dp * (f1 + 1.0)
        u2 = (2.0 * eta - 1j * gt - c) / dm * (f1 - 1.0)
        u3 = (2.0 * eta + 1j * gt * (1.0 - f1)) / dp * (f1m + 1.0)
        u4 = (2.0 * eta - 1j * gt * (1.0 + f1)) / dm * (f1m - 1.0)
        return u1, u2, u3, u4
    elif topo == NESTED:
        a = half_decay(NESTED, gamma, p1, p2)
        w2 = 1j * a + 0.5j * gt  # om0 - lambda_2
        w1 = 1j * a - 0.5j * gt  # om0 - lambda_1
        cc = np.cos(0.5 * p2) ** 2
        cpp = np.cos(p1 + 0.5 * p2) ** 2
        edge = gamma**2 * (np.exp(2j * p1) - 1.0) * (np.exp(1j * p2) + 1.0)
        body = cc * edge - eta * gamma * np.sin(p1) * (np.cos(p1) + np.cos(p1 + p2))
        dp = eta * gt * (eta + 1j * gt)
        dm = eta * gt * (eta - 1j * gt)
        u1 = (body + eta * w2 * cpp) / dp
        u2 = (body + eta * w1 * cpp) / dm
        u3 = cc * (eta * w2 - edge) / dp
        u4 = cc * (eta * w1 - edge) / dm
        return u1, u2, u3, u4
    else:
        raise ValueError("unknown topology code")


def z_from_parts(topo, gamma, p1, p2, ee1, ee2, eta, gt, g11, g12, g22,
                 u1, u2, u3, u4):
    """Bound-state weights from precomputed pieces.

    ``ee1 = e1(k1) e1(k2)`` and ``ee2 = e2(k1) e2(k2)`` are products of the
    right-moving atomic excitation amplitudes at the two photon energies.

    The Green's-element combinations are divided out in exact closed form
    (1/(G11 - G12) = eta, 1/(G11 + G12) = (eta^2 + gt^2)/eta for the
    separate/braided layouts, and the analogously simplified determinant for
    nested) instead of forming G11^2 - G12^2 numerically, which cancels
    catastrophically near the decoupling lines where G ~ 1/eta diverges.

    Normalization: the overall weight prefactor is fixed by two exact
    requirements rather than by any literature convention: (i) a lone
    two-level emitter cannot reflect two photons at once, so B_LL(0) must
    cancel r1(k1) r1(k2) exactly when one atom decouples, and (ii) the
    weak-drive master-equation oracle must reproduce g2(0) in both channels.
    Both pin the prefactors at 2 pi Gamma cos^2(...) (separate/braided) and
    4 pi Gamma (nested).
    """
    if topo == SEPARATE or topo == BRAIDED:
        if topo == SEPARATE:
            cpref = np.cos(0.5 * p1) ** 2
        else:
            cpref = np.cos(0.5 * (p1 + p2)) ** 2
        pref = 2.0 * np.pi * gamma * cpref
        inv_sum = (eta**2 + gt**2) / eta  # 1 / (G11 + G12)
        inv_dif = eta  # 1 / (G11 - G12)
        es, ed = ee1 + ee2, ee1 - ee2
        z1 = pref * 0.5 * (es * (u1 + u3) * inv_sum + ed * (u1 - u3) * inv_dif)
        z2 = pref * 0.5 * (es * (u2 + u4) * inv_sum + ed * (u2 - u4) * inv_dif)
        z3 = pref * 0.5 * (es * (u1 + u3) * inv_sum - ed * (u1 - u3) * inv_dif)
        z4 = pref * 0.5 * (es * (u2 + u4) * inv_sum - ed * (u2 - u4) * inv_dif)
        return z1, z2, z3, z4
    elif topo == NESTED:
        # det(G) = (eta^2 + 2 q + gamma^2 e^{2i p2} (1 - e^{2i p1})^2)
        #          / (eta^2 + gt^2)^2  with q the shared off-diagonal piece
        q = 2.0 * gamma**2 * np.exp(2j * p1) * (1.0 + np.exp(1j * p2)) ** 2
        det = (
            eta**2 + 2.0 * q
            + gamma**2 * np.exp(2j * p2) * (1.0 - np.exp(2j * p1)) ** 2
        ) / (eta**2 + gt**2) ** 2
        qq = 4j * np.pi * gamma / det
        z1 = -qq * (ee1 * (u1 * g22 - u3 * g12) + ee2 * (u3 * g11 - u1 * g12))
        z2 = qq * (ee1 * (u2 * g22 - u4 * g12) + ee2 * (u4 * g11 - u2 * g12))
        return z1, z2, z1, z2
    else:
        raise ValueError("unknown topology code")


def z_chain(topo, om0, gamma, p1, p2, k1, k2):
    """Full bound-state chain at photon energies (k1, k2).

    Returns ``(Z1, Z2, Z3, Z4, eta, gt, t4_k1, t4_k2, r1_k1, r1_k2)``.
    """
    gt = gamma_tilde(topo, gamma, p1, p2)
    eta = collective_eta(topo, om0, gamma, p1, p2, k1 + k2)
    t4a, r1a, e1a, e2a, _ = amplitudes(topo, om0, gamma, p1, p2, k1)
    t4b, r1b, e1b, e2b, _ = amplitudes(topo, om0, gamma, p1, p2, k2)
    g11, g12, g22 = green_elements(topo, gamma, p1, p2, eta, gt)
    u1, u2, u3, u4 = upsilons(topo, om0, gamma, p1, p2, eta, gt)
    z1, z2, z3, z4 = z_from_parts(
        topo, gamma, p1, p2, e1a * e1b, e2a * e2b, eta, gt,
        g11, g12, g22, u1, u2, u3, u4
    )
    return z1, z2, z3, z4, eta, gt, t4a, t4b, r1a, r1b


def pair_amplitudes(y, eta, gt, z1, z2, z3, z4):
    """Photon-pair production amplitudes ``(M_R, M_L)`` at y = E/2 - omega."""
    a1 = 1.0 / (1j * y - 0.5j * eta + 0.5 * gt) + 1.0 / (
        -1j * y - 0.5j * eta + 0.5 * gt
    )
    a2 = 1.0 / (1j * y - 0.5j * eta - 0.5 * gt) + 1.0 / (
        -1j * y - 0.5j * eta - 0.5 * gt
    )
    return z1 * a1 + z2 * a2, z3 * a1 + z4 * a2


def bound_state_value(x, eta, gt, za, zb):
    """B(x) = Za e^{(i eta - gt) x / 2} + Zb e^{(i eta + gt) x / 2}, x >= 0."""
    return za * np.exp(0.5 * (1j * eta - gt) * x) + zb * np.exp(
        0.5 * (1j * eta + gt) * x
    )


def g2_value(x, eta, gt, za, zb, norm):
    """Normalized second-order correlation at separation x >= 0.

    ``norm`` is the product of single-photon amplitudes of the channel
    (t4(k1) t4(k2) in transmission, r1(k1) r1(k2) in reflection).
    """
    w = (
        1.0
        + (za / norm) * np.exp(0.5 * (1j * eta - gt) * x)
        + (zb / norm) * np.exp(0.5 * (1j * eta + gt) * x)
    )
    return w.real**2 + w.imag**2


def flux_closed_form(eta, gt, z1, z2, z3, z4):
    """Total inelastic flux from the bound-state weights (no singular guard).

    The partial-fraction denominators 2 Im(eta) -+ 2 Re(gt) vanish exactly on
    the decoherence-free phase lines while the matching Z weights vanish with
    them (removable 0/0); evaluation exactly on those measure-zero lines
    yields inf/nan.  Use :func:`flux_closed_form_guarded` for scalar points
    or quadrature of the pair spectrum, which stays finite everywhere.
    """
    dd = 1j * np.conj(eta) - 1j * eta
    den1 = dd + np.conj(gt) + gt
    den2 = dd - np.conj(gt) - gt
    den3 = dd + np.conj(gt) - gt
    den4 = dd - np.conj(gt) + gt
    a1 = z1.real**2 + z1.imag**2 + z3.real**2 + z3.imag**2
    a2 = z2.real**2 + z2.imag**2 + z4.real**2 + z4.imag**2
    c12 = np.conj(z1) * z2 + np.conj(z3) * z4
    f = a1 / den1 + a2 / den2 + c12 / den3 + np.conj(c12) / den4
    return (8.0 / np.pi) * f.real


def flux_closed_form_guarded(eta, gt, z1, z2, z3, z4):
    """Scalar flux refusing to evaluate unresolvable 0/0 denominators.

    On (and within ~1e-12 Gamma of) a decoherence-free phase line a
    partial-fraction denominator collapses into rounding noise while its
    numerator vanishes with it; the quotient's finite limit is then lost to
    double precision, so the function returns nan instead of garbage.  A
    vanished numerator (clean decoupling) contributes 0.  Scalar inputs only;
    quantities are assumed expressed in units of Gamma.
    """
    tol_den = 1e-12
    dd = 1j * np.conj(eta) - 1j * eta
    den1 = dd + np.conj(gt) + gt
    den2 = dd - np.conj(gt) - gt
    den3 = dd + np.conj(gt) - gt
    den4 = dd - np.conj(gt) + gt
    a1 = z1.real**2 + z1.imag**2 + z3.real**2 + z3.imag**2
    a2 = z2.real**2 + z2.imag**2 + z4.real**2 + z4.imag**2
    c12 = np.conj(z1) * z2 + np.conj(z3) * z4
    f = 0j
    if abs(den1) < tol_den:
        if a1 != 0.0:
            return np.nan
    else:
        f = f + a1 / den1
    if abs(den2) < tol_den:
        if a2 != 0.0:
            return np.nan
    else:
        f = f + a2 / den2
    if abs(den3) < tol_den:
        if abs(c12) != 0.0:
            return np.nan
    else:
        f = f + c12 / den3
    if abs(den4) < tol_den:
        if abs(c12) != 0.0:
            return np.nan
    else:
        f = f + np.conj(c12) / den4
    return (8.0 / np.pi) * f.real


def chi_pair(topo, om0, gamma, p1, p2, k):
    """Differential correlations ``(chi_R, chi_L)`` for a degenerate pair at k."""
    z1, z2, z3, z4, _, _, t4, _, r1, _ = z_chain(topo, om0, gamma, p1, p2, k, k)
    wr = t4 * t4 + z1 + z2
    wl = r1 * r1 + z3 + z4
    t2 = t4.real**2 + t4.imag**2
    r2 = r1.real**2 + r1.imag**2
    chi_r = wr.real**2 + wr.imag**2 - t2 * t2
    chi_l = wl.real**2 + wl.imag**2 - r2 * r2
    return chi_r, chi_l

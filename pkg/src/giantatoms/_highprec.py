"""Extended-precision re-evaluation of the bound-state chain with mpmath.

Used as a cancellation guard for small |eta_c| and as an independent oracle
for the double-precision formulas in :mod:`giantatoms._formulas`.
"""

from __future__ import annotations

import mpmath as mp

from ._formulas import BRAIDED, NESTED, SEPARATE


def _collective(topo, om0, gamma, p1, p2, e_total):
    if topo == SEPARATE:
        eta = e_total - 2 * om0 + 2j * gamma * (1 + mp.exp(1j * p1))
        gt = gamma * mp.exp(1j * p2) * (1 + mp.exp(1j * p1)) ** 2
    elif topo == BRAIDED:
        eta = e_total - 2 * om0 + 2j * gamma * (1 + mp.exp(1j * (p1 + p2)))
        gt = gamma * (
            2 * mp.exp(1j * p1) + mp.exp(1j * p2) + mp.exp(1j * (2 * p1 + p2))
        )
    else:
        eta = e_total - 2 * om0 + 2j * gamma * (1 + mp.cos(p1) * mp.exp(1j * (p1 + p2)))
        gt = gamma * mp.sqrt(
            mp.exp(2j * p2) * (1 + mp.exp(2j * p1)) ** 2
            + 4 * mp.exp(2j * p1) * (1 + 2 * mp.exp(1j * p2))
        )
    return eta, gt


def _excitations(topo, om0, gamma, p1, p2, k):
    d = k - om0
    if topo == SEPARATE:
        gt = _collective(topo, om0, gamma, p1, p2, 0)[1]
        dc = (om0 - k - 1j * gamma * (1 + mp.exp(1j * p1))) ** 2 + gt**2 / 4
        t4 = (d - gamma * mp.sin(p1)) ** 2 / dc
        r1 = (
            -4j * gamma * mp.cos(p1 / 2) ** 2
            * (d * mp.cos(p1 + p2) + gamma * (mp.sin(p2) + mp.sin(p1 + p2))) / dc
        )
        e1 = (
            mp.exp(-1j * p2 / 2) / 2 * mp.sqrt(gamma / mp.pi)
            * (1 + mp.exp(-1j * p1))
            * (d + 1j * gamma * (1 + mp.exp(1j * p1))
               - 1j * gt / 2 * mp.exp(1j * (p1 + p2))) / dc
        )
        e2 = (
            mp.exp(1j * p2 / 2) / 2 * mp.sqrt(gamma / mp.pi)
            * (1 + mp.exp(1j * p1)) * (d - gamma * mp.sin(p1)) / dc
        )
    elif topo == BRAIDED:
        gt = _collective(topo, om0, gamma, p1, p2, 0)[1]
        dc = (om0 - k - 1j * gamma * (1 + mp.exp(1j * (p1 + p2)))) ** 2 + gt**2 / 4
        t4 = (
            d**2 - 2 * gamma * d * mp.sin(p1 + p2)
            + gamma**2 * mp.sin(p1) * (mp.sin(p1) - 2 * mp.sin(p2))
        ) / dc
        r1 = (
            -4j * gamma * mp.cos((p1 + p2) / 2) ** 2
            * (d * mp.cos(p1) + gamma * mp.sin(p1)) / dc
        )
        pre = mp.exp(1j * p2 / 2) / 2 * mp.sqrt(gamma / mp.pi) * (
            1 + mp.exp(-1j * (p1 + p2))
        )
        e1 = pre * (
            d - 1j * gamma / 2 * (-1 + mp.exp(2j * p1)) * (2 + mp.exp(1j * (p1 + p2)))
        ) / dc
        e2 = pre * (
            mp.exp(1j * p1) * d + 1j * gamma / 2 * mp.exp(1j * p2) * (-1 + mp.exp(2j * p1))
        ) / dc
    else:
        gt = _collective(topo, om0, gamma, p1, p2, 0)[1]
        dc = (
            om0 - k - 1j * gamma / 2 * (2 + mp.exp(1j * p2) + mp.exp(1j * (2 * p1 + p2)))
        ) ** 2 + gt**2 / 4
        t4 = (
            (d - gamma * mp.sin(p2)) * (d - gamma * mp.sin(2 * p1 + p2))
            - gamma**2 * (mp.sin(p1) + mp.sin(p1 + p2)) ** 2
        ) / dc
        r1 = (
            -2j * gamma
            * (d * (1 + mp.cos(p1) * mp.cos(p1 + p2))
               + gamma * mp.sin(p1) * (mp.cos(p1) + mp.cos(p1 + p2))) / dc
        )
        e1 = mp.sqrt(gamma / mp.pi) * (
            d * mp.cos(p1 + p2 / 2) + 2 * gamma * mp.sin(p1) * mp.cos(p2 / 2)
        ) / dc
        e2 = mp.sqrt(gamma / mp.pi) * d * mp.cos(p2 / 2) / dc
    return t4, r1, e1, e2


def green_mp(topo, om0, gamma, p1, p2, e_total, dps=50):
    """Green's elements (G11, G12, G22) evaluated at ``dps`` digits."""
    with mp.workdps(dps):
        om0, gamma, p1, p2, e_total = map(mp.mpf, (om0, gamma, p1, p2, e_total))
        eta, gt = _collective(topo, om0, gamma, p1, p2, e_total)
        if topo in (SEPARATE, BRAIDED):
            den = 2 * eta * (eta**2 + gt**2)
            g11 = (2 * eta**2 + gt**2) / den
            g12 = -(gt**2) / den
            g22 = g11
        else:
            den = eta * (eta**2 + gt**2)
            w = 1j * gamma * eta * mp.exp(1j * p2) * (1 - mp.exp(2j * p1))
            q = 2 * gamma**2 * mp.exp(2j * p1) * (1 + mp.exp(1j * p2)) ** 2
            g11 = (eta**2 + w + q) / den
            g22 = (eta**2 - w + q) / den
            g12 = -q / den
        return complex(g11), complex(g12), complex(g22)


def z_chain_mp(topo, om0, gamma, p1, p2, k1, k2, dps=50):
    """Bound-state weights (Z1..Z4, eta, gt) evaluated at ``dps`` digits."""
    with mp.workdps(dps):
        om0, gamma, p1, p2, k1, k2 = map(mp.mpf, (om0, gamma, p1, p2, k1, k2))
        eta, gt = _collective(topo, om0, gamma, p1, p2, k1 + k2)
        _, _, e1a, e2a = _excitations(topo, om0, gamma, p1, p2, k1)
        _, _, e1b, e2b = _excitations(topo, om0, gamma, p1, p2, k2)
        ee1, ee2 = e1a * e1b, e2a * e2b

        if topo in (SEPARATE, BRAIDED):
            den = 2 * eta * (eta**2 + gt**2)
            g11 = (2 * eta**2 + gt**2) / den
            g12 = -(gt**2) / den
            if topo == SEPARATE:
                fp, fm = mp.exp(1j * (p1 + p2)), mp.exp(-1j * (p1 + p2))
                c = 2j * gamma * (1 + mp.cos(p1))
                cpref = mp.cos(p1 / 2) ** 2
            else:
                fp, fm = mp.exp(1j * p1), mp.exp(-1j * p1)
                c = 2j * gamma * (1 + mp.exp(1j * p2) * mp.cos(p1))
                cpref = mp.cos((p1 + p2) / 2) ** 2
            dp = 2 * eta * (eta + 1j * gt)
            dm = 2 * eta * (eta - 1j * gt)
            u1 = (2 * eta + 1j * gt - c) / dp * (fp + 1)
            u2 = (2 * eta - 1j * gt - c) / dm * (fp - 1)
            u3 = (2 * eta + 1j * gt * (1 - fp)) / dp * (fm + 1)
            u4 = (2 * eta - 1j * gt * (1 + fp)) / dm * (fm - 1)
            # weight normalization pinned by the single-emitter limit; see
            # _formulas.z_from_parts
            pref = 2 * mp.pi * gamma * cpref / (g11**2 - g12**2)
            z1 = pref * (ee1 * (u1 * g11 - u3 * g12) + ee2 * (u3 * g11 - u1 * g12))
            z2 = pref * (ee1 * (u2 * g11 - u4 * g12) + ee2 * (u4 * g11 - u2 * g12))
            z3 = pref * (ee1 * (u3 * g11 - u1 * g12) + ee2 * (u1 * g11 - u3 * g12))
            z4 = pref * (ee1 * (u4 * g11 - u2 * g12) + ee2 * (u2 * g11 - u4 * g12))
        else:
            den = eta * (eta**2 + gt**2)
            w = 1j * gamma * eta * mp.exp(1j * p2) * (1 - mp.exp(2j * p1))
            q = 2 * gamma**2 * mp.exp(2j * p1) * (1 + mp.exp(1j * p2)) ** 2
            g11 = (eta**2 + w + q) / den
            g22 = (eta**2 - w + q) / den
            g12 = -q / den
            a = gamma / 2 * (2 + mp.exp(1j * p2) + mp.exp(1j * (2 * p1 + p2)))
            w2 = 1j * a + 1j * gt / 2
            w1 = 1j * a - 1j * gt / 2
            cc = mp.cos(p2 / 2) ** 2
            cpp = mp.cos(p1 + p2 / 2) ** 2
            edge = gamma**2 * (mp.exp(2j * p1) - 1) * (mp.exp(1j * p2) + 1)
            body = cc * edge - eta * gamma * mp.sin(p1) * (mp.cos(p1) + mp.cos(p1 + p2))
            dp = eta * gt * (eta + 1j * gt)
            dm = eta * gt * (eta - 1j * gt)
            u1 = (body + eta * w2 * cpp) / dp
            u2 = (body + eta * w1 * cpp) / dm
            u3 = cc * (eta * w2 - edge) / dp
            u4 = cc * (eta * w1 - edge) / dm
            qq = 4j * mp.pi * gamma / (g11 * g22 - g12**2)
            z1 = -qq * (ee1 * (u1 * g22 - u3 * g12) + ee2 * (u3 * g11 - u1 * g12))
            z2 = qq * (ee1 * (u2 * g22 - u4 * g12) + ee2 * (u4 * g11 - u2 * g12))
            z3, z4 = z1, z2
        return (complex(z1), complex(z2), complex(z3), complex(z4),
                complex(eta), complex(gt))

"""Single-photon scattering amplitudes and the piecewise plane-wave oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _formulas as fm
from .core import SystemParams, Topology, parity_map
from .errors import DegenerateChannel

# coupling-point ownership per topology: atom index (0 or 1) of points 1..4
_ATOM_OF_POINT = {
    Topology.SEPARATE: (0, 0, 1, 1),
    Topology.BRAIDED: (0, 1, 0, 1),
    Topology.NESTED: (0, 1, 1, 0),
}


@dataclass(frozen=True)
class SinglePhotonSolution:
    """Scattering amplitudes at incident frequency k.

    ``e1R`` and ``e2R`` are the atomic excitation amplitudes of the solved
    injection direction; for solutions produced by
    :func:`left_moving_solution` they hold ``e1L`` and ``e2L``.
    ``degenerate`` marks limit values returned at exact decoupling points.
    """

    k: float
    t4: complex
    r1: complex
    e1R: complex
    e2R: complex
    degenerate: bool = False

    @property
    def flux(self) -> float:
        """|t4|^2 + |r1|^2; equals 1 for a lossless waveguide."""
        return abs(self.t4) ** 2 + abs(self.r1) ** 2


def scatter_single(
    topology: Topology,
    params: SystemParams,
    k: float,
    *,
    allow_degenerate: bool = False,
) -> SinglePhotonSolution:
    """Closed-form amplitudes for a right-moving photon at frequency k.

    Raises :class:`DegenerateChannel` when |D^c(k)| falls below
    1e-14 Gamma^2, which happens only at exact decoupling points with
    k = omega0; pass ``allow_degenerate=True`` to obtain the limiting
    solution (t4 = 1, r1 = 0) flagged as degenerate instead.
    """
    code = topology.code
    t4, r1, e1, e2, d = fm.amplitudes(
        code, params.omega0, params.Gamma, params.phi1, params.phi2, float(k)
    )
    if abs(d) < 1e-14 * params.Gamma**2:
        if not allow_degenerate:
            raise DegenerateChannel(
                f"D^c(k) = {complex(d):.3e} at k = {k}: amplitudes defined only "
                "as limits (t4 -> 1, r1 -> 0)"
            )
        return SinglePhotonSolution(float(k), 1.0 + 0j, 0j, 0j, 0j, degenerate=True)
    return SinglePhotonSolution(
        float(k), complex(t4), complex(r1), complex(e1), complex(e2)
    )


def left_moving_solution(
    topology: Topology,
    params: SystemParams,
    k: float,
    *,
    allow_degenerate: bool = False,
) -> SinglePhotonSolution:
    """Amplitudes for a left-moving photon, synthesized by parity.

    Transmission and reflection are unchanged; the atomic amplitudes are
    permuted according to :func:`giantatoms.core.parity_map`.
    """
    sol = scatter_single(topology, params, k, allow_degenerate=allow_degenerate)
    i, j = parity_map(topology)
    er = (sol.e1R, sol.e2R)
    return SinglePhotonSolution(
        sol.k, sol.t4, sol.r1, er[i], er[j], degenerate=sol.degenerate
    )


def transfer_matrix_solution(
    topology: Topology, params: SystemParams, k: float
) -> SinglePhotonSolution:
    """Independent oracle: piecewise plane-wave solve of the coupled equations.

    The waveguide field is expanded in plane waves with constant coefficients
    on the five segments delimited by the four coupling points.  Imposing the
    delta-coupling matching conditions (field jump proportional to the atomic
    amplitude, atom equation sampling the average field value at each point)
    yields a 10x10 linear system for the segment coefficients and the two
    atomic amplitudes.  The Markovian regime is emulated by evaluating the
    propagation phases at k0 = omega0 while the atomic detuning keeps the
    actual k, consistently with the closed forms.

    The coupling points sit symmetrically about the origin with accumulated
    phases chi = (-phi2/2 - phi1, -phi2/2, phi2/2, phi2/2 + phi1).
    """
    om0, g, p1, p2 = params.omega0, params.Gamma, params.phi1, params.phi2
    v = np.sqrt(g / 2.0)  # Gamma = 2 V^2, group velocity 1
    chi = np.array([-0.5 * p2 - p1, -0.5 * p2, 0.5 * p2, 0.5 * p2 + p1])
    atom_of = _ATOM_OF_POINT[topology]
    s2pi = np.sqrt(2.0 * np.pi)

    # unknowns: u1..u4 (right-mover segments), v0..v3 (left-mover segments),
    # e1, e2; knowns: u0 = 1 (incident), v4 = 0 (nothing incoming from right)
    a = np.zeros((10, 10), dtype=complex)
    b = np.zeros(10, dtype=complex)

    def u_idx(m):  # segment coefficient u_m, m = 1..4
        return m - 1

    def v_idx(m):  # segment coefficient v_m, m = 0..3
        return 4 + m

    row = 0
    for p in range(1, 5):  # right-mover jump at point p
        ph = np.exp(1j * chi[p - 1])
        a[row, u_idx(p)] += -1j * ph / s2pi
        if p - 1 >= 1:
            a[row, u_idx(p - 1)] += 1j * ph / s2pi
        else:
            b[row] -= 1j * ph / s2pi  # u0 = 1
        a[row, 8 + atom_of[p - 1]] += v
        row += 1
    for p in range(1, 5):  # left-mover jump at point p
        ph = np.exp(-1j * chi[p - 1])
        if p <= 3:
            a[row, v_idx(p)] += 1j * ph / s2pi  # v4 = 0 drops out for p = 4
        a[row, v_idx(p - 1)] += -1j * ph / s2pi
        a[row, 8 + atom_of[p - 1]] += v
        row += 1
    for j in range(2):  # atom equations, averaged field at each delta point
        a[row, 8 + j] += om0 - 0.5j * params.gamma_e - k
        for p in range(1, 5):
            if atom_of[p - 1] != j:
                continue
            phr = np.exp(1j * chi[p - 1]) * v / (2.0 * s2pi)
            phl = np.exp(-1j * chi[p - 1]) * v / (2.0 * s2pi)
            a[row, u_idx(p)] += phr
            if p - 1 >= 1:
                a[row, u_idx(p - 1)] += phr
            else:
                b[row] -= phr
            a[row, v_idx(p - 1)] += phl
            if p <= 3:
                a[row, v_idx(p)] += phl
        row += 1

    x = np.linalg.solve(a, b)
    return SinglePhotonSolution(float(k), x[u_idx(4)], x[v_idx(0)], x[8], x[9])

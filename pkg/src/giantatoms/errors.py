"""Exception types raised by the giantatoms package."""


class GiantAtomsError(Exception):
    """Base class for all domain errors in this package."""


class DegenerateChannel(GiantAtomsError):
    """Single-photon denominator vanished (exact decoupling at resonance).

    Amplitudes are only defined as limits there (t4 -> 1, r1 -> 0).
    """


class SingularGreen(GiantAtomsError):
    """Green's-function denominators vanished (two-photon resonance degeneracy)."""


class DenominatorCollision(GiantAtomsError):
    """A bound-state coefficient denominator collided with zero."""


class DarkChannel(GiantAtomsError):
    """Normalizing single-photon amplitude product is numerically zero."""


class PoleOnGrid(GiantAtomsError):
    """A requested frequency coincides with an exact pole of the pair amplitude."""


class NonUniqueSteadyState(GiantAtomsError):
    """The Liouvillian null space has dimension > 1; steady state is not unique."""

"""Particles, two-path geometry, and propagation amplitudes for unstable
matter waves.

Internal units are dimensionless: lengths in an arbitrary unit, the
wavenumber ``k`` in inverse lengths, and the mean decay propagation length
``ell`` in the same length unit.  Every observable depends only on the
combinations ``k*s`` and ``s/ell``, so conversion from SI happens once, at
the text-format boundary (see :mod:`unstable_mzi.dsl`).

A particle of wavenumber ``k`` that survives a straight flight of length
``s`` through a region where its decay rate is scaled by ``gamma_ratio``
carries the amplitude ``exp(i*k*s - gamma_ratio*s/(2*ell))``: the ordinary
plane-wave phase times a depletion factor for decays in flight.  Path
amplitudes are products of such segment factors with the splitter and
mirror amplitudes of the layout.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError

__all__ = [
    "HIERARCHY_MIN",
    "TOL_GEOM",
    "DECAY_EXPONENT_CAP",
    "BeamSplitterConvention",
    "SYMMETRIC_SPLITTER",
    "HADAMARD_SPLITTER",
    "custom_splitter",
    "junction_factors",
    "UnstableParticle",
    "PathSegment",
    "TwoPathLayout",
    "free_amplitude",
    "potential_phase",
    "segment_amplitude",
    "path_amplitude",
]

# Below ell*k = HIERARCHY_MIN the wave no longer has a well-defined
# wavelength compared to its decay length; computations still run but the
# particle is flagged.
HIERARCHY_MIN = 100.0

# Relative tolerance for the equal-arm-length symmetry flag.
TOL_GEOM = 1e-9

# Decay exponents beyond this are clamped; exp(-700) is still a normal
# double, so renormalized path ratios stay well defined at saturation.
DECAY_EXPONENT_CAP = 700.0

_SQ2 = math.sqrt(0.5)


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# Beamsplitter conventions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BeamSplitterConvention:
    """A balanced lossless splitter plus the mirror amplitude.

    ``matrix[out][in]`` is the 2x2 unitary of the physical device.  The
    layout wiring is fixed: at the input splitter the source feeds port 0
    and output 0 is the upper arm; at the output splitter the upper arm
    arrives on port 1 and output 0 is detector #1.  Both arms bounce off
    exactly one mirror of amplitude ``mirror``.
    """

    name: str
    matrix: tuple[tuple[complex, complex], tuple[complex, complex]]
    mirror: complex = -1.0

    def __post_init__(self) -> None:
        m = self.matrix
        # unitarity
        dot00 = abs(m[0][0]) ** 2 + abs(m[0][1]) ** 2
        dot11 = abs(m[1][0]) ** 2 + abs(m[1][1]) ** 2
        cross = m[0][0] * m[1][0].conjugate() + m[0][1] * m[1][1].conjugate()
        if abs(dot00 - 1.0) > 1e-12 or abs(dot11 - 1.0) > 1e-12 or abs(cross) > 1e-12:
            raise DomainError(f"splitter matrix for {self.name!r} is not unitary")
        # balanced 50/50, required by the closed-form fringe expressions
        for row in m:
            for entry in row:
                if abs(abs(entry) - _SQ2) > 1e-12:
                    raise DomainError(
                        f"splitter matrix for {self.name!r} is not balanced 50/50"
                    )
        if abs(abs(complex(self.mirror)) - 1.0) > 1e-12:
            raise DomainError("mirror amplitude must have unit magnitude")


#: Transmission 1/sqrt(2), reflection i/sqrt(2), mirrors -1.
SYMMETRIC_SPLITTER = BeamSplitterConvention(
    name="symmetric",
    matrix=((1j * _SQ2, _SQ2), (_SQ2, 1j * _SQ2)),
)

#: Real Hadamard-style splitter; same detection probabilities as "symmetric".
HADAMARD_SPLITTER = BeamSplitterConvention(
    name="hadamard",
    matrix=((_SQ2, _SQ2), (_SQ2, -_SQ2)),
)

_NAMED_SPLITTERS = {c.name: c for c in (SYMMETRIC_SPLITTER, HADAMARD_SPLITTER)}


def splitter_by_name(name: str) -> BeamSplitterConvention:
    try:
        return _NAMED_SPLITTERS[name]
    except KeyError:
        raise DomainError(f"unknown splitter convention {name!r}") from None


def custom_splitter(matrix, mirror: complex = -1.0,
                    name: str = "custom") -> BeamSplitterConvention:
    """Build a convention from any balanced lossless 2x2 unitary."""
    rows = tuple(tuple(complex(v) for v in row) for row in matrix)
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise DomainError("splitter matrix must be 2x2")
    return BeamSplitterConvention(name=name, matrix=rows, mirror=complex(mirror))


def junction_factors(convention: BeamSplitterConvention):
    """Splitter/mirror amplitude products ``j[detector][arm]``.

    Arm 0 is the upper path, arm 1 the lower path.  Each factor is the
    ordered product: input-splitter amplitude into the arm, the arm's
    mirror, and the output-splitter amplitude into the detector.  Under
    the default convention both detector-#1 factors equal ``-i/2``.
    """
    u = convention.matrix
    m = complex(convention.mirror)
    into_arm = (u[0][0], u[1][0])          # source enters port 0
    arm_port = (1, 0)                      # upper arrives on port 1 of the recombiner
    return tuple(
        tuple(u[det][arm_port[arm]] * m * into_arm[arm] for arm in (0, 1))
        for det in (0, 1)
    )


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnstableParticle:
    """A beam particle characterized by wavenumber and decay length.

    Parameters
    ----------
    k : float
        Wavenumber (momentum over hbar), > 0, in inverse length units.
    ell : float
        Mean propagation length before decay, > 0.  ``math.inf`` marks a
        stable particle.
    label : str
        Free-form identifier.
    """

    k: float
    ell: float = math.inf
    label: str = ""

    def __post_init__(self) -> None:
        k = float(self.k)
        ell = float(self.ell)
        if not math.isfinite(k) or k <= 0.0:
            raise DomainError(f"wavenumber k must be finite and > 0, got {k!r}")
        if math.isnan(ell) or ell <= 0.0:
            raise DomainError(f"decay length ell must be > 0 (inf allowed), got {ell!r}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "ell", ell)

    @property
    def wavelength(self) -> float:
        """Reduced de Broglie wavelength 1/k."""
        return 1.0 / self.k

    @property
    def kappa(self) -> float:
        """Imaginary part of the complex wavenumber, 1/(2*ell)."""
        return 0.0 if math.isinf(self.ell) else 1.0 / (2.0 * self.ell)

    @property
    def is_stable(self) -> bool:
        return math.isinf(self.ell)

    @property
    def hierarchy_factor(self) -> float:
        """ell*k; the plane-wave model assumes this is large."""
        return self.ell * self.k

    @property
    def scales_well_separated(self) -> bool:
        """True when ell*k >= HIERARCHY_MIN.  Never blocks computation."""
        return self.hierarchy_factor >= HIERARCHY_MIN


@dataclass(frozen=True)
class PathSegment:
    """One straight piece of an interferometer arm.

    ``gamma_ratio`` is the local decay rate over the free-space rate: 1 in
    free flight, something else inside a decay-modifying cavity.
    ``potential`` is an optional tuple of potential samples, uniformly
    spaced over the segment, in units of hbar^2*k/m per unit length.
    """

    length: float
    gamma_ratio: float = 1.0
    phase_offset: float = 0.0
    potential: tuple[float, ...] | None = None
    cavity: bool | None = None

    def __post_init__(self) -> None:
        length = _require_finite("segment length", self.length)
        gamma = _require_finite("gamma_ratio", self.gamma_ratio)
        phase = _require_finite("phase_offset", self.phase_offset)
        if length < 0.0:
            raise DomainError(f"segment length must be >= 0, got {length}")
        if gamma < 0.0:
            raise DomainError(f"gamma_ratio must be >= 0, got {gamma}")
        object.__setattr__(self, "length", length)
        object.__setattr__(self, "gamma_ratio", gamma)
        object.__setattr__(self, "phase_offset", phase)
        if self.potential is not None:
            samples = tuple(_require_finite("potential sample", v) for v in self.potential)
            if len(samples) < 2:
                raise DomainError("potential profile needs at least 2 samples")
            object.__setattr__(self, "potential", samples)
        cavity = self.cavity
        if cavity is None:
            cavity = gamma != 1.0
        elif not cavity and gamma != 1.0:
            raise DomainError("gamma_ratio must be 1 outside cavities")
        object.__setattr__(self, "cavity", bool(cavity))


@dataclass(frozen=True)
class TwoPathLayout:
    """Both interferometer arms plus the splitter convention.

    ``upper`` is the arm that hosts the cavity in the reference setup,
    ``lower`` the arm holding the adjustable phase shifter.
    """

    upper: tuple[PathSegment, ...]
    lower: tuple[PathSegment, ...]
    splitter: BeamSplitterConvention = SYMMETRIC_SPLITTER

    def __post_init__(self) -> None:
        upper = tuple(self.upper)
        lower = tuple(self.lower)
        if not upper or not lower:
            raise DomainError("both arms need at least one segment")
        for seg in upper + lower:
            if not isinstance(seg, PathSegment):
                raise DomainError("arm entries must be PathSegment instances")
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "lower", lower)

    @property
    def upper_length(self) -> float:
        return math.fsum(seg.length for seg in self.upper)

    @property
    def lower_length(self) -> float:
        return math.fsum(seg.length for seg in self.lower)

    @property
    def is_length_symmetric(self) -> bool:
        """True when both arms have equal total length within TOL_GEOM.

        Asymmetric layouts are legal; this flag exists to catch
        configuration mistakes, since the closed-form fringe results
        assume equal arm lengths.
        """
        a, b = self.upper_length, self.lower_length
        return abs(a - b) <= TOL_GEOM * max(a, b, 1.0)


# ---------------------------------------------------------------------------
# Amplitudes
# ---------------------------------------------------------------------------

def free_amplitude(particle: UnstableParticle, s: float,
                   gamma_ratio: float = 1.0) -> complex:
    """Survival amplitude for a straight flight of length ``s``.

    Returns ``exp(i*k*s - gamma_ratio*s/(2*ell))``.  The magnitude is 1
    exactly when ``gamma_ratio*s == 0`` or the particle is stable.
    """
    s = _require_finite("path length s", s)
    gamma_ratio = _require_finite("gamma_ratio", gamma_ratio)
    if s < 0.0:
        raise DomainError(f"path length must be >= 0, got {s}")
    if gamma_ratio < 0.0:
        raise DomainError(f"gamma_ratio must be >= 0, got {gamma_ratio}")
    decay = min(gamma_ratio * s / (2.0 * particle.ell), DECAY_EXPONENT_CAP)
    return cmath.exp(complex(-decay, particle.k * s))


def potential_phase(particle: UnstableParticle, profile, path_length: float) -> complex:
    """Complex phase acquired from a weak potential along a segment.

    ``profile`` holds >= 2 uniformly spaced samples of the potential over
    the segment, in units of hbar^2*k/m per unit length; in these units the
    phase is ``-(1 - i/(2*k*ell)) * integral(V ds)``, with the line
    integral evaluated by composite Simpson quadrature.  The imaginary
    part, suppressed by 1/(2*k*ell) relative to the real part, feeds the
    extra beam depletion caused by the potential slowing the particle.
    """
    samples = np.asarray(profile, dtype=float)
    if samples.ndim != 1 or samples.size < 2:
        raise DomainError("potential profile needs at least 2 samples")
    if not np.all(np.isfinite(samples)):
        raise DomainError("potential profile must be finite")
    path_length = _require_finite("path_length", path_length)
    if path_length < 0.0:
        raise DomainError(f"path_length must be >= 0, got {path_length}")
    if path_length == 0.0:
        integral = 0.0
    else:
        integral = float(simpson(samples, dx=path_length / (samples.size - 1)))
    suppression = particle.kappa * particle.wavelength      # 1/(2*k*ell)
    return -integral * complex(1.0, -suppression)


def segment_amplitude(particle: UnstableParticle, seg: PathSegment) -> complex:
    """Amplitude across one segment: free flight, phase shifter, potential."""
    amp = free_amplitude(particle, seg.length, seg.gamma_ratio)
    amp *= cmath.exp(1j * seg.phase_offset)
    if seg.potential is not None:
        amp *= cmath.exp(1j * potential_phase(particle, seg.potential, seg.length))
    return amp


def path_amplitude(particle: UnstableParticle, segments,
                   junction_factor: complex = 1.0) -> complex:
    """Amplitude along one arm: junction factor times segment products.

    ``junction_factor`` carries the ordered splitter/mirror amplitudes for
    the route and detector (see :func:`junction_factors`).
    """
    segments = tuple(segments)
    if not segments:
        raise DomainError("path needs at least one segment")
    amp = complex(junction_factor)
    for seg in segments:
        amp *= segment_amplitude(particle, seg)
    return amp

"""Detection probabilities, fringe scans, visibility, predictability, and
the duality audit for two-path layouts.

The cavity asymmetry parameter ``theta = sum_upper (s/2ell)(1 - gamma) -
sum_lower (s/2ell)(1 - gamma)`` controls everything: fringe visibility is
``sech(theta)`` and path predictability ``tanh(|theta|)``, so for a pure
two-path state ``V**2 + P**2 = 1`` holds identically.  Detection
probabilities are computed two independent ways, by summing the complex
path amplitudes and from the closed-form fringe expression, and the two
routes must agree to rounding.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import (
    TwoPathLayout,
    UnstableParticle,
    junction_factors,
    path_amplitude,
    potential_phase,
)
from .errors import DomainError, UndefinedResultError

__all__ = [
    "DUALITY_TOL",
    "THETA_SATURATION",
    "DetectionProbabilities",
    "FringeNormalization",
    "FringeScan",
    "DualityReport",
    "theta_cav",
    "detection_probabilities",
    "detection_probabilities_closed_form",
    "fringe_scan",
    "visibility_operational",
    "visibility_closed_form",
    "predictability",
    "predictability_closed_form",
    "duality_audit",
]

# The duality identity is exact; this tolerance covers rounding only.
DUALITY_TOL = 1e-12

# |theta| at or beyond this is reported as fully saturated: V = 0, P = 1
# exactly.  exp(2*350) is the edge of double-precision range.
THETA_SATURATION = 350.0


def _sech(x: float) -> float:
    """Overflow-safe sech; exact 0.0 once exp(-|x|) underflows."""
    t = math.exp(-abs(x))
    return 2.0 * t / (1.0 + t * t)


# ---------------------------------------------------------------------------
# Result types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DetectionProbabilities:
    """Per-particle probabilities of arriving undecayed at each detector."""

    p1: float
    p2: float
    phase: float
    saturated: bool = False
    survival: float = field(init=False)

    def __post_init__(self) -> None:
        if not (0.0 <= self.p1 and 0.0 <= self.p2):
            raise DomainError("probabilities must be non-negative")
        if self.p1 + self.p2 > 1.0 + 1e-12:
            raise DomainError("p1 + p2 cannot exceed 1")
        object.__setattr__(self, "survival", self.p1 + self.p2)


class FringeNormalization(Enum):
    PER_PARTICLE = "per_particle"
    RELATIVE = "relative"


@dataclass(frozen=True)
class FringeScan:
    """Sampled detector-#1 intensity versus phase-shifter setting."""

    phases: tuple[float, ...]
    intensities: tuple[float, ...]
    normalization: FringeNormalization = FringeNormalization.PER_PARTICLE

    def __post_init__(self) -> None:
        phases = tuple(float(p) for p in self.phases)
        intensities = tuple(float(v) for v in self.intensities)
        if len(phases) != len(intensities):
            raise DomainError("phases and intensities must have equal length")
        if len(phases) < 3:
            raise DomainError("a fringe scan needs at least 3 samples")
        if any(not math.isfinite(p) for p in phases):
            raise DomainError("phases must be finite")
        if any(b <= a for a, b in zip(phases, phases[1:])):
            raise DomainError("phases must be strictly increasing")
        if any(not math.isfinite(v) or v < 0.0 for v in intensities):
            raise DomainError("intensities must be finite and >= 0")
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "intensities", intensities)


@dataclass(frozen=True)
class DualityReport:
    """Visibility, predictability, and their squared sum for one layout."""

    visibility: float
    predictability: float
    duality_sum: float
    theta_cav: float
    saturated: bool = False


# ---------------------------------------------------------------------------
# Arm bookkeeping
# ---------------------------------------------------------------------------

def _arm_exponents(particle: UnstableParticle, segments) -> tuple[float, float]:
    """(decay exponent D, accumulated phase chi) for one arm.

    ``|amplitude|^2 = exp(-D)`` and ``arg(amplitude) = chi`` up to the
    junction factors; potentials contribute to both parts.
    """
    decay = 0.0
    phase = 0.0
    for seg in segments:
        decay += seg.gamma_ratio * seg.length / particle.ell
        phase += particle.k * seg.length + seg.phase_offset
        if seg.potential is not None:
            pot = potential_phase(particle, seg.potential, seg.length)
            decay += 2.0 * pot.imag
            phase += pot.real
    return decay, phase


def _theta_effective(layout: TwoPathLayout, particle: UnstableParticle) -> float:
    """Half the decay-exponent difference between the arms.

    Equals :func:`theta_cav` for layouts whose asymmetry comes entirely
    from cavities (equal arm lengths, no potentials).
    """
    d_upper, _ = _arm_exponents(particle, layout.upper)
    d_lower, _ = _arm_exponents(particle, layout.lower)
    return 0.5 * (d_lower - d_upper)


def theta_cav(layout: TwoPathLayout, particle: UnstableParticle) -> float:
    """Cavity asymmetry parameter of the layout.

    Sum over upper-arm segments of ``(length/2ell)(1 - gamma_ratio)``
    minus the same sum over the lower arm, so moving the cavity to the
    other arm flips the sign.  Positive for decay suppression in the
    upper arm, negative for enhancement; zero without cavities or for a
    stable particle.
    """
    def arm_sum(segments) -> float:
        return math.fsum(
            (seg.length / (2.0 * particle.ell)) * (1.0 - seg.gamma_ratio)
            for seg in segments
        )

    return arm_sum(layout.upper) - arm_sum(layout.lower)


def _is_saturated(theta: float) -> bool:
    return abs(theta) >= THETA_SATURATION


# ---------------------------------------------------------------------------
# Detection probabilities
# ---------------------------------------------------------------------------

def detection_probabilities(layout: TwoPathLayout, particle: UnstableParticle,
                            phase: float = 0.0) -> DetectionProbabilities:
    """Detector probabilities by summing the two path amplitudes.

    ``phase`` is the adjustable phase-shifter setting, applied to the
    lower arm on top of any static segment offsets.
    """
    phase = float(phase)
    if not math.isfinite(phase):
        raise DomainError("phase must be finite")
    j = junction_factors(layout.splitter)
    upper = path_amplitude(particle, layout.upper, 1.0)
    lower = path_amplitude(particle, layout.lower, cmath.exp(1j * phase))
    p1 = abs(j[0][0] * upper + j[0][1] * lower) ** 2
    p2 = abs(j[1][0] * upper + j[1][1] * lower) ** 2
    return DetectionProbabilities(
        p1=p1, p2=p2, phase=phase,
        saturated=_is_saturated(_theta_effective(layout, particle)),
    )


def detection_probabilities_closed_form(layout: TwoPathLayout,
                                        particle: UnstableParticle,
                                        phase: float = 0.0) -> DetectionProbabilities:
    """Detector probabilities from the closed-form fringe expression.

    ``p1 = (1/4) exp(-D_lower) (1 + exp(2*theta)) (1 + sech(theta) cos(dphi))``
    and its complement for detector #2, written with both decay exponents
    spelled out so that nothing overflows at large ``theta``.  Must agree
    with :func:`detection_probabilities` to rounding for every layout.
    """
    phase = float(phase)
    if not math.isfinite(phase):
        raise DomainError("phase must be finite")
    d_upper, chi_upper = _arm_exponents(particle, layout.upper)
    d_lower, chi_lower = _arm_exponents(particle, layout.lower)
    theta = 0.5 * (d_lower - d_upper)
    contrast = _sech(theta) * math.cos(chi_upper - chi_lower - phase)
    # (1/4) e^{-D_l} (1 + e^{2 theta}) == (e^{-D_l} + e^{-D_u}) / 4
    prefactor = 0.25 * (math.exp(-d_lower) + math.exp(-d_upper))
    return DetectionProbabilities(
        p1=prefactor * (1.0 + contrast),
        p2=prefactor * (1.0 - contrast),
        phase=phase,
        saturated=_is_saturated(theta),
    )


# ---------------------------------------------------------------------------
# Fringes and visibility
# ---------------------------------------------------------------------------

def fringe_scan(layout: TwoPathLayout, particle: UnstableParticle, phases,
                normalization: FringeNormalization = FringeNormalization.PER_PARTICLE,
                ) -> FringeScan:
    """Sample the detector-#1 intensity over a list of phase settings.

    Per-particle normalization records raw probabilities; relative
    normalization rescales so the intensity at phase 0 equals 1.
    """
    phase_arr = np.asarray(list(phases), dtype=float)
    if phase_arr.size < 3:
        raise DomainError("a fringe scan needs at least 3 phases")
    j = junction_factors(layout.splitter)
    c_upper = j[0][0] * path_amplitude(particle, layout.upper, 1.0)
    c_lower = j[0][1] * path_amplitude(particle, layout.lower, 1.0)
    cross = c_upper * c_lower.conjugate()
    base = abs(c_upper) ** 2 + abs(c_lower) ** 2
    intensities = base + 2.0 * np.real(cross * np.exp(-1j * phase_arr))
    intensities = np.maximum(intensities, 0.0)   # clip rounding residue
    if normalization is FringeNormalization.RELATIVE:
        at_zero = base + 2.0 * float(np.real(cross))
        if at_zero <= 0.0:
            raise DomainError("relative normalization needs nonzero intensity at phase 0")
        intensities = intensities / at_zero
    return FringeScan(
        phases=tuple(phase_arr.tolist()),
        intensities=tuple(intensities.tolist()),
        normalization=normalization,
    )


def visibility_operational(scan: FringeScan) -> float:
    """Fringe contrast ``(I_max - I_min) / (I_max + I_min)`` over the grid.

    Uses the raw sampled extrema without interpolation, the way the
    quantity is read off a measured scan; ties on the maximum resolve to
    the first sample, which cannot change the ratio.
    """
    i_max = max(scan.intensities)
    i_min = min(scan.intensities)
    if i_max + i_min <= 0.0:
        raise UndefinedResultError("visibility undefined for an all-zero scan")
    return (i_max - i_min) / (i_max + i_min)


def visibility_closed_form(layout: TwoPathLayout, particle: UnstableParticle) -> float:
    """Closed-form fringe visibility ``sech(theta_cav)``.

    Unity exactly when the cavity vanishes or leaves the decay rate
    untouched; assumes arm asymmetry is carried by cavities (see
    :func:`theta_cav`).
    """
    return _sech(theta_cav(layout, particle))


# ---------------------------------------------------------------------------
# Predictability and duality
# ---------------------------------------------------------------------------

def predictability(layout: TwoPathLayout, particle: UnstableParticle) -> float:
    """A-priori which-way knowledge from blocked-path probabilities.

    Block one arm, record the probability that the particle reaches
    detector #1 through the other, and renormalize to the particles that
    actually arrive: ``P = |w_lower - w_upper| / (w_lower + w_upper)``.
    Agrees with ``tanh(|theta_cav|)`` for cavity-only asymmetry.
    """
    j = junction_factors(layout.splitter)
    w_upper = abs(path_amplitude(particle, layout.upper, j[0][0])) ** 2
    w_lower = abs(path_amplitude(particle, layout.lower, j[0][1])) ** 2
    total = w_upper + w_lower
    if total <= 0.0:
        raise UndefinedResultError(
            "predictability undefined: both path amplitudes vanished"
        )
    return abs(w_lower - w_upper) / total


def predictability_closed_form(layout: TwoPathLayout,
                               particle: UnstableParticle) -> float:
    """Closed-form path predictability ``tanh(|theta_cav|)``."""
    return math.tanh(abs(theta_cav(layout, particle)))


def duality_audit(layout: TwoPathLayout, particle: UnstableParticle) -> DualityReport:
    """Check ``V**2 + P**2 = 1`` for the layout.

    Visibility comes from the closed form and predictability from the
    blocked-path ratio, so the audit exercises two distinct routes.  At
    saturation (``|theta| >= THETA_SATURATION``) the report carries the
    limiting values V = 0, P = 1 exactly, with the flag set.
    """
    theta = theta_cav(layout, particle)
    if _is_saturated(theta):
        return DualityReport(
            visibility=0.0, predictability=1.0, duality_sum=1.0,
            theta_cav=theta, saturated=True,
        )
    vis = visibility_closed_form(layout, particle)
    pred = predictability(layout, particle)
    return DualityReport(
        visibility=vis,
        predictability=pred,
        duality_sum=vis * vis + pred * pred,
        theta_cav=theta,
        saturated=False,
    )

"""Closed-form propagation math for a flat-earth two-ray link.

Everything here works in SI units (Hz, m, W, rad). Distances may be numpy
arrays; the functions broadcast over them so a whole sweep is evaluated in
one call.

Angles of incidence are measured from the ground plane: ``pi/2`` is normal
incidence and values approaching zero are grazing.
"""
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

__all__ = [
    'SPEED_OF_LIGHT', 'EARTH_RADIUS',
    'Frequency', 'GroundProfile', 'LinkGeometry', 'RayPaths',
    'Polarization', 'GrazingSign',
    'complex_permittivity', 'fresnel_parallel', 'fresnel_perpendicular',
    'reflection_coefficient', 'scattering_coefficient', 'geometry_solve',
    'phase_difference', 'fspl_db', 'two_ray_power', 'radio_horizon',
    'flat_earth_valid', 'breakpoint_distance',
    ]

SPEED_OF_LIGHT = 299_792_458.0  # m/s
EARTH_RADIUS = 6_371_000.0  # m
DEFAULT_K_FACTOR = 4.0 / 3.0


@dataclass(frozen=True)
class Frequency:
    """Carrier frequency in Hz."""

    hertz: float

    def __post_init__(self):
        if not np.isfinite(self.hertz) or self.hertz <= 0:
            raise ValueError(f'frequency must be positive, got {self.hertz!r}')

    @classmethod
    def from_mhz(cls, mhz):
        return cls(mhz * 1e6)

    @classmethod
    def from_ghz(cls, ghz):
        return cls(ghz * 1e9)

    @property
    def megahertz(self):
        return self.hertz / 1e6

    @property
    def wavelength(self):
        """Free-space wavelength in m."""
        return SPEED_OF_LIGHT / self.hertz


@dataclass(frozen=True)
class GroundProfile:
    """Electromagnetic description of the reflecting soil.

    Parameters
    ----------
    relative_permittivity : float
        Real relative permittivity (>= 1).
    conductivity : float
        Conductivity in S/m (>= 0). Values quoted in mS/m must be divided
        by 1000 first.
    roughness_stddev : float
        Standard deviation of the ground heights in m (>= 0).
    """

    relative_permittivity: float = 15.0
    conductivity: float = 0.0
    roughness_stddev: float = 0.0

    def __post_init__(self):
        if not self.relative_permittivity >= 1:
            raise ValueError('relative_permittivity must be >= 1')
        if not self.conductivity >= 0:
            raise ValueError('conductivity must be >= 0')
        if not self.roughness_stddev >= 0:
            raise ValueError('roughness_stddev must be >= 0')


class Polarization(str, Enum):
    VERTICAL = 'Vertical'
    HORIZONTAL = 'Horizontal'


class GrazingSign(str, Enum):
    """Sign convention of the parallel (vertical) reflection coefficient.

    ``VERBATIM`` keeps the form whose grazing limit is +1; ``TEXTBOOK``
    flips it so the grazing limit is -1 like the perpendicular coefficient.
    """

    VERBATIM = 'Verbatim'
    TEXTBOOK = 'Textbook'


@dataclass(frozen=True)
class LinkGeometry:
    """Antenna heights over a flat ground and their horizontal separation.

    ``horizontal_distance`` (and the heights) may be arrays, in which case
    every derived quantity is an array of the broadcast shape.
    """

    tx_height: float
    rx_height: float
    horizontal_distance: float

    def __post_init__(self):
        if np.any(np.asarray(self.tx_height) <= 0):
            raise ValueError('tx_height must be positive')
        if np.any(np.asarray(self.rx_height) <= 0):
            raise ValueError('rx_height must be positive')
        if np.any(np.asarray(self.horizontal_distance) < 0):
            raise ValueError('horizontal_distance must be >= 0')

    @property
    def los_length(self):
        return geometry_solve(self).los_length

    @property
    def reflected_length(self):
        return geometry_solve(self).reflected_length

    @property
    def incidence_angle(self):
        return geometry_solve(self).incidence_angle


class RayPaths(NamedTuple):
    los_length: np.ndarray
    reflected_length: np.ndarray
    incidence_angle: np.ndarray  # rad, from the ground plane


def geometry_solve(geom):
    """Direct and ground-reflected ray lengths plus the incidence angle.

    Uses the image-antenna construction: the reflected ray has the length of
    a straight line to the transmitter mirrored below the ground.
    """
    ht = np.asarray(geom.tx_height, dtype=float)
    hr = np.asarray(geom.rx_height, dtype=float)
    d = np.asarray(geom.horizontal_distance, dtype=float)
    los = np.hypot(d, ht - hr)
    refl = np.hypot(d, ht + hr)
    # arctan2 gives exactly pi/2 at d == 0
    theta = np.arctan2(ht + hr, d)
    return RayPaths(los, refl, theta)


def complex_permittivity(ground, freq):
    """Complex relative permittivity ``eps_r - j*60*sigma*lambda``."""
    return complex(ground.relative_permittivity,
                   -60.0 * ground.conductivity * freq.wavelength)


def _check_incidence(theta_i):
    theta_i = np.asarray(theta_i, dtype=float)
    if np.any(~(theta_i > 0)) or np.any(theta_i > np.pi / 2):
        raise ValueError('incidence angle must lie in (0, pi/2] rad')
    return theta_i


def _root_term(eps_g, theta_i):
    # principal branch: Re >= 0, and Im <= 0 whenever Im(eps_g) <= 0
    return np.sqrt(eps_g - np.cos(theta_i) ** 2 + 0j)


def fresnel_parallel(eps_g, theta_i, grazing_sign=GrazingSign.VERBATIM):
    """Reflection coefficient for vertical polarization.

    Parameters
    ----------
    eps_g : complex
        Complex relative permittivity of the ground.
    theta_i : float or array
        Incidence angle from the ground plane in rad, within (0, pi/2].
    grazing_sign : GrazingSign
        ``VERBATIM`` evaluates ``(-eps sin + root) / (eps sin + root)``,
        which tends to +1 at grazing. ``TEXTBOOK`` returns the negated value.

    Returns
    -------
    complex or ndarray of complex
    """
    theta_i = _check_incidence(theta_i)
    s = np.sin(theta_i)
    root = _root_term(eps_g, theta_i)
    gamma = (-eps_g * s + root) / (eps_g * s + root)
    if GrazingSign(grazing_sign) is GrazingSign.TEXTBOOK:
        gamma = -gamma
    return gamma


def fresnel_perpendicular(eps_g, theta_i):
    """Reflection coefficient for horizontal polarization (-1 at grazing)."""
    theta_i = _check_incidence(theta_i)
    s = np.sin(theta_i)
    root = _root_term(eps_g, theta_i)
    return (s - root) / (s + root)


def reflection_coefficient(eps_g, theta_i, polarization,
                           grazing_sign=GrazingSign.VERBATIM):
    if Polarization(polarization) is Polarization.VERTICAL:
        return fresnel_parallel(eps_g, theta_i, grazing_sign)
    return fresnel_perpendicular(eps_g, theta_i)


_TINY = np.finfo(float).tiny


def scattering_coefficient(ground, theta_i, freq):
    """Specular reduction factor of a rough surface.

    ``exp(-0.5 * (4 pi dh cos(theta) / lambda)**2)``. The result is kept
    strictly positive: values that would underflow are returned as the
    smallest normal double.
    """
    theta_i = _check_incidence(theta_i)
    dphi = 4 * np.pi * ground.roughness_stddev * np.cos(theta_i) / freq.wavelength
    return np.maximum(np.exp(-0.5 * dphi ** 2), _TINY)


def phase_difference(geom, freq):
    """Phase lag in rad of the reflected ray behind the direct ray."""
    paths = geometry_solve(geom)
    return 2 * np.pi * (paths.reflected_length - paths.los_length) / freq.wavelength


def fspl_db(distance, freq):
    """Free-space loss in dB, ``32.45 + 20 log10(d_km) + 20 log10(f_MHz)``.

    ``distance`` is in m and ``freq`` a :class:`Frequency`.
    """
    distance = np.asarray(distance, dtype=float)
    if np.any(~(distance > 0)):
        raise ValueError('distance must be positive')
    return 32.45 + 20 * np.log10(distance / 1000.0) + 20 * np.log10(freq.megahertz)


def two_ray_power(pt, geom, freq, ground, polarization, g_los=1.0, g_refl=1.0,
                  divergence=1.0, grazing_sign=GrazingSign.VERBATIM,
                  reflection=None, scattering=None):
    """Received power of the direct plus ground-reflected ray, in W.

    ``P_t (lambda/4pi)^2 |sqrt(G_l)/l + rho D Gamma sqrt(G_r) e^{-j dphi}/(x+x')|^2``

    Parameters
    ----------
    pt : float
        Transmit power in W.
    geom : LinkGeometry
        Must have a strictly positive horizontal distance.
    freq : Frequency
    ground : GroundProfile
    polarization : Polarization
        Selects the parallel (vertical) or perpendicular (horizontal)
        reflection coefficient.
    g_los, g_refl : float or array
        Linear antenna gain products along the direct and reflected rays.
    divergence : float
        Earth divergence factor; 1 for flat earth.
    grazing_sign : GrazingSign
    reflection : complex, optional
        Overrides the Fresnel coefficient (the simplified model uses -1).
    scattering : float, optional
        Overrides the roughness factor (0 removes the reflected ray).

    Returns
    -------
    float or ndarray
    """
    if np.any(np.asarray(geom.horizontal_distance) <= 0):
        raise ValueError('horizontal_distance must be positive')
    if np.any(np.asarray(g_los) < 0) or np.any(np.asarray(g_refl) < 0):
        raise ValueError('antenna gains must be non-negative')
    paths = geometry_solve(geom)
    lam = freq.wavelength
    if reflection is None:
        eps_g = complex_permittivity(ground, freq)
        reflection = reflection_coefficient(
            eps_g, paths.incidence_angle, polarization, grazing_sign)
    if scattering is None:
        scattering = scattering_coefficient(ground, paths.incidence_angle, freq)
    dphi = 2 * np.pi * (paths.reflected_length - paths.los_length) / lam
    field = (np.sqrt(g_los) / paths.los_length
             + scattering * divergence * reflection * np.sqrt(g_refl)
             * np.exp(-1j * dphi) / paths.reflected_length)
    return pt * (lam / (4 * np.pi)) ** 2 * np.abs(field) ** 2


def radio_horizon(height, k_factor=DEFAULT_K_FACTOR):
    """Radio horizon ``sqrt(2 k R_e h)`` in m for an antenna at ``height`` m."""
    height = np.asarray(height, dtype=float)
    if np.any(height < 0):
        raise ValueError('height must be non-negative')
    if not k_factor > 0:
        raise ValueError('k_factor must be positive')
    return np.sqrt(2 * k_factor * EARTH_RADIUS * height)


def flat_earth_valid(geom, k_factor=DEFAULT_K_FACTOR):
    """True where the link is shorter than the horizon of the higher antenna."""
    h = np.maximum(geom.tx_height, geom.rx_height)
    return np.asarray(geom.horizontal_distance) < radio_horizon(h, k_factor)


def breakpoint_distance(tx_height, rx_height, freq):
    """Distance ``4 h_t h_r / lambda`` of the last two-ray maximum."""
    return 4 * tx_height * rx_height / freq.wavelength

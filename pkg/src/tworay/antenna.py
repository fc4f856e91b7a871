"""Antenna radiation patterns and per-ray gain lookup.

Ray directions are given by an elevation angle above the horizontal plane
(negative below it) and an azimuth angle, both in degrees. Each antenna's
local frame points azimuth 0 toward the far end of the link.

Measured cuts use these angle conventions:

* elevation cut (yz plane): polar angle from the zenith, so the horizon in
  the link direction is 90 deg and the nadir is 180 deg;
* azimuth cut (xy plane): azimuth measured from the link direction.
"""
import csv
import warnings
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from .channel import Polarization, geometry_solve

__all__ = [
    'PatternCut', 'PatternError', 'RadiationPattern', 'AntennaKind',
    'AntennaModel', 'RayGains', 'load_pattern', 'gain_toward', 'ray_gains',
    'DIPOLE_PEAK_GAIN', 'DEFAULT_MEASURED_MAX_GAIN_DBI',
    ]

PATTERN_HEADER = ('angle_deg', 'gain_dbi')
DIPOLE_PEAK_GAIN = 1.64  # linear, ~2.15 dBi
DIPOLE_PEAK_GAIN_DBI = 10 * np.log10(DIPOLE_PEAK_GAIN)  # 2.148
DEFAULT_MEASURED_MAX_GAIN_DBI = 1.97
MIN_SAMPLES = 4


class PatternError(ValueError):
    pass


class PatternCut(str, Enum):
    AZIMUTH = 'Azimuth'
    ELEVATION = 'Elevation'


@dataclass(frozen=True, eq=False)
class RadiationPattern:
    """Gain versus angle in one plane.

    Parameters
    ----------
    angles : array_like
        Sample angles in degrees, strictly increasing within [0, 360).
    gains : array_like
        Gains in dBi at those angles.
    cut : PatternCut
    label : str
    """

    angles: np.ndarray
    gains: np.ndarray
    cut: PatternCut = PatternCut.ELEVATION
    label: str = ''

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float)
        gains = np.asarray(self.gains, dtype=float)
        if angles.ndim != 1 or angles.shape != gains.shape:
            raise PatternError('angles and gains must be 1-d and of equal length')
        if angles.size == 0:
            raise PatternError('no samples')
        if angles.size < MIN_SAMPLES:
            raise PatternError(
                f'at least {MIN_SAMPLES} samples required, got {angles.size}')
        if np.any(angles < 0) or np.any(angles >= 360):
            raise PatternError('angles must lie in [0, 360)')
        if np.any(np.diff(angles) <= 0):
            raise PatternError('angles must be strictly increasing')
        if not np.all(np.isfinite(gains)):
            raise PatternError('gains must be finite')
        angles.flags.writeable = False
        gains.flags.writeable = False
        object.__setattr__(self, 'angles', angles)
        object.__setattr__(self, 'gains', gains)
        object.__setattr__(self, 'cut', PatternCut(self.cut))

    @property
    def peak(self):
        return float(self.gains.max())

    def gain_dbi(self, angle):
        """Gain in dBi, linear-in-dB interpolation, wrapping at 360 deg."""
        return np.interp(np.mod(angle, 360.0), self.angles, self.gains,
                         period=360.0)

    def normalized(self, peak_dbi):
        """Copy shifted so that its maximum equals ``peak_dbi``."""
        return RadiationPattern(self.angles, self.gains - self.peak + peak_dbi,
                                self.cut, self.label)


def load_pattern(path, cut=PatternCut.ELEVATION, label=None):
    """Read one pattern cut from a CSV file.

    The file needs the header ``angle_deg,gain_dbi``; blank lines and lines
    starting with ``#`` are ignored. Rows must list strictly increasing
    angles.

    Raises
    ------
    PatternError
        On a malformed row (the message carries the line number), a
        duplicate, out-of-order or out-of-range angle, or fewer than four
        samples.
    """
    path = Path(path)
    angles, gains = [], []
    header_seen = False
    with path.open(encoding='utf-8', newline='') as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not ''.join(row).strip():
                continue
            if row[0].lstrip().startswith('#'):
                continue
            cells = [c.strip() for c in row]
            if not header_seen:
                if tuple(cells) != PATTERN_HEADER:
                    raise PatternError(
                        f'{path}:{lineno}: expected header '
                        f'{",".join(PATTERN_HEADER)!r}, got {",".join(cells)!r}')
                header_seen = True
                continue
            if len(cells) != 2:
                raise PatternError(
                    f'{path}:{lineno}: expected 2 columns, got {len(cells)}')
            try:
                angle, gain = float(cells[0]), float(cells[1])
            except ValueError:
                raise PatternError(
                    f'{path}:{lineno}: cannot parse {",".join(cells)!r}') from None
            if not 0 <= angle < 360:
                raise PatternError(
                    f'{path}:{lineno}: angle {angle} outside [0, 360)')
            if angles and angle == angles[-1]:
                raise PatternError(f'{path}:{lineno}: duplicate angle {angle}')
            if angles and angle < angles[-1]:
                raise PatternError(
                    f'{path}:{lineno}: angles must be strictly increasing')
            angles.append(angle)
            gains.append(gain)
    if not angles:
        raise PatternError(f'{path}: no samples')
    return RadiationPattern(np.array(angles), np.array(gains), cut,
                            label if label is not None else path.stem)


class AntennaKind(str, Enum):
    ISOTROPIC = 'Isotropic'
    HALF_WAVE_DIPOLE = 'IdealHalfWaveDipole'
    MEASURED = 'Measured'


@dataclass(frozen=True, eq=False)
class AntennaModel:
    """An antenna as seen by the two-ray model.

    For ``HALF_WAVE_DIPOLE`` the closed-form pattern is scaled so its peak is
    ``max_gain`` dBi (1.64 linear, about 2.15 dBi, by default). For
    ``MEASURED`` the elevation cut is shifted to peak at ``max_gain`` and the
    azimuth cut, if any, is shifted to peak at 0 dB so the two add in dB.

    A vertical dipole has its axis along the zenith. A horizontal dipole has
    its axis horizontal and perpendicular to the link, so the vertical plane
    containing the link is its H-plane.
    """

    kind: AntennaKind = AntennaKind.ISOTROPIC
    max_gain: Optional[float] = None
    polarization: Polarization = Polarization.VERTICAL
    elevation_cut: Optional[RadiationPattern] = None
    azimuth_cut: Optional[RadiationPattern] = None
    _elev: Optional[RadiationPattern] = field(default=None, init=False, repr=False)
    _azim: Optional[RadiationPattern] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        kind = AntennaKind(self.kind)
        object.__setattr__(self, 'kind', kind)
        object.__setattr__(self, 'polarization', Polarization(self.polarization))
        if self.max_gain is None:
            default = {
                AntennaKind.ISOTROPIC: 0.0,
                AntennaKind.HALF_WAVE_DIPOLE: DIPOLE_PEAK_GAIN_DBI,
                AntennaKind.MEASURED: DEFAULT_MEASURED_MAX_GAIN_DBI,
                }[kind]
            object.__setattr__(self, 'max_gain', default)
        if kind is AntennaKind.ISOTROPIC and self.max_gain != 0:
            raise ValueError('an isotropic antenna has 0 dBi gain')
        if kind is AntennaKind.MEASURED and self.elevation_cut is not None:
            object.__setattr__(
                self, '_elev', self.elevation_cut.normalized(self.max_gain))
            if self.azimuth_cut is not None:
                object.__setattr__(self, '_azim', self.azimuth_cut.normalized(0.0))
            elif self.polarization is Polarization.HORIZONTAL:
                warnings.warn(
                    'horizontal antenna without an azimuth cut; assuming an '
                    'omnidirectional azimuth pattern', stacklevel=3)

    @classmethod
    def isotropic(cls, polarization=Polarization.VERTICAL):
        return cls(AntennaKind.ISOTROPIC, 0.0, polarization)

    @classmethod
    def half_wave_dipole(cls, polarization=Polarization.VERTICAL, max_gain=None):
        return cls(AntennaKind.HALF_WAVE_DIPOLE, max_gain, polarization)

    @classmethod
    def measured(cls, elevation_cut, azimuth_cut=None,
                 max_gain=DEFAULT_MEASURED_MAX_GAIN_DBI,
                 polarization=Polarization.VERTICAL):
        return cls(AntennaKind.MEASURED, max_gain, polarization,
                   elevation_cut, azimuth_cut)


def _dipole_gain(antenna, elevation, azimuth):
    el = np.radians(elevation)
    az = np.radians(azimuth)
    if antenna.polarization is Polarization.VERTICAL:
        cos_axis = np.sin(el)
    else:
        cos_axis = np.cos(el) * np.sin(az)
    sin2 = 1.0 - cos_axis ** 2
    with np.errstate(divide='ignore', invalid='ignore'):
        g = DIPOLE_PEAK_GAIN * np.cos(np.pi / 2 * cos_axis) ** 2 / sin2
    g = np.where(sin2 > 1e-15, g, 0.0)
    scale = 10 ** (antenna.max_gain / 10) / DIPOLE_PEAK_GAIN
    return g * scale


def gain_toward(antenna, elevation, azimuth=0.0):
    """Linear gain of ``antenna`` toward a ray direction.

    Parameters
    ----------
    antenna : AntennaModel
    elevation : float or array
        Degrees above the horizontal plane (negative below).
    azimuth : float or array
        Degrees from the link direction.

    Returns
    -------
    float or ndarray
    """
    elevation = np.asarray(elevation, dtype=float)
    azimuth = np.asarray(azimuth, dtype=float)
    if antenna.kind is AntennaKind.ISOTROPIC:
        return np.ones(np.broadcast(elevation, azimuth).shape)[()]
    if antenna.kind is AntennaKind.HALF_WAVE_DIPOLE:
        return _dipole_gain(antenna, elevation, azimuth)[()]
    if antenna._elev is None:
        raise ValueError('measured antenna has no elevation cut loaded')
    gain_db = antenna._elev.gain_dbi(90.0 - elevation)
    if antenna._azim is not None:
        gain_db = gain_db + antenna._azim.gain_dbi(azimuth)
    return (10 ** (gain_db / 10))[()]


class RayGains(NamedTuple):
    g_los: np.ndarray
    g_refl: np.ndarray


def ray_gains(tx, rx, geom):
    """Gain products along the direct and the ground-reflected ray.

    Each gain is evaluated toward the direction the ray leaves or arrives
    from. The reflected ray leaves the transmitter ``theta_i`` below the
    horizontal and reaches the receiver from ``theta_i`` below it.
    """
    paths = geometry_solve(geom)
    d = np.asarray(geom.horizontal_distance, dtype=float)
    dh = np.asarray(geom.rx_height, dtype=float) - np.asarray(geom.tx_height, dtype=float)
    los_elev_tx = np.degrees(np.arctan2(dh, d))
    refl_elev = -np.degrees(paths.incidence_angle)
    g_los = gain_toward(tx, los_elev_tx) * gain_toward(rx, -los_elev_tx)
    g_refl = gain_toward(tx, refl_elev) * gain_toward(rx, refl_elev)
    return RayGains(g_los, g_refl)

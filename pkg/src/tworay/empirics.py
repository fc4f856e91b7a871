"""Comparison of model predictions against field measurements.

Errors are ``measured - predicted`` in dB, so a positive error means the
model underestimates the received power.
"""
import csv
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from .budget import Model, received_power_dbm
from .channel import Frequency, LinkGeometry, Polarization

__all__ = [
    'MeasurementSet', 'ErrorReport', 'CalibrationResult', 'load_measurements',
    'error_curve', 'calibrate_permittivity', 'DEFAULT_ZONE_BOUNDARY',
    ]

MEASUREMENT_HEADER = ('distance_m', 'rss_dbm')
DEFAULT_ZONE_BOUNDARY = 20.0  # m
FREQ_TOLERANCE = 1e6  # Hz


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """Measured RSS (dBm) at strictly increasing horizontal distances (m)."""

    distances: np.ndarray
    rss: np.ndarray
    polarization: Optional[Polarization] = None
    site: str = ''
    freq: Optional[Frequency] = None

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=float)
        r = np.asarray(self.rss, dtype=float)
        if d.ndim != 1 or d.shape != r.shape:
            raise ValueError('distances and rss must be 1-d and of equal length')
        if np.any(np.diff(d) <= 0):
            raise ValueError('distances must be strictly increasing')
        if not np.all(np.isfinite(r)):
            raise ValueError('rss values must be finite')
        object.__setattr__(self, 'distances', d)
        object.__setattr__(self, 'rss', r)
        if self.polarization is not None:
            object.__setattr__(self, 'polarization', Polarization(self.polarization))

    def __len__(self):
        return len(self.distances)


def load_measurements(path, polarization=None, site=None, freq=None):
    """Read a ``distance_m,rss_dbm`` CSV.

    Comment lines of the form ``# key: value`` with keys ``polarization``,
    ``site`` or ``freq_hz`` fill in the metadata; keyword arguments take
    precedence over them.
    """
    path = Path(path)
    meta = {}
    distances, rss = [], []
    header_seen = False
    with path.open(encoding='utf-8', newline='') as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if text.startswith('#'):
                key, sep, value = text[1:].partition(':')
                if sep:
                    meta[key.strip().lower()] = value.strip()
                continue
            cells = [c.strip() for c in next(csv.reader([text]))]
            if not header_seen:
                if tuple(cells) != MEASUREMENT_HEADER:
                    raise ValueError(
                        f'{path}:{lineno}: expected header '
                        f'{",".join(MEASUREMENT_HEADER)!r}')
                header_seen = True
                continue
            try:
                d, r = (float(c) for c in cells)
            except ValueError:
                raise ValueError(f'{path}:{lineno}: cannot parse {text!r}') from None
            if distances and d <= distances[-1]:
                raise ValueError(
                    f'{path}:{lineno}: distances must be strictly increasing')
            distances.append(d)
            rss.append(r)
    if not header_seen:
        raise ValueError(
            f'{path}: expected header {",".join(MEASUREMENT_HEADER)!r}')
    if freq is None and 'freq_hz' in meta:
        freq = Frequency(float(meta['freq_hz']))
    if polarization is None and 'polarization' in meta:
        polarization = Polarization(meta['polarization'].capitalize())
    if site is None:
        site = meta.get('site', '')
    return MeasurementSet(np.array(distances), np.array(rss), polarization,
                          site, freq)


@dataclass(frozen=True, eq=False)
class ErrorReport:
    """Per-sample errors plus RMSE overall and on each side of the boundary.

    Distances below ``zone_boundary`` form the interference zone, the rest
    the diffraction zone. The RMSE of a zone without samples is NaN.
    """

    distances: np.ndarray
    errors: np.ndarray
    rmse_total: float
    rmse_interference_zone: float
    rmse_diffraction_zone: float
    zone_boundary: float
    model: Model = Model.TWO_RAY

    @property
    def interference_mask(self):
        return self.distances < self.zone_boundary

    def summary(self):
        def clean(x):
            return None if np.isnan(x) else float(x)
        return {
            'model': self.model.value,
            'samples': int(len(self.distances)),
            'zone_boundary': self.zone_boundary,
            'samples_interference_zone': int(self.interference_mask.sum()),
            'samples_diffraction_zone': int((~self.interference_mask).sum()),
            'rmse_total': clean(self.rmse_total),
            'rmse_interference_zone': clean(self.rmse_interference_zone),
            'rmse_diffraction_zone': clean(self.rmse_diffraction_zone),
            'mean_error': float(np.mean(self.errors)),
            }

    def to_json(self):
        return json.dumps(self.summary(), indent=2, sort_keys=True)

    def csv_rows(self):
        return [[f'{d:.6g}', f'{e:.6g}'] for d, e in zip(self.distances, self.errors)]

    def write_csv(self, path):
        with Path(path).open('w', encoding='utf-8', newline='') as fh:
            writer = csv.writer(fh, lineterminator='\n')
            writer.writerow(['distance_m', 'error_db'])
            writer.writerows(self.csv_rows())


def _rmse(x):
    return float(np.sqrt(np.mean(x ** 2))) if x.size else float('nan')


def _check_frequency(meas, cfg):
    if meas.freq is not None and abs(meas.freq.hertz - cfg.freq.hertz) > FREQ_TOLERANCE:
        raise ValueError(
            f'measurement frequency {meas.freq.hertz:.6g} Hz does not match '
            f'config frequency {cfg.freq.hertz:.6g} Hz')


def _predict(meas, cfg, model):
    geom = LinkGeometry(cfg.tx_height, cfg.rx_height, meas.distances)
    return received_power_dbm(cfg, geom, model)


def error_curve(meas, cfg, model=None, zone_boundary=DEFAULT_ZONE_BOUNDARY):
    """Model error at every measured distance.

    The model is evaluated at exactly the measured distances using the
    heights of ``cfg``. A measurement set without a frequency is assumed to
    match ``cfg``.
    """
    if len(meas) == 0:
        raise ValueError('empty measurement set')
    _check_frequency(meas, cfg)
    model = Model(model if model is not None else cfg.model)
    errors = meas.rss - _predict(meas, cfg, model)
    iz = meas.distances < zone_boundary
    return ErrorReport(meas.distances, errors, _rmse(errors), _rmse(errors[iz]),
                       _rmse(errors[~iz]), float(zone_boundary), model)


class CalibrationResult(NamedTuple):
    best_eps_r: float
    rmse: float
    profile: list  # (eps_r, rmse) pairs


def calibrate_permittivity(meas, cfg, eps_range=(1.0, 80.0), steps=80):
    """Grid search of the ground relative permittivity.

    Evaluates the ``TwoRay`` model for ``steps`` evenly spaced values in
    ``eps_range`` (endpoints included), keeping conductivity and roughness
    from ``cfg.ground``. Ties go to the smaller permittivity.
    """
    lo, hi = eps_range
    if not (lo >= 1 and hi > lo):
        raise ValueError(f'need 1 <= lo < hi, got {eps_range}')
    if int(steps) != steps or steps < 2:
        raise ValueError(f'steps must be an integer >= 2, got {steps}')
    if len(meas) == 0:
        raise ValueError('empty measurement set')
    _check_frequency(meas, cfg)
    grid = np.linspace(lo, hi, int(steps))
    profile = []
    for eps in grid:
        trial = cfg.replace(ground=replace(cfg.ground, relative_permittivity=float(eps)))
        err = meas.rss - _predict(meas, trial, Model.TWO_RAY)
        profile.append((float(eps), _rmse(err)))
    rmses = np.array([r for _, r in profile])
    best = int(np.argmin(rmses))  # first minimum is the smallest eps_r
    return CalibrationResult(profile[best][0], profile[best][1], profile)

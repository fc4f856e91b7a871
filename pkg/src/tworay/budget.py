"""Link budget, distance sweeps and UAV trajectory predictions."""
import csv
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from .antenna import AntennaModel, ray_gains
from .channel import (
    Frequency, GrazingSign, GroundProfile, LinkGeometry, fspl_db,
    flat_earth_valid, geometry_solve, two_ray_power,
    )

__all__ = [
    'LossSide', 'LossChain', 'Model', 'ChannelConfig', 'RssSample',
    'RssTrace', 'ConnectivityReport', 'predict_rss', 'received_power_dbm',
    'sweep', 'trajectory_rss', 'connectivity_report', 'load_waypoints',
    'write_trace_csv', 'DEFAULT_D_MIN',
    ]

DEFAULT_D_MIN = 0.5  # m
WAYPOINT_HEADER = ('x_m', 'y_m', 'z_m')


class LossSide(str, Enum):
    TRANSMIT = 'Transmit'
    RECEIVE = 'Receive'


@dataclass(frozen=True)
class LossChain:
    """Named losses (dB) on one side of the link."""

    entries: tuple = ()
    side: LossSide = LossSide.TRANSMIT

    def __post_init__(self):
        entries = tuple((str(label), float(loss)) for label, loss in self.entries)
        for label, loss in entries:
            if not loss >= 0:
                raise ValueError(f'loss {label!r} must be >= 0 dB, got {loss}')
        object.__setattr__(self, 'entries', entries)
        object.__setattr__(self, 'side', LossSide(self.side))

    @property
    def total(self):
        return sum(loss for _, loss in self.entries)

    def add(self, label, loss):
        return LossChain(self.entries + ((label, loss),), self.side)


class Model(str, Enum):
    FSPL = 'FSPL'
    TWO_RAY = 'TwoRay'
    TWO_RAY_SIMPLIFIED = 'TwoRaySimplified'


# column tags used in the trace CSV
MODEL_COLUMNS = {
    Model.FSPL: 'rss_fspl_dbm',
    Model.TWO_RAY: 'rss_tworay_dbm',
    Model.TWO_RAY_SIMPLIFIED: 'rss_simplified_dbm',
    }


@dataclass(frozen=True, eq=False)
class ChannelConfig:
    """Everything needed to turn a link geometry into a received power.

    Powers are in dBm, losses in dB and heights in m. The polarization used
    for the ground reflection is that of the transmit antenna.
    ``TWO_RAY_SIMPLIFIED`` ignores the ground, the antennas and
    ``divergence``: it uses a reflection of -1, no roughness and unit gains.
    """

    freq: Frequency = Frequency(2.412e9)
    tx_power: float = 10.0
    tx_losses: LossChain = LossChain(side=LossSide.TRANSMIT)
    rx_losses: LossChain = LossChain(side=LossSide.RECEIVE)
    tx_antenna: AntennaModel = field(default_factory=AntennaModel.isotropic)
    rx_antenna: AntennaModel = field(default_factory=AntennaModel.isotropic)
    ground: GroundProfile = GroundProfile()
    tx_height: float = 5.0
    rx_height: float = 0.15
    sensitivity: float = -85.0
    model: Model = Model.TWO_RAY
    divergence: float = 1.0
    grazing_sign: GrazingSign = GrazingSign.VERBATIM

    def __post_init__(self):
        object.__setattr__(self, 'model', Model(self.model))
        object.__setattr__(self, 'grazing_sign', GrazingSign(self.grazing_sign))
        if not np.isfinite(self.tx_power):
            raise ValueError('tx_power must be finite')
        if not np.isfinite(self.sensitivity):
            raise ValueError('sensitivity must be finite')
        if not (self.tx_height > 0 and self.rx_height > 0):
            raise ValueError('antenna heights must be positive')
        if not self.divergence >= 0:
            raise ValueError('divergence must be >= 0')

    @property
    def polarization(self):
        return self.tx_antenna.polarization

    def replace(self, **changes):
        return replace(self, **changes)


def received_power_dbm(cfg, geom, model=None):
    """Received power in dBm for ``geom`` (vectorized over its arrays)."""
    model = Model(model if model is not None else cfg.model)
    if np.any(np.asarray(geom.horizontal_distance) <= 0):
        raise ValueError('horizontal_distance must be positive')
    with np.errstate(divide='ignore'):
        if model is Model.TWO_RAY_SIMPLIFIED:
            ratio = two_ray_power(1.0, geom, cfg.freq, cfg.ground,
                                  cfg.polarization, reflection=-1.0,
                                  scattering=1.0, divergence=1.0)
            channel_db = 10 * np.log10(ratio)
        else:
            gains = ray_gains(cfg.tx_antenna, cfg.rx_antenna, geom)
            if model is Model.FSPL:
                los = geometry_solve(geom).los_length
                channel_db = 10 * np.log10(gains.g_los) - fspl_db(los, cfg.freq)
            else:
                ratio = two_ray_power(
                    1.0, geom, cfg.freq, cfg.ground, cfg.polarization,
                    gains.g_los, gains.g_refl, cfg.divergence, cfg.grazing_sign)
                channel_db = 10 * np.log10(ratio)
    return cfg.tx_power - cfg.tx_losses.total + channel_db - cfg.rx_losses.total


class RssSample(NamedTuple):
    distance: float
    rss: float  # dBm
    margin: float  # dB above sensitivity
    connected: bool
    flat_earth_valid: bool = True
    clamped: bool = False


def predict_rss(cfg, geom, model=None):
    """Received signal strength of one link.

    Links beyond the radio horizon are still evaluated; the returned sample
    carries ``flat_earth_valid=False`` instead.
    """
    rss = float(received_power_dbm(cfg, geom, model))
    margin = rss - cfg.sensitivity
    return RssSample(float(geom.horizontal_distance), rss, margin, margin >= 0,
                     bool(flat_earth_valid(geom)))


@dataclass(frozen=True, eq=False)
class RssTrace:
    """Predicted or measured RSS over a sequence of horizontal distances."""

    distances: np.ndarray
    rss: np.ndarray
    sensitivity: float
    model: Optional[Model] = None
    flat_earth_valid: Optional[np.ndarray] = None
    clamped: Optional[np.ndarray] = None

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=float)
        object.__setattr__(self, 'distances', d)
        object.__setattr__(self, 'rss', np.broadcast_to(
            np.asarray(self.rss, dtype=float), d.shape))
        for name in ('flat_earth_valid', 'clamped'):
            value = getattr(self, name)
            if value is None:
                value = np.full(d.shape, name == 'flat_earth_valid')
            object.__setattr__(self, name, np.asarray(value, dtype=bool))

    def __len__(self):
        return len(self.distances)

    @property
    def margin(self):
        return self.rss - self.sensitivity

    @property
    def connected(self):
        return self.margin >= 0

    def __iter__(self):
        margin = self.margin
        for i in range(len(self)):
            yield RssSample(float(self.distances[i]), float(self.rss[i]),
                            float(margin[i]), bool(margin[i] >= 0),
                            bool(self.flat_earth_valid[i]),
                            bool(self.clamped[i]))


def sweep(cfg, d_min=DEFAULT_D_MIN, d_max=50.0, steps=200, models=None,
          spacing='linear'):
    """Evaluate one trace per model over horizontal distances.

    Parameters
    ----------
    cfg : ChannelConfig
    d_min, d_max : float
        Distance range in m, ``0 < d_min < d_max``.
    steps : int
        Number of samples (>= 2), endpoints included.
    models : iterable of Model, optional
        Defaults to ``[cfg.model]``.
    spacing : {'linear', 'log'}

    Returns
    -------
    dict
        ``Model -> RssTrace``, in the order the models were given.
    """
    if not (0 < d_min < d_max):
        raise ValueError(f'need 0 < d_min < d_max, got {d_min}, {d_max}')
    if int(steps) != steps or steps < 2:
        raise ValueError(f'steps must be an integer >= 2, got {steps}')
    if spacing == 'linear':
        d = np.linspace(d_min, d_max, int(steps))
    elif spacing == 'log':
        d = np.geomspace(d_min, d_max, int(steps))
    else:
        raise ValueError(f'unknown spacing {spacing!r}')
    models = [cfg.model] if models is None else [Model(m) for m in models]
    geom = LinkGeometry(cfg.tx_height, cfg.rx_height, d)
    valid = flat_earth_valid(geom)
    return {
        m: RssTrace(d, received_power_dbm(cfg, geom, m), cfg.sensitivity, m,
                    valid)
        for m in dict.fromkeys(models)
        }


def trajectory_rss(cfg, waypoints, sensor_position, d_min=DEFAULT_D_MIN,
                   model=None):
    """RSS at a ground sensor for each UAV waypoint.

    Each waypoint ``(x, y, z)`` becomes a link with the UAV as transmitter at
    height ``z``, the sensor as receiver at its own ``z``, and the
    horizontal distance between them. Horizontal distances below ``d_min``
    are clamped to ``d_min`` and flagged in ``RssTrace.clamped``.
    """
    wp = np.atleast_2d(np.asarray(waypoints, dtype=float))
    if wp.shape[1] != 3:
        raise ValueError('waypoints must be (x, y, z) triples')
    sensor = np.asarray(sensor_position, dtype=float)
    if sensor.shape != (3,):
        raise ValueError('sensor_position must be an (x, y, z) triple')
    if np.any(wp[:, 2] <= 0):
        raise ValueError('waypoint altitudes must be positive')
    if sensor[2] <= 0:
        raise ValueError('sensor altitude must be positive')
    if not d_min > 0:
        raise ValueError('d_min must be positive')
    d = np.hypot(wp[:, 0] - sensor[0], wp[:, 1] - sensor[1])
    clamped = d < d_min
    if clamped.any():
        warnings.warn(f'{int(clamped.sum())} waypoint(s) closer than '
                      f'{d_min} m horizontally; clamped', stacklevel=2)
        d = np.where(clamped, d_min, d)
    model = Model(model if model is not None else cfg.model)
    geom = LinkGeometry(wp[:, 2], sensor[2], d)
    return RssTrace(d, received_power_dbm(cfg, geom, model), cfg.sensitivity,
                    model, flat_earth_valid(geom), clamped)


class ConnectivityReport(NamedTuple):
    connected_fraction: float
    first_loss_distance: Optional[float]
    min_margin: float


def connectivity_report(trace):
    if len(trace) == 0:
        raise ValueError('empty trace')
    margin = trace.margin
    lost = np.flatnonzero(margin < 0)
    first = float(trace.distances[lost[0]]) if lost.size else None
    return ConnectivityReport(float(np.mean(margin >= 0)), first,
                              float(margin.min()))


def load_waypoints(path):
    """Read an ``x_m,y_m,z_m`` CSV into an ``(n, 3)`` array."""
    path = Path(path)
    rows = []
    with path.open(encoding='utf-8', newline='') as fh:
        reader = csv.reader(line for line in fh
                            if line.strip() and not line.lstrip().startswith('#'))
        header = next(reader, None)
        if header is None or tuple(c.strip() for c in header) != WAYPOINT_HEADER:
            raise ValueError(f'{path}: expected header {",".join(WAYPOINT_HEADER)!r}')
        for n, row in enumerate(reader, start=1):
            try:
                x, y, z = (float(c) for c in row)
            except ValueError:
                raise ValueError(f'{path}: bad waypoint row {n}: {row!r}') from None
            rows.append((x, y, z))
    if not rows:
        raise ValueError(f'{path}: no waypoints')
    return np.array(rows)


def _fmt(x):
    return f'{x:.6g}'


def trace_rows(traces, primary=None):
    """Header and rows of the trace CSV for a ``Model -> RssTrace`` mapping.

    ``margin_db`` and ``connected`` refer to ``primary`` (default: the first
    trace given).
    """
    traces = {Model(m): t for m, t in traces.items()}
    if not traces:
        raise ValueError('no traces')
    ordered = [m for m in Model if m in traces]
    primary = Model(primary) if primary is not None and Model(primary) in traces \
        else next(iter(traces))
    ref = traces[primary]
    header = ['distance_m'] + [MODEL_COLUMNS[m] for m in ordered] + \
        ['margin_db', 'connected']
    rows = []
    margin = ref.margin
    for i in range(len(ref)):
        rows.append([_fmt(ref.distances[i])]
                    + [_fmt(traces[m].rss[i]) for m in ordered]
                    + [_fmt(margin[i]), str(bool(margin[i] >= 0)).lower()])
    return header, rows


def write_trace_csv(traces, path, primary=None):
    header, rows = trace_rows(traces, primary)
    with Path(path).open('w', encoding='utf-8', newline='') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)

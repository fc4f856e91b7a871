"""JSON (de)serialization of :class:`ChannelConfig` and shipped presets.

Units in the JSON document: ``freq`` in Hz, powers in dBm, losses in dB,
lengths in m and conductivity in S/m. ``ground`` is either a
``GroundProfile`` object or the name of a soil preset. Measured antenna
cuts are either a path to a pattern CSV (relative to the config file) or an
inline ``{"angles": [...], "gains": [...]}`` object.

Presets are looked up first in ``$TWORAY_PRESET_DIR`` and then in the
package's own ``presets`` directory.
"""
import json
import math
import os
from importlib import resources
from pathlib import Path

from .antenna import AntennaKind, AntennaModel, PatternCut, RadiationPattern, load_pattern
from .budget import ChannelConfig, LossChain, LossSide, Model
from .channel import Frequency, GrazingSign, GroundProfile, Polarization

__all__ = [
    'ConfigError', 'config_from_dict', 'config_to_dict', 'load_config',
    'save_config', 'find_preset', 'list_presets', 'load_ground',
    ]

PRESET_ENV = 'TWORAY_PRESET_DIR'

_CONFIG_FIELDS = (
    'freq', 'tx_power', 'tx_losses', 'rx_losses', 'tx_antenna', 'rx_antenna',
    'ground', 'tx_height', 'rx_height', 'sensitivity', 'model', 'divergence',
    'grazing_sign',
    )
_GROUND_FIELDS = ('relative_permittivity', 'conductivity', 'roughness_stddev')


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending field path."""

    def __init__(self, path, message):
        self.field = path
        super().__init__(f'{path}: {message}' if path else message)


def _preset_dirs():
    env = os.environ.get(PRESET_ENV)
    if env:
        yield Path(env)
    yield Path(str(resources.files('tworay') / 'presets'))


def find_preset(name):
    """Path of the preset ``name`` (with or without ``.json``)."""
    filename = name if name.endswith('.json') else name + '.json'
    for directory in _preset_dirs():
        candidate = directory / filename
        if candidate.is_file():
            return candidate
    raise FileNotFoundError(f'no preset named {name!r}')


def list_presets():
    names = set()
    for directory in _preset_dirs():
        if directory.is_dir():
            names.update(p.stem for p in directory.glob('*.json'))
    return sorted(names)


def _number(data, key, path, default=None):
    if key not in data:
        if default is None:
            raise ConfigError(f'{path}{key}', 'missing')
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) \
            or not math.isfinite(value):
        raise ConfigError(f'{path}{key}', f'expected a finite number, got {value!r}')
    return float(value)


def _enum(cls, data, key, path, default):
    value = data.get(key, default)
    if isinstance(value, cls):
        return value
    for member in cls:
        if isinstance(value, str) and value.lower() == member.value.lower():
            return member
    choices = ', '.join(m.value for m in cls)
    raise ConfigError(f'{path}{key}', f'expected one of {choices}, got {value!r}')


def _check_keys(data, allowed, path):
    if not isinstance(data, dict):
        raise ConfigError(path.rstrip('.'), 'expected an object')
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f'{path}{unknown[0]}', 'unknown field')


def _ground_from_dict(data, path):
    if isinstance(data, str):
        try:
            return load_ground(data)
        except FileNotFoundError:
            raise ConfigError(path.rstrip('.'), f'unknown soil preset {data!r}') from None
    _check_keys(data, _GROUND_FIELDS, path)
    try:
        return GroundProfile(
            _number(data, 'relative_permittivity', path),
            _number(data, 'conductivity', path, 0.0),
            _number(data, 'roughness_stddev', path, 0.0))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(path.rstrip('.'), str(exc)) from None


def load_ground(name):
    """Soil preset by name, e.g. ``'grass-42'``."""
    path = find_preset(name)
    data = json.loads(path.read_text(encoding='utf-8'))
    return _ground_from_dict(data, f'{name}.')


def _losses_from_dict(data, path, side):
    if data is None:
        return LossChain(side=side)
    _check_keys(data, ('entries', 'side'), path)
    side = _enum(LossSide, data, 'side', path, side)
    entries = data.get('entries', [])
    if not isinstance(entries, list):
        raise ConfigError(f'{path}entries', 'expected a list')
    out = []
    for i, entry in enumerate(entries):
        epath = f'{path}entries[{i}].'
        _check_keys(entry, ('label', 'loss'), epath)
        loss = _number(entry, 'loss', epath)
        if loss < 0:
            raise ConfigError(f'{epath}loss', 'must be >= 0')
        out.append((str(entry.get('label', f'loss{i}')), loss))
    return LossChain(tuple(out), side)


def _pattern_from(value, path, cut, base_dir):
    if value is None:
        return None
    try:
        if isinstance(value, str):
            file = Path(value)
            if not file.is_absolute() and base_dir is not None:
                file = Path(base_dir) / file
            return load_pattern(file, cut)
        if isinstance(value, dict):
            _check_keys(value, ('angles', 'gains', 'label'), path + '.')
            return RadiationPattern(value['angles'], value['gains'], cut,
                                    value.get('label', ''))
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(path, str(exc)) from None
    raise ConfigError(path, 'expected a file path or an inline pattern object')


def _antenna_from_dict(data, path, base_dir):
    if data is None:
        return AntennaModel.isotropic()
    _check_keys(data, ('kind', 'max_gain', 'polarization', 'azimuth_cut',
                       'elevation_cut'), path)
    kind = _enum(AntennaKind, data, 'kind', path, AntennaKind.ISOTROPIC)
    pol = _enum(Polarization, data, 'polarization', path, Polarization.VERTICAL)
    max_gain = None
    if data.get('max_gain') is not None:
        max_gain = _number(data, 'max_gain', path)
    elev = _pattern_from(data.get('elevation_cut'), f'{path}elevation_cut',
                         PatternCut.ELEVATION, base_dir)
    azim = _pattern_from(data.get('azimuth_cut'), f'{path}azimuth_cut',
                         PatternCut.AZIMUTH, base_dir)
    if kind is AntennaKind.MEASURED and elev is None:
        raise ConfigError(f'{path}elevation_cut', 'required for a Measured antenna')
    try:
        return AntennaModel(kind, max_gain, pol, elev, azim)
    except ValueError as exc:
        raise ConfigError(path.rstrip('.'), str(exc)) from None


def config_from_dict(data, base_dir=None):
    """Build a validated :class:`ChannelConfig` from parsed JSON."""
    _check_keys(data, _CONFIG_FIELDS, '')
    defaults = ChannelConfig()
    freq = _number(data, 'freq', '', defaults.freq.hertz)
    if freq <= 0:
        raise ConfigError('freq', 'must be positive')
    heights = {}
    for key in ('tx_height', 'rx_height'):
        heights[key] = _number(data, key, '', getattr(defaults, key))
        if heights[key] <= 0:
            raise ConfigError(key, 'must be positive')
    divergence = _number(data, 'divergence', '', 1.0)
    if divergence < 0:
        raise ConfigError('divergence', 'must be >= 0')
    return ChannelConfig(
        freq=Frequency(freq),
        tx_power=_number(data, 'tx_power', '', defaults.tx_power),
        tx_losses=_losses_from_dict(data.get('tx_losses'), 'tx_losses.',
                                    LossSide.TRANSMIT),
        rx_losses=_losses_from_dict(data.get('rx_losses'), 'rx_losses.',
                                    LossSide.RECEIVE),
        tx_antenna=_antenna_from_dict(data.get('tx_antenna'), 'tx_antenna.', base_dir),
        rx_antenna=_antenna_from_dict(data.get('rx_antenna'), 'rx_antenna.', base_dir),
        ground=_ground_from_dict(data.get('ground', {'relative_permittivity': 15.0}),
                                 'ground.'),
        sensitivity=_number(data, 'sensitivity', '', defaults.sensitivity),
        model=_enum(Model, data, 'model', '', defaults.model),
        divergence=divergence,
        grazing_sign=_enum(GrazingSign, data, 'grazing_sign', '', GrazingSign.VERBATIM),
        **heights,
        )


def _pattern_to_dict(pattern):
    if pattern is None:
        return None
    return {'angles': pattern.angles.tolist(), 'gains': pattern.gains.tolist(),
            'label': pattern.label}


def config_to_dict(cfg):
    """Inverse of :func:`config_from_dict`; measured cuts are inlined."""
    def losses(chain):
        return {'side': chain.side.value,
                'entries': [{'label': k, 'loss': v} for k, v in chain.entries]}

    def antenna(a):
        return {'kind': a.kind.value, 'max_gain': a.max_gain,
                'polarization': a.polarization.value,
                'elevation_cut': _pattern_to_dict(a.elevation_cut),
                'azimuth_cut': _pattern_to_dict(a.azimuth_cut)}

    g = cfg.ground
    return {
        'freq': cfg.freq.hertz,
        'tx_power': cfg.tx_power,
        'tx_losses': losses(cfg.tx_losses),
        'rx_losses': losses(cfg.rx_losses),
        'tx_antenna': antenna(cfg.tx_antenna),
        'rx_antenna': antenna(cfg.rx_antenna),
        'ground': {'relative_permittivity': g.relative_permittivity,
                   'conductivity': g.conductivity,
                   'roughness_stddev': g.roughness_stddev},
        'tx_height': cfg.tx_height,
        'rx_height': cfg.rx_height,
        'sensitivity': cfg.sensitivity,
        'model': cfg.model.value,
        'divergence': cfg.divergence,
        'grazing_sign': cfg.grazing_sign.value,
        }


def load_config(source):
    """Load a config from a JSON file path or a preset name."""
    path = Path(source)
    if not path.is_file():
        try:
            path = find_preset(str(source))
        except FileNotFoundError:
            raise FileNotFoundError(f'config not found: {source}') from None
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as exc:
        raise ConfigError('', f'{path}: invalid JSON: {exc}') from None
    return config_from_dict(data, base_dir=path.parent)


def save_config(cfg, path):
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2) + '\n',
                          encoding='utf-8')

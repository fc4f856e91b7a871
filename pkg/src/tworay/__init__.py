"""Two-ray ground-reflection channel prediction for UAV-to-ground links."""
from .antenna import (
    AntennaKind, AntennaModel, PatternCut, PatternError, RadiationPattern,
    gain_toward, load_pattern, ray_gains,
    )
from .budget import (
    ChannelConfig, LossChain, LossSide, Model, RssSample, RssTrace,
    connectivity_report, predict_rss, received_power_dbm, sweep,
    trajectory_rss, write_trace_csv,
    )
from .channel import (
    Frequency, GrazingSign, GroundProfile, LinkGeometry, Polarization,
    breakpoint_distance, complex_permittivity, flat_earth_valid,
    fresnel_parallel, fresnel_perpendicular, fspl_db, geometry_solve,
    phase_difference, radio_horizon, reflection_coefficient,
    scattering_coefficient, two_ray_power,
    )
from .config import ConfigError, load_config, load_ground, save_config
from .empirics import (
    ErrorReport, MeasurementSet, calibrate_permittivity, error_curve,
    load_measurements,
    )

__version__ = '0.1.0'

"""Acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that ``conftest.py`` prints at the end of
the run, then asserts the same condition.
"""
import time

import numpy as np

from tworay.budget import ChannelConfig, Model, received_power_dbm, sweep
from tworay.channel import (
    Frequency, GroundProfile, LinkGeometry, Polarization, breakpoint_distance,
    flat_earth_valid, fresnel_parallel, fresnel_perpendicular, fspl_db,
    geometry_solve, radio_horizon, scattering_coefficient, two_ray_power,
    )
from tworay.cli import main
from tworay.config import load_config
from tworay.empirics import MeasurementSet, calibrate_permittivity, error_curve

F = Frequency(2.412e9)
GRAZING = np.radians(0.01)


def local_minima(y):
    inner = y[1:-1]
    return np.flatnonzero((inner < y[:-2]) & (inner < y[2:])) + 1


def test_c1_fresnel_limits(record):
    worst_par = worst_perp = worst_normal = 0.0
    for eps in (1.7, 4.0, 15.0, 42.0):
        worst_par = max(worst_par, abs(fresnel_parallel(eps, GRAZING) - 1))
        worst_perp = max(worst_perp, abs(fresnel_perpendicular(eps, GRAZING) + 1))
        worst_normal = max(worst_normal, abs(fresnel_parallel(eps, np.pi / 2)
                                             - fresnel_perpendicular(eps, np.pi / 2)))
    ok = worst_par <= 1e-3 and worst_perp <= 1e-3 and worst_normal <= 1e-12
    record('c1 fresnel limits', ok,
           f'max|par-1|={worst_par:.2e} max|perp+1|={worst_perp:.2e} '
           f'max|par-perp| at normal={worst_normal:.1e} (tol 1e-3, 1e-3, 1e-12)')
    assert ok


def test_c2_fourth_power_asymptote(record):
    cfg = ChannelConfig(tx_height=2.0, rx_height=2.0, tx_power=0.0,
                        model=Model.TWO_RAY_SIMPLIFIED)
    d = np.linspace(500, 5000, 2000)
    p = 10 ** (received_power_dbm(cfg, LinkGeometry(2.0, 2.0, d)) / 10)
    ratio = p / (2.0 * 2.0 / d ** 2) ** 2  # mW over 1 mW
    worst = float(np.max(np.abs(ratio - 1)))
    ok = worst <= 0.05
    record('c2 d^-4 asymptote', ok,
           f'max relative deviation {worst:.4f} at d={d[np.argmax(np.abs(ratio - 1))]:.0f} m '
           f'(tol 0.05)')
    assert ok


def test_c3_fspl_consistency(record):
    d = np.linspace(1, 50, 500)
    g = LinkGeometry(5.0, 0.15, d)
    p = two_ray_power(1.0, g, F, GroundProfile(), Polarization.VERTICAL,
                      scattering=0.0)
    loss = -10 * np.log10(p)
    worst = float(np.max(np.abs(loss - fspl_db(g.los_length, F))))
    spot = float(fspl_db(50.0, F))
    ok = worst < 0.01 and abs(spot - 74.07) < 0.01
    record('c3 fspl consistency', ok,
           f'max |two-ray - fspl| {worst:.4f} dB, fspl(50 m)={spot:.4f} dB')
    assert ok


def test_c4_null_structure(record):
    cfg = ChannelConfig(model=Model.TWO_RAY_SIMPLIFIED)
    t0 = time.perf_counter()
    tr = sweep(cfg, 0.5, 24.0, 10_000)[Model.TWO_RAY_SIMPLIFIED]
    step = tr.distances[1] - tr.distances[0]
    paths = geometry_solve(LinkGeometry(5.0, 0.15, tr.distances))
    n = (paths.reflected_length - paths.los_length) / F.wavelength
    mins = local_minima(tr.rss)
    # distances where the path difference is an integer number of wavelengths
    crossings = []
    for k in range(int(np.ceil(n.min())), int(np.floor(n.max())) + 1):
        crossings.append(np.interp(k, n[::-1], tr.distances[::-1]))
    crossings = np.array(crossings)
    offsets = [float(np.min(np.abs(crossings - tr.distances[i]))) for i in mins]
    d_break = breakpoint_distance(5.0, 0.15, F)
    tail = sweep(cfg, d_break, 500.0, 10_000)[Model.TWO_RAY_SIMPLIFIED]
    elapsed = time.perf_counter() - t0
    ok = (len(mins) > 0 and max(offsets) <= step
          and bool(np.all(np.diff(tail.rss) < 0)) and elapsed < 1)
    record('c4 null structure', ok,
           f'{len(mins)} minima, max offset {max(offsets, default=np.nan):.4f} m '
           f'(step {step:.4f}), decreasing beyond {d_break:.2f} m, {elapsed:.2f} s')
    assert ok


def test_c5_scattering_bounds(record):
    rng = np.random.default_rng(0)
    n = 10_000
    dh = rng.uniform(0, 0.1, (n, 2))
    theta = rng.uniform(1e-6, np.pi / 2, n)
    f = rng.uniform(1e8, 6e9, n)
    t0 = time.perf_counter()
    ok = True
    for (a, b), th, hz in zip(dh, theta, f):
        lo, hi = min(a, b), max(a, b)
        freq = Frequency(hz)
        r_lo = scattering_coefficient(GroundProfile(roughness_stddev=lo), th, freq)
        r_hi = scattering_coefficient(GroundProfile(roughness_stddev=hi), th, freq)
        r0 = scattering_coefficient(GroundProfile(), th, freq)
        if not (0 < r_hi <= r_lo <= 1 and r0 == 1.0):
            ok = False
            break
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 1
    record('c5 scattering bounds', ok, f'{n} samples in {elapsed:.2f} s')
    assert ok


def test_c6_calibration_round_trip(record):
    cfg = ChannelConfig(ground=GroundProfile(15.0))
    d = np.linspace(0.5, 50, 100)
    rss = received_power_dbm(cfg, LinkGeometry(cfg.tx_height, cfg.rx_height, d))
    t0 = time.perf_counter()
    res = calibrate_permittivity(MeasurementSet(d, rss),
                                 cfg.replace(ground=GroundProfile(4.0)), (1, 100), 100)
    elapsed = time.perf_counter() - t0
    ok = res.best_eps_r == 15 and res.rmse < 1e-6 and elapsed < 5
    record('c6 calibration round trip', ok,
           f'best_eps_r={res.best_eps_r:g} rmse={res.rmse:.1e} dB, {elapsed:.2f} s')
    assert ok


def test_c7_zone_rmse(record):
    cfg = load_config('paper-esp32')
    d = np.linspace(1, 50, 50)
    rss = received_power_dbm(cfg, LinkGeometry(cfg.tx_height, cfg.rx_height, d))
    meas = MeasurementSet(d, rss + np.where(d >= 20, 10.0, 0.0))
    rep = error_curve(meas, cfg, zone_boundary=20)
    ok = rep.rmse_interference_zone < 0.1 and abs(rep.rmse_diffraction_zone - 10) <= 0.1
    record('c7 zone rmse', ok,
           f'interference {rep.rmse_interference_zone:.3g} dB, '
           f'diffraction {rep.rmse_diffraction_zone:.3g} dB')
    assert ok


def test_c8_sweep_determinism(record, tmp_path, capsys):
    outs = [tmp_path / 'a.csv', tmp_path / 'b.csv']
    codes = [main(['sweep', 'paper-esp32', '--models', 'all', '--out', str(p)])
             for p in outs]
    capsys.readouterr()
    ok = codes == [0, 0] and outs[0].read_bytes() == outs[1].read_bytes()
    record('c8 determinism', ok, f'{outs[0].stat().st_size} bytes, identical={ok}')
    assert ok


def test_c9_horizon(record):
    h = float(radio_horizon(5.0, 4 / 3))
    cfg = load_config('paper-esp32')
    d = np.linspace(0.5, 50, 1000)
    valid = flat_earth_valid(LinkGeometry(cfg.tx_height, cfg.rx_height, d))
    ok = abs(h - 9216) <= 5 and bool(np.all(valid))
    record('c9 horizon', ok,
           f'horizon(5 m)={h:.2f} m, all preset distances valid={bool(np.all(valid))}')
    assert ok

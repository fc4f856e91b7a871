"""Command-line front end: ``tworay {sweep,trajectory,compare,calibrate,horizon}``.

Every command exits 0 on success. On failure it prints one line
``tworay: error: <message>`` to stderr, exits nonzero and leaves the
``--out`` target untouched.
"""
import argparse
import csv
import io
import os
import sys
import tempfile
import warnings
from pathlib import Path

import numpy as np

from .budget import (
    DEFAULT_D_MIN, Model, connectivity_report, load_waypoints, sweep,
    trace_rows, trajectory_rss,
    )
from .channel import DEFAULT_K_FACTOR, breakpoint_distance, radio_horizon
from .config import load_config
from .empirics import DEFAULT_ZONE_BOUNDARY, calibrate_permittivity, error_curve, load_measurements

EXIT_USAGE = 2
EXIT_FAILURE = 1

_MODEL_ALIASES = {
    'fspl': Model.FSPL,
    'tworay': Model.TWO_RAY,
    'two-ray': Model.TWO_RAY,
    'simplified': Model.TWO_RAY_SIMPLIFIED,
    'tworaysimplified': Model.TWO_RAY_SIMPLIFIED,
    }


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _model(text):
    try:
        return _MODEL_ALIASES[text.strip().lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(f'unknown model {text!r}') from None


def _models(text):
    if text.strip().lower() == 'all':
        return list(Model)
    return [_model(t) for t in text.split(',') if t.strip()]


def _triple(text):
    try:
        values = [float(v) for v in text.split(',')]
    except ValueError:
        values = []
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f'expected x,y,z, got {text!r}')
    return values


def _atomic_write(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or '.', prefix=f'.{path.name}.')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _link_summary(cfg, d_max, k_factor=DEFAULT_K_FACTOR):
    horizon = float(radio_horizon(max(cfg.tx_height, cfg.rx_height), k_factor))
    valid = d_max < horizon
    return [
        f'd_break_m: {breakpoint_distance(cfg.tx_height, cfg.rx_height, cfg.freq):.6g}',
        f'horizon_m: {horizon:.6g}',
        f'flat_earth: {"valid" if valid else "invalid"} (d_max {d_max:.6g} m)',
        ]


def cmd_sweep(args):
    if not args.d_min < args.d_max:
        raise UsageError('--d-max must be greater than --d-min')
    cfg = load_config(args.config)
    traces = sweep(cfg, args.d_min, args.d_max, args.steps, args.models or None,
                   args.spacing)
    header, rows = trace_rows(traces, primary=cfg.model)
    _atomic_write(args.out, _csv_text(header, rows))
    lines = _link_summary(cfg, args.d_max)
    for model, trace in traces.items():
        rep = connectivity_report(trace)
        first = 'none' if rep.first_loss_distance is None else f'{rep.first_loss_distance:.6g}'
        lines.append(f'{model.value}: connected_fraction {rep.connected_fraction:.6g}, '
                     f'first_loss_distance {first}, min_margin {rep.min_margin:.6g}')
    print('\n'.join(lines))


def cmd_trajectory(args):
    cfg = load_config(args.config)
    waypoints = load_waypoints(args.waypoints)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        trace = trajectory_rss(cfg, waypoints, args.sensor, args.d_min, args.model)
    model = trace.model
    header, rows = trace_rows({model: trace})
    _atomic_write(args.out, _csv_text(header, rows))
    rep = connectivity_report(trace)
    first = 'none' if rep.first_loss_distance is None else f'{rep.first_loss_distance:.6g}'
    for w in caught:
        print(f'warning: {w.message}', file=sys.stderr)
    print(f'{model.value}: connected_fraction {rep.connected_fraction:.6g}, '
          f'first_loss_distance {first}, min_margin {rep.min_margin:.6g}, '
          f'clamped {int(trace.clamped.sum())}')


def cmd_compare(args):
    cfg = load_config(args.config)
    meas = load_measurements(args.measurements)
    report = error_curve(meas, cfg, args.model, args.zone_boundary)
    summary_path = args.summary or Path(args.out).with_suffix('.json')
    summary = report.to_json() + '\n'
    _atomic_write(args.out, _csv_text(['distance_m', 'error_db'], report.csv_rows()))
    _atomic_write(summary_path, summary)
    sys.stdout.write(summary)


def cmd_calibrate(args):
    cfg = load_config(args.config)
    meas = load_measurements(args.measurements)
    result = calibrate_permittivity(meas, cfg, (args.eps_min, args.eps_max), args.steps)
    if args.out:
        rows = [[f'{e:.6g}', f'{r:.6g}'] for e, r in result.profile]
        _atomic_write(args.out, _csv_text(['eps_r', 'rmse_db'], rows))
    print(f'best_eps_r: {result.best_eps_r:.6g}')
    print(f'rmse_db: {result.rmse:.6g}')


def cmd_horizon(args):
    if not args.height > 0:
        raise UsageError('--height must be positive')
    if not args.k_factor > 0:
        raise UsageError('--k-factor must be positive')
    horizon = float(radio_horizon(args.height, args.k_factor))
    print(f'horizon_m: {horizon:.6g}')
    if args.distance is not None:
        verdict = 'flat-earth valid' if args.distance < horizon else 'flat-earth invalid'
        print(verdict)


def build_parser():
    parser = _Parser(prog='tworay', description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    p = sub.add_parser('sweep', help='predicted RSS versus horizontal distance')
    p.add_argument('config', help='config JSON path or preset name')
    p.add_argument('--d-min', type=float, default=DEFAULT_D_MIN)
    p.add_argument('--d-max', type=float, default=50.0)
    p.add_argument('--steps', type=int, default=200)
    p.add_argument('--models', type=_models, default=None,
                   help="comma list of fspl,tworay,simplified or 'all'")
    p.add_argument('--spacing', choices=('linear', 'log'), default='linear')
    p.add_argument('--out', required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser('trajectory', help='RSS at a ground sensor along UAV waypoints')
    p.add_argument('config')
    p.add_argument('--waypoints', required=True, help='CSV with x_m,y_m,z_m')
    p.add_argument('--sensor', type=_triple, required=True, help='x,y,z in m')
    p.add_argument('--d-min', type=float, default=DEFAULT_D_MIN)
    p.add_argument('--model', type=_model, default=None)
    p.add_argument('--out', required=True)
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser('compare', help='model error against measurements')
    p.add_argument('config')
    p.add_argument('--measurements', required=True, help='CSV with distance_m,rss_dbm')
    p.add_argument('--model', type=_model, default=None)
    p.add_argument('--zone-boundary', type=float, default=DEFAULT_ZONE_BOUNDARY)
    p.add_argument('--out', required=True, help='per-sample error CSV')
    p.add_argument('--summary', default=None,
                   help='JSON summary path (default: --out with .json suffix)')
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser('calibrate', help='grid-search the ground permittivity')
    p.add_argument('config')
    p.add_argument('--measurements', required=True)
    p.add_argument('--eps-min', type=float, default=1.0)
    p.add_argument('--eps-max', type=float, default=80.0)
    p.add_argument('--steps', type=int, default=80)
    p.add_argument('--out', default=None, help='optional RMSE profile CSV')
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser('horizon', help='radio horizon and flat-earth check')
    p.add_argument('--height', type=float, required=True)
    p.add_argument('--k-factor', type=float, default=DEFAULT_K_FACTOR)
    p.add_argument('--distance', type=float, default=None)
    p.set_defaults(func=cmd_horizon)
    return parser


def _one_line(message):
    return ' '.join(str(message).split())


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        with np.errstate(all='ignore'):
            args.func(args)
    except UsageError as exc:
        print(f'tworay: error: {_one_line(exc)}', file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        msg = f'file not found: {exc.filename}' if exc.filename else str(exc)
        print(f'tworay: error: {_one_line(msg)}', file=sys.stderr)
        return EXIT_FAILURE
    except (OSError, ValueError) as exc:
        print(f'tworay: error: {_one_line(exc)}', file=sys.stderr)
        return EXIT_FAILURE
    return 0


if __name__ == '__main__':
    sys.exit(main())

import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from tworay.budget import Model, received_power_dbm
from tworay.channel import LinkGeometry
from tworay.cli import main
from tworay.config import load_config


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def meas_file(tmp_path):
    """Measurements generated from the esp32 preset, optionally offset."""
    def make(offset_above_20=0.0):
        cfg = load_config('paper-esp32')
        d = np.linspace(1, 50, 50)
        rss = received_power_dbm(cfg, LinkGeometry(cfg.tx_height, cfg.rx_height, d))
        rss = rss + np.where(d >= 20, offset_above_20, 0.0)
        path = tmp_path / 'meas.csv'
        lines = ['# freq_hz: 2412000000', 'distance_m,rss_dbm']
        lines += [f'{float(a)!r},{float(b)!r}' for a, b in zip(d, rss)]
        path.write_text('\n'.join(lines) + '\n')
        return path
    return make


class TestSweep:

    def test_shape(self, capsys, tmp_path):
        out = tmp_path / 's.csv'
        code, stdout, _ = run(capsys, 'sweep', 'paper-esp32', '--d-min', 0.5,
                              '--d-max', 50, '--steps', 200, '--models', 'all',
                              '--out', out)
        assert code == 0
        rows = list(csv.reader(out.open()))
        assert rows[0] == ['distance_m', 'rss_fspl_dbm', 'rss_tworay_dbm',
                           'rss_simplified_dbm', 'margin_db', 'connected']
        assert len(rows) == 201
        assert 'd_break_m: 24.1367' in stdout
        assert 'flat_earth: valid' in stdout

    def test_bad_range(self, capsys, tmp_path):
        out = tmp_path / 's.csv'
        code, _, err = run(capsys, 'sweep', 'paper-esp32', '--d-min', 10,
                           '--d-max', 5, '--out', out)
        assert code != 0
        assert err.count('\n') == 1 and err.startswith('tworay: error:')
        assert not out.exists()

    def test_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / 'a.csv', tmp_path / 'b.csv'
        for p in (a, b):
            assert run(capsys, 'sweep', 'paper-esp32', '--models', 'all',
                       '--out', p)[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_config_error_names_field(self, capsys, tmp_path):
        cfg = tmp_path / 'c.json'
        cfg.write_text(json.dumps({'tx_losses': {'entries': [{'loss': -1}]}}))
        out = tmp_path / 's.csv'
        code, _, err = run(capsys, 'sweep', cfg, '--out', out)
        assert code != 0
        assert 'tx_losses.entries[0].loss' in err
        assert not out.exists()

    def test_error_leaves_existing_out_untouched(self, capsys, tmp_path):
        out = tmp_path / 's.csv'
        out.write_text('keep me')
        code, _, _ = run(capsys, 'sweep', 'missing-config', '--out', out)
        assert code != 0
        assert out.read_text() == 'keep me'

    def test_unknown_model(self, capsys, tmp_path):
        code, _, err = run(capsys, 'sweep', 'paper-esp32', '--models', 'fspl,fancy',
                           '--out', tmp_path / 'x.csv')
        assert code == 2 and 'fancy' in err


class TestCompare:

    def test_self_generated(self, capsys, tmp_path, meas_file):
        out = tmp_path / 'err.csv'
        code, stdout, _ = run(capsys, 'compare', 'paper-esp32', '--measurements',
                              meas_file(), '--out', out)
        assert code == 0
        errors = [float(r['error_db']) for r in csv.DictReader(out.open())]
        assert len(errors) == 50 and max(map(abs, errors)) == 0
        summary = json.loads((tmp_path / 'err.json').read_text())
        assert summary['rmse_total'] == 0
        assert json.loads(stdout) == summary

    def test_diffraction_offset(self, capsys, tmp_path, meas_file):
        out = tmp_path / 'err.csv'
        code, stdout, _ = run(capsys, 'compare', 'paper-esp32', '--measurements',
                              meas_file(10.0), '--zone-boundary', 20, '--out', out,
                              '--summary', tmp_path / 's.json')
        assert code == 0
        summary = json.loads((tmp_path / 's.json').read_text())
        assert summary['rmse_diffraction_zone'] == pytest.approx(10, abs=1e-6)
        assert summary['rmse_interference_zone'] == pytest.approx(0, abs=1e-6)

    def test_missing_file(self, capsys, tmp_path):
        missing = tmp_path / 'nowhere.csv'
        out = tmp_path / 'err.csv'
        code, _, err = run(capsys, 'compare', 'paper-esp32', '--measurements',
                           missing, '--out', out)
        assert code != 0
        assert str(missing) in err
        assert not out.exists()


class TestCalibrate:

    def test_recovers_preset_soil(self, capsys, tmp_path, meas_file):
        prof = tmp_path / 'p.csv'
        code, stdout, _ = run(capsys, 'calibrate', 'paper-esp32', '--measurements',
                              meas_file(), '--eps-min', 1, '--eps-max', 50,
                              '--steps', 50, '--out', prof)
        assert code == 0
        assert 'best_eps_r: 15' in stdout
        assert len(prof.read_text().splitlines()) == 51


class TestTrajectory:

    def test_flyby(self, capsys, tmp_path):
        wp = tmp_path / 'wp.csv'
        wp.write_text('x_m,y_m,z_m\n-20,0,5\n0,0,5\n20,0,5\n')
        out = tmp_path / 't.csv'
        code, stdout, err = run(capsys, 'trajectory', 'paper-esp32', '--waypoints',
                                wp, '--sensor', '0,0,0.15', '--out', out)
        assert code == 0
        rows = list(csv.DictReader(out.open()))
        assert len(rows) == 3
        assert rows[0]['rss_tworay_dbm'] == rows[2]['rss_tworay_dbm']
        assert 'clamped 1' in stdout
        assert 'warning' in err

    def test_bad_sensor(self, capsys, tmp_path):
        code, _, err = run(capsys, 'trajectory', 'paper-esp32', '--waypoints', 'x',
                           '--sensor', '1,2', '--out', tmp_path / 't.csv')
        assert code == 2


class TestHorizon:

    def test_value(self, capsys):
        code, stdout, _ = run(capsys, 'horizon', '--height', 5)
        assert code == 0
        assert stdout.strip() == 'horizon_m: 9216.65'

    def test_valid_distance(self, capsys):
        code, stdout, _ = run(capsys, 'horizon', '--height', 5, '--distance', 50)
        assert stdout.splitlines()[-1] == 'flat-earth valid'
        _, stdout, _ = run(capsys, 'horizon', '--height', 5, '--distance', 1e4)
        assert stdout.splitlines()[-1] == 'flat-earth invalid'

    def test_zero_height(self, capsys):
        code, _, err = run(capsys, 'horizon', '--height', 0)
        assert code == 2
        assert err.strip() == 'tworay: error: --height must be positive'


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, '-m', 'tworay', 'horizon', '--height', '20'],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith('horizon_m: 18433.3')


def test_missing_command(capsys):
    code, _, err = run(capsys)
    assert code == 2 and err.startswith('tworay: error:')

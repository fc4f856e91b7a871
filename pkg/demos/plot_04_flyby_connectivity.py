"""
A straight fly-by
=================

The drone flies at 5 m along a straight line that passes 2 m to the side of
the sensor. We predict the received power along the way and report where the
link drops out.
"""

import numpy as np

from tworay import Model, connectivity_report, load_config, trajectory_rss

cfg = load_config('paper-esp32')
x = np.linspace(-60, 60, 241)
waypoints = np.column_stack([x, np.full_like(x, 2.0), np.full_like(x, 5.0)])

trace = trajectory_rss(cfg, waypoints, sensor_position=(0, 0, 0.15),
                       model=Model.TWO_RAY)
rep = connectivity_report(trace)
print(f'connected fraction: {rep.connected_fraction:.2f}')
print(f'worst margin:       {rep.min_margin:.1f} dB')

# The fly-by is symmetric, so the approach and departure traces mirror.
print('symmetric:', np.allclose(trace.rss, trace.rss[::-1]))

# Print the power every 10 m along track.
for xi, rss, ok in zip(x[::20], trace.rss[::20], trace.connected[::20]):
    print(f'x = {xi:6.1f} m  {rss:7.2f} dBm  {"link" if ok else "----"}')

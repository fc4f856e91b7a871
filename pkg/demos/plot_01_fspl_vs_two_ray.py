"""
Free space versus two rays
==========================

A drone hovers 5 m above a ground sensor whose antenna sits 15 cm above the
soil. We sweep the horizontal distance and compare the free-space prediction
with the full and the simplified two-ray models.
"""

import numpy as np

from tworay import Model, breakpoint_distance, load_config, sweep

cfg = load_config('paper-esp32')
traces = sweep(cfg, d_min=0.5, d_max=50, steps=100, models=list(Model))

# Free space loses 6 dB per doubling of distance. The two-ray curves swing
# above and below it as the reflected ray drifts in and out of phase.
print(f"{'d [m]':>7} {'FSPL':>8} {'TwoRay':>8} {'Simpl.':>8}")
for i in range(0, 100, 9):
    row = [traces[m].rss[i] for m in Model]
    print(f'{traces[Model.FSPL].distances[i]:7.2f}',
          *(f'{v:8.2f}' for v in row))

# Past the breakpoint the simplified model falls off as d**-4.
d_break = breakpoint_distance(cfg.tx_height, cfg.rx_height, cfg.freq)
print(f'\nbreakpoint distance: {d_break:.2f} m')

# The link is usable while the prediction stays above the receiver
# sensitivity.
tr = traces[Model.TWO_RAY]
print(f'sensitivity {cfg.sensitivity} dBm, connected at '
      f'{np.mean(tr.connected):.0%} of the sampled distances')

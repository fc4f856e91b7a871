"""
Antenna gain along each ray
===========================

The direct and reflected rays leave the drone at different elevations, so
each sees a different antenna gain. Here a horizontal dipole is compared with
a measured pattern built from a handful of samples.
"""

import numpy as np

from tworay import AntennaModel, LinkGeometry, Polarization, RadiationPattern, ray_gains

dipole = AntennaModel.half_wave_dipole(Polarization.HORIZONTAL, max_gain=1.97)

# A made-up elevation cut: angles are polar angles from the zenith, so the
# horizon is at 90 deg.
cut = RadiationPattern(angles=[0, 45, 90, 135, 180, 225, 270, 315],
                       gains=[-12, -3, 0, -4, -15, -4, 0, -3], label='demo')
measured = AntennaModel.measured(cut, polarization=Polarization.VERTICAL)

# The horizontal dipole lies across the link, so the vertical plane holding
# both rays is its H-plane and its gain does not change with elevation. The
# measured pattern, in contrast, penalizes the steep rays close in.
for d in (1.0, 5.0, 20.0, 50.0):
    geom = LinkGeometry(5.0, 0.15, d)
    g_dip = ray_gains(dipole, dipole, geom)
    g_meas = ray_gains(measured, measured, geom)
    print(f'd = {d:5.1f} m  theta_i = {np.degrees(geom.incidence_angle):5.1f} deg  '
          f'dipole LOS/refl {10 * np.log10(g_dip.g_los):5.2f}/'
          f'{10 * np.log10(g_dip.g_refl):5.2f} dB  '
          f'measured {10 * np.log10(g_meas.g_los):6.2f}/'
          f'{10 * np.log10(g_meas.g_refl):6.2f} dB')

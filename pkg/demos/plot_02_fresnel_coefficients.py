"""
Ground reflection coefficients
==============================

How strongly the soil reflects depends on polarization, the incidence angle
and the permittivity. At grazing incidence both coefficients approach unit
magnitude; at normal incidence the two polarizations agree.
"""

import numpy as np

from tworay import (
    Frequency, GroundProfile, complex_permittivity, fresnel_parallel,
    fresnel_perpendicular,
    )

freq = Frequency.from_ghz(2.412)
angles = np.radians([0.5, 5, 15, 30, 60, 90])

for eps_r in (1.7, 4, 15, 42):
    eps_g = complex_permittivity(GroundProfile(eps_r, conductivity=0.005), freq)
    par = fresnel_parallel(eps_g, angles)
    perp = fresnel_perpendicular(eps_g, angles)
    print(f'eps_r = {eps_r:>4}:  |G_par| ', np.round(np.abs(par), 3))
    print(f'{"":13}  |G_perp|', np.round(np.abs(perp), 3))

# The vertical coefficient passes through a minimum near the Brewster angle,
# so vertically polarized links see a weaker reflected ray at moderate
# elevations.
eps_g = complex_permittivity(GroundProfile(15), freq)
fine = np.radians(np.linspace(0.1, 90, 2000))
brewster = np.degrees(fine[np.argmin(np.abs(fresnel_parallel(eps_g, fine)))])
print(f'\nBrewster angle for eps_r = 15: {brewster:.1f} deg')

"""Sign and phase conventions fixed once by calibration runs.

Each constant is re-derived by a calibration function and checked in the
test suite; change them only together with that calibration.
"""

# Sign of the curvature term in  index = Xi_+ - Xi_- + CURVATURE_SIGN * int F / 2pi.
# Calibrated by index_engine.calibrate_curvature_sign on the flux path 0.3 -> 1.3:
# spectral flow +1, Xi_+ = Xi_- and int a'(t) dt / 2pi dtheta = +1.
CURVATURE_SIGN = 1

# Phase of the index density on the twisted cylinder: int deltaJ^- dV = DENSITY_PHASE * flux.
# The density comes out purely imaginary with the i(B_L - B_R) structure of the
# squared Lorentzian Dirac operators; hadamard.calibrate_density_phase recomputes it.
DENSITY_PHASE = 1j

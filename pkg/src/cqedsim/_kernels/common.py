"""Shared integrator constants: Dormand-Prince 5(4) tableau and step control.

The error coefficients E* are b5 - b4 (5th-order propagating solution,
4th-order embedded estimate). K7 is the FSAL stage.
"""

# Stage nodes
C2 = 1.0 / 5.0
C3 = 3.0 / 10.0
C4 = 4.0 / 5.0
C5 = 8.0 / 9.0

# Runge-Kutta matrix
A21 = 1.0 / 5.0
A31 = 3.0 / 40.0
A32 = 9.0 / 40.0
A41 = 44.0 / 45.0
A42 = -56.0 / 15.0
A43 = 32.0 / 9.0
A51 = 19372.0 / 6561.0
A52 = -25360.0 / 2187.0
A53 = 64448.0 / 6561.0
A54 = -212.0 / 729.0
A61 = 9017.0 / 3168.0
A62 = -355.0 / 33.0
A63 = 46732.0 / 5247.0
A64 = 49.0 / 176.0
A65 = -5103.0 / 18656.0

# 5th-order solution weights (also the A7* row: FSAL)
B1 = 35.0 / 384.0
B3 = 500.0 / 1113.0
B4 = 125.0 / 192.0
B5 = -2187.0 / 6784.0
B6 = 11.0 / 84.0

# Error estimate weights (b5 - b4hat)
E1 = 71.0 / 57600.0
E3 = -71.0 / 16695.0
E4 = 71.0 / 1920.0
E5 = -17253.0 / 339200.0
E6 = 22.0 / 525.0
E7 = -1.0 / 40.0

# PI step controller
SAFETY = 0.9
KI = 0.14          # err^-KI on the current error
KP = 0.08          # facold^KP memory term
FAC_MIN = 0.2
FAC_MAX = 10.0
FACOLD_INIT = 1e-4
ERR_FLOOR = 1e-10

# h below HMIN_REL * max(1, |t|) with err > 1 means underflow
HMIN_REL = 1e-14

STATUS_OK = 0
STATUS_UNDERFLOW = 1

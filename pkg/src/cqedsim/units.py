"""Unit helpers.

All config-facing frequencies and rates are ordinary frequencies in MHz
(the convention of the device parameter tables and figure captions).
Internally everything is angular, rad/us, and time is in microseconds:

    1 MHz  <->  2*pi rad/us
"""

import math

TWO_PI = 2.0 * math.pi


def to_angular(f_mhz):
    """Ordinary frequency in MHz -> angular frequency in rad/us."""
    return f_mhz * TWO_PI


def to_mhz(w_rad_per_us):
    """Angular frequency in rad/us -> ordinary frequency in MHz."""
    return w_rad_per_us / TWO_PI

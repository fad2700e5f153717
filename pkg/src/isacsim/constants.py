"""Physical constants and radio-frame conventions shared across the library."""

# Engineering value of the speed of light; all range arithmetic in this
# library (range bins, resolution tables, bias formulas) uses this value.
C_LIGHT = 3.0e8  # m/s

# Symbols per slot in the normal-CP radio frame this library models.
SLOT_SYMBOLS = 14

# Guard fraction used to derive a default cyclic-prefix length from the
# useful symbol duration (0.57 us of guard per 8.33 us symbol).
DEFAULT_CP_RATIO = 0.57 / 8.33

"""Bundled reference configuration used across demos and tests."""
from __future__ import annotations

import math

from .dynamics.fields import ElasticField, harmonic_field

# four-harmonic reference field: amplitudes 25/24, 1/11, 37/36, 1/12 at
# angular frequencies 0, 4/25, 2, 4
REFERENCE_FIELD_TERMS = (
    (25.0 / 24.0, 0.0),
    (1.0 / 11.0, 4.0 / 25.0),
    (37.0 / 36.0, 2.0),
    (1.0 / 12.0, 4.0),
)

DEFAULT_INTERVAL = (-2.0 * math.pi, 2.0 * math.pi)
DEFAULT_N_POINTS = 500
DEFAULT_Q0 = (1.0, 1.0)
DEFAULT_N_PARAMS = 3
DEFAULT_COEFF_BOUNDS = (-2.0, 2.0)
DEFAULT_TARGET_STEPS = 4000


def reference_field() -> ElasticField:
    return harmonic_field(REFERENCE_FIELD_TERMS)

import os

from dotenv import dotenv_values

config = dotenv_values(".env")


def _setting(name: str, default: str) -> str:
    return config.get(name) or os.getenv(name, default)


LOG_LEVEL = _setting("GP_LOG_LEVEL", "INFO")
SENTRY_KEY = config.get("SENTRY_KEY") or os.getenv("SENTRY_KEY")

# Numerical defaults, overridable per run from the TOML config
POLE_TOLERANCE = float(_setting("GP_POLE_TOLERANCE", "1e-12"))
ROOT_TOLERANCE = float(_setting("GP_ROOT_TOLERANCE", "1e-10"))
INTEGRATOR_TOLERANCE = float(_setting("GP_INTEGRATOR_TOLERANCE", "1e-8"))
MAX_INTEGRATOR_STEPS = int(_setting("GP_MAX_INTEGRATOR_STEPS", "200000"))
WINDING_MAX_DEPTH = int(_setting("GP_WINDING_MAX_DEPTH", "40"))
WINDING_MIN_SAMPLES = int(_setting("GP_WINDING_MIN_SAMPLES", "16"))

# Brackets are pulled in from the poles by this fraction of the gap
BRACKET_MARGIN = 1e-9
# Bisection runs until the bracket is this fraction of its initial width
BISECTION_FRACTION = 1e-3
# Argument-principle boundary guard, scaled by max(1, n * alpha)
GUARD_FACTOR = 1e-6
PAIR_BOX_EPS = 0.25
COMPANION_ORACLE_MAX_TERMS = 12
ORACLE_MATCH_TOLERANCE = 1e-8

CSV_HEADER = "# gp-spectrum v1"
GAP_PROBE_DEPTH = 1000
COMPANION_MATCH_TOLERANCE = 1e-6
# Sweep columns at or below this level count as converged
SWEEP_ZERO_LEVEL = 1e-12

"""Process-wide knobs: enumeration limits and the numba switch."""
import os

# Largest cube dimension we are willing to enumerate (2**20 support points).
ENUMERATION_LIMIT = 20

# Cap on (number of coordinate subsets) * (cells per subset) for junta scans.
MAX_SUBSET_CELLS = 1 << 26

# Cap on the number of coordinate subsets visited by a single scan.
MAX_SUBSETS = 1 << 21

# Absolute slack used when asserting exact inequalities in floating point.
TOL = 1e-12


def _env_flag(name, default):
    raw = os.environ.get(name)
    if raw is None:
        return default
    return raw.strip().lower() not in ("0", "false", "no", "off", "")


# MCOPT_NUMBA=0 forces the pure-numpy kernels.
USE_NUMBA = _env_flag("MCOPT_NUMBA", True)

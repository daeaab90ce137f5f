"""
Runtime settings for dcqo

Everything is read from the environment once, at import time.
"""

import os


def get_int(name, default, minimum=None, maximum=None):
    """
    Reads an integer setting from the environment variable ``name``.

    Falls back to ``default`` when the variable is unset or empty, and clamps
    the value into ``[minimum, maximum]`` when bounds are given.
    """
    raw = os.environ.get(name, '')
    value = int(raw) if raw.strip() else default
    if minimum is not None:
        value = max(minimum, value)
    if maximum is not None:
        value = min(maximum, value)
    return value


# worker processes used by the cli for seed / instance sweeps
WORKERS = get_int('DCQO_WORKERS', 1, minimum=1)

LOG_LEVEL = os.environ.get('DCQO_LOG_LEVEL', 'WARNING').upper()

# 2**26 complex doubles is 1 GiB
MAX_QUBITS = get_int('DCQO_MAX_QUBITS', 26, minimum=1, maximum=26)

# dense 2**n x 2**n matrices for the continuous-evolution oracle
ORACLE_MAX_QUBITS = get_int('DCQO_ORACLE_MAX_QUBITS', 12, minimum=1,
                            maximum=12)

# brute-force enumeration guard
BRUTE_FORCE_MAX_QUBITS = 24

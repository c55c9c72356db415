"""Backend selection for the hot numeric kernels.

Two interchangeable implementations live side by side:

* ``jit``       - numba ``@njit(nogil=True)`` kernels (default)
* ``reference`` - pure numpy/python, used when numba is unavailable or when
                  the environment variable ``BOTLAB_NUMBA`` is set to
                  ``0``/``false``/``off``

Both backends share one explicit xorshift64* PRNG, so the collapsed Gibbs
sampler produces bit-identical output on either path. ``benchmarks/
bench_kernels.py`` times the two against each other.
"""
from __future__ import annotations

import os

_DISABLED = os.environ.get("BOTLAB_NUMBA", "1").strip().lower() in ("0", "false", "off")

if not _DISABLED:
    try:
        from . import jit as _backend
        BACKEND = "jit"
    except ImportError:  # numba missing: degrade rather than fail
        from . import reference as _backend
        BACKEND = "reference"
else:
    from . import reference as _backend
    BACKEND = "reference"

gibbs_init = _backend.gibbs_init
gibbs_sweep = _backend.gibbs_sweep
tsne_affinities = _backend.tsne_affinities
tsne_step = _backend.tsne_step


def seed_state(seed: int):
    """splitmix64 expansion of a user seed into a nonzero xorshift64* state."""
    import numpy as np

    mask = (1 << 64) - 1
    z = (int(seed) + 0x9E3779B97F4A7C15) & mask
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
    z = z ^ (z >> 31)
    if z == 0:
        z = 0x9E3779B97F4A7C15
    return np.array([z], dtype=np.uint64)


def get_backend(name: str):
    """Explicit backend lookup, used by the benchmark to time both paths."""
    if name == "jit":
        from . import jit
        return jit
    if name == "reference":
        from . import reference
        return reference
    raise ValueError(f"unknown kernel backend {name!r}")

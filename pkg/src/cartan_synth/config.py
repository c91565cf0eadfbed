"""Shared numerical tolerances.

Every tolerance in the package flows from ``DEFAULT_TOL``; operations accept
an explicit ``tol`` argument and fall back to this value when given ``None``.
"""

import os

DEFAULT_TOL = 1e-9

# Singular values below RANK_RTOL * largest are treated as zero when
# orthonormalizing subspace bases.
RANK_RTOL = 1e-8

# Eigenvalues closer than this are treated as one degenerate cluster.
CLUSTER_TOL = 1e-8

ENV_TOL_VAR = "CARTAN_SYNTH_TOL"


def resolve_tol(tol=None):
    """Return ``tol`` unless it is None, then the package default."""
    return DEFAULT_TOL if tol is None else float(tol)


def env_default_tol():
    """Tolerance default for the CLI: CARTAN_SYNTH_TOL if set, else DEFAULT_TOL."""
    raw = os.environ.get(ENV_TOL_VAR)
    return DEFAULT_TOL if raw is None else float(raw)

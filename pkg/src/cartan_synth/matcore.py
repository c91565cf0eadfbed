"""Dense complex matrix kernel.

Eigendecomposition of normal matrices with a deterministic ordering,
simultaneous diagonalization of commuting real symmetric pairs, principal
logarithm / square root of unitaries, and the skew-Hermitian exponential.
Matrices are plain ``numpy`` arrays (complex double precision).
"""

import numpy as np
import scipy.linalg

from .config import CLUSTER_TOL, resolve_tol
from .errors import (BranchAmbiguity, NoConvergence, NotCommuting, NotNormal,
                     NotSkewHermitian, NotSymmetric, NotUnitary)

__all__ = [
    "mabs", "unitarity_defect", "hermiticity_defect", "skew_hermiticity_defect",
    "assert_unitary", "assert_skew_hermitian", "eig_normal",
    "simdiag_commuting_symmetric", "principal_log_unitary",
    "sqrt_unitary_principal", "expm_skew", "haar_unitary",
]


def mabs(a):
    """Max-entry absolute value; the norm used for all residual checks."""
    a = np.asarray(a)
    return 0.0 if a.size == 0 else float(np.max(np.abs(a)))


def unitarity_defect(u):
    u = np.asarray(u)
    return mabs(u.conj().T @ u - np.eye(u.shape[0]))


def hermiticity_defect(m):
    m = np.asarray(m)
    return mabs(m - m.conj().T)


def skew_hermiticity_defect(m):
    m = np.asarray(m)
    return mabs(m + m.conj().T)


def assert_unitary(u, tol=None, what="matrix"):
    tol = resolve_tol(tol)
    defect = unitarity_defect(u)
    if defect > tol:
        raise NotUnitary(f"{what} is not unitary: defect {defect:.3e} > {tol:.1e}")


def assert_skew_hermitian(m, tol=None, what="matrix"):
    tol = resolve_tol(tol)
    defect = skew_hermiticity_defect(m)
    if defect > tol:
        raise NotSkewHermitian(
            f"{what} is not skew-Hermitian: defect {defect:.3e} > {tol:.1e}")


def haar_unitary(n, rng=None):
    """Haar-distributed random unitary via QR of a complex Gaussian matrix."""
    rng = np.random.default_rng(rng)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    d = np.diag(r)
    return q * (d / np.abs(d)).conj()


def _fix_eigvec_phases(v, tol):
    """Rotate each column so its first significant entry is real positive."""
    v = v.copy()
    for k in range(v.shape[1]):
        col = v[:, k]
        nz = np.flatnonzero(np.abs(col) > tol)
        j = nz[0] if nz.size else 0
        ph = col[j] / abs(col[j]) if abs(col[j]) > 0 else 1.0
        v[:, k] = col * ph.conjugate()
    return v


def eig_normal(m, tol=None, phase_policy="first-positive"):
    """Eigendecomposition ``m = v @ diag(w) @ v.conj().T`` of a normal matrix.

    Eigenvalues are sorted by descending phase in (-pi, pi], ties broken by
    descending modulus of the first significant eigenvector entry.  Within a
    degenerate eigenvalue cluster the eigenvectors are re-orthonormalized.

    Parameters
    ----------
    m : (n, n) array_like, normal within ``tol``.
    tol : float, optional
    phase_policy : "first-positive" rotates each eigenvector so its first
        significant entry is real positive; "none" keeps the solver's phases.

    Returns
    -------
    w : (n,) complex eigenvalues, v : (n, n) unitary eigenvector matrix.
    """
    tol = resolve_tol(tol)
    m = np.asarray(m, dtype=complex)
    scale = max(1.0, mabs(m)) ** 2
    defect = mabs(m @ m.conj().T - m.conj().T @ m)
    if defect > tol * scale:
        raise NotNormal(f"commutator residual {defect:.3e} > {tol * scale:.1e}")
    try:
        t, v = scipy.linalg.schur(m, output="complex")
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NoConvergence(str(exc)) from exc
    w = np.diag(t).copy()

    # re-orthonormalize within eigenvalue clusters (no-op for exact Schur Q,
    # but guards against drift after the sort below)
    order = np.argsort(w)  # stable pre-sort for deterministic clustering
    w, v = w[order], v[:, order]
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and abs(w[j] - w[i]) < CLUSTER_TOL:
            j += 1
        if j - i > 1:
            q, _ = np.linalg.qr(v[:, i:j])
            v[:, i:j] = q
        i = j

    if phase_policy == "first-positive":
        v = _fix_eigvec_phases(v, tol)

    phases = np.angle(w)
    firsts = np.empty(len(w))
    for k in range(len(w)):
        nz = np.flatnonzero(np.abs(v[:, k]) > tol)
        firsts[k] = abs(v[nz[0] if nz.size else 0, k])
    order = np.lexsort((-firsts, -phases))
    return w[order], v[:, order]


def _column_sign_fix(q, tol):
    """Flip column signs so the largest-magnitude entry of each is positive."""
    for k in range(q.shape[1]):
        j = int(np.argmax(np.abs(q[:, k])))
        if q[j, k] < 0:
            q[:, k] = -q[:, k]
    return q


def simdiag_commuting_symmetric(a, b, tol=None):
    """Simultaneously diagonalize commuting real symmetric matrices.

    Returns a real orthogonal ``q`` with ``det(q) = +1`` such that both
    ``q.T @ a @ q`` and ``q.T @ b @ q`` are diagonal within tolerance.
    Columns are sorted by ascending eigenvalue of ``a``, ties refined by
    ascending eigenvalue of ``b``, so diagonal input yields the identity.
    """
    tol = resolve_tol(tol)
    a = np.asarray(a, dtype=float) if not np.iscomplexobj(a) else np.asarray(a)
    b = np.asarray(b, dtype=float) if not np.iscomplexobj(b) else np.asarray(b)
    if np.iscomplexobj(a) or np.iscomplexobj(b):
        if mabs(np.asarray(a).imag) > tol or mabs(np.asarray(b).imag) > tol:
            raise NotSymmetric("inputs must be real")
        a, b = np.asarray(a).real, np.asarray(b).real
    if mabs(a - a.T) > tol:
        raise NotSymmetric(f"first matrix: asymmetry {mabs(a - a.T):.3e}")
    if mabs(b - b.T) > tol:
        raise NotSymmetric(f"second matrix: asymmetry {mabs(b - b.T):.3e}")
    comm = mabs(a @ b - b @ a)
    scale = max(1.0, mabs(a) * mabs(b))
    if comm > tol * scale:
        raise NotCommuting(f"commutator residual {comm:.3e} > {tol * scale:.1e}")

    n = a.shape[0]
    wa, q = np.linalg.eigh(a)
    i = 0
    while i < n:
        j = i
        while j < n and abs(wa[j] - wa[i]) <= CLUSTER_TOL * scale:
            j += 1
        if j - i > 1:
            sub = q[:, i:j]
            wb, qb = np.linalg.eigh(sub.T @ b @ sub)
            q[:, i:j] = sub @ qb
        i = j
    q = _column_sign_fix(q, tol)
    if np.linalg.det(q) < 0:
        q[:, -1] = -q[:, -1]
    return q


def principal_log_unitary(u, tol=None, phase_offset=0.0):
    """Skew-Hermitian ``h`` with ``expm(h) = u``, eigenphases in (-pi, pi].

    Raises :class:`BranchAmbiguity` if an eigenphase lies within ``tol`` of
    the branch cut; a nonzero ``phase_offset`` moves the cut to ``pi +
    phase_offset`` so the caller can resolve the ambiguity explicitly.
    """
    tol = resolve_tol(tol)
    u = np.asarray(u, dtype=complex)
    assert_unitary(u, tol=max(tol, 1e-8), what="log input")
    shift = np.exp(-1j * phase_offset)
    w, v = eig_normal(u * shift, tol=tol)
    phases = np.angle(w)
    gap = np.pi - np.abs(phases)
    if np.any(gap < tol):
        worst = float(np.min(gap))
        raise BranchAmbiguity(
            f"eigenphase within {worst:.3e} of the branch cut; "
            "supply phase_offset to choose a branch")
    h = (v * (1j * (phases + phase_offset))) @ v.conj().T
    return (h - h.conj().T) / 2


def sqrt_unitary_principal(u, tol=None, det_adjust=False):
    """Principal square root of a unitary: each eigenphase is halved.

    With ``det_adjust=True`` one eigenvalue branch is flipped, if needed, to
    enforce ``det(s) = 1`` (requires the principal root's determinant to be
    +-1, i.e. ``det(u) = 1``).
    """
    tol = resolve_tol(tol)
    u = np.asarray(u, dtype=complex)
    assert_unitary(u, tol=max(tol, 1e-8), what="sqrt input")
    w, v = eig_normal(u, tol=tol)
    phases = np.angle(w)
    gap = np.pi - np.abs(phases)
    if np.any(gap < tol):
        raise BranchAmbiguity(
            f"eigenphase within {float(np.min(gap)):.3e} of pi; "
            "square-root branch is ambiguous")
    d = np.exp(0.5j * phases)
    if det_adjust:
        det = complex(np.prod(d))
        if abs(det - 1.0) > tol:
            if abs(det + 1.0) > tol:
                raise BranchAmbiguity(
                    f"cannot adjust determinant {det:.6f} to 1 by one branch flip")
            j = int(np.argmax(np.abs(phases)))
            d[j] = -d[j]
    return (v * d) @ v.conj().T


def expm_skew(h, tol=None):
    """Unitary ``expm(h)`` for skew-Hermitian ``h``, via eigendecomposition."""
    tol = resolve_tol(tol)
    h = np.asarray(h, dtype=complex)
    assert_skew_hermitian(h, tol=max(tol, 1e-8), what="exponent")
    w, v = np.linalg.eigh(-1j * h)
    return (v * np.exp(1j * w)) @ v.conj().T

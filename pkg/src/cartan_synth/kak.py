"""Group-level X = K1 A K2 solvers, one per Cartan-pair type.

All solvers work in standard coordinates; ``kak_general`` conjugates an
arbitrary involution to its standard form first.  Every result carries the
constructed abelian generator ``log_a`` so downstream code never has to take
a matrix logarithm of an unknown factor.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .config import CLUSTER_TOL, resolve_tol
from .errors import (BadParams, BlockSingular, FactorizationFailed,
                     GluingFailed, PairingFailed, RealityViolated,
                     UnsupportedScheme)
from .involutions import Subspace, standard_j
from .matcore import (assert_unitary, eig_normal, expm_skew, mabs,
                      principal_log_unitary, simdiag_commuting_symmetric,
                      sqrt_unitary_principal)
from .pauli import commuting_family, strings_commute

__all__ = [
    "KakResult", "kak_AI", "kak_AII", "kak_AIII", "kak_BDI", "kak_CI",
    "kak_DIII", "kak_gg", "kak_general", "solve_embedded_u2",
    "cartan_subalgebra",
]


# Optional gauge perturbation: when set, degenerate-cluster basis choices
# are randomized.  Factor-level output changes; every contract still holds.
_GAUGE_RNG = None


class gauge_perturbation:
    """Context manager randomizing within-cluster eigenbasis choices."""

    def __init__(self, seed):
        self.seed = seed

    def __enter__(self):
        global _GAUGE_RNG
        self._saved = _GAUGE_RNG
        _GAUGE_RNG = np.random.default_rng(self.seed)
        return self

    def __exit__(self, *exc):
        global _GAUGE_RNG
        _GAUGE_RNG = self._saved
        return False


def _mix_cluster(basis):
    """Randomly rotate a degenerate cluster basis under the gauge hook."""
    if _GAUGE_RNG is None or basis.shape[1] < 2:
        return basis
    d = basis.shape[1]
    g = _GAUGE_RNG.standard_normal((d, d)) \
        + 1j * _GAUGE_RNG.standard_normal((d, d))
    q, _ = np.linalg.qr(g)
    return basis @ q


@dataclass
class KakResult:
    """Factors of X = K1 A K2 with the abelian generator of A."""

    k1: np.ndarray
    a: np.ndarray
    k2: np.ndarray
    log_a: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def reconstruction_error(self, x):
        return mabs(self.k1 @ self.a @ self.k2 - x)

    def verify(self, x, theta=None, tol=None):
        """Residual report; with ``theta`` also checks factor fixedness and
        that log_a flips sign under the involution."""
        tol = resolve_tol(tol)
        report = {"reconstruction": self.reconstruction_error(x),
                  "a_exp": mabs(self.a - expm_skew(self.log_a, tol=1e-6))}
        if theta is not None:
            report["k1_fixed"] = mabs(theta.apply_group(self.k1) - self.k1)
            report["k2_fixed"] = mabs(theta.apply_group(self.k2) - self.k2)
            report["log_a_flipped"] = mabs(
                theta.apply_algebra(self.log_a) + self.log_a)
        report["ok"] = all(v <= max(tol, 1e-8) * 10 for k, v in report.items()
                           if k != "ok")
        return report


def _as_real(m, tol, what):
    m = np.asarray(m)
    if np.iscomplexobj(m):
        if mabs(m.imag) > tol:
            raise RealityViolated(f"{what}: imaginary residual {mabs(m.imag):.3e}")
        return np.ascontiguousarray(m.real)
    return m


# ---------------------------------------------------------------------------
# type AI: u(n) = so(n) + i sym(n)


def kak_AI(x, tol=None):
    """KAK of a unitary for the real/imaginary split.

    M = x^T x is symmetric unitary; its real and imaginary parts commute and
    are diagonalized by one real orthogonal Q.  Then A is the principal
    square root of Q^T M Q, K2 = Q^T, and K1 = x K2^dag A^dag comes out real
    orthogonal (one root branch is flipped if needed to reach det K1 = +1).
    """
    tol = resolve_tol(tol)
    x = np.asarray(x, dtype=complex)
    assert_unitary(x, tol=max(tol, 1e-8), what="kak_AI input")
    n = x.shape[0]
    m = x.T @ x

    def attempt(first_im):
        if first_im:
            q = simdiag_commuting_symmetric(m.imag, m.real, tol=max(tol, 1e-9))
        else:
            q = simdiag_commuting_symmetric(m.real, m.imag, tol=max(tol, 1e-9))
        lam = np.einsum("ik,ij,jk->k", q, m, q)
        d = np.exp(0.5j * np.angle(lam))
        k1 = x @ q @ np.diag(d.conj())
        if np.linalg.det(k1).real < 0:
            flip = int(np.argmax(np.abs(np.angle(d))))
            d[flip] = -d[flip]
            k1 = x @ q @ np.diag(d.conj())
        return q, d, k1

    q, d, k1 = attempt(False)
    if mabs(k1.imag) > max(tol, 1e-8):
        q, d, k1 = attempt(True)  # perturbed cluster split
    imag = mabs(k1.imag)
    if imag > max(tol, 1e-8):
        raise RealityViolated(f"K1 imaginary residual {imag:.3e}")
    k1 = k1.real.astype(complex)
    a = np.diag(d)
    log_a = np.diag(1j * np.angle(d))
    return KakResult(k1, a, q.T.astype(complex), log_a,
                     {"type": "AI", "k1_imag": imag})


# ---------------------------------------------------------------------------
# type AII: u(2m) = sp(m) + complement


def _canonical_cluster_basis(cols):
    """Deterministic orthonormal basis of span(cols): the projections of the
    first standard basis vectors with significant mass."""
    q, _ = np.linalg.qr(cols)
    proj = q @ q.conj().T
    out = []
    for k in range(proj.shape[0]):
        v = proj[:, k].copy()
        if out:
            u = np.column_stack(out)
            v = v - u @ (u.conj().T @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-7:
            out.append(v / nv)
        if len(out) == q.shape[1]:
            break
    return np.column_stack(out)


def _eig_clusters(m, tol=None):
    """Eigendecomposition of a unitary with eigenvalue clustering.

    Within a cluster the basis is canonicalized (degenerate eigenvectors
    from the backend are arbitrary), so trivial inputs give trivial factors.
    """
    w, v = np.linalg.eig(m)
    groups = []  # (value, [indices])
    for i in np.argsort(np.angle(w), kind="stable"):
        for g in groups:
            if abs(w[i] - g[0]) < 10 * CLUSTER_TOL:
                g[1].append(i)
                break
        else:
            groups.append((w[i], [i]))
    # -pi/+pi wraparound: merge first and last if equal
    if len(groups) > 1 and abs(groups[0][0] - groups[-1][0]) < 10 * CLUSTER_TOL:
        groups[0][1].extend(groups[-1][1])
        groups.pop()
    out = []
    for val, idx in groups:
        basis = _canonical_cluster_basis(v[:, idx])
        out.append((val, _mix_cluster(basis)))
    return out


def kak_AII(x, tol=None, j=None):
    """KAK of a unitary for the symplectic split.

    M = J x^T J^dag x has even-multiplicity eigenvalues; each eigenvector v
    pairs with -J conj(v) in the same eigenspace.  A symplectic-unitary K2
    maps the paired eigenbasis to a fixed paired frame, and A takes one
    square-root branch per pair so its generator lies in the paired torus.
    """
    tol = resolve_tol(tol)
    x = np.asarray(x, dtype=complex)
    assert_unitary(x, tol=max(tol, 1e-8), what="kak_AII input")
    n = x.shape[0]
    if n % 2:
        raise BadParams("AII needs even dimension")
    if j is None:
        j = standard_j(n // 2)
    j = np.asarray(j, dtype=float)
    m = j @ x.T @ j.T @ x

    pairs = []  # (v, w, lambda)
    for val, basis in _eig_clusters(m, tol):
        cols = []
        for k in range(basis.shape[1]):
            v = basis[:, k]
            if cols:
                u = np.column_stack(cols)
                v = v - u @ (u.conj().T @ v)
            nv = np.linalg.norm(v)
            if nv < 1e-7:
                continue
            v = v / nv
            w = -j @ v.conj()
            cols.extend([v, w])
            pairs.append((v, w, val))
        if len(cols) != basis.shape[1]:
            raise PairingFailed(
                f"eigenvalue {val:.6f}: cluster dimension {basis.shape[1]} "
                f"does not pair")

    # fixed paired frame (f, -J conj(f)) built greedily from standard vectors
    frame = []
    cols = []
    for k in range(n):
        f = np.zeros(n, dtype=complex)
        f[k] = 1.0
        if cols:
            u = np.column_stack(cols)
            f = f - u @ (u.conj().T @ f)
        nf = np.linalg.norm(f)
        if nf < 1e-7:
            continue
        f = f / nf
        fw = -j @ f.conj()
        frame.append((f, fw))
        cols.extend([f, fw])
        if len(frame) == n // 2:
            break

    k2 = np.zeros((n, n), dtype=complex)
    a = np.zeros((n, n), dtype=complex)
    log_a = np.zeros((n, n), dtype=complex)
    for (f, fw), (v, w, val) in zip(frame, pairs):
        k2 += np.outer(f, v.conj()) + np.outer(fw, w.conj())
        half = 0.5 * np.angle(val)
        proj = np.outer(f, f.conj()) + np.outer(fw, fw.conj())
        a += np.exp(1j * half) * proj
        log_a += 1j * half * proj
    k1 = x @ k2.conj().T @ a.conj().T
    return KakResult(k1, a, k2, log_a, {"type": "AII"})


# ---------------------------------------------------------------------------
# type AIII: u(n) = (u(p) + u(q)) + off-blocks, via the cosine-sine
# decomposition


def kak_AIII(x, p, q, tol=None):
    """KAK for the block split diag(1_p, -1_q), via the CSD.

    K1 and K2 are block-diagonal unitaries; A is the real orthogonal
    cosine-sine matrix whose principal logarithm is supported on at most
    min(p, q) off-diagonal angle coordinates.
    """
    tol = resolve_tol(tol)
    x = np.asarray(x, dtype=complex)
    if p + q != x.shape[0] or p < 1 or q < 1:
        raise BadParams("need p + q = n with p, q >= 1")
    assert_unitary(x, tol=max(tol, 1e-8), what="kak_AIII input")
    try:
        u, cs, vdh = scipy.linalg.cossin(x, p=p, q=p)
    except Exception as exc:
        raise GluingFailed(f"cosine-sine decomposition failed: {exc}") from exc
    cs = cs.astype(complex)
    # cs eigenphases lie in [-pi/2, pi/2]; the principal log is safe, and
    # for the real orthogonal cs it is real antisymmetric
    log_a = principal_log_unitary(cs, tol=min(tol, 1e-6))
    log_a = _as_real(log_a, 1e-7, "AIII generator").astype(complex)
    zs = np.concatenate([np.ones(p), -np.ones(q)])
    anti = mabs(zs[:, None] * log_a * zs[None, :] + log_a)
    if anti > 1e-7:
        raise GluingFailed(f"generator not off-block: residual {anti:.3e}")
    res = KakResult(u.astype(complex), cs, vdh.astype(complex), log_a,
                    {"type": "AIII", "p": p, "q": q,
                     "angles": int(np.linalg.matrix_rank(log_a, tol=1e-8) // 2)})
    err = res.reconstruction_error(x)
    if err > max(tol, 1e-8) * 10:
        raise GluingFailed(f"CSD reconstruction residual {err:.3e}")
    return res


# ---------------------------------------------------------------------------
# type CI: sp(m) = u(m) + i sym-anticommuting. Inputs are symplectic
# unitaries (x J x^T = J); the fixed group is the real orthogonal
# J-commutant.


def _plus_projector_split(basis_cols, j):
    """Projector P of a real J-invariant eigenspace split V = V+ + J V+."""
    if _GAUGE_RNG is not None and basis_cols.shape[1] > 1:
        g = _GAUGE_RNG.standard_normal((basis_cols.shape[1],) * 2)
        basis_cols = basis_cols @ np.linalg.qr(g)[0]
    cols = []
    plus = []
    d = basis_cols.shape[1]
    for k in range(d):
        v = basis_cols[:, k]
        if cols:
            u = np.column_stack(cols)
            v = v - u @ (u.T @ v)
        nv = np.linalg.norm(v)
        if nv < 1e-7:
            continue
        v = v / nv
        jv = j @ v
        plus.append(v)
        cols.extend([v, jv])
    if 2 * len(plus) != d:
        raise PairingFailed("J-invariant eigenspace has no paired split")
    pp = np.zeros((j.shape[0], j.shape[0]))
    for v in plus:
        pp += np.outer(v, v)
    return pp


def kak_CI(x, j, tol=None):
    """KAK of a symplectic unitary for the pair sp(m) > u(m)-embedded.

    Entrywise conjugation is the ambient involution, so M = x^T x.  Its real
    eigenspaces pair under q -> J q with conjugate eigenvalues, which fixes
    the square-root branch everywhere (including at eigenvalue -1), so
    A = exp(h) with h = i S, S real symmetric anticommuting with J, and
    K1 = x A^dag lands in the real J-commutant with K2 = 1.
    """
    tol = resolve_tol(tol)
    x = np.asarray(x, dtype=complex)
    n = x.shape[0]
    j = np.asarray(j, dtype=float)
    assert_unitary(x, tol=max(tol, 1e-8), what="kak_CI input")
    m = x.T @ x
    q = simdiag_commuting_symmetric(m.real, m.imag, tol=max(tol, 1e-9))
    lam = np.einsum("ik,ij,jk->k", q, m, q)

    h = np.zeros((n, n), dtype=complex)
    done = np.zeros(n, dtype=bool)
    k = 0
    while k < n:
        if done[k]:
            k += 1
            continue
        val = lam[k]
        idx = [i for i in range(n) if not done[i]
               and abs(lam[i] - val) < 10 * CLUSTER_TOL]
        for i in idx:
            done[i] = True
        if abs(val - 1.0) < 10 * CLUSTER_TOL:
            continue
        if abs(val + 1.0) < 10 * CLUSTER_TOL:
            # V(-1) is J-invariant; split V = V+ + J V+ and rotate by pi
            pp = _plus_projector_split(q[:, idx], j)
            h += 1j * (np.pi / 2) * (pp - j @ pp @ j.T)
            continue
        # complex eigenvalue: conjugate partner eigenspace is J V
        pv = q[:, idx] @ q[:, idx].T
        t = 0.5 * np.angle(val)
        h += 1j * t * (pv - j @ pv @ j.T)
        for i in range(n):
            if not done[i] and abs(lam[i] - val.conjugate()) < 10 * CLUSTER_TOL:
                done[i] = True
    a = expm_skew(h, tol=1e-6)
    k1 = x @ a.conj().T
    imag = mabs(k1.imag)
    if imag > max(tol, 1e-8):
        raise RealityViolated(f"CI factor imaginary residual {imag:.3e}")
    k1 = k1.real.astype(complex)
    return KakResult(k1, a, np.eye(n, dtype=complex), h, {"type": "CI"})


# ---------------------------------------------------------------------------
# type DIII: so(2m) = u(m)-embedded + anticommuting part. Inputs are real
# special orthogonal matrices.


def kak_DIII(x, j, tol=None):
    """KAK of a real orthogonal matrix for the pair so(2m) > u(m)-embedded.

    M = J x^T J^T x is real orthogonal with Ad_J(M) = M^-1.  Its rotation
    planes carry a quaternionic pairing u -> J conj(u); each pair yields two
    real planes rotated by the same angle, which assembles the anticommuting
    antisymmetric generator Y with exp(2Y) = M.  Then A = exp(Y),
    K1 = x A^T, K2 = 1.
    """
    tol = resolve_tol(tol)
    j = np.asarray(j, dtype=float)
    x = _as_real(x, max(tol, 1e-8), "kak_DIII input")
    n = x.shape[0]
    m = j @ x.T @ j.T @ x

    t, z = scipy.linalg.schur(m, output="real")
    planes = []       # (phi in (0, pi), u)
    minus_cols = []   # real basis of the -1 eigenspace
    k = 0
    while k < n:
        if k + 1 < n and abs(t[k + 1, k]) > 1e-9:
            c, s = t[k, k], t[k, k + 1]
            phi = float(np.arctan2(s, c))
            if abs(abs(phi) - np.pi) < 10 * CLUSTER_TOL:
                minus_cols.extend([z[:, k], z[:, k + 1]])
            else:
                u = (z[:, k] + 1j * z[:, k + 1]) / np.sqrt(2)
                if phi < 0:
                    u, phi = u.conj(), -phi
                planes.append((phi, u))
            k += 2
        else:
            if t[k, k] < 0:
                minus_cols.append(z[:, k])
            k += 1

    y = np.zeros((n, n))

    def add_plane_pair(phi, x1, x2, x3, x4):
        nonlocal y
        y = y + (phi / 2) * (np.outer(x1, x2) - np.outer(x2, x1)
                             + np.outer(x3, x4) - np.outer(x4, x3))

    # rotation planes grouped by angle; tau(u) = J conj(u) pairs within
    groups = {}
    for phi, u in planes:
        for key in groups:
            if abs(key - phi) < 10 * CLUSTER_TOL:
                groups[key].append(u)
                break
        else:
            groups[phi] = [u]
    for phi, us in groups.items():
        cols = []
        paired = 0
        for u in us:
            if cols:
                uu = np.column_stack(cols)
                u = u - uu @ (uu.conj().T @ u)
            nu = np.linalg.norm(u)
            if nu < 1e-7:
                continue
            u = u / nu
            w = j @ u.conj()
            cols.extend([u, w])
            paired += 1
            add_plane_pair(phi, np.sqrt(2) * u.real, np.sqrt(2) * u.imag,
                           np.sqrt(2) * w.real, np.sqrt(2) * w.imag)
        if 2 * paired != len(us):
            raise PairingFailed(
                f"angle {phi:.6f}: {len(us)} planes do not pair")

    if minus_cols:
        w = np.column_stack(minus_cols)
        w, _ = np.linalg.qr(w)
        cols = []
        while True:
            x1 = None
            for cand in w.T:
                v = cand.copy()
                if cols:
                    u = np.column_stack(cols)
                    v = v - u @ (u.T @ v)
                if np.linalg.norm(v) > 1e-7:
                    x1 = v / np.linalg.norm(v)
                    break
            if x1 is None:
                break
            x3 = j @ x1
            x2 = None
            for cand in w.T:
                v = cand.copy()
                u = np.column_stack(cols + [x1, x3])
                v = v - u @ (u.T @ v)
                if np.linalg.norm(v) > 1e-7:
                    x2 = v / np.linalg.norm(v)
                    break
            if x2 is None:
                raise PairingFailed("-1 eigenspace is not a multiple of four")
            x4 = -j @ x2
            add_plane_pair(np.pi, x1, x2, x3, x4)
            cols.extend([x1, x2, x3, x4])

    a = scipy.linalg.expm(y)
    k1 = x @ a.T
    comm = mabs(k1 @ j - j @ k1)
    if comm > max(tol, 1e-7):
        raise FactorizationFailed(f"DIII factor J-commutator {comm:.3e}")
    return KakResult(k1.astype(complex), a.astype(complex),
                     np.eye(n, dtype=complex), y.astype(complex) * (1 + 0j),
                     {"type": "DIII"})


# ---------------------------------------------------------------------------
# real block split so(n) > so(p) + so(q), conjugation by a +-1 diagonal.
# Used by the bipartite driver; the signs need not be contiguous.


def kak_BDI(x, signs, tol=None):
    """KAK of a real special orthogonal matrix for a +-1 diagonal split.

    M = Z x^T Z x carries a real structure u -> Z conj(u) on each rotation
    eigenplane; its fixed vectors split into a Z-positive and a Z-negative
    real direction, giving the plane generator of the anticommuting
    antisymmetric torus element with exp(2G) = M.  Then A = exp(G),
    K1 = x A^T (real, Z-commuting), K2 = 1.  One torus angle is shifted by
    pi if needed so that both diagonal blocks of K1 land in SO.
    """
    tol = resolve_tol(tol)
    signs = np.asarray(signs, dtype=float)
    x = _as_real(x, max(tol, 1e-8), "kak_BDI input")
    n = x.shape[0]
    z = np.diag(signs)
    m = z @ x.T @ z @ x

    t, zz = scipy.linalg.schur(m, output="real")
    planes = []      # (phi in (0, pi], complex eigvec u) -- excludes -1
    minus_cols = []
    k = 0
    while k < n:
        if k + 1 < n and abs(t[k + 1, k]) > 1e-9:
            c, s = t[k, k], t[k, k + 1]
            phi = float(np.arctan2(s, c))
            if abs(abs(phi) - np.pi) < 10 * CLUSTER_TOL:
                minus_cols.extend([zz[:, k], zz[:, k + 1]])
            else:
                u = (zz[:, k] + 1j * zz[:, k + 1]) / np.sqrt(2)
                if phi < 0:
                    u, phi = u.conj(), -phi
                planes.append((phi, u))
            k += 2
        else:
            if t[k, k] < 0:
                minus_cols.append(zz[:, k])
            k += 1

    g = np.zeros((n, n))
    plane_frames = []  # (angle, x1, x2) with Z x1 = x1, Z x2 = -x2

    def add_plane(phi, x1, x2):
        nonlocal g
        g = g + (phi / 2) * (np.outer(x1, x2) - np.outer(x2, x1))
        plane_frames.append([phi / 2, x1, x2])

    groups = {}
    for phi, u in planes:
        for key in groups:
            if abs(key - phi) < 10 * CLUSTER_TOL:
                groups[key].append(u)
                break
        else:
            groups[phi] = [u]
    for phi, us in groups.items():
        cols = []
        fixed = 0
        for u in us:
            # sigma(v) = Z conj(v) is a real structure on the eigenspace;
            # build a sigma-fixed representative of each complex dimension
            for cand in (u + z @ u.conj(), 1j * (u - z @ u.conj())):
                v = cand.copy()
                if cols:
                    uu = np.column_stack(cols)
                    v = v - uu @ (uu.conj().T @ v)
                nv = np.linalg.norm(v)
                if nv < 1e-7:
                    continue
                v = v / nv
                cols.append(v)
                fixed += 1
                add_plane(phi, np.sqrt(2) * v.real, np.sqrt(2) * v.imag)
                break
        if fixed != len(us):
            raise PairingFailed(
                f"angle {phi:.6f}: found {fixed} real structures for "
                f"{len(us)} planes")

    if minus_cols:
        w = np.column_stack(minus_cols)
        w, _ = np.linalg.qr(w)
        # the -1 eigenspace of M is Z-invariant, so it splits exactly into
        # Z-positive and Z-negative parts; pair them into pi-angle planes
        pz = (np.eye(n) + z) / 2
        vp = _reorthonormalize(list((pz @ w).T))
        vm = _reorthonormalize(list((w - pz @ w).T))
        if len(vp) != len(vm) or 2 * len(vp) != w.shape[1]:
            raise PairingFailed(
                f"-1 eigenspace has unbalanced split {len(vp)}/{len(vm)}")
        for x1, x2 in zip(vp, vm):
            add_plane(np.pi, x1, x2)

    a = scipy.linalg.expm(g)
    k1 = x @ a.T

    # det fix: both diagonal blocks of K1 share one sign; shifting one torus
    # angle by pi multiplies K1 by the corresponding plane reflection, which
    # has determinant -1 in each block
    pos = signs > 0
    if np.linalg.det(k1[np.ix_(pos, pos)]) < 0:
        if plane_frames:
            phi2, x1, x2 = max(plane_frames, key=lambda f: abs(f[0]))
        else:
            x1 = np.zeros(n)
            x1[int(np.argmax(pos))] = 1.0
            x2 = np.zeros(n)
            x2[int(np.argmax(~pos))] = 1.0
            phi2 = 0.0
        shift = -np.pi if phi2 > 0 else np.pi
        g = g + shift * (np.outer(x1, x2) - np.outer(x2, x1))
        refl = np.eye(n) - 2 * (np.outer(x1, x1) + np.outer(x2, x2))
        k1 = k1 @ refl
        a = refl @ a

    comm = mabs(k1 @ z - z @ k1)
    if comm > max(tol, 1e-7):
        raise FactorizationFailed(f"BDI factor Z-commutator {comm:.3e}")
    return KakResult(k1.astype(complex), a.astype(complex),
                     np.eye(n, dtype=complex), g.astype(complex),
                     {"type": "BDI"})


def _reorthonormalize(vecs):
    out = []
    for v in vecs:
        if out:
            u = np.column_stack(out)
            v = v - u @ (u.T @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-7:
            out.append(v / nv)
    return out


# ---------------------------------------------------------------------------
# double-coset solve for block pairs (Ka, Kb) = (K P, K P^dag)


def kak_gg(ka, kb, tol=None):
    """Split a pair of unitaries as Ka = L1 D L2, Kb = L1 D^dag L2.

    P^2 = Kb^dag Ka is diagonalized; the principal root D gives the torus
    factor and L1 = Kb U D, L2 = U^dag.
    """
    tol = resolve_tol(tol)
    ka = np.asarray(ka, dtype=complex)
    kb = np.asarray(kb, dtype=complex)
    p2 = kb.conj().T @ ka
    w, u = eig_normal(p2, tol=min(tol, 1e-8))
    d = np.exp(0.5j * np.angle(w))
    l2 = u.conj().T
    l1 = kb @ u @ np.diag(d)
    err = max(mabs(l1 @ np.diag(d) @ l2 - ka),
              mabs(l1 @ np.diag(d.conj()) @ l2 - kb))
    if err > max(tol, 1e-8) * 10:
        raise FactorizationFailed(f"double-coset residual {err:.3e}")
    return l1, np.angle(d), l2


# ---------------------------------------------------------------------------
# generic dispatch


def kak_general(theta, x, tol=None):
    """KAK for an arbitrary involution: standardize, solve, conjugate back."""
    from .schemes import build_standardizer
    tol = resolve_tol(tol)
    x = np.asarray(x, dtype=complex)
    f = build_standardizer(theta, tol=tol)
    xs = f.conj().T @ x @ f
    kind = theta.antiunitary_kind()
    if kind == "AI":
        res = kak_AI(xs, tol=tol)
    elif kind == "AII":
        res = kak_AII(xs, tol=tol)
    else:
        signs = np.diag(f.conj().T @ theta.w @ f).real
        p = int(np.sum(signs > 0))
        res = kak_AIII(xs, p, theta.n - p, tol=tol)
    lift = lambda g: f @ g @ f.conj().T
    return KakResult(lift(res.k1), lift(res.a), lift(res.k2), lift(res.log_a),
                     dict(res.diagnostics, standardized=True))


def solve_embedded_u2(x, tol=None):
    """Block solve for X in SO(4) compatible with the U(2) embedding.

    With K2' = 1 the factorization X = K1' A' reduces to E^2 =
    (X22 + i X12)^-1 (X11 - i X21); the principal root gives E, then
    A + iB = (X11 - i X21) E^-1 assembles K1' = [[A, B], [-B, A]] and
    A' = diag(E, E^-1).
    """
    tol = resolve_tol(tol)
    x = _as_real(x, max(tol, 1e-8), "embedded-u2 input")
    if x.shape != (4, 4):
        raise BadParams("expected a 4x4 matrix")
    x11, x12 = x[:2, :2], x[:2, 2:]
    x21, x22 = x[2:, :2], x[2:, 2:]
    block = x22 + 1j * x12
    if abs(np.linalg.det(block)) < max(tol, 1e-12):
        raise BlockSingular("X22 + i X12 is singular")
    e2 = np.linalg.inv(block) @ (x11 - 1j * x21)
    e = sqrt_unitary_principal(e2, tol=tol)
    ab = (x11 - 1j * x21) @ e.conj().T
    k1 = np.block([[ab.real, ab.imag], [-ab.imag, ab.real]]).astype(complex)
    aprime = np.block([[e, np.zeros((2, 2))],
                       [np.zeros((2, 2)), e.conj().T]])
    return k1, aprime


# ---------------------------------------------------------------------------
# catalogued Cartan subalgebras for the ccd-new scheme


def cartan_subalgebra(scheme, level):
    """Closed-form commuting torus basis for a level of the ccd-new scheme.

    Levels are 0-based: level 2k splits the subalgebra chain at u(2^(N-k))
    (type AI for N-k even, AII odd), level 2k+1 at the orthogonal/symplectic
    stage (DIII for N-k even, CI odd).  Strings are built from the commuting
    family {XX, YY, ZZ, II}.
    """
    name = scheme.name if hasattr(scheme, "name") else str(scheme)
    if name != "ccd-new":
        raise UnsupportedScheme(f"no catalogued torus for scheme {name!r}")
    n_sites = scheme.params["qubits"]
    if not 0 <= level < 2 * n_sites:
        raise UnsupportedScheme(f"level {level} out of range")
    k = level // 2
    rem = n_sites - k
    if level % 2 == 0:
        if rem % 2 == 0:  # AI on u(2^rem)
            core = commuting_family(rem // 2)
            tail = "Z" + "I" * (k - 1) if k >= 1 else ""
        else:             # AII on u(2^rem)
            core = [h + "I" for h in commuting_family((rem - 1) // 2)]
            tail = "Z" + "I" * (k - 1) if k >= 1 else ""
    else:
        if rem % 2 == 0:  # DIII on so(2^rem)
            core = [h + "I" for h in commuting_family((rem - 2) // 2)]
            tail = "X" + "I" * k
        else:             # CI on sp(2^(rem-1))
            core = commuting_family((rem - 1) // 2)
            tail = "X" + "I" * k
    strings = [h + tail for h in core]
    assert all(len(s) == n_sites for s in strings)
    for i, s in enumerate(strings):
        for t in strings[i + 1:]:
            if not strings_commute(s, t):
                raise FactorizationFailed(
                    f"torus strings {s} and {t} do not commute")
    return Subspace.from_pauli_strings(strings, n_sites,
                                       label=f"H@level{level}")

"""Z2^p gradings from commuting involutions and recursive sequences.

The joint +-1 eigenspaces of p commuting involutions decompose u(n) into
blocks indexed by p-bit labels satisfying [L_a, L_b] <= L_(a xor b).  The
nested subalgebras L_0...0 and their complements drive the level-by-level
factorization.
"""

from dataclasses import dataclass, field

import numpy as np

from .config import RANK_RTOL, resolve_tol
from .errors import (CartanRelationViolated, DimensionMismatch,
                     NonCommutingInvolutions, NotASubalgebra)
from .involutions import Subspace, u_basis
from .matcore import mabs

__all__ = ["Grading", "RecursiveSequence", "build_grading",
           "recursive_sequences", "center_split", "grading_report"]


@dataclass
class Grading:
    """Blocks of a Z2^p grading keyed by bit-label strings like '01011'."""

    n: int
    p: int
    blocks: dict

    def block(self, label):
        return self.blocks[label]

    def dims(self):
        return {lab: sp.dim for lab, sp in self.blocks.items()}

    def prefix_space(self, prefix, label=""):
        """Direct sum of all blocks whose label starts with ``prefix``."""
        mats = [sp.basis for lab, sp in sorted(self.blocks.items())
                if lab.startswith(prefix) and sp.dim]
        if not mats:
            return Subspace(self.n, np.zeros((0, self.n, self.n), complex),
                            label or f"L_{prefix}")
        basis = np.concatenate(mats, axis=0)
        return Subspace(self.n, basis, label or f"L_{prefix}")


def _labels(p):
    return ["".join(bits) for bits in
            (format(k, f"0{p}b") for k in range(2 ** p))]


def build_grading(involutions, tol=None):
    """Joint eigenspace blocks of commuting involutions on u(n).

    Involutions must act on the same u(n) and pairwise commute as linear
    maps (checked on the canonical basis, residual <= 1e-8).  When every
    canonical basis element is a +-1 eigenvector of every involution the
    blocks are read off sign tables; otherwise they are built by sign
    projectors and rank-revealing orthonormalization.  Empty blocks are kept
    with dimension zero.
    """
    resolve_tol(tol)
    if not involutions:
        raise ValueError("need at least one involution")
    n = involutions[0].n
    if any(th.n != n for th in involutions):
        raise DimensionMismatch("involutions act on different dimensions")
    p = len(involutions)
    basis = u_basis(n)

    images = [[th.apply_algebra(b) for b in basis] for th in involutions]
    for a in range(p):
        for b in range(a + 1, p):
            resid = max(
                mabs(involutions[a].apply_algebra(images[b][k])
                     - involutions[b].apply_algebra(images[a][k]))
                for k in range(len(basis)))
            if resid > 1e-8:
                raise NonCommutingInvolutions(
                    f"involutions {a} and {b} do not commute as maps "
                    f"(residual {resid:.3e})")

    # fast path: basis elements that are joint sign eigenvectors
    signs = np.zeros((p, len(basis)), dtype=int)
    diagonalized = True
    for j in range(p):
        for k, b in enumerate(basis):
            if mabs(images[j][k] - b) < 1e-10:
                signs[j, k] = 0
            elif mabs(images[j][k] + b) < 1e-10:
                signs[j, k] = 1
            else:
                diagonalized = False
                break
        if not diagonalized:
            break

    blocks = {}
    if diagonalized:
        for lab in _labels(p):
            idx = [k for k in range(len(basis))
                   if all(signs[j, k] == int(lab[j]) for j in range(p))]
            blocks[lab] = Subspace.from_matrices(
                n, [basis[k] for k in idx], label=f"L_{lab}",
                orthonormalize=False)
    else:
        for lab in _labels(p):
            mats = []
            for k, b in enumerate(basis):
                x = b
                for j in range(p):
                    tx = involutions[j].apply_algebra(x)
                    x = (x + tx) / 2 if lab[j] == "0" else (x - tx) / 2
                mats.append(x)
            blocks[lab] = Subspace.from_matrices(n, mats, label=f"L_{lab}")

    total = sum(sp.dim for sp in blocks.values())
    if total != n * n:
        raise DimensionMismatch(
            f"block dimensions sum to {total}, expected {n * n}")
    return Grading(n, p, blocks)


def validate_graded_commutation(grading, tol=1e-9):
    """Exhaustive check of [L_a, L_b] <= L_(a xor b) over basis pairs.

    Returns the worst residual; raises nothing (callers decide)."""
    worst = 0.0
    labs = sorted(grading.blocks)
    for la in labs:
        sa = grading.blocks[la]
        if sa.dim == 0:
            continue
        for lb in labs:
            sb = grading.blocks[lb]
            if sb.dim == 0:
                continue
            lt = "".join("1" if a != b else "0" for a, b in zip(la, lb))
            st = grading.blocks[lt]
            for x in sa.basis:
                comms = np.einsum("ij,kjl->kil", x, sb.basis) \
                    - np.einsum("kij,jl->kil", sb.basis, x)
                for c in comms:
                    worst = max(worst, st.residual(c))
    return worst


@dataclass
class RecursiveSequence:
    """Nested subalgebras S0[j] = L_{0^(j+1)} and complements S1[j]."""

    s0: list
    s1: list
    metadata: list = field(default_factory=list)

    @property
    def depth(self):
        return len(self.s0)


def _pair_residual(k_space, p_space):
    """Worst Cartan-relation residual for the pair (K, P)."""
    worst = 0.0
    def comm_batch(a, bs):
        return a @ bs - bs @ a
    for x in k_space.basis:
        for c in comm_batch(x, k_space.basis):
            worst = max(worst, k_space.residual(c))
        for c in comm_batch(x, p_space.basis):
            worst = max(worst, p_space.residual(c))
    for x in p_space.basis:
        for c in comm_batch(x, p_space.basis):
            worst = max(worst, k_space.residual(c))
    return worst


def recursive_sequences(grading, hints=None, check=True, tol=1e-9):
    """Extract S0/S1 from a grading and verify the pair relations per level.

    S0[j] is the union of blocks with j+1 leading zeros, S1[j] the union of
    blocks with prefix 0^j 1.  With ``check=True`` each level's subalgebra /
    complement commutation relations are verified exhaustively.
    """
    p = grading.p
    s0 = [grading.prefix_space("0" * (j + 1)) for j in range(p)]
    s1 = [grading.prefix_space("0" * j + "1") for j in range(p)]
    if check:
        for j in range(p):
            resid = _pair_residual(s0[j], s1[j])
            if resid > tol:
                raise CartanRelationViolated(
                    f"level {j}: pair residual {resid:.3e} > {tol:.1e}")
    meta = []
    for j in range(p):
        entry = {"level": j, "dim_k": s0[j].dim, "dim_p": s1[j].dim}
        if hints and j < len(hints):
            entry.update(hints[j])
        meta.append(entry)
    return RecursiveSequence(s0, s1, meta)


def center_split(subspace, tol=None):
    """Split a subalgebra into its semisimple part and its center.

    The center is the kernel of the adjoint representation restricted to the
    subspace (null space of the stacked commutator maps, singular values
    below 1e-8 of the largest treated as zero).
    """
    tol = resolve_tol(tol)
    basis = subspace.basis
    d = subspace.dim
    if d == 0:
        return subspace, Subspace(subspace.n, basis.copy(), "center")
    closure = 0.0
    rows = []
    for j in range(d):
        bj = basis[j]
        comms = basis @ bj - bj @ basis  # comms[l] = [b_l, b_j]
        for c in comms:
            closure = max(closure, subspace.residual(c))
        # R[k, l] = <b_k, [b_l, b_j]>; kernel over l gives ad-central x
        rows.append(np.einsum("kij,lij->kl", basis.conj(), comms).real)
    if closure > max(tol, 1e-9) * 10:
        raise NotASubalgebra(f"bracket-closure residual {closure:.3e}")
    a = np.vstack(rows)  # maps coefficient vector to stacked ad-images
    u, s, vt = np.linalg.svd(a)
    if s.size:
        null = vt[np.concatenate([s <= 1e-8 * max(1.0, s[0]),
                                  np.zeros(vt.shape[0] - s.size, bool)])]
    else:
        null = vt
    center_mats = [np.einsum("k,kij->ij", row, basis) for row in null]
    center = Subspace.from_matrices(subspace.n, center_mats, label="center")
    # semisimple part: orthogonal complement of the center within s
    if center.dim == 0:
        return subspace, center
    keep = []
    for b in basis:
        keep.append(b - center.project(b))
    semi = Subspace.from_matrices(subspace.n, keep, label="semisimple")
    return semi, center


def grading_report(grading, sequences=None):
    """Structured-text report: per-label dims and per-level summaries."""
    lines = [f"grading: n={grading.n} p={grading.p}"]
    for lab in sorted(grading.blocks):
        dim = grading.blocks[lab].dim
        if dim:
            lines.append(f"  L_{lab}: dim {dim}")
    if sequences is not None:
        for m in sequences.metadata:
            extra = " ".join(f"{k}={v}" for k, v in m.items()
                             if k not in ("level", "dim_k", "dim_p"))
            lines.append(f"  level {m['level']}: dim_k={m['dim_k']} "
                         f"dim_p={m['dim_p']}" + (f" {extra}" if extra else ""))
    return "\n".join(lines) + "\n"

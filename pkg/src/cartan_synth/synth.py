"""Recursive factorization driver.

Walks a scheme's nested sequence, applies the per-level KAK solver to every
pending subgroup factor, and emits ordered leaves, each an exponential of a
generator lying in one graded block.  Leaves are serialized left-to-right in
matrix-product order.
"""

from dataclasses import dataclass, field

import numpy as np

from .config import resolve_tol
from .errors import (CartanSynthError, FactorizationFailed, LogOutsideSubspace)
from .grading import build_grading, recursive_sequences
from .kak import (kak_AI, kak_AII, kak_AIII, kak_BDI, kak_CI, kak_DIII,
                  kak_gg)
from .matcore import assert_unitary, expm_skew, mabs, principal_log_unitary
from .pauli import expand
from .schemes import chain_j, chain_standardizer

__all__ = ["Leaf", "Factorization", "VerificationReport", "decompose",
           "factor_to_exponential", "reconstruct_and_verify",
           "factorization_to_dict", "factorization_from_dict"]


@dataclass
class Leaf:
    """One exponential factor: exp(generator) tagged with its graded block."""

    label: str
    level: int
    generator: np.ndarray
    matrix: np.ndarray
    element: object = None          # AlgebraElement for qubit dimensions
    block_residual: float = 0.0

    def generator_norm(self):
        return float(np.linalg.norm(self.generator))


@dataclass
class Factorization:
    """Ordered leaves whose matrix product reconstructs the input."""

    scheme: str
    n: int
    leaves: list
    pruned: int = 0
    diagnostics: dict = field(default_factory=dict)

    def product(self):
        out = np.eye(self.n, dtype=complex)
        for leaf in self.leaves:
            out = out @ leaf.matrix
        return out


def _wrap_path(path):
    """Decorate solver errors with the recursion path."""
    class _ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, CartanSynthError):
                exc.args = (f"[{path}] {exc.args[0] if exc.args else ''}",)
            return False
    return _ctx()


# ---------------------------------------------------------------------------
# ccd-new driver: alternating AI/AII and DIII/CI levels with the dimension
# halving through the embedded-U(m) representation


_EMB_J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def _embed_complex(g):
    """u(m) element -> its real-structure image on C^(2m), aux site last."""
    return np.kron(g.real, np.eye(2)) + np.kron(g.imag, _EMB_J2)


def _hol_frame(m):
    """Columns e_k (x) |-y> spanning the +i eigenspace of chain_j(m)."""
    col = np.array([[1.0], [-1.0j]]) / np.sqrt(2)
    return np.kron(np.eye(m), col)


def _drive_ccd_new(x, n_sites, tol):
    p_total = 2 * n_sites

    def rec(u, nq, depth, lift, path):
        if nq == 0:
            phi = float(np.angle(u[0, 0]))
            return [(p_total, lift(1j * phi * np.eye(1, dtype=complex)))]
        m = 2 ** (nq - 1)
        f = chain_standardizer(nq)
        j = chain_j(m)
        h = _hol_frame(m)
        us = f.conj().T @ u @ f
        with _wrap_path(f"{path}/level{2 * depth}"):
            top = kak_AII(us, tol=tol, j=j) if nq % 2 else kak_AI(us, tol=tol)

        def lift_here(g):
            return lift(f @ g @ f.conj().T)

        leaf_a = (2 * depth, lift_here(top.log_a))

        def side(k, tag):
            with _wrap_path(f"{path}/{tag}/level{2 * depth + 1}"):
                sub = kak_CI(k, j, tol=tol) if nq % 2 else kak_DIII(k, j, tol=tol)
            kappa = h.conj().T @ sub.k1 @ h
            subs = rec(kappa, nq - 1, depth + 1,
                       lambda g: lift_here(_embed_complex(g)), f"{path}/{tag}")
            return subs + [(2 * depth + 1, lift_here(sub.log_a))]

        return side(top.k1, "K1") + [leaf_a] + side(top.k2, "K2")

    return rec(x, n_sites, 0, lambda g: g, "root")


# ---------------------------------------------------------------------------
# kg driver: block split then double-coset solve, per site


def _drive_kg(x, n_sites, tol):
    p_total = 2 * n_sites - 1

    def rec(u, nq, depth, lift, path):
        m = 2 ** nq
        half = m // 2
        with _wrap_path(f"{path}/level{2 * depth}"):
            top = kak_AIII(u, half, half, tol=tol)
        leaf_a = (2 * depth, lift(top.log_a))

        def side(k, tag):
            ka, kb = k[:half, :half], k[half:, half:]
            off = max(mabs(k[:half, half:]), mabs(k[half:, :half]))
            if off > 1e-7:
                raise FactorizationFailed(
                    f"[{path}/{tag}] block factor has off-diagonal mass {off:.3e}")
            if nq == 1:
                gen = np.diag(1j * np.array([np.angle(ka[0, 0]),
                                             np.angle(kb[0, 0])]))
                return [(p_total, lift(gen))]
            with _wrap_path(f"{path}/{tag}/level{2 * depth + 1}"):
                l1, phases, l2 = kak_gg(ka, kb, tol=tol)
            gen = np.zeros((m, m), dtype=complex)
            gen[:half, :half] = np.diag(1j * phases)
            gen[half:, half:] = np.diag(-1j * phases)
            leaf_b = (2 * depth + 1, lift(gen))
            sub_lift = lambda g: lift(np.kron(np.eye(2), g))
            left = rec(l1, nq - 1, depth + 1, sub_lift, f"{path}/{tag}/L1")
            right = rec(l2, nq - 1, depth + 1, sub_lift, f"{path}/{tag}/L2")
            return left + [leaf_b] + right

        return side(top.k1, "K1") + [leaf_a] + side(top.k2, "K2")

    return rec(x, n_sites, 0, lambda g: g, "root")


# ---------------------------------------------------------------------------
# bipartite driver: real split, then nested +-diagonal block splits with the
# trivial-K2 gauge (only K1 recurses past each block level)


def _drive_bipartite(x, scheme, tol):
    n = scheme.n
    p_total = scheme.p
    sign_rows = []
    for theta in scheme.involutions[1:]:
        sign_rows.append(np.diag(theta.w).real)

    def partition(level):
        """Index blocks by the joint sign pattern of levels 1..level-1."""
        keys = {}
        for i in range(n):
            key = tuple(sign_rows[j - 1][i] > 0 for j in range(1, level))
            keys.setdefault(key, []).append(i)
        return [np.array(v) for _, v in sorted(keys.items())]

    def terminal(u, path):
        gen = np.zeros((n, n), dtype=complex)
        for block in partition(p_total):
            idx = np.ix_(block, block)
            sub = u[idx]
            if block.size == 1:
                if abs(sub[0, 0] - 1.0) > 1e-7:
                    raise FactorizationFailed(
                        f"[{path}] terminal 1x1 block is {sub[0, 0]:.6f}, not 1")
                continue
            if block.size == 2:
                ang = float(np.arctan2(sub[1, 0].real, sub[0, 0].real))
                gen[idx] = ang * np.array([[0.0, -1.0], [1.0, 0.0]])
            else:
                gen[idx] = principal_log_unitary(sub, tol=tol)
        return [(p_total, gen)]

    def rec(u, level, path):
        if level == p_total:
            return terminal(u, path)
        signs = sign_rows[level - 1]
        gen = np.zeros((n, n), dtype=complex)
        k1_full = np.eye(n, dtype=complex)
        for block in partition(level):
            idx = np.ix_(block, block)
            sub = u[idx]
            bsigns = signs[block]
            if np.all(bsigns > 0) or np.all(bsigns < 0):
                k1_full[idx] = sub  # split is trivial on this block
                continue
            with _wrap_path(f"{path}/level{level}/block{block[0]}"):
                res = kak_BDI(sub, bsigns, tol=tol)
            gen[idx] = res.log_a
            k1_full[idx] = res.k1
        return rec(k1_full, level + 1, path) + [(level, gen)]

    with _wrap_path("root/level0"):
        top = kak_AI(x, tol=tol)
    leaf_a = (0, top.log_a)
    left = rec(top.k1, 1, "root/K1")
    right = rec(top.k2, 1, "root/K2")
    return left + [leaf_a] + right


# ---------------------------------------------------------------------------
# public API


_SEQ_CACHE = {}


def _scheme_key(scheme):
    return (scheme.name, scheme.dims,
            tuple(sorted((k, str(v)) for k, v in scheme.params.items())))


def scheme_sequences(scheme, check=False):
    """Grading and S0/S1 sequences for a scheme, cached per parameter set."""
    key = _scheme_key(scheme)
    if key not in _SEQ_CACHE:
        grading = build_grading(scheme.involutions)
        seq = recursive_sequences(grading, hints=scheme.level_hints,
                                  check=check)
        _SEQ_CACHE[key] = (grading, seq)
    return _SEQ_CACHE[key]


def _leaf_label(level, p):
    return "L_" + ("0" * p if level >= p else "0" * level + "1")


def decompose(x, scheme, tol=None, prune_tol=1e-10, check_blocks=True):
    """Factor a unitary through a scheme's recursive sequence.

    Returns a :class:`Factorization` whose ordered leaf product equals ``x``.
    Leaves with matrix within ``prune_tol`` of the identity are dropped (the
    count is reported).  With ``check_blocks`` every leaf generator is
    verified to lie in its labeled graded block.
    """
    tol = resolve_tol(tol)
    x = np.asarray(x, dtype=complex)
    if x.shape != (scheme.n, scheme.n):
        raise FactorizationFailed(
            f"input is {x.shape}, scheme needs {scheme.n}")
    assert_unitary(x, tol=max(tol, 1e-8), what="decompose input")

    if scheme.name == "ccd-new":
        raw = _drive_ccd_new(x, scheme.params["qubits"], tol)
    elif scheme.name == "kg":
        raw = _drive_kg(x, scheme.params["qubits"], tol)
    elif scheme.name == "bipartite":
        raw = _drive_bipartite(x, scheme, tol)
    else:
        raise FactorizationFailed(f"no driver for scheme {scheme.name!r}")

    qubit_dim = 2 ** int(round(np.log2(scheme.n))) == scheme.n
    _, seq = scheme_sequences(scheme) if check_blocks else (None, None)

    leaves = []
    pruned = 0
    max_block_residual = 0.0
    for level, gen in raw:
        mat = expm_skew(gen, tol=1e-6)
        if mabs(mat - np.eye(scheme.n)) <= prune_tol:
            pruned += 1
            continue
        label = _leaf_label(level, scheme.p)
        residual = 0.0
        if check_blocks:
            space = seq.s0[scheme.p - 1] if level >= scheme.p \
                else seq.s1[level]
            residual = space.residual(gen)
            if residual > max(tol, 1e-8) * max(1.0, mabs(gen)):
                raise FactorizationFailed(
                    f"leaf at level {level} has generator outside {label} "
                    f"(residual {residual:.3e})")
            max_block_residual = max(max_block_residual, residual)
        element = expand(gen, tol=1e-7) if qubit_dim else None
        leaves.append(Leaf(label, level, gen, mat, element, residual))

    fact = Factorization(scheme.name, scheme.n, leaves, pruned,
                         {"max_block_residual": max_block_residual})
    fact.diagnostics["reconstruction_error"] = mabs(fact.product() - x)
    return fact


def factor_to_exponential(u, subspace, tol=None):
    """Principal log of a leaf, projected onto its labeled subspace.

    The projection must be lossless: if exp of the projected generator
    misses ``u`` beyond tolerance the leaf is mislabeled (or sits on a
    branch collision) and :class:`LogOutsideSubspace` is raised.
    """
    tol = resolve_tol(tol)
    u = np.asarray(u, dtype=complex)
    h = principal_log_unitary(u, tol=tol)
    hp = subspace.project(h)
    err = mabs(expm_skew(hp, tol=1e-6) - u)
    if err > max(tol, 1e-7) * max(1.0, mabs(u)):
        raise LogOutsideSubspace(
            f"projected generator misses the factor by {err:.3e}")
    n_sites = int(round(np.log2(u.shape[0])))
    if 2 ** n_sites == u.shape[0]:
        return expand(hp, tol=1e-7)
    return hp


@dataclass
class VerificationReport:
    reconstruction_error: float
    leaf_count: int
    per_leaf: list            # (label, block_residual, generator_norm)
    max_block_residual: float
    tolerance: float
    passed: bool

    def lines(self):
        out = [f"leaves: {self.leaf_count}",
               f"reconstruction error: {self.reconstruction_error:.3e}",
               f"max block residual: {self.max_block_residual:.3e}",
               f"verdict: {'pass' if self.passed else 'FAIL'}"]
        return out


def reconstruct_and_verify(factorization, x, tol=None):
    """Re-multiply the ordered leaves and report against tolerances."""
    tol = resolve_tol(tol)
    x = np.asarray(x, dtype=complex)
    err = mabs(factorization.product() - x)
    per_leaf = [(leaf.label, leaf.block_residual, leaf.generator_norm())
                for leaf in factorization.leaves]
    max_res = max([r for _, r, _ in per_leaf], default=0.0)
    check_tol = max(tol, 1e-8) * 10
    return VerificationReport(err, len(factorization.leaves), per_leaf,
                              max_res, tol,
                              err <= check_tol and max_res <= check_tol)


# ---------------------------------------------------------------------------
# serialization (17 significant digits: exact for doubles)


def _fmt(v):
    return float(f"{v:.17g}")


def factorization_to_dict(fact, emit_matrices=False):
    leaves = []
    for leaf in fact.leaves:
        entry = {"label": leaf.label, "level": leaf.level,
                 "block_residual": _fmt(leaf.block_residual)}
        if leaf.element is not None:
            entry["terms"] = [{"pauli": s, "coeff": _fmt(c)}
                              for s, c in leaf.element.terms()]
        else:
            entry["generator"] = [[[_fmt(v.real), _fmt(v.imag)] for v in row]
                                  for row in leaf.generator]
        if emit_matrices:
            entry["matrix"] = [[[_fmt(v.real), _fmt(v.imag)] for v in row]
                               for row in leaf.matrix]
        leaves.append(entry)
    return {"scheme": fact.scheme, "n": fact.n, "pruned": fact.pruned,
            "leaves": leaves,
            "diagnostics": {k: _fmt(v) for k, v in fact.diagnostics.items()}}


def factorization_from_dict(data):
    from .pauli import AlgebraElement
    n = data["n"]
    n_sites = int(round(np.log2(n)))
    leaves = []
    for entry in data["leaves"]:
        if "terms" in entry:
            element = AlgebraElement(
                n_sites, {t["pauli"]: t["coeff"] for t in entry["terms"]})
            gen = element.assemble()
        else:
            element = None
            gen = np.array([[complex(re, im) for re, im in row]
                            for row in entry["generator"]])
        leaves.append(Leaf(entry["label"], entry["level"], gen,
                           expm_skew(gen, tol=1e-6), element,
                           entry.get("block_residual", 0.0)))
    return Factorization(data["scheme"], n, leaves, data.get("pruned", 0),
                         dict(data.get("diagnostics", {})))

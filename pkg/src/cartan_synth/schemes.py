"""Builders for the shipped decomposition schemes.

A scheme is an ordered list of commuting involutions of u(n) plus per-level
solver hints.  Shipped families:

* ``ccd-new`` -- the 2N-involution qubit scheme: the parity (odd/even Pauli
  weight) split first, then per-site variants with the distinguished site
  moving from the last position to the first, alternating the x/z letter.
* ``kg`` -- the 2N-1 block-split involutions conjugating by sigma_z and
  sigma_x at successive sites.
* ``bipartite`` -- the two-subsystem recursion alternating an all-real split,
  a product-of-block splits, and a standard block split with fresh indices
  each round.
"""

from dataclasses import dataclass, field

import numpy as np

from .config import resolve_tol
from .errors import (BadLocalChoice, BadParams, FactorizationFailed,
                     ScheduleExhausted)
from .involutions import Involution, conjugate, standard, standard_j, u_basis
from .matcore import mabs, simdiag_commuting_symmetric
from .pauli import PAULI_MATS, pauli_matrix

__all__ = [
    "Scheme", "build_ccd", "build_oed", "build_aiii_oed", "build_kg_sequence",
    "build_new_scheme", "build_bipartite_recursion", "build_standardizer",
    "chain_standardizer", "chain_j", "get_scheme", "scheme_catalog",
]


@dataclass
class Scheme:
    """Named family of involutions with per-level solver hints."""

    name: str
    dims: tuple
    involutions: list
    level_hints: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    @property
    def n(self):
        return int(np.prod(self.dims))

    @property
    def p(self):
        return len(self.involutions)


def _site_string_matrix(n_sites, letters):
    return pauli_matrix("".join(letters))


def build_ccd(n_sites):
    """Parity-split involution of u(2^N): conjugation by sigma_y^(x N) with
    entrywise conjugation.  Fixed space: odd-weight Pauli strings."""
    if n_sites < 1:
        raise BadParams("need at least one site")
    w = pauli_matrix("Y" * n_sites)
    return Involution(2 ** n_sites, True, w, name=f"ccd({n_sites})")


def _check_local(kind, w, n_j, tol):
    if mabs(w @ w.conj().T - np.eye(n_j)) > tol:
        raise BadLocalChoice("local w is not unitary")
    ww = w @ w.conj()
    c = ww[0, 0]
    if mabs(ww - c * np.eye(n_j)) > tol or abs(c.imag) > tol:
        raise BadLocalChoice("local w does not define an involution")
    if kind == "AII":
        if n_j % 2:
            raise BadLocalChoice("AII needs an even local dimension")
        if c.real > 0:
            raise BadLocalChoice("AII needs an antisymmetric-type local w")
    elif kind == "AI":
        if c.real < 0:
            raise BadLocalChoice("AI needs a symmetric-type local w")
    else:
        raise BadLocalChoice(f"unknown local kind {kind!r}")


def build_oed(local_choices, tol=None):
    """Product involution from per-subsystem AI/AII choices.

    ``local_choices`` is a sequence of ``(kind, spec)`` pairs with kind in
    {"AI", "AII"}; ``spec`` is either the subsystem dimension (default
    conjugating matrix: identity for AI, the symplectic J for AII) or an
    explicit local matrix.  Entrywise conjugation is always included; the
    fixed space collects tensor terms with an odd count of local
    subalgebra-type factors.
    """
    tol = resolve_tol(tol)
    ws = []
    dims = []
    for kind, spec in local_choices:
        if isinstance(spec, (int, np.integer)):
            n_j = int(spec)
            if kind == "AII" and n_j % 2:
                raise BadLocalChoice("AII needs an even local dimension")
            w = standard_j(n_j // 2) if kind == "AII" else np.eye(n_j)
        else:
            w = np.asarray(spec, dtype=complex)
            n_j = w.shape[0]
        _check_local(kind, np.asarray(w, dtype=complex), n_j, max(tol, 1e-10))
        ws.append(np.asarray(w, dtype=complex))
        dims.append(n_j)
    w = np.array([[1.0 + 0j]])
    for wj in ws:
        w = np.kron(w, wj)
    kinds = ",".join(k for k, _ in local_choices)
    return Involution(int(np.prod(dims)), True, w, name=f"oed({kinds})")


def build_aiii_oed(local_pq, tol=None):
    """Block-split involution from per-subsystem (p_l, q_l) choices.

    Returns the involution (conjugation by the tensor product of
    diag(1_p, -1_q) factors, no entrywise conjugation) and the permutation
    ``r`` that sorts its +1 eigenvectors first, so that
    ``conjugate(theta, r.conj().T)`` is a standard AIII involution.
    """
    resolve_tol(tol)
    signs = np.array([1.0])
    for p_l, q_l in local_pq:
        if p_l < 1 or q_l < 1:
            raise BadParams("need p_l, q_l >= 1")
        signs = np.kron(signs, np.concatenate([np.ones(p_l), -np.ones(q_l)]))
    n = signs.size
    theta = Involution(n, False, np.diag(signs.astype(complex)),
                       name="aiii-oed")
    order = np.argsort(-signs, kind="stable")
    r = np.zeros((n, n))
    r[order, np.arange(n)] = 1.0
    return theta, r


def _pauli_site_w(n_sites, site, letter):
    letters = ["Y"] * n_sites
    letters[site] = letter
    return pauli_matrix("".join(letters))


def build_new_scheme(n_sites):
    """The 2N-involution recursive scheme on N qubits ("ccd-new").

    Involution 1 is the parity split; involutions 2j, 2j+1 reuse it with the
    site N-j switched to an AI-type local choice (conjugating letter x, then
    z); the final involution puts the x-type choice on the first site.
    """
    if n_sites < 1:
        raise BadParams("need at least one site")
    n = 2 ** n_sites
    invs = [build_ccd(n_sites)]
    for site in range(n_sites - 1, 0, -1):
        invs.append(Involution(n, True, _pauli_site_w(n_sites, site, "X"),
                               name=f"oed-x@{site}"))
        invs.append(Involution(n, True, _pauli_site_w(n_sites, site, "Z"),
                               name=f"oed-z@{site}"))
    invs.append(Involution(n, True, _pauli_site_w(n_sites, 0, "X"),
                           name="oed-x@0"))
    hints = []
    for k in range(n_sites):
        m = 2 ** (n_sites - k)
        if (n_sites - k) % 2 == 0:
            hints.append({"type": "AI", "space": f"u({m})", "rank": m})
            hints.append({"type": "DIII", "space": f"so({m})", "rank": m // 4})
        else:
            hints.append({"type": "AII", "space": f"u({m})", "rank": m // 2})
            hints.append({"type": "CI", "space": f"sp({m // 2})", "rank": m // 2})
    return Scheme("ccd-new", (2,) * n_sites, invs, hints,
                  params={"qubits": n_sites})


def build_kg_sequence(n_sites):
    """The 2N-1 level block-split scheme on N qubits.

    Level 2k conjugates by sigma_z at site k, level 2k+1 by sigma_x at site
    k; the last site only gets the sigma_z level.
    """
    if n_sites < 1:
        raise BadParams("need at least one site")
    n = 2 ** n_sites
    invs = []
    hints = []
    for site in range(n_sites):
        letters = ["I"] * n_sites
        letters[site] = "Z"
        invs.append(Involution(n, False, pauli_matrix("".join(letters)),
                               name=f"z@{site}"))
        m = 2 ** (n_sites - site)
        hints.append({"type": "AIII", "p": m // 2, "q": m // 2,
                      "space": f"u({m})"})
        if site < n_sites - 1:
            letters[site] = "X"
            invs.append(Involution(n, False, pauli_matrix("".join(letters)),
                                   name=f"x@{site}"))
            hints.append({"type": "GxG", "space": f"u({m // 2})^2"})
    return Scheme("kg", (2,) * n_sites, invs, hints,
                  params={"qubits": n_sites})


def default_pq_schedule(n1, n2, rounds=1):
    """Halving splits, one entry per round (fresh pairs are the caller's job
    beyond round one)."""
    return [((n1 // 2, n1 - n1 // 2), (n2 // 2, n2 - n2 // 2))] * rounds


def build_bipartite_recursion(n1, n2, pq_schedule=None):
    """Two-subsystem recursion: all-real split, then per round a
    product-of-blocks split followed by a standard block split.

    ``pq_schedule`` is a list of ``((p1, q1), (p2, q2))`` entries, one per
    round; every entry must differ from all previous ones and have strictly
    positive indices, otherwise :class:`ScheduleExhausted` is raised.
    """
    if n1 < 2 or n2 < 2:
        raise BadParams("need subsystem dimensions >= 2")
    if pq_schedule is None:
        pq_schedule = default_pq_schedule(n1, n2)
    n = n1 * n2
    invs = [Involution(n, True, np.eye(n), name="ai-oed")]
    hints = [{"type": "AI", "space": f"so({n})"}]
    seen = []
    for (p1, q1), (p2, q2) in pq_schedule:
        if min(p1, q1, p2, q2) < 1:
            raise ScheduleExhausted(
                f"no valid block split with indices (({p1},{q1}),({p2},{q2}))")
        if p1 + q1 != n1 or p2 + q2 != n2:
            raise BadParams("schedule indices must sum to subsystem dims")
        entry = ((p1, q1), (p2, q2))
        if entry in seen:
            raise ScheduleExhausted(f"index pair {entry} already used")
        seen.append(entry)
        theta, _ = build_aiii_oed([(p1, q1), (p2, q2)])
        invs.append(theta)
        hints.append({"type": "AIII-OED", "pq": entry})
        p = p1 * n2
        q = q1 * n2
        invs.append(standard("AIII", p=p, q=q))
        hints.append({"type": "AIII", "p": p, "q": q})
    return Scheme("bipartite", (n1, n2), invs, hints,
                  params={"dims": (n1, n2), "pq_schedule": list(pq_schedule)})


# ---------------------------------------------------------------------------
# standardizers


def _takagi_symmetric_unitary(w, tol):
    """f with f @ f.T = w for symmetric unitary w."""
    q = simdiag_commuting_symmetric(w.real, w.imag, tol=tol)
    lam = np.array([q[:, k] @ w @ q[:, k] for k in range(w.shape[0])])
    d = np.exp(0.5j * np.angle(lam))
    return q * d  # q @ diag(d)


def _pair_basis_antisym(w, tol):
    """Orthonormal v_k with v, tau(v) = w conj(v) spanning C^n pairwise."""
    n = w.shape[0]
    if n % 2:
        raise FactorizationFailed("antisymmetric-type w needs even dimension")
    vs, cols = [], []
    for k in range(n):
        v = np.zeros(n, dtype=complex)
        v[k] = 1.0
        if cols:
            u = np.column_stack(cols)
            v = v - u @ (u.conj().T @ v)
        nv = np.linalg.norm(v)
        if nv < 1e-8:
            continue
        v = v / nv
        tv = w @ v.conj()
        vs.append(v)
        cols.extend([v, tv])
        if len(vs) == n // 2:
            break
    if len(vs) != n // 2:
        raise FactorizationFailed("quaternionic pairing did not span")
    return vs


def build_standardizer(theta, tol=None):
    """Unitary f such that ``conjugate(theta, f.conj().T)`` is standard.

    Antiunitary types: f @ f.T = w (symmetric w, AI) or f @ J @ f.T = w
    (antisymmetric w, AII).  Linear types: f sorts the +-1 eigenspaces of w
    into diag(1_p, -1_q) with the +1 block first.
    """
    tol = resolve_tol(tol)
    w = theta.w
    n = theta.n
    kind = theta.antiunitary_kind()
    if kind == "AI":
        c = (w @ w.conj())[0, 0]
        f = _takagi_symmetric_unitary(w / np.sqrt(c), tol) * c ** 0.25
        expect = standard("AI", n=n)
    elif kind == "AII":
        vs = _pair_basis_antisym(w, tol)
        f = np.column_stack(vs + [-(w @ v.conj()) for v in vs])
        expect = standard("AII", n=n)
    else:
        c = (w @ w)[0, 0]
        wn = w / np.sqrt(c)
        diag = np.diag(wn)
        if mabs(wn - np.diag(diag)) < tol and mabs(diag.imag) < tol:
            order = np.argsort(-diag.real, kind="stable")
            f = np.zeros((n, n), dtype=complex)
            f[order, np.arange(n)] = 1.0
            p = int(np.sum(diag.real > 0))
        else:
            vals, vecs = np.linalg.eigh(wn)
            order = np.argsort(-vals, kind="stable")
            vals, f = vals[order], vecs[:, order]
            p = int(np.sum(vals > 0))
        expect = standard("AIII", p=p, q=n - p)

    conj_theta = conjugate(theta, f.conj().T)
    resid = max(mabs(conj_theta.apply_algebra(b) - expect.apply_algebra(b))
                for b in u_basis(n))
    if resid > max(tol, 1e-8):
        raise FactorizationFailed(
            f"standardizer residual {resid:.3e} for {theta.name or kind}")
    return f


# ---------------------------------------------------------------------------
# chain coordinates for the ccd-new recursion


def chain_j(m):
    """Real antisymmetric complex structure 1_m (x) [[0,-1],[1,0]]."""
    return np.kron(np.eye(m), np.array([[0.0, -1.0], [1.0, 0.0]]))


def chain_standardizer(n_sites):
    """Standardizer for the ccd-new recursion on N qubits.

    Maps the Pauli frame to coordinates where the parity involution is the
    standard AII (N odd) or AI (N even) form with respect to
    :func:`chain_j`, the next involution becomes plain conjugation (N odd)
    or conjugation by J (N even), and the embedded U(2^(N-1)) subgroup
    carries the (N-1)-qubit Pauli frame, so one standardizer serves both
    levels of a recursion step.
    """
    m = 2 ** (n_sites - 1)
    e0 = np.array([[1, 1j], [0, 0]]) / np.sqrt(2)   # |0><-y|
    e1 = np.array([[0, 0], [1, -1j]]) / np.sqrt(2)  # |1><+y|
    w = pauli_matrix("Y" * (n_sites - 1))
    if n_sites % 2 == 1:
        return np.kron(np.eye(m), e0) - np.kron(w, e1)
    return np.kron(np.eye(m), 1j * e0) + np.kron(w, e1)


# ---------------------------------------------------------------------------
# registry


def get_scheme(name, qubits=None, dims=None, pq_schedule=None):
    """Construct a shipped scheme by name."""
    if name == "ccd-new":
        if qubits is None:
            raise BadParams("ccd-new needs --qubits")
        return build_new_scheme(qubits)
    if name == "kg":
        if qubits is None:
            raise BadParams("kg needs --qubits")
        return build_kg_sequence(qubits)
    if name == "bipartite":
        if dims is None or len(dims) != 2:
            raise BadParams("bipartite needs two subsystem dims")
        return build_bipartite_recursion(dims[0], dims[1], pq_schedule)
    raise BadParams(f"unknown scheme {name!r}")


def scheme_catalog():
    """Descriptions of the shipped schemes (mirrors data/schemes.json)."""
    return {
        "ccd-new": {
            "params": ["qubits"],
            "levels": "2N involutions: parity split, then x/z site variants "
                      "moving from the last site to the first",
            "level_types": ["AII|AI", "CI|DIII", "..."],
            "involutions": [
                {"kind": "oed", "conjugate_entries": True,
                 "w": "tensor of site letters (catalog: Y...Y, Y..YX, Y..YZ, ...)"}],
        },
        "kg": {
            "params": ["qubits"],
            "levels": "2N-1 involutions: conjugation by Z then X at "
                      "successive sites",
            "level_types": ["AIII", "GxG", "..."],
            "involutions": [
                {"kind": "pauli-conjugation", "conjugate_entries": False,
                 "w": "Z or X at one site"}],
        },
        "bipartite": {
            "params": ["dims", "pq_schedule"],
            "levels": "1 + 2 per round: all-real split, product block split "
                      "(p_l, q_l), standard block split (p1*n2, q1*n2)",
            "level_types": ["AI", "AIII-OED", "AIII", "..."],
            "involutions": [
                {"kind": "ai-oed", "conjugate_entries": True, "w": "identity"},
                {"kind": "aiii-oed", "conjugate_entries": False,
                 "w": "tensor of diag(1_p, -1_q)"},
                {"kind": "aiii", "conjugate_entries": False,
                 "w": "diag(1_p, -1_q)"}],
        },
    }

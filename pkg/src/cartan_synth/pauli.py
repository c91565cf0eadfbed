"""Pauli-string basis of u(2^N).

A Pauli string is a plain Python string over the letters ``I X Y Z``, one
letter per qubit site ("YZX" acts on three sites).  Coefficients are stored
for the basis ``i * P_s`` so that elements of u(2^N) have real coefficients.
The canonical string order is lexicographic with I < X < Y < Z.
"""

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config import resolve_tol
from .errors import NotSkewHermitian
from .matcore import mabs, skew_hermiticity_defect

__all__ = [
    "PAULI_MATS", "LETTERS", "pauli_matrix", "weight", "all_strings",
    "strings_commute", "AlgebraElement", "expand", "assemble",
    "parity_split", "commuting_family",
]

LETTERS = "IXYZ"

PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@lru_cache(maxsize=None)
def pauli_matrix(s):
    """Dense matrix of the Pauli string ``s`` (Hermitian, unitary)."""
    out = np.array([[1.0 + 0j]])
    for c in s:
        out = np.kron(out, PAULI_MATS[c])
    return out


def weight(s):
    """Number of non-identity letters."""
    return sum(c != "I" for c in s)


@lru_cache(maxsize=None)
def all_strings(n_sites):
    """All 4^N Pauli strings on ``n_sites`` sites in canonical order."""
    return tuple("".join(t) for t in itertools.product(LETTERS, repeat=n_sites))


def strings_commute(s, t):
    """True iff the Pauli matrices of ``s`` and ``t`` commute.

    Two strings commute exactly when they anticommute on an even number of
    sites, i.e. the count of sites with two distinct non-identity letters
    is even.
    """
    odd = sum(1 for a, b in zip(s, t) if a != "I" and b != "I" and a != b)
    return odd % 2 == 0


@dataclass
class AlgebraElement:
    """Element of u(2^N) as a real coefficient map over ``i * P_s``."""

    n_sites: int
    coeffs: dict = field(default_factory=dict)

    @property
    def dim(self):
        return 2 ** self.n_sites

    def terms(self):
        """Coefficients as (string, value) pairs in canonical order."""
        return sorted(self.coeffs.items())

    def norm(self):
        return float(np.sqrt(sum(c * c for c in self.coeffs.values())))

    def assemble(self):
        n = self.dim
        out = np.zeros((n, n), dtype=complex)
        for s, c in self.coeffs.items():
            out += (1j * c) * pauli_matrix(s)
        return out

    def __add__(self, other):
        if self.n_sites != other.n_sites:
            raise ValueError("site-count mismatch")
        coeffs = dict(self.coeffs)
        for s, c in other.coeffs.items():
            coeffs[s] = coeffs.get(s, 0.0) + c
        return AlgebraElement(self.n_sites, {s: c for s, c in coeffs.items() if c != 0.0})


def expand(m, tol=None, prune=True):
    """Expand a skew-Hermitian matrix over the ``i * P_s`` basis.

    The coefficient of ``i * P_s`` is ``tr(m @ (i P_s)^dag) / 2^N`` and must
    come out real within tolerance.
    """
    tol = resolve_tol(tol)
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    n_sites = int(round(np.log2(n)))
    if 2 ** n_sites != n:
        raise ValueError(f"dimension {n} is not a power of two")
    if skew_hermiticity_defect(m) > max(tol, 1e-8) * max(1.0, mabs(m)):
        raise NotSkewHermitian(
            f"expand input defect {skew_hermiticity_defect(m):.3e}")
    coeffs = {}
    drop = tol if prune else 0.0
    for s in all_strings(n_sites):
        c = np.trace(m @ pauli_matrix(s)) / (1j * n)
        if abs(c.imag) > max(tol, 1e-8) * max(1.0, mabs(m)):
            raise NotSkewHermitian(
                f"coefficient of {s} has imaginary part {c.imag:.3e}")
        if abs(c.real) > drop:
            coeffs[s] = float(c.real)
    return AlgebraElement(n_sites, coeffs)


def assemble(element):
    """Dense skew-Hermitian matrix of an :class:`AlgebraElement`."""
    return element.assemble()


def parity_split(n_sites):
    """Pauli strings of odd and even weight (the identity string is even).

    The odd-weight strings span the subalgebra side of the parity split of
    u(2^N); the two lists partition all 4^N strings.
    """
    if n_sites < 1:
        raise ValueError("need at least one site")
    odd, even = [], []
    for s in all_strings(n_sites):
        (odd if weight(s) % 2 else even).append(s)
    return odd, even


def commuting_family(level):
    """The 4^l commuting strings on 2l sites: l-fold tensor power of
    {XX, YY, ZZ, II}."""
    if level < 0:
        raise ValueError("level must be >= 0")
    base = ["XX", "YY", "ZZ", "II"]
    fam = [""]
    for _ in range(level):
        fam = [s + b for s in fam for b in base]
    return fam

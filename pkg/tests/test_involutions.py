import numpy as np
import pytest

from cartan_synth import errors
from cartan_synth.involutions import (Subspace, apply, conjugate, split,
                                      standard, u_basis)
from cartan_synth.matcore import haar_unitary, mabs
from cartan_synth.pauli import pauli_matrix
from cartan_synth.schemes import build_ccd


def rand_skew(n, rng):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a - a.conj().T) / 2


def test_standard_ai_smallest():
    theta = standard("AI", n=2).validate()
    k, p = split(theta)
    assert (k.dim, p.dim) == (1, 3)
    # fixed space is the real antisymmetric generator, i.e. span{i * (iY)}
    gen = 1j * pauli_matrix("Y")  # real antisymmetric
    assert k.contains(gen, tol=1e-10)


def test_standard_aii_dimension():
    theta = standard("AII", n=4).validate()
    k, p = split(theta)
    assert k.dim == 10  # dim sp(2)
    assert p.dim == 6   # identity direction goes to P
    assert p.contains(1j * np.eye(4), tol=1e-10)


def test_standard_aiii_dimension():
    theta = standard("AIII", p=4, q=4).validate()
    k, p = split(theta)
    assert k.dim == 32  # two 4x4 skew-Hermitian blocks, identity included
    assert k.contains(1j * np.eye(8), tol=1e-10)


def test_standard_aiii_u2():
    theta = standard("AIII", p=1, q=1)
    k, p = split(theta)
    for s in ("I", "Z"):
        assert k.contains(1j * pauli_matrix(s), tol=1e-10)
    for s in ("X", "Y"):
        assert p.contains(1j * pauli_matrix(s), tol=1e-10)


def test_bad_params():
    with pytest.raises(errors.BadParams):
        standard("AII", n=3)
    with pytest.raises(errors.BadParams):
        standard("AIII", p=0, q=2)


def test_split_ccd3_matches_parity():
    from cartan_synth.pauli import parity_split
    theta = build_ccd(3).validate()
    k, p = split(theta)
    odd, even = parity_split(3)
    assert k.dim == len(odd) and p.dim == len(even)
    for s in odd:
        assert k.contains(1j * pauli_matrix(s), tol=1e-10)
    for s in even:
        assert p.contains(1j * pauli_matrix(s), tol=1e-10)


def test_conjugate_identity_noop():
    theta = standard("AI", n=4)
    theta2 = conjugate(theta, np.eye(4))
    assert mabs(theta2.w - theta.w) == 0.0
    assert theta2.conjugate_entries


def test_conjugate_transforms_split():
    rng = np.random.default_rng(3)
    s = haar_unitary(6, rng)
    theta = standard("AIII", p=2, q=4)
    theta2 = conjugate(theta, s)
    theta2.validate()
    k, _ = split(theta)
    k2, _ = split(theta2)
    # Ad_s K = K'
    for b in k.basis:
        assert k2.contains(s @ b @ s.conj().T, tol=1e-9)


def test_conjugate_finagler_ai():
    from paper_data import FINAGLER
    theta = standard("AI", n=8)
    theta2 = conjugate(theta, FINAGLER)
    k, _ = split(theta)
    k2, _ = split(theta2)
    for b in k.basis:
        assert k2.contains(FINAGLER @ b @ FINAGLER.T, tol=1e-9)


@pytest.mark.parametrize("make", [
    lambda: standard("AI", n=4),
    lambda: standard("AII", n=4),
    lambda: standard("AIII", p=1, q=3),
    lambda: build_ccd(2),
])
def test_cartan_pair_relations(make):
    theta = make().validate()
    k, p = split(theta)
    assert k.dim + p.dim == theta.n ** 2
    worst = 0.0
    for x in k.basis:
        for y in k.basis:
            worst = max(worst, k.residual(x @ y - y @ x))
        for y in p.basis:
            worst = max(worst, p.residual(x @ y - y @ x))
    for x in p.basis:
        for y in p.basis:
            worst = max(worst, k.residual(x @ y - y @ x))
    assert worst < 1e-9
    # K and P orthogonal under the trace inner product
    for x in k.basis:
        assert mabs(p.project(x)) < 1e-10


def test_involution_is_automorphism():
    rng = np.random.default_rng(5)
    theta = build_ccd(2)
    for _ in range(5):
        x, y = rand_skew(4, rng), rand_skew(4, rng)
        lhs = theta.apply_algebra(x @ y - y @ x)
        tx, ty = theta.apply_algebra(x), theta.apply_algebra(y)
        assert mabs(lhs - (tx @ ty - ty @ tx)) < 1e-10
        assert mabs(theta.apply_algebra(theta.apply_algebra(x)) - x) < 1e-10


def test_apply_levels():
    theta = standard("AIII", p=1, q=1)
    x = 1j * pauli_matrix("Z")
    assert mabs(apply(theta, x, "algebra") - x) < 1e-14
    u = np.diag([1j, -1j])
    assert mabs(apply(theta, u, "group") - u) < 1e-14
    with pytest.raises(ValueError):
        apply(theta, x, "nonsense")


def test_subspace_projection_roundtrip():
    basis = u_basis(3)
    sub = Subspace.from_matrices(3, list(basis[:4]))
    rng = np.random.default_rng(0)
    x = rand_skew(3, rng)
    px = sub.project(x)
    assert mabs(sub.project(px) - px) < 1e-12
    assert sub.residual(px) < 1e-12

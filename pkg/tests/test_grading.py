import numpy as np
import pytest

from cartan_synth import errors
from cartan_synth.grading import (build_grading, center_split, grading_report,
                                  recursive_sequences,
                                  validate_graded_commutation)
from cartan_synth.involutions import Involution, Subspace, conjugate, standard
from cartan_synth.matcore import haar_unitary, mabs
from cartan_synth.pauli import pauli_matrix
from cartan_synth.schemes import (build_bipartite_recursion, build_kg_sequence,
                                  build_new_scheme)


def test_single_ai_blocks():
    g = build_grading([standard("AI", n=2)])
    assert g.dims() == {"0": 1, "1": 3}


def test_new_scheme_n3_chain_dims():
    scheme = build_new_scheme(3)
    g = build_grading(scheme.involutions)
    assert g.blocks["000000"].dim == 1
    seq = recursive_sequences(g, hints=scheme.level_hints)
    assert [s.dim for s in seq.s0] == [36, 16, 6, 4, 3, 1]
    # telescoping: dim L_{0^j} = dim L_{0^{j+1}} + dim L_{0^j 1}
    dims0 = [64] + [s.dim for s in seq.s0]
    for j in range(6):
        assert dims0[j] == dims0[j + 1] + seq.s1[j].dim


def test_new_scheme_n1_chain():
    scheme = build_new_scheme(1)
    g = build_grading(scheme.involutions)
    seq = recursive_sequences(g)
    assert [s.dim for s in seq.s0] == [3, 1]  # sp(1), u(1)


def test_kg_n2_block_dims():
    scheme = build_kg_sequence(2)
    g = build_grading(scheme.involutions)
    # span{1 (x) u(2)} including the global phase direction; the published
    # su-convention chain counts 3 here (the center is split off separately)
    assert g.blocks["000"].dim == 2
    assert g.prefix_space("00").dim == 4
    assert g.prefix_space("01").dim == 4  # sigma_z (x) u(2)


def test_kg_n3_terminal_dim():
    scheme = build_kg_sequence(3)
    g = build_grading(scheme.involutions)
    # terminal block: span{1 (x) sigma_z} plus the global phase direction
    assert g.blocks["0" * 5].dim == 2
    seq = recursive_sequences(g)
    assert seq.s1[4].dim == 2  # span{1_4 (x) sigma_{x,y}}


def test_graded_commutation_shipped_schemes():
    for scheme in (build_new_scheme(2), build_kg_sequence(2),
                   build_bipartite_recursion(2, 3)):
        g = build_grading(scheme.involutions)
        assert validate_graded_commutation(g) < 1e-9


def test_noncommuting_involutions_rejected():
    rng = np.random.default_rng(4)
    s = haar_unitary(3, rng)
    a = standard("AI", n=3)
    b = conjugate(standard("AI", n=3), s)
    with pytest.raises(errors.NonCommutingInvolutions):
        build_grading([a, b])


def test_center_split_u1():
    sub = Subspace.from_matrices(2, [1j * np.eye(2) / np.sqrt(2)])
    semi, center = center_split(sub)
    assert center.dim == 1 and semi.dim == 0


def test_center_split_kg_l0():
    # span{1 (x) A, sigma_z (x) B}: center is spanned by i sigma_z (x) 1
    # and the global phase direction
    scheme = build_kg_sequence(2)
    g = build_grading(scheme.involutions)
    l0 = g.prefix_space("0")
    semi, center = center_split(l0)
    assert center.dim == 2
    assert center.contains(1j * pauli_matrix("ZI"), tol=1e-9)
    assert center.contains(1j * np.eye(4), tol=1e-9)
    assert semi.dim == l0.dim - 2


def test_center_split_ai_aii_mix():
    # combining the real and symplectic splits of u(4) leaves
    # sp(2) n so(4), which has a nontrivial center
    g = build_grading([standard("AI", n=4), standard("AII", n=4)])
    l00 = g.blocks["00"]
    assert l00.dim == 4  # u(2) embedded
    semi, center = center_split(l00)
    assert center.dim == 1
    from cartan_synth.involutions import standard_j
    assert center.contains(standard_j(2).astype(complex), tol=1e-9)


def test_center_split_rejects_non_subalgebra():
    # span{iX} plus span{iY} is not closed: [iX, iY] ~ iZ
    mats = [1j * pauli_matrix("X") / np.sqrt(2),
            1j * pauli_matrix("Y") / np.sqrt(2)]
    sub = Subspace.from_matrices(2, mats)
    with pytest.raises(errors.NotASubalgebra):
        center_split(sub)


def test_sequences_cartan_relations_checked():
    scheme = build_new_scheme(2)
    g = build_grading(scheme.involutions)
    recursive_sequences(g, check=True)  # should not raise


def test_report_contains_dims():
    scheme = build_new_scheme(2)
    g = build_grading(scheme.involutions)
    seq = recursive_sequences(g, hints=scheme.level_hints)
    text = grading_report(g, seq)
    assert "n=4 p=4" in text
    assert "level 0" in text


def test_empty_blocks_kept():
    scheme = build_new_scheme(2)
    g = build_grading(scheme.involutions)
    assert len(g.blocks) == 16
    assert any(sp.dim == 0 for sp in g.blocks.values())

"""Recursive Cartan (KAK) factorization of unitaries on multipartite systems.

Factor a unitary into an ordered product of exponentials of tensor-product
generators: build commuting involutions of u(n), intersect them into a
Z2^p grading, and solve the level-by-level KAK factorization along the
nested subalgebra chain.
"""

from .config import DEFAULT_TOL
from .errors import *  # noqa: F401,F403
from .grading import (Grading, RecursiveSequence, build_grading, center_split,
                      grading_report, recursive_sequences)
from .involutions import Involution, Subspace, apply, conjugate, split, standard
from .kak import (KakResult, cartan_subalgebra, kak_AI, kak_AII, kak_AIII,
                  kak_BDI, kak_CI, kak_DIII, kak_general, solve_embedded_u2)
from .matcore import (eig_normal, expm_skew, haar_unitary,
                      principal_log_unitary, simdiag_commuting_symmetric,
                      sqrt_unitary_principal)
from .pauli import (AlgebraElement, assemble, commuting_family, expand,
                    parity_split, pauli_matrix, weight)
from .schemes import (Scheme, build_aiii_oed, build_bipartite_recursion,
                      build_ccd, build_kg_sequence, build_new_scheme,
                      build_oed, build_standardizer, get_scheme,
                      scheme_catalog)
from .synth import (Factorization, Leaf, decompose, factor_to_exponential,
                    reconstruct_and_verify)

__version__ = "0.1.0"

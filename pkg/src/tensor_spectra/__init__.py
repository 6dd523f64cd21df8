"""Counting, solving and approximating singular vector tuples of tensors.

Layers (each importable on its own):

  polyring  exact truncated polynomial arithmetic (the counting substrate)
  counts    exact tuple counts: generic, partially symmetric, pencils
  tensor    dense tensors: contractions, unfoldings, ranks, JSON IO
  spectra   multi-start Newton enumeration, polishing, classification
  approx    best rank-one / symmetric rank-one / rank-(r1..rd) approximation

Command line: ``tensor-spectra --help`` (or ``python -m tensor_spectra``).
"""

from .counts import (DimVector, Partition, cartwright_sturmfels,
                     partial_symmetric_count, pencil_eigen_count,
                     singular_tuple_count, reference_table, two_block_count,
                     two_block_double_sum)
from .polyring import (Monomial, TruncPoly, coefficient, poly_add, poly_mul,
                       quotient_factor)
from .tensor import (DenseTensor, UnfoldedMatrix, almost_diagonal,
                     contract_all_but, contract_full, diagonal, embed, fold,
                     from_json_dict, hs_norm, inner, load_tensor, mode_rank,
                     partial_symmetrize, random, rank_feasible, save_tensor,
                     symmetrize_last, to_json_dict, unfold)
from .spectra import (CapExceeded, Classification, InvariantViolation,
                      SingularTuple, SolveConfig, SolveReport, classify,
                      cyclic_permutation, enumerate_diagonal_333,
                      hopm_singular, hopm_step, newton_polish,
                      pencil_eigs_almost_diagonal, solve_all,
                      solve_all_partial, verify_diagonal_333)
from .approx import (RankOneResult, RankRResult, best_rank_one,
                     best_rank_one_symmetric, best_rank_r,
                     omega_rank_r_experiment, rank_one_critical_values,
                     svd_oracle)

__version__ = "0.1.0"

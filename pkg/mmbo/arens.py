r""" Splitting of a selfadjoint relation `C = S (+) ({0} x U⊥)` into a
selfadjoint operator `S` on `U = dom(C)` and its pure multivalued part,
plus the square root of a monotone `S`. """
from __future__ import absolute_import, division, print_function

import dataclasses
import logging

import numpy as np
from scipy import linalg

from mmbo.const import EQUAL_TOL, MONOTONE_TOL
from mmbo.errors import InconsistencyError, NotMonotone, NotSelfadjoint
from mmbo.hilbert import (HilbertSpace, Subspace, complement, intersection,
                          subspace_equal)
from mmbo.relation import LinearRelation, selfadjoint_defect

__all__ = ['ArensDecomposition', 'decompose', 'reconstruct', 'sqrt_operator']

logger = logging.getLogger(__name__)

# tolerance on the Hermitian defect of the extracted operator part, the
# stored matrix is symmetrized afterwards
_HERMITIAN_RTOL = 1e-9


@dataclasses.dataclass(frozen=True)
class ArensDecomposition:
  r"""
  Attributes:
    space : the Hilbert space `H`
    u_space : `U`, the domain of the relation
    s_matrix : Hermitian `[dim U, dim U]` matrix of `S` in the orthonormal
      basis `u_space.basis`
    mult_part : `U⊥`, equal to `C[{0}]`
  """
  space: HilbertSpace
  u_space: Subspace
  s_matrix: np.ndarray
  mult_part: Subspace

  @property
  def u_dim(self) -> int:
    return self.u_space.dim

  @property
  def sqrt_domain(self) -> Subspace:
    r""" `D(√S)`, in finite dimension this is all of `U` """
    return self.u_space

  @property
  def eigenvalues(self) -> np.ndarray:
    if self.u_dim == 0:
      return np.zeros((0,))
    return np.linalg.eigvalsh(self.s_matrix)

  def is_monotone(self, tol=MONOTONE_TOL) -> bool:
    eigs = self.eigenvalues
    if eigs.size == 0:
      return True
    return bool(eigs[0] >= -tol * max(float(np.max(np.abs(eigs))), 1.))

  def operator(self) -> np.ndarray:
    r""" `S` as a matrix on the whole space, zero on `U⊥` """
    q = self.u_space.basis
    return q @ self.s_matrix @ q.conj().T @ self.space.gram


def decompose(c: LinearRelation) -> ArensDecomposition:
  r""" Decompose a selfadjoint relation

  `U` is the domain of `C`, `S` is read off `C ∩ (U (+) U)`.

  Raises:
    NotSelfadjoint : when `C ≠ C*`, `certificate` is the largest principal
      angle between the two graphs
  """
  if not c.is_endomorphism:
    raise ValueError("Only relations on a single space can be decomposed")
  defect = selfadjoint_defect(c)
  if not defect < EQUAL_TOL:
    raise NotSelfadjoint("Relation is not selfadjoint, largest principal "
                         "angle to its adjoint: %g" % defect,
                         certificate=defect)
  space = c.src
  u_space = c.domain()
  mult_part = c.multivalued_part()
  if not subspace_equal(mult_part, complement(u_space)):
    raise InconsistencyError("Multivalued part (dim %d) is not the "
                             "complement of the domain (dim %d)" %
                             (mult_part.dim, u_space.dim))
  if u_space.dim == 0:
    return ArensDecomposition(space, u_space, np.zeros((0, 0),
                                                       dtype=np.complex128),
                              mult_part)
  lifted = Subspace(c.graph.space, linalg.block_diag(u_space.basis,
                                                     u_space.basis))
  part = intersection(c.graph, lifted)
  if part.dim != u_space.dim:
    raise InconsistencyError("Operator part has dimension %d on a domain of "
                             "dimension %d" % (part.dim, u_space.dim))
  n = space.dim
  coords = u_space.basis.conj().T @ space.gram
  a = coords @ part.basis[:n]
  b = coords @ part.basis[n:]
  # s @ a = b
  s = np.linalg.solve(a.T, b.T).T
  asym = np.linalg.norm(s - s.conj().T)
  if asym > _HERMITIAN_RTOL * max(np.linalg.norm(s), 1.):
    raise InconsistencyError("Operator part is not Hermitian, defect %g" %
                             asym)
  s = 0.5 * (s + s.conj().T)
  logger.debug("Decomposed relation: dim U=%d, dim U⊥=%d", u_space.dim,
               mult_part.dim)
  return ArensDecomposition(space, u_space, s, mult_part)


def reconstruct(dec: ArensDecomposition) -> LinearRelation:
  r""" `S (+) ({0} x U⊥)` """
  q, perp = dec.u_space.basis, dec.mult_part.basis
  n = dec.space.dim
  x = np.hstack([q, np.zeros((n, perp.shape[1]), dtype=np.complex128)])
  y = np.hstack([q @ dec.s_matrix, perp])
  return LinearRelation.from_spanning(dec.space, dec.space, x, y)


def sqrt_operator(dec: ArensDecomposition, tol=MONOTONE_TOL) -> np.ndarray:
  r""" Hermitian PSD square root of `s_matrix`

  Eigenvalues in `[-tol * max(|λ|, 1), 0)` are clamped to 0.

  Raises:
    NotMonotone : when `S` has a clearly negative eigenvalue
  """
  s = dec.s_matrix
  if s.shape[0] == 0:
    return np.zeros((0, 0), dtype=np.complex128)
  eigs, vecs = np.linalg.eigh(s)
  floor = -tol * max(float(np.max(np.abs(eigs))), 1.)
  if eigs[0] < floor:
    raise NotMonotone("S has negative eigenvalue %g" % eigs[0],
                      witness=dec.u_space.basis @ vecs[:, 0],
                      min_eigenvalue=float(eigs[0]))
  root = np.sqrt(np.clip(eigs, 0., None))
  r = (vecs * root) @ vecs.conj().T
  return 0.5 * (r + r.conj().T)

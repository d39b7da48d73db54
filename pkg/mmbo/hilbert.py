r""" Finite dimensional complex Hilbert spaces with arbitrary Gram inner
products and a calculus of their subspaces.

The inner product is linear in the second and conjugate linear in the first
argument: `inner(x, y) = x^H W y`.
All the geometry is done in the coordinates of the Cholesky factor
`W = R^H R`, where the Gram inner product becomes the Euclidean one.
"""
from __future__ import absolute_import, division, print_function

import logging
from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from mmbo.const import (EQUAL_TOL, GRAM_CONDITION, GRAM_HERMITIAN_RTOL,
                        RANK_RTOL)
from mmbo.errors import InvalidGram

__all__ = [
    'HilbertSpace', 'Vector', 'Subspace', 'orthonormal_basis', 'complement',
    'subspace_equal', 'principal_angles', 'image_preimage', 'intersection',
    'subspace_sum', 'null_space'
]

logger = logging.getLogger(__name__)


def _as_matrix(x, rows=None) -> np.ndarray:
  x = np.asarray(x, dtype=np.complex128)
  if x.ndim == 1:
    x = x[:, None]
  if x.ndim != 2:
    raise ValueError("Expect a matrix but given shape: %s" % str(x.shape))
  if rows is not None and x.shape[0] != rows:
    raise ValueError("Expect matrix with %d rows but given shape %s" %
                     (rows, str(x.shape)))
  return x


def null_space(matrix, rtol=RANK_RTOL,
               scale: Optional[float] = None) -> np.ndarray:
  r""" Euclidean orthonormal basis of the null space of `matrix`, singular
  values at or below `rtol * max(largest singular value, scale)` count as
  zero """
  matrix = _as_matrix(matrix)
  p, n = matrix.shape
  if p == 0 or n == 0:
    return np.eye(n, dtype=np.complex128)
  _, s, vh = np.linalg.svd(matrix, full_matrices=True)
  reference = 0. if s.size == 0 else float(s[0])
  if scale is not None:
    reference = max(reference, float(scale))
  if reference == 0.:
    return np.eye(n, dtype=np.complex128)
  rank = int(np.sum(s > rtol * reference))
  return vh[rank:].conj().T


# ===========================================================================
# Spaces and vectors
# ===========================================================================
class HilbertSpace(object):
  r""" A complex space `C^dim` with the inner product `x^H W y`

  Arguments:
    gram : `[dim, dim]` Hermitian positive definite matrix
    name : optional identity, only used for printing
  """

  def __init__(self, gram, name: Optional[str] = None):
    gram = np.array(gram, dtype=np.complex128)
    if gram.ndim != 2 or gram.shape[0] != gram.shape[1] or gram.shape[0] < 1:
      raise InvalidGram("Gram must be a non-empty square matrix, given: %s" %
                        str(gram.shape))
    scale = np.linalg.norm(gram)
    asym = np.linalg.norm(gram - gram.conj().T)
    if asym > GRAM_HERMITIAN_RTOL * scale:
      raise InvalidGram("Gram is not Hermitian, |W - W^H| = %g" % asym)
    gram = 0.5 * (gram + gram.conj().T)
    eigs = np.linalg.eigvalsh(gram)
    if eigs[0] <= GRAM_CONDITION * eigs[-1]:
      raise InvalidGram("Gram is not positive definite, eigenvalues in "
                        "[%g, %g]" % (eigs[0], eigs[-1]))
    self._gram = gram
    self._gram.setflags(write=False)
    # W = R^H R
    self._chol = linalg.cholesky(gram, lower=False)
    self._chol.setflags(write=False)
    self.name = name

  @classmethod
  def euclidean(cls, dim: int, name=None) -> 'HilbertSpace':
    return cls(np.eye(int(dim)), name=name)

  @property
  def dim(self) -> int:
    return self._gram.shape[0]

  @property
  def gram(self) -> np.ndarray:
    return self._gram

  @property
  def chol(self) -> np.ndarray:
    return self._chol

  def same_as(self, other: 'HilbertSpace') -> bool:
    if other is self:
      return True
    return (isinstance(other, HilbertSpace) and other.dim == self.dim and
            np.allclose(other.gram, self.gram, rtol=1e-14, atol=0.))

  def direct_sum(self, other: 'HilbertSpace') -> 'HilbertSpace':
    r""" `H (+) K` with the block diagonal Gram """
    name = None
    if self.name is not None and other.name is not None:
      name = '%s+%s' % (self.name, other.name)
    return HilbertSpace(linalg.block_diag(self.gram, other.gram), name=name)

  # ====== geometry ====== #
  def inner(self, x, y):
    r""" `x^H W y`, a scalar for vectors and the Gram block for matrices """
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    return x.conj().T @ self._gram @ y

  def norm(self, x) -> float:
    return float(np.linalg.norm(self._chol @ np.asarray(x)))

  def to_orthonormal(self, x) -> np.ndarray:
    return self._chol @ np.asarray(x, dtype=np.complex128)

  def from_orthonormal(self, x) -> np.ndarray:
    return linalg.solve_triangular(self._chol,
                                   np.asarray(x, dtype=np.complex128),
                                   lower=False)

  def operator_norm(self, matrix, target: 'HilbertSpace' = None) -> float:
    r""" Norm of `matrix: self -> target` induced by the Gram norms """
    target = self if target is None else target
    matrix = _as_matrix(matrix, rows=target.dim)
    tilde = target.chol @ matrix
    tilde = linalg.solve_triangular(self._chol.T, tilde.T, lower=True).T
    return float(np.linalg.norm(tilde, 2))

  def vector(self, coords) -> 'Vector':
    return Vector(self, coords)

  def zero(self) -> 'Subspace':
    return Subspace(self, np.zeros((self.dim, 0), dtype=np.complex128))

  def whole(self) -> 'Subspace':
    return Subspace(self, self.from_orthonormal(np.eye(self.dim)))

  def __repr__(self):
    return "<HilbertSpace%s dim=%d>" % (
        '' if self.name is None else " '%s'" % self.name, self.dim)


class Vector(object):
  r""" Coordinates of an element of a `HilbertSpace` """

  def __init__(self, space: HilbertSpace, coords):
    coords = np.array(coords, dtype=np.complex128).ravel()
    if coords.shape[0] != space.dim:
      raise ValueError("Vector of length %d does not belong to %s" %
                       (coords.shape[0], str(space)))
    coords.setflags(write=False)
    self.space = space
    self.coords = coords

  def inner(self, other: 'Vector') -> complex:
    return complex(self.space.inner(self.coords, other.coords))

  def norm(self) -> float:
    return self.space.norm(self.coords)

  def __add__(self, other):
    return Vector(self.space, self.coords + other.coords)

  def __sub__(self, other):
    return Vector(self.space, self.coords - other.coords)

  def __mul__(self, scalar):
    return Vector(self.space, self.coords * scalar)

  __rmul__ = __mul__

  def __repr__(self):
    return "<Vector %s in %s>" % (np.array2string(self.coords,
                                                  precision=4), self.space)


# ===========================================================================
# Subspaces
# ===========================================================================
class Subspace(object):
  r""" A subspace given by a Gram-orthonormal basis.

  Instances are created by `orthonormal_basis` (or internally from bases
  that are already orthonormal), the constructor does not orthonormalize.
  """

  def __init__(self, space: HilbertSpace, basis):
    basis = _as_matrix(basis, rows=space.dim)
    if basis.shape[1] > space.dim:
      raise ValueError("Subspace basis has more columns than dimensions")
    basis = np.array(basis)
    basis.setflags(write=False)
    self.space = space
    self.basis = basis

  @property
  def dim(self) -> int:
    return self.basis.shape[1]

  @property
  def codim(self) -> int:
    return self.space.dim - self.dim

  @property
  def tilde(self) -> np.ndarray:
    r""" The basis in Cholesky coordinates (Euclidean orthonormal) """
    return self.space.to_orthonormal(self.basis)

  def projector(self) -> np.ndarray:
    r""" Matrix of the Gram-orthogonal projection onto this subspace """
    return self.basis @ (self.basis.conj().T @ self.space.gram)

  def project(self, x) -> np.ndarray:
    return self.projector() @ np.asarray(x, dtype=np.complex128)

  def distance(self, x) -> float:
    x = np.asarray(x, dtype=np.complex128)
    return self.space.norm(x - self.project(x))

  def contains(self, x, tol=EQUAL_TOL) -> bool:
    x = np.asarray(x, dtype=np.complex128)
    return self.distance(x) <= tol * max(1., self.space.norm(x))

  def orthonormality_error(self) -> float:
    if self.dim == 0:
      return 0.
    g = self.space.inner(self.basis, self.basis)
    return float(np.max(np.abs(g - np.eye(self.dim))))

  def __repr__(self):
    return "<Subspace dim=%d of %s>" % (self.dim, self.space)


def _gram_schmidt(tilde: np.ndarray, cutoff: float) -> np.ndarray:
  r""" Modified Gram-Schmidt with column pivoting and one reorthogonalization
  pass, columns whose residual norm falls to `cutoff` or below are dropped """
  rows = tilde.shape[0]
  work = np.array(tilde, dtype=np.complex128)
  q = np.zeros((rows, 0), dtype=np.complex128)
  while q.shape[1] < rows and work.shape[1] > 0:
    norms = np.linalg.norm(work, axis=0)
    j = int(np.argmax(norms))
    if norms[j] <= cutoff:
      break
    v = work[:, j]
    v = v - q @ (q.conj().T @ v)
    length = np.linalg.norm(v)
    if length <= cutoff:
      break
    v = v / length
    q = np.hstack([q, v[:, None]])
    work = np.delete(work, j, axis=1)
    work = work - np.outer(v, v.conj() @ work)
  return q


def orthonormal_basis(space: HilbertSpace, spanning, rtol=RANK_RTOL,
                      scale: Optional[float] = None) -> Subspace:
  r""" Gram-orthonormal basis of the column space of `spanning`

  Orthonormalization runs in Cholesky coordinates. A column counts as
  dependent once its residual norm is at most
  `rtol * max(largest column norm, scale)`, so `scale` lets callers state
  the magnitude the columns would have without cancellation (e.g. the norm
  of the map whose image is taken). A zero matrix gives the zero subspace.
  """
  spanning = _as_matrix(spanning, rows=space.dim)
  if spanning.shape[1] == 0:
    return space.zero()
  tilde = space.to_orthonormal(spanning)
  largest = float(np.max(np.linalg.norm(tilde, axis=0)))
  reference = largest if scale is None else max(largest, float(scale))
  if reference == 0.:
    return space.zero()
  q = _gram_schmidt(tilde, rtol * reference)
  if q.shape[1] < spanning.shape[1]:
    logger.debug("orthonormal_basis: %d spanning vectors, rank %d",
                 spanning.shape[1], q.shape[1])
  return Subspace(space, space.from_orthonormal(q))


def complement(sub: Subspace) -> Subspace:
  r""" Gram-orthogonal complement, `dim + codim = space.dim` exactly """
  space = sub.space
  if sub.dim == 0:
    return space.whole()
  if sub.dim == space.dim:
    return space.zero()
  q, _ = linalg.qr(sub.tilde, mode='full')
  return Subspace(space, space.from_orthonormal(q[:, sub.dim:]))


def subspace_sum(a: Subspace, b: Subspace, rtol=RANK_RTOL) -> Subspace:
  _check_same_space(a, b)
  # both bases are Gram-orthonormal
  return orthonormal_basis(a.space,
                           np.hstack([a.basis, b.basis]),
                           rtol=rtol,
                           scale=1.)


def intersection(a: Subspace, b: Subspace, rtol=RANK_RTOL) -> Subspace:
  _check_same_space(a, b)
  return complement(subspace_sum(complement(a), complement(b), rtol=rtol))


def principal_angles(a: Subspace, b: Subspace) -> np.ndarray:
  r""" Principal angles (descending) between two subspaces """
  _check_same_space(a, b)
  if a.dim == 0 or b.dim == 0:
    return np.zeros((0,))
  return linalg.subspace_angles(a.tilde, b.tilde)


def subspace_equal(a: Subspace, b: Subspace, tol=EQUAL_TOL) -> bool:
  _check_same_space(a, b)
  if a.dim != b.dim:
    return False
  if a.dim == 0:
    return True
  return bool(np.max(principal_angles(a, b)) < tol)


def image_preimage(sub: Subspace,
                   matrix,
                   direction: str = 'forward',
                   space: HilbertSpace = None,
                   rtol=RANK_RTOL) -> Subspace:
  r""" Image or preimage of a subspace under a linear map

  Arguments:
    sub : the subspace
    matrix : the linear map, `[target.dim, source.dim]`
    direction : 'forward' returns `span(matrix @ sub)`, 'inverse' returns
      `{x : matrix @ x in sub}`
    space : the other space, i.e. the target space for 'forward' and the
      source space for 'inverse' (default: `sub.space`)
  """
  direction = str(direction).lower()
  space = sub.space if space is None else space
  if direction == 'forward':
    matrix = _as_matrix(matrix, rows=space.dim)
    if matrix.shape[1] != sub.space.dim:
      raise ValueError("Map with %d columns cannot act on %s" %
                       (matrix.shape[1], sub.space))
    # the basis is orthonormal, image columns are bounded by the map norm
    return orthonormal_basis(space,
                             matrix @ sub.basis,
                             rtol=rtol,
                             scale=sub.space.operator_norm(matrix, space))
  elif direction == 'inverse':
    matrix = _as_matrix(matrix, rows=sub.space.dim)
    if matrix.shape[1] != space.dim:
      raise ValueError("Map with %d columns cannot act on %s" %
                       (matrix.shape[1], space))
    perp = complement(sub)
    if perp.dim == 0:
      return space.whole()
    # rows of the constraints are orthonormal in Cholesky coordinates of
    # both sides, their scale is the norm of the map
    tilde_map = sub.space.chol @ matrix
    tilde_map = linalg.solve_triangular(space.chol.T, tilde_map.T,
                                        lower=True).T
    constraints = perp.tilde.conj().T @ tilde_map
    kernel = null_space(constraints,
                        rtol=rtol,
                        scale=float(np.linalg.norm(tilde_map, 2)))
    return orthonormal_basis(space, space.from_orthonormal(kernel), rtol=rtol)
  raise ValueError("direction must be 'forward' or 'inverse', given: %s" %
                   direction)


def _check_same_space(*subs: Sequence[Subspace]):
  first = subs[0].space
  for s in subs[1:]:
    if not first.same_as(s.space):
      raise ValueError("Subspaces live in different spaces: %s and %s" %
                       (first, s.space))

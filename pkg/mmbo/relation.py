r""" Linear relations `C ⊆ X (+) Y` stored as subspaces of the product
space, together with their calculus: inverse, adjoint, pre-/post-sets,
`1 + λC`, composition, (maximal) monotonicity, selfadjointness and the
resolvent `(1 + λC)^{-1}`.
"""
from __future__ import absolute_import, division, print_function

import dataclasses
import logging
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy import linalg

from mmbo.const import (EQUAL_TOL, MINTY_LAMBDAS, MONOTONE_TOL, RANK_RTOL,
                        RESIDUAL_RTOL, MonotoneKind)
from mmbo.errors import InconsistencyError, NotMaximalMonotone
from mmbo.hilbert import (HilbertSpace, Subspace, Vector, complement,
                          image_preimage, intersection, null_space,
                          orthonormal_basis, principal_angles, subspace_equal)
from mmbo.utils.io_utils import decode_complex, encode_complex

__all__ = [
    'LinearRelation', 'MonotonicityReport', 'adjoint',
    'adjoint_via_complement', 'inverse', 'pre_set', 'post_set', 'one_plus',
    'invert_pre_post', 'compose', 'is_monotone', 'is_maximal_monotone',
    'is_selfadjoint', 'selfadjoint_defect', 'resolvent_matrix',
    'resolvent_apply', 'resolvent_norm', 'random_gram', 'random_monotone',
    'relation_to_dict', 'relation_from_dict'
]

logger = logging.getLogger(__name__)


def _as_pairs(x, rows, transpose=False) -> np.ndarray:
  r""" matrix with `rows` rows (or columns when `transpose`), a 1-D input is
  a single column (row) """
  x = np.asarray(x, dtype=np.complex128)
  if x.ndim == 1:
    x = x[None, :] if transpose else x[:, None]
  if x.size == 0:
    x = np.zeros((0, rows) if transpose else (rows, 0), dtype=np.complex128)
  expect = x.shape[1] if transpose else x.shape[0]
  if x.ndim != 2 or expect != rows:
    raise ValueError("Expect %d %s but given shape %s" %
                     (rows, 'columns' if transpose else 'rows', str(x.shape)))
  return x


# ===========================================================================
# The relation type
# ===========================================================================
class LinearRelation(object):
  r""" A linear relation, i.e. a subspace `graph` of `src (+) dst`

  The graph basis is split as `[A; B]` with `A = top` (`src` part) and
  `B = bottom` (`dst` part), the pairs `(A α, B α)` run over the relation.
  """

  def __init__(self, src: HilbertSpace, dst: HilbertSpace, graph: Subspace):
    if graph.space.dim != src.dim + dst.dim:
      raise ValueError("Graph of dimension %d cannot live in %s (+) %s" %
                       (graph.space.dim, src, dst))
    self.src = src
    self.dst = dst
    self.graph = graph

  # ====== constructors ====== #
  @staticmethod
  def product(src: HilbertSpace, dst: HilbertSpace) -> HilbertSpace:
    return src.direct_sum(dst)

  @classmethod
  def from_spanning(cls, src, dst, x, y, rtol=RANK_RTOL) -> 'LinearRelation':
    r""" The span of the pairs `(x[:, i], y[:, i])` """
    x = _as_pairs(x, src.dim)
    y = _as_pairs(y, dst.dim)
    if x.shape[1] != y.shape[1]:
      raise ValueError("Mismatch number of pairs: %d and %d" %
                       (x.shape[1], y.shape[1]))
    prod = cls.product(src, dst)
    return cls(src, dst, orthonormal_basis(prod, np.vstack([x, y]),
                                           rtol=rtol))

  @classmethod
  def from_operator(cls, space: HilbertSpace, matrix,
                    dst: HilbertSpace = None) -> 'LinearRelation':
    r""" Graph of the everywhere defined operator `matrix: space -> dst` """
    dst = space if dst is None else dst
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.shape != (dst.dim, space.dim):
      raise ValueError("Operator of shape %s cannot map %s to %s" %
                       (str(matrix.shape), space, dst))
    return cls.from_spanning(space, dst, np.eye(space.dim), matrix)

  @classmethod
  def from_constraints(cls, src, dst, coefficients,
                       rtol=RANK_RTOL) -> 'LinearRelation':
    r""" `{(x, y) : coefficients @ [x; y] = 0}` """
    coefficients = _as_pairs(coefficients, src.dim + dst.dim, transpose=True)
    prod = cls.product(src, dst)
    return cls(src, dst,
               orthonormal_basis(prod,
                                 null_space(coefficients, rtol=rtol),
                                 rtol=rtol))

  @classmethod
  def multivalued(cls, space: HilbertSpace,
                  sub: Optional[Subspace] = None) -> 'LinearRelation':
    r""" `{0} x sub`, the whole space when `sub` is None """
    sub = space.whole() if sub is None else sub
    basis = np.vstack([np.zeros((space.dim, sub.dim)), sub.basis])
    return cls(space, space, Subspace(cls.product(space, space), basis))

  # ====== properties ====== #
  @property
  def dim(self) -> int:
    return self.graph.dim

  @property
  def top(self) -> np.ndarray:
    return self.graph.basis[:self.src.dim]

  @property
  def bottom(self) -> np.ndarray:
    return self.graph.basis[self.src.dim:]

  @property
  def is_endomorphism(self) -> bool:
    return self.src.same_as(self.dst)

  def _first(self) -> np.ndarray:
    return np.hstack([
        np.eye(self.src.dim, dtype=np.complex128),
        np.zeros((self.src.dim, self.dst.dim), dtype=np.complex128)
    ])

  def _second(self) -> np.ndarray:
    return np.hstack([
        np.zeros((self.dst.dim, self.src.dim), dtype=np.complex128),
        np.eye(self.dst.dim, dtype=np.complex128)
    ])

  def domain(self) -> Subspace:
    return image_preimage(self.graph, self._first(), 'forward', self.src)

  def range(self) -> Subspace:
    return image_preimage(self.graph, self._second(), 'forward', self.dst)

  def kernel(self) -> Subspace:
    return pre_set(self, self.dst.zero())

  def multivalued_part(self) -> Subspace:
    r""" `C[{0}]` """
    return post_set(self, self.src.zero())

  def is_operator(self) -> bool:
    return self.multivalued_part().dim == 0

  def contains(self, x, y, tol=EQUAL_TOL) -> bool:
    x = x.coords if isinstance(x, Vector) else x
    y = y.coords if isinstance(y, Vector) else y
    return self.graph.contains(np.concatenate([np.ravel(x), np.ravel(y)]),
                               tol=tol)

  def __repr__(self):
    return "<LinearRelation dim=%d %s -> %s>" % (self.dim, self.src, self.dst)


@dataclasses.dataclass
class MonotonicityReport:
  r""" Outcome of `is_monotone` / `is_maximal_monotone`.

  `is_monotone` only fills `monotone`, `witness` and `min_eigenvalue`.
  """
  monotone: bool
  maximal: bool = False
  witness: Optional[Tuple[np.ndarray, np.ndarray]] = None
  minty_lambdas_checked: List[float] = dataclasses.field(default_factory=list)
  min_eigenvalue: float = 0.
  minty_verdicts: Dict[float, bool] = dataclasses.field(default_factory=dict)
  adjoint_monotone: Optional[bool] = None

  def to_dict(self) -> dict:
    return dict(monotone=bool(self.monotone),
                maximal=bool(self.maximal),
                min_eigenvalue=float(self.min_eigenvalue),
                minty_lambdas_checked=[float(i) for i in
                                       self.minty_lambdas_checked],
                adjoint_monotone=self.adjoint_monotone,
                witness=None if self.witness is None else
                [encode_complex(i) for i in self.witness])


# ===========================================================================
# Inverse, adjoint, pre-set, post-set, 1 + λC
# ===========================================================================
def inverse(c: LinearRelation) -> LinearRelation:
  r""" `{(v, u) : (u, v) in C}` """
  prod = LinearRelation.product(c.dst, c.src)
  return LinearRelation(c.dst, c.src,
                        Subspace(prod, np.vstack([c.bottom, c.top])))


def adjoint_via_complement(c: LinearRelation) -> LinearRelation:
  r""" `C* = {(v, -u) : (u, v) in C}^⊥`, only for `src = dst` """
  if not c.is_endomorphism:
    raise ValueError("Complement form of the adjoint needs src = dst")
  prod = LinearRelation.product(c.dst, c.src)
  flipped = Subspace(prod, np.vstack([c.bottom, -c.top]))
  return LinearRelation(c.dst, c.src, complement(flipped))


def adjoint(c: LinearRelation, validate: bool = True) -> LinearRelation:
  r""" The adjoint relation `C* ⊆ dst (+) src`

  `(x, y) in C*` iff `<v|x>_dst = <u|y>_src` for all `(u, v) in C`, solved
  as the null space of the defining identities. For `src = dst` the result
  is compared with the complement of the flipped-negated graph, a mismatch
  raises `InconsistencyError`.
  """
  identities = np.hstack([
      c.bottom.conj().T @ c.dst.gram,
      -c.top.conj().T @ c.src.gram,
  ])
  prod = LinearRelation.product(c.dst, c.src)
  graph = orthonormal_basis(prod, null_space(identities))
  adj = LinearRelation(c.dst, c.src, graph)
  if validate and c.is_endomorphism:
    oracle = adjoint_via_complement(c)
    if not subspace_equal(adj.graph, oracle.graph, tol=EQUAL_TOL):
      raise InconsistencyError(
          "Adjoint by null space (dim %d) and by complement (dim %d) differ" %
          (adj.dim, oracle.dim))
  return adj


def pre_set(c: LinearRelation, sub: Subspace) -> Subspace:
  r""" `[M]C = {x : exists y in M, (x, y) in C}` """
  if not sub.space.same_as(c.dst):
    raise ValueError("Pre-set needs a subspace of the target space")
  lifted = Subspace(c.graph.space, linalg.block_diag(c.src.whole().basis,
                                                     sub.basis))
  return image_preimage(intersection(c.graph, lifted), c._first(), 'forward',
                        c.src)


def post_set(c: LinearRelation, sub: Subspace) -> Subspace:
  r""" `C[N] = {y : exists x in N, (x, y) in C}` """
  if not sub.space.same_as(c.src):
    raise ValueError("Post-set needs a subspace of the source space")
  lifted = Subspace(c.graph.space, linalg.block_diag(sub.basis,
                                                     c.dst.whole().basis))
  return image_preimage(intersection(c.graph, lifted), c._second(), 'forward',
                        c.dst)


def one_plus(c: LinearRelation, lam: float = 1.) -> LinearRelation:
  r""" `1 + λC = {(u, u + λv) : (u, v) in C}` """
  if not lam > 0:
    raise ValueError("lambda must be positive, given: %s" % str(lam))
  if not c.is_endomorphism:
    raise ValueError("1 + λC needs src = dst")
  return LinearRelation.from_spanning(c.src, c.dst, c.top,
                                      c.top + lam * c.bottom)


def invert_pre_post(
    c: LinearRelation,
    query: str,
    arg: Union[Subspace, float, None] = None
) -> Union[LinearRelation, Subspace]:
  r""" Single entry point for the relation operations

  Arguments:
    query : 'inverse', 'pre_set', 'post_set' or 'one_plus'
    arg : the subspace for pre/post-sets, `λ` for 'one_plus' (default 1)
  """
  query = str(query).lower()
  if query == 'inverse':
    return inverse(c)
  if query == 'pre_set':
    return pre_set(c, c.dst.zero() if arg is None else arg)
  if query == 'post_set':
    return post_set(c, c.src.whole() if arg is None else arg)
  if query == 'one_plus':
    return one_plus(c, 1. if arg is None else float(arg))
  raise ValueError("Unknown query: %s" % query)


def compose(c2: LinearRelation, c1: LinearRelation) -> LinearRelation:
  r""" `c2 ∘ c1 = {(x, z) : exists y, (x, y) in c1, (y, z) in c2}` """
  if not c1.dst.same_as(c2.src):
    raise ValueError("Cannot compose, %s differs from %s" % (c1.dst, c2.src))
  nx, ny, nz = c1.src.dim, c1.dst.dim, c2.dst.dim
  triple = c1.src.direct_sum(c1.dst).direct_sum(c2.dst)
  first = orthonormal_basis(
      triple,
      linalg.block_diag(c1.graph.basis, np.eye(nz, dtype=np.complex128)))
  second = orthonormal_basis(
      triple,
      linalg.block_diag(np.eye(nx, dtype=np.complex128), c2.graph.basis))
  both = intersection(first, second)
  drop_middle = np.zeros((nx + nz, nx + ny + nz), dtype=np.complex128)
  drop_middle[:nx, :nx] = np.eye(nx)
  drop_middle[nx:, nx + ny:] = np.eye(nz)
  prod = LinearRelation.product(c1.src, c2.dst)
  return LinearRelation(c1.src, c2.dst,
                        image_preimage(both, drop_middle, 'forward', prod))


# ===========================================================================
# Monotonicity
# ===========================================================================
def _check_endomorphism(c: LinearRelation, what: str):
  if not c.is_endomorphism:
    raise ValueError("%s is only defined for relations on a single space" %
                     what)


def is_monotone(c: LinearRelation, tol=MONOTONE_TOL) -> MonotonicityReport:
  r""" `Re<u|v> >= 0` on the graph, decided by the smallest eigenvalue of
  the Hermitian part of `A^H W B` """
  _check_endomorphism(c, 'Monotonicity')
  if c.dim == 0:
    return MonotonicityReport(monotone=True)
  form = c.top.conj().T @ c.src.gram @ c.bottom
  form = 0.5 * (form + form.conj().T)
  eigs, vecs = np.linalg.eigh(form)
  min_eig = float(eigs[0])
  if min_eig >= -tol:
    return MonotonicityReport(monotone=True, min_eigenvalue=min_eig)
  alpha = vecs[:, 0]
  witness = (c.top @ alpha, c.bottom @ alpha)
  logger.debug("Relation not monotone, smallest eigenvalue %.3e", min_eig)
  return MonotonicityReport(monotone=False,
                            witness=witness,
                            min_eigenvalue=min_eig)


def _minty_range_is_full(c: LinearRelation, lam: float) -> bool:
  return post_set(one_plus(c, lam), c.src.whole()).dim == c.src.dim


def is_maximal_monotone(c: LinearRelation,
                        lambdas=MINTY_LAMBDAS,
                        tol=MONOTONE_TOL) -> MonotonicityReport:
  r""" Minty's criterion `(1 + λC)[H] = H`, checked for every `λ` in
  `lambdas` and against "C and C* are monotone"; any disagreement raises
  `InconsistencyError` """
  report = is_monotone(c, tol=tol)
  if not report.monotone:
    return report
  verdicts = {float(lam): _minty_range_is_full(c, lam) for lam in lambdas}
  report.minty_verdicts = verdicts
  report.minty_lambdas_checked = list(verdicts.keys())
  report.adjoint_monotone = is_monotone(adjoint(c), tol=tol).monotone
  outcomes = set(verdicts.values()) | {report.adjoint_monotone}
  if len(outcomes) > 1:
    raise InconsistencyError(
        "Maximality verdicts disagree: Minty %s, adjoint monotone %s" %
        (str(verdicts), str(report.adjoint_monotone)))
  report.maximal = outcomes.pop()
  return report


def selfadjoint_defect(c: LinearRelation) -> float:
  r""" Largest principal angle between `C` and `C*` (`inf` for different
  dimensions) """
  _check_endomorphism(c, 'Selfadjointness')
  adj = adjoint(c)
  if adj.dim != c.dim:
    return float('inf')
  if c.dim == 0:
    return 0.
  return float(np.max(principal_angles(c.graph, adj.graph)))


def is_selfadjoint(c: LinearRelation, tol=EQUAL_TOL) -> bool:
  return selfadjoint_defect(c) < tol


# ===========================================================================
# Resolvent
# ===========================================================================
def _resolvent_system(c: LinearRelation, lam: float,
                      check: bool = True) -> np.ndarray:
  r""" `A + λB` for the graph basis `[A; B]`, refused unless invertible """
  if not lam > 0:
    raise ValueError("lambda must be positive, given: %s" % str(lam))
  _check_endomorphism(c, 'The resolvent')
  n = c.src.dim
  if c.dim != n:
    raise NotMaximalMonotone(
        "Graph has dimension %d, a maximal monotone relation has %d" %
        (c.dim, n))
  if check:
    report = is_monotone(c)
    if not report.monotone:
      raise NotMaximalMonotone("Relation is not monotone", report=report)
  system = c.top + lam * c.bottom
  s = np.linalg.svd(system, compute_uv=False)
  if s[-1] <= RANK_RTOL * s[0]:
    raise NotMaximalMonotone("1 + %g C is not surjective (sigma_min=%.3e)" %
                             (lam, s[-1]))
  return system


def resolvent_matrix(c: LinearRelation, lam: float = 1.,
                     check: bool = True) -> np.ndarray:
  r""" Matrix of `(1 + λC)^{-1}`

  Arguments:
    c : a maximal monotone relation
    lam : positive step
    check : also verify monotonicity, a non monotone relation with a
      solvable system is refused
  """
  system = _resolvent_system(c, lam, check=check)
  return c.top @ np.linalg.solve(system,
                                 np.eye(c.src.dim, dtype=np.complex128))


def resolvent_apply(c: LinearRelation, lam: float, y) -> Vector:
  r""" `u = (1 + λC)^{-1} y`, so that `(u, (y - u) / λ) in C` """
  coords = y.coords if isinstance(y, Vector) else np.asarray(
      y, dtype=np.complex128).ravel()
  system = _resolvent_system(c, lam)
  alpha = np.linalg.solve(system, coords)
  residual = np.linalg.norm(system @ alpha - coords)
  if residual > RESIDUAL_RTOL * np.linalg.norm(coords):
    raise InconsistencyError("Resolvent residual %.3e too large" % residual)
  return Vector(c.src, c.top @ alpha)


def resolvent_norm(c: LinearRelation, lam: float = 1.) -> float:
  r""" Gram operator norm of `(1 + λC)^{-1}`, at most 1 for maximal
  monotone relations """
  return c.src.operator_norm(resolvent_matrix(c, lam))


# ===========================================================================
# Random corpus
# ===========================================================================
def _complex_normal(rng: np.random.RandomState, *shape) -> np.ndarray:
  return rng.randn(*shape) + 1j * rng.randn(*shape)


def random_gram(dim: int, rng: np.random.RandomState) -> np.ndarray:
  x = _complex_normal(rng, dim, dim)
  return np.eye(dim) + x @ x.conj().T / (2. * dim)


def random_monotone(dim: int,
                    kind: Union[str, MonotoneKind] = 'operator',
                    seed: int = 0,
                    gram=None) -> LinearRelation:
  r""" Deterministic random monotone relation

  Arguments:
    dim : dimension of the space, at least 1
    kind : 'operator' gives the graph of `W^{-1}(P + N)` with `P` PSD and
      `N` skew-Hermitian; 'relation' restricts that operator to a random
      domain `D` and adds a multivalued part `{0} x Wm` with `Wm ⊥ D`
      (maximal iff `dim D + dim Wm = dim`); 'selfadjoint' gives
      `S (+) ({0} x U⊥)` with `S` PSD on a random subspace `U`
    seed : random seed
    gram : the Gram matrix, random when None
  """
  dim = int(dim)
  if dim < 1:
    raise ValueError("dim must be at least 1, given: %d" % dim)
  kind = MonotoneKind.parse(kind)
  rng = np.random.RandomState(seed)
  space = HilbertSpace(random_gram(dim, rng) if gram is None else gram)
  # PSD part of random rank and a skew part
  rank = rng.randint(0, dim + 1)
  y = _complex_normal(rng, dim, rank)
  psd = y @ y.conj().T
  z = _complex_normal(rng, dim, dim)
  skew = 0.5 * (z - z.conj().T)
  if kind == MonotoneKind.selfadjoint:
    u = orthonormal_basis(space, _complex_normal(rng, dim,
                                                 rng.randint(0, dim + 1)))
    y = _complex_normal(rng, u.dim, rng.randint(0, u.dim + 1))
    s = y @ y.conj().T
    perp = complement(u)
    x = np.hstack([u.basis, np.zeros((dim, perp.dim))])
    y = np.hstack([u.basis @ s, perp.basis])
    return LinearRelation.from_spanning(space, space, x, y)
  operator = np.linalg.solve(space.gram, psd + skew)
  if kind == MonotoneKind.operator:
    return LinearRelation.from_operator(space, operator)
  # relation: restricted domain plus a multivalued part orthogonal to it
  domain = orthonormal_basis(space,
                             _complex_normal(rng, dim,
                                             rng.randint(0, dim + 1)))
  perp = complement(domain)
  if perp.dim > 0 and rng.rand() < 0.5:
    mv = perp
  else:
    mv_dim = rng.randint(0, perp.dim + 1)
    mv = orthonormal_basis(space, perp.basis @ _complex_normal(
        rng, perp.dim, mv_dim)) if mv_dim > 0 else space.zero()
  x = np.hstack([domain.basis, np.zeros((dim, mv.dim))])
  y = np.hstack([operator @ domain.basis, mv.basis])
  return LinearRelation.from_spanning(space, space, x, y)


# ===========================================================================
# Serialization for replay
# ===========================================================================
def relation_to_dict(c: LinearRelation) -> dict:
  return dict(src_gram=encode_complex(c.src.gram),
              dst_gram=encode_complex(c.dst.gram),
              graph=encode_complex(c.graph.basis),
              dim=int(c.dim))


def relation_from_dict(obj: dict) -> LinearRelation:
  src = HilbertSpace(decode_complex(obj['src_gram'], ndim=2))
  dst = HilbertSpace(decode_complex(obj['dst_gram'], ndim=2))
  basis = decode_complex(obj['graph'], ndim=2)
  basis = basis.reshape(src.dim + dst.dim, int(obj.get('dim',
                                                       basis.shape[-1])))
  return LinearRelation(src, dst, Subspace(src.direct_sum(dst), basis))

r""" Boundary relations and trace systems of the port-Hamiltonian block
operator `A(u, w) = (w', u')` on (0, 1).

A `TraceSystem` fixes the energy space `E0 = {u in H^1 : (u(0), u(1)) in V}`
and the boundary map `K u = M (u(0), u(1))`. The domain of `A` is

    {(u, w) : (u(0), u(1)) in V and M^H M (u(0), u(1)) + (w(0), -w(1)) ⊥ V}

and, equivalently, `{(u, w) : (π u, Ḋ π w) in h}` for the boundary relation
`h` on `BD(G)`. `forward_h` computes `h` from a trace system,
`reverse_construct` recovers a trace system from a selfadjoint maximal
monotone `h`.
"""
from __future__ import absolute_import, division, print_function

import dataclasses
import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg

from mmbo.arens import decompose, sqrt_operator
from mmbo.bdspace import (SWAP, BDVector, TestFunction1D, bd_function,
                          boundary_space, derivative_trace_matrix, graph_inner,
                          interpolation_matrix, l2_inner, project_boundary,
                          trace_norm_constant)
from mmbo.const import EQUAL_TOL, BDKind
from mmbo.errors import MalformedScenario, NotMaximalMonotone, NotSelfadjoint
from mmbo.hilbert import (HilbertSpace, Subspace, complement, null_space,
                          orthonormal_basis)
from mmbo.relation import (LinearRelation, is_maximal_monotone,
                           selfadjoint_defect)

__all__ = [
    'TraceSystem', 'BlockOperator', 'HypothesisReport', 'block_operator',
    'check_hypothesis', 'forward_h', 'reverse_construct', 'rebase',
    'boundary_constraints', 'domain_membership', 'functional_decomposition',
    'evaluate_functional', 'functional_membership', 'd_extends_residual',
    'staffans_form', 'sample_e0', 'interior_defect', 'sample_domain_pair', 'satisfy_constraints',
    'key_identity_samples', 'riesz_resolvent'
]

logger = logging.getLogger(__name__)

# (w(0), w(1)) -> (w(0), -w(1))
_FLIP = np.diag([1., -1.])


def _bd_hilbert() -> HilbertSpace:
  return boundary_space(BDKind.G).hilbert


# ===========================================================================
# Types
# ===========================================================================
@dataclasses.dataclass(frozen=True, eq=False)
class TraceSystem:
  r"""
  Attributes:
    v_basis : `[2, k]` spanning vectors of `V ⊆ C^2`
    m : `[u_dim, 2]` matrix of `K` acting on `(u(0), u(1))`
    u_dim : dimension of `U`
    name : optional identity
  """
  v_basis: np.ndarray
  m: np.ndarray
  u_dim: int
  name: Optional[str] = None

  @classmethod
  def create(cls, v_basis, m, u_dim=None, name=None) -> 'TraceSystem':
    v_basis = np.asarray(v_basis, dtype=np.complex128)
    if v_basis.ndim == 1:
      v_basis = v_basis[:, None]
    if v_basis.size == 0:
      v_basis = np.zeros((2, 0), dtype=np.complex128)
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim == 1:
      m = m[None, :] if m.size > 0 else np.zeros((0, 2), dtype=np.complex128)
    if m.ndim == 2 and m.shape[0] == 0:
      m = np.zeros((m.shape[0], 2), dtype=np.complex128)
    u_dim = m.shape[0] if u_dim is None else int(u_dim)
    return cls(v_basis=v_basis, m=m, u_dim=u_dim, name=name)

  @property
  def v_space(self) -> Subspace:
    r""" `V` as a subspace of Euclidean `C^2` """
    return orthonormal_basis(HilbertSpace.euclidean(2), self.v_basis)

  @property
  def v_dim(self) -> int:
    return self.v_space.dim

  def k_of(self, u: TestFunction1D) -> np.ndarray:
    r""" `K u` """
    return self.m @ u.trace()

  def e0_norm2(self, u: TestFunction1D) -> float:
    r""" `||u||^2_{H^1} + ||K u||^2_U` """
    return float(graph_inner(u, u).real +
                 np.linalg.norm(self.k_of(u))**2)

  def __repr__(self):
    return "<TraceSystem%s dim V=%d dim U=%d>" % (
        '' if self.name is None else " '%s'" % self.name,
        self.v_basis.shape[1], self.u_dim)


@dataclasses.dataclass(frozen=True, eq=False)
class BlockOperator:
  r"""
  Attributes:
    h : the boundary relation on `BD(G)` coordinates
    constraints : rows acting on `(u(0), u(1), w(0), w(1))`, unit norm
    trace_system : the trace system `h` was built from, if any
  """
  h: LinearRelation
  constraints: np.ndarray
  trace_system: Optional[TraceSystem] = None

  @property
  def rank(self) -> int:
    return self.constraints.shape[0]


@dataclasses.dataclass
class HypothesisReport:
  valid: bool
  v_dim: int
  u_dim: int
  lower_bound: float
  upper_bound: float
  min_ratio: float
  max_ratio: float
  n_samples: int
  contains_interior: bool
  messages: List[str] = dataclasses.field(default_factory=list)

  def to_dict(self) -> dict:
    return dataclasses.asdict(self)


# ===========================================================================
# Hypothesis and the forward direction
# ===========================================================================
def _validate(ts: TraceSystem):
  v = ts.v_basis
  if v.ndim != 2 or v.shape[0] != 2:
    raise MalformedScenario("V basis must have 2 rows, given shape %s" %
                            str(v.shape))
  if v.shape[1] > 2:
    raise MalformedScenario("V basis has %d vectors in C^2" % v.shape[1])
  if not np.all(np.isfinite(v)) or not np.all(np.isfinite(ts.m)):
    raise MalformedScenario("Trace system contains non-finite numbers")
  rank = orthonormal_basis(HilbertSpace.euclidean(2), v).dim
  if rank != v.shape[1]:
    raise MalformedScenario("V basis is rank deficient: %d vectors of rank "
                            "%d" % (v.shape[1], rank))
  if ts.m.ndim != 2 or ts.m.shape[1] != 2:
    raise MalformedScenario("M must have 2 columns, given shape %s" %
                            str(ts.m.shape))
  if ts.m.shape[0] != ts.u_dim:
    raise MalformedScenario("M has %d rows but dim U=%d" %
                            (ts.m.shape[0], ts.u_dim))


def sample_e0(ts: TraceSystem, rng: np.random.RandomState) -> TestFunction1D:
  r""" A random element of `E0`, a random function whose traces are moved
  onto `V` by adding a boundary data function """
  u = TestFunction1D.random(rng)
  q = ts.v_space.basis
  xi = u.trace()
  delta = q @ (q.conj().T @ xi) - xi
  return u + bd_function(project_boundary(BDKind.G, delta[0], delta[1]))


def interior_defect(ts: TraceSystem, u: TestFunction1D) -> float:
  r""" Relative size of the traces of `u` and of `K u`, zero exactly when
  `u` lies in `H^1_0`, hence in `E0`, with `K u = 0` """
  scale = np.sqrt(max(graph_inner(u, u).real, 0.))
  if scale == 0.:
    return 0.
  xi = u.trace()
  q = ts.v_space.basis
  off_v = np.linalg.norm(xi - q @ (q.conj().T @ xi))
  return float(
      max(np.linalg.norm(xi), off_v, np.linalg.norm(ts.k_of(u))) / scale)


def check_hypothesis(ts: TraceSystem,
                     n_samples: int = 20,
                     seed: int = 0,
                     tol: float = EQUAL_TOL) -> HypothesisReport:
  r""" Validate a trace system and measure the equivalence of the `E0`
  norm with the `H^1` norm

  The admissible constants are
  `||u||^2_{H^1} <= ||u||^2_{E0} <= (1 + ||M||^2 coth(1/2)) ||u||^2_{H^1}`.
  Zero-trace samples must lie in `E0` with `K` vanishing on them.

  Raises:
    MalformedScenario : rank deficient `V` or `M` without 2 columns
  """
  _validate(ts)
  rng = np.random.RandomState(seed)
  mnorm = float(np.linalg.norm(ts.m, 2)) if ts.m.size > 0 else 0.
  lower, upper = 1., 1. + mnorm**2 * trace_norm_constant()
  ratios = []
  interior = []
  for _ in range(int(n_samples)):
    u = sample_e0(ts, rng)
    h1 = graph_inner(u, u).real
    if h1 <= 0.:
      continue
    ratios.append(ts.e0_norm2(u) / h1)
    zero_trace = TestFunction1D.random(rng).interior_part()
    interior.append(interior_defect(ts, zero_trace))
  ratios = np.asarray(ratios) if ratios else np.ones((1,))
  worst_interior = max(interior, default=0.)
  report = HypothesisReport(valid=True,
                            v_dim=ts.v_dim,
                            u_dim=ts.u_dim,
                            lower_bound=lower,
                            upper_bound=upper,
                            min_ratio=float(np.min(ratios)),
                            max_ratio=float(np.max(ratios)),
                            n_samples=int(n_samples),
                            contains_interior=worst_interior <= tol)
  if not report.contains_interior:
    report.valid = False
    report.messages.append("Zero-trace functions leave E0 or K: %g" %
                           worst_interior)
  if report.min_ratio < lower * (1. - tol):
    report.valid = False
    report.messages.append("E0 norm below the H^1 norm: %g" %
                           report.min_ratio)
  if report.max_ratio > upper * (1. + tol):
    report.valid = False
    report.messages.append("E0 norm exceeds the trace bound: %g > %g" %
                           (report.max_ratio, upper))
  return report


def _annihilator(graph: Subspace) -> np.ndarray:
  r""" Rows `r` with `r @ graph.basis = 0` """
  return null_space(graph.basis.T).T


def _normalize_rows(rows: np.ndarray) -> np.ndarray:
  if rows.shape[0] == 0:
    return rows
  return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def block_operator(h: LinearRelation,
                   ts: Optional[TraceSystem] = None) -> BlockOperator:
  r""" Wrap a boundary relation together with its endpoint constraints """
  if not h.src.same_as(_bd_hilbert()) or not h.dst.same_as(_bd_hilbert()):
    raise ValueError("Boundary relations live on BD(G) (+) BD(G)")
  phi_inv = np.linalg.inv(interpolation_matrix())
  # x = π u and y = Ḋ π w in terms of the endpoint values
  change = linalg.block_diag(phi_inv, SWAP @ phi_inv)
  rows = _normalize_rows(_annihilator(h.graph) @ change)
  return BlockOperator(h=h, constraints=rows, trace_system=ts)


def boundary_constraints(b: BlockOperator) -> np.ndarray:
  r""" Rows annihilating exactly the admissible `(u(0), u(1), w(0), w(1))`,
  `rank = 4 - dim(h)` """
  return b.constraints


def forward_h(ts: TraceSystem, validate: bool = True) -> BlockOperator:
  r""" The boundary relation of a trace system

  `(x, y) in h` iff `Φ x in V` and `M^H M Φ x + diag(1, -1) Ψ y ⊥ V`, where
  `Φ x` are the endpoint values of `x` and `Ψ y` the endpoint values of
  `w = Ġ y`.
  """
  if validate:
    report = check_hypothesis(ts)
    if not report.valid:
      raise MalformedScenario("Trace system fails the hypothesis: %s" %
                              '; '.join(report.messages))
  space = _bd_hilbert()
  phi = interpolation_matrix()
  psi = derivative_trace_matrix()
  v = ts.v_space
  q = v.basis
  q_perp = complement(v).basis
  mm = ts.m.conj().T @ ts.m
  rows = np.vstack([
      np.hstack([q_perp.conj().T @ phi,
                 np.zeros((q_perp.shape[1], 2))]),
      np.hstack([q.conj().T @ mm @ phi, q.conj().T @ _FLIP @ psi]),
  ])
  h = LinearRelation.from_constraints(space, space, rows)
  logger.debug("forward_h %s: dim h=%d", ts, h.dim)
  return block_operator(h, ts)


# ===========================================================================
# Reverse direction
# ===========================================================================
def reverse_construct(h: LinearRelation, name=None) -> TraceSystem:
  r""" Recover `(V, M)` from a selfadjoint maximal monotone `h`

  With `h = S (+) ({0} x U⊥)`, `V = Φ U` and `M = √S` read in the eigenbasis
  of `S` (eigenvalues descending). The domain of `√S` is all of `U` in
  finite dimension, so `E0` is the set of functions whose boundary part
  lies in `U`.

  Raises:
    NotSelfadjoint : with the principal angle between `h` and `h*`
    NotMaximalMonotone : with the failing `MonotonicityReport`
  """
  if not h.src.same_as(_bd_hilbert()) or not h.dst.same_as(_bd_hilbert()):
    raise ValueError("Boundary relations live on BD(G) (+) BD(G)")
  defect = selfadjoint_defect(h)
  if not defect < EQUAL_TOL:
    raise NotSelfadjoint("Boundary relation is not selfadjoint (principal "
                         "angle %g)" % defect,
                         certificate=defect)
  report = is_maximal_monotone(h)
  if not report.maximal:
    raise NotMaximalMonotone("Boundary relation is not maximal monotone "
                             "(monotone=%s)" % report.monotone,
                             report=report)
  dec = decompose(h)
  if dec.u_dim == 0:
    return TraceSystem.create(np.zeros((2, 0)), np.zeros((0, 2)), 0, name)
  # eigenvalues descending
  vecs = np.linalg.eigh(dec.s_matrix)[1][:, ::-1]
  # √S in its own eigenbasis
  root = vecs.conj().T @ sqrt_operator(dec) @ vecs
  qu = dec.u_space.basis @ vecs
  phi = interpolation_matrix()
  gram = dec.space.gram
  v_basis = phi @ qu
  m = root @ qu.conj().T @ gram @ np.linalg.inv(phi)
  return TraceSystem.create(v_basis, m, dec.u_dim, name)


def rebase(ts: TraceSystem, unitary) -> TraceSystem:
  r""" Change the orthonormal basis of `U`, `M -> unitary @ M` """
  unitary = np.asarray(unitary, dtype=np.complex128)
  if unitary.shape != (ts.u_dim, ts.u_dim):
    raise ValueError("Unitary must be %d x %d" % (ts.u_dim, ts.u_dim))
  if not np.allclose(unitary.conj().T @ unitary, np.eye(ts.u_dim),
                     atol=1e-12):
    raise ValueError("Matrix is not unitary")
  return TraceSystem.create(ts.v_basis, unitary @ ts.m, ts.u_dim, ts.name)


# ===========================================================================
# Domain of A
# ===========================================================================
def _gamma(ts: TraceSystem, u: TestFunction1D,
           w: TestFunction1D) -> np.ndarray:
  mm = ts.m.conj().T @ ts.m
  return mm @ u.trace() + _FLIP @ w.trace()


def _trace_system_of(b: BlockOperator,
                     ts: Optional[TraceSystem]) -> TraceSystem:
  if ts is not None:
    return ts
  if b.trace_system is not None:
    return b.trace_system
  return reverse_construct(b.h)


def domain_membership(b: BlockOperator,
                      ts: Optional[TraceSystem],
                      u: TestFunction1D,
                      w: TestFunction1D,
                      tol: float = EQUAL_TOL) -> Tuple[bool, bool]:
  r""" Whether `(u, w)` is in the domain of `A`, by the trace system
  characterization and by the boundary relation characterization

  A missing trace system is recovered by `reverse_construct`.
  """
  ts = _trace_system_of(b, ts)
  xi = u.trace()
  scale = max(1., float(np.linalg.norm(xi)), float(np.linalg.norm(
      w.trace())))
  v = ts.v_space
  q = v.basis
  in_v = np.linalg.norm(xi - q @ (q.conj().T @ xi)) <= tol * scale
  gamma = _gamma(ts, u, w)
  annihilates = np.linalg.norm(q.conj().T @ gamma) <= tol * scale
  bool_i = bool(in_v and annihilates)
  x = u.boundary_part(BDKind.G).coords
  y = SWAP @ w.boundary_part(BDKind.D).coords
  bool_ii = b.h.contains(x, y, tol=tol)
  return bool_i, bool(bool_ii)


def functional_decomposition(
    ts: TraceSystem, u: TestFunction1D,
    w: TestFunction1D) -> Tuple[TestFunction1D, np.ndarray]:
  r""" `K⋄Ku - L⋄w` as the regular part `w'` plus boundary coefficients
  `γ`, i.e. `v -> <w'|v> + γ^H (v(0), v(1))` """
  return w.derivative(), _gamma(ts, u, w)


def evaluate_functional(ts: TraceSystem, u: TestFunction1D, w: TestFunction1D,
                        v: TestFunction1D) -> complex:
  r""" `(K⋄Ku - L⋄w)(v) = <Kv|Ku>_U - <w|v'>`, by quadrature """
  ku, kv = ts.k_of(u), ts.k_of(v)
  return complex(np.vdot(ku, kv) - l2_inner(w, v.derivative()))


def functional_membership(ts: TraceSystem,
                          u: TestFunction1D,
                          w: TestFunction1D,
                          n_test: int = 20,
                          seed: int = 0,
                          tol: float = 1e-11) -> Tuple[bool, float]:
  r""" Decide `K⋄Ku - L⋄w in E` by evaluating the functional against
  `n_test` random elements of `E0`

  Return:
    (member, largest relative boundary residual)
  """
  rng = np.random.RandomState(seed)
  q = ts.v_space.basis
  xi = u.trace()
  in_v = np.linalg.norm(xi - q @ (q.conj().T @ xi)) <= EQUAL_TOL * max(
      1., float(np.linalg.norm(xi)))
  worst = 0.
  dw = w.derivative()
  for _ in range(int(n_test)):
    v = sample_e0(ts, rng)
    value = evaluate_functional(ts, u, w, v)
    regular = l2_inner(dw, v)
    scale = max(1., abs(value), abs(regular))
    worst = max(worst, abs(value - regular) / scale)
  return bool(in_v and worst <= tol), float(worst)


def d_extends_residual(ts: TraceSystem,
                       u: TestFunction1D,
                       w: TestFunction1D,
                       n_test: int = 20,
                       seed: int = 0) -> float:
  r""" Largest `|(K⋄Ku - L⋄w)(v) - <w'|v>|` over random `v in E0`, zero
  whenever `(u, w)` is in the domain of `A` """
  return functional_membership(ts, u, w, n_test=n_test, seed=seed)[1]


def staffans_form(u: TestFunction1D, w: TestFunction1D) -> float:
  r""" `Re[<u|w'> + <w|u'>]` by quadrature """
  return float((l2_inner(u, w.derivative()) +
                l2_inner(w, u.derivative())).real)


def satisfy_constraints(b: BlockOperator, u: TestFunction1D,
                        w: TestFunction1D,
                        perturb: Optional[np.ndarray] = None
                       ) -> Tuple[TestFunction1D, TestFunction1D]:
  r""" Add boundary data functions to `u` and `w` such that their traces
  are the nearest quadruple satisfying the constraints, then add
  `perturb` (a trace quadruple) """
  c = b.constraints
  t = np.concatenate([u.trace(), w.trace()])
  delta = -np.linalg.pinv(c) @ (c @ t) if c.shape[0] > 0 else np.zeros(4)
  if perturb is not None:
    delta = delta + np.asarray(perturb, dtype=np.complex128)
  u = u + bd_function(project_boundary(BDKind.G, delta[0], delta[1]))
  w = w + bd_function(project_boundary(BDKind.D, delta[2], delta[3]))
  return u, w


def sample_domain_pair(b: BlockOperator,
                       rng: np.random.RandomState,
                       member: bool = True
                      ) -> Tuple[TestFunction1D, TestFunction1D]:
  r""" Random `(u, w)` in the domain of `A`, or clearly outside of it when
  `member=False` """
  u = TestFunction1D.random(rng)
  w = TestFunction1D.random(rng)
  perturb = None
  c = b.constraints
  if not member:
    if c.shape[0] == 0:
      raise ValueError("Every pair belongs to an unconstrained domain")
    z = rng.randn(c.shape[0]) + 1j * rng.randn(c.shape[0])
    perturb = c.conj().T @ z
    perturb /= np.linalg.norm(perturb)
  return satisfy_constraints(b, u, w, perturb=perturb)


# ===========================================================================
# Identities of the boundary relation
# ===========================================================================
def key_identity_samples(b: BlockOperator, ts: TraceSystem, n: int,
                         rng: np.random.RandomState) -> Tuple[float, float]:
  r""" Check `Re<x|y> = |M Φ x|^2` and `<y|u> = (M Φ x)^H (M Φ u)` on random
  pairs `(x, y), (u, v)` of `h`

  Return:
    largest absolute error of the two identities
  """
  h = b.h
  gram = h.src.gram
  phi = interpolation_matrix()
  worst_key, worst_sym = 0., 0.
  for _ in range(int(n)):
    a1 = rng.randn(h.dim) + 1j * rng.randn(h.dim)
    a2 = rng.randn(h.dim) + 1j * rng.randn(h.dim)
    x, y = h.top @ a1, h.bottom @ a1
    u = h.top @ a2
    kx, ku = ts.m @ (phi @ x), ts.m @ (phi @ u)
    worst_key = max(worst_key,
                    abs((x.conj() @ gram @ y).real - np.vdot(kx, kx).real))
    worst_sym = max(worst_sym, abs(y.conj() @ gram @ u - np.vdot(kx, ku)))
  return float(worst_key), float(worst_sym)


def riesz_resolvent(ts: TraceSystem, f) -> Tuple[np.ndarray, np.ndarray]:
  r""" `(1 + h)^{-1}` by the Riesz representation

  Solves `<z|u> + <Kz|Ku>_U = <z|f>` for all `z` in `BD(G)` with traces in
  `V`, returns `(u, f - u)` which lies in `h`.
  """
  f = f.coords if isinstance(f, BDVector) else np.asarray(
      f, dtype=np.complex128)
  phi = interpolation_matrix()
  gram = _bd_hilbert().gram
  z = np.linalg.solve(phi, ts.v_space.basis)
  if z.shape[1] == 0:
    return np.zeros(2, dtype=np.complex128), f.copy()
  km = ts.m @ phi
  lhs = z.conj().T @ (gram + km.conj().T @ km) @ z
  rhs = z.conj().T @ gram @ f
  u = z @ np.linalg.solve(lhs, rhs)
  return u, f - u

r""" Implicit Euler evolution of the contraction semigroup generated by
`-A`, `A(u, w) = (w', u')`, on a uniform grid of (0, 1).

Space is discretized with the second-order diagonal-norm summation-by-parts
first derivative `D = H^{-1} Q`. The endpoint constraints of the boundary
relation enter through Lagrange multipliers on the four endpoint
equations, so the discrete resolvent is a contraction in the `H`-norm.
"""
from __future__ import absolute_import, division, print_function

import dataclasses
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.sparse import linalg as splinalg
from tqdm import tqdm

from mmbo.bdspace import TestFunction1D
from mmbo.const import RESIDUAL_RTOL
from mmbo.errors import SingularSystem
from mmbo.systemnode import BlockOperator, satisfy_constraints

__all__ = [
    'GridFunction', 'EvolutionConfig', 'Trajectory', 'ConvergenceResult',
    'sbp_operators', 'ResolventSolver', 'resolvent_solve', 'discrete_energy',
    'initial_data', 'evolve', 'manufactured_pair', 'convergence_study',
    'contraction_ratio'
]

logger = logging.getLogger(__name__)

MIN_NODES = 8
# tolerance on the endpoint constraints of initial data
INITIAL_DATA_TOL = 1e-8


# ===========================================================================
# Types
# ===========================================================================
class GridFunction(object):
  r""" Nodal values on `n` uniform nodes of [0, 1], endpoints included """

  def __init__(self, values):
    values = np.array(values, dtype=np.complex128).ravel()
    if values.shape[0] < MIN_NODES:
      raise ValueError("Grid functions need at least %d nodes, given: %d" %
                       (MIN_NODES, values.shape[0]))
    values.setflags(write=False)
    self.values = values

  @classmethod
  def from_function(cls, fn, n: int) -> 'GridFunction':
    return cls(fn(np.linspace(0., 1., int(n))))

  @classmethod
  def zeros(cls, n: int) -> 'GridFunction':
    return cls(np.zeros(int(n)))

  @property
  def n(self) -> int:
    return self.values.shape[0]

  @property
  def spacing(self) -> float:
    return 1. / (self.n - 1)

  @property
  def nodes(self) -> np.ndarray:
    return np.linspace(0., 1., self.n)

  def __repr__(self):
    return "<GridFunction n=%d>" % self.n


@dataclasses.dataclass
class EvolutionConfig:
  block: BlockOperator
  tau: float = 0.01
  steps: int = 100
  n: int = 256
  name: Optional[str] = None

  def __post_init__(self):
    if not self.tau > 0:
      raise ValueError("Time step must be positive, given: %s" % self.tau)
    if int(self.steps) < 1:
      raise ValueError("Need at least one step, given: %s" % self.steps)
    if int(self.n) < MIN_NODES:
      raise ValueError("Need at least %d nodes, given: %s" %
                       (MIN_NODES, self.n))
    self.steps = int(self.steps)
    self.n = int(self.n)


@dataclasses.dataclass
class Trajectory:
  r""" States `z_0, ..., z_steps` with their energies """
  tau: float
  states: List[Tuple[GridFunction, GridFunction]]
  energies: np.ndarray
  projected: bool = False

  @property
  def times(self) -> np.ndarray:
    return self.tau * np.arange(len(self.states))

  @property
  def energy_ratio(self) -> np.ndarray:
    e0 = self.energies[0]
    if e0 == 0.:
      return np.ones_like(self.energies)
    return self.energies / e0

  def to_frame(self) -> pd.DataFrame:
    return pd.DataFrame({
        'step': np.arange(len(self.states)),
        't': self.times,
        'energy': self.energies,
        'energy_ratio': self.energy_ratio,
    })


@dataclasses.dataclass
class ConvergenceResult:
  grids: List[int]
  spacings: np.ndarray
  errors: np.ndarray
  order: float

  def to_frame(self) -> pd.DataFrame:
    return pd.DataFrame({
        'n': self.grids,
        'spacing': self.spacings,
        'error': self.errors
    })


# ===========================================================================
# Discretization
# ===========================================================================
def sbp_operators(n: int) -> Tuple[sparse.csc_matrix, sparse.csc_matrix]:
  r""" The trapezoid norm `H` and the matrix `Q` of the second-order SBP
  first derivative, `Q + Q^T = diag(-1, 0, ..., 0, 1)` """
  n = int(n)
  if n < MIN_NODES:
    raise ValueError("Need at least %d nodes, given: %d" % (MIN_NODES, n))
  dx = 1. / (n - 1)
  weights = np.ones(n)
  weights[0] = weights[-1] = 0.5
  H = sparse.diags(dx * weights, format='csc')
  Q = sparse.diags([-0.5 * np.ones(n - 1), 0.5 * np.ones(n - 1)], [-1, 1],
                   format='lil')
  Q[0, 0] = -0.5
  Q[n - 1, n - 1] = 0.5
  return H, Q.tocsc()


def discrete_energy(u: GridFunction, w: GridFunction) -> float:
  r""" `(|u|_H^2 + |w|_H^2) / 2` """
  H, _ = sbp_operators(u.n)
  weights = H.diagonal()
  return float(0.5 * np.sum(weights * (np.abs(u.values)**2 +
                                       np.abs(w.values)**2)))


class ResolventSolver(object):
  r""" Factorized `(1 + τA)^{-1}` on `n` nodes

  The bordered system reads
  `[[H, τQ], [τQ, H]] z + Δ E^H C^H μ = [H f; H g]`, `Δ C E z = 0`
  where `E` picks `(u_0, u_{n-1}, w_0, w_{n-1})`, `C` are the boundary
  constraints of the block operator and `Δ` is the grid spacing. The
  factorization keeps the natural ordering.

  Raises:
    SingularSystem : constraint rank differs from 2 or the factorization
      fails
  """

  def __init__(self, b: BlockOperator, tau: float, n: int):
    if not tau > 0:
      raise ValueError("Time step must be positive, given: %s" % str(tau))
    c = np.asarray(b.constraints, dtype=np.complex128)
    rank = np.linalg.matrix_rank(c) if c.size > 0 else 0
    if c.shape[0] != 2 or rank != 2:
      raise SingularSystem("Boundary constraints have %d rows of rank %d, "
                           "a maximal boundary relation gives 2" %
                           (c.shape[0], rank))
    self.block = b
    self.tau = float(tau)
    self.n = int(n)
    H, Q = sbp_operators(self.n)
    self._weights = H.diagonal()
    n = self.n
    select = sparse.csr_matrix(
        (np.ones(4), ([0, 1, 2, 3], [0, n - 1, n, 2 * n - 1])),
        shape=(4, 2 * n))
    # constraint rows scaled to the node weights keep the pivots balanced
    border = (1. / (n - 1)) * (sparse.csr_matrix(c) @ select)
    block = sparse.bmat([[H, self.tau * Q], [self.tau * Q, H]])
    system = sparse.bmat([[block, border.conj().T], [border, None]],
                         format='csc')
    self._system = system.astype(np.complex128)
    try:
      self._lu = splinalg.splu(self._system, permc_spec='NATURAL')
    except RuntimeError as e:
      raise SingularSystem("Cannot factorize the resolvent system: %s" % e)

  def solve(self, f: GridFunction,
            g: GridFunction) -> Tuple[GridFunction, GridFunction]:
    if f.n != self.n or g.n != self.n:
      raise ValueError("Solver built for %d nodes, given %d and %d" %
                       (self.n, f.n, g.n))
    rhs = np.concatenate(
        [self._weights * f.values, self._weights * g.values,
         np.zeros(2)])
    sol = self._lu.solve(rhs)
    if not np.all(np.isfinite(sol)):
      raise SingularSystem("Resolvent solve produced non-finite values")
    residual = np.linalg.norm(self._system @ sol - rhs)
    scale = splinalg.norm(self._system, 1) * np.linalg.norm(sol) + \
      np.linalg.norm(rhs)
    if residual > RESIDUAL_RTOL * scale:
      raise SingularSystem("Relative residual %.3e of the resolvent solve" %
                           (residual / scale))
    n = self.n
    return GridFunction(sol[:n]), GridFunction(sol[n:2 * n])


def resolvent_solve(b: BlockOperator, tau: float, f: GridFunction,
                    g: GridFunction) -> Tuple[GridFunction, GridFunction]:
  r""" `(u, w)` with `u + τ w' = f`, `w + τ u' = g` and the endpoint values
  satisfying the constraints of `b` """
  if f.n != g.n:
    raise ValueError("f and g live on different grids: %d and %d" %
                     (f.n, g.n))
  return ResolventSolver(b, tau, f.n).solve(f, g)


def contraction_ratio(b: BlockOperator,
                      tau: float,
                      n: int,
                      rng: np.random.RandomState,
                      trials: int = 5) -> float:
  r""" Largest `|(u, w)|_H / |(f, g)|_H` over random smooth data """
  solver = ResolventSolver(b, tau, n)
  worst = 0.
  for _ in range(int(trials)):
    f = GridFunction.from_function(TestFunction1D.random(rng), n)
    g = GridFunction.from_function(TestFunction1D.random(rng), n)
    u, w = solver.solve(f, g)
    worst = max(worst, np.sqrt(discrete_energy(u, w) / discrete_energy(f, g)))
  return float(worst)


# ===========================================================================
# Evolution
# ===========================================================================
def initial_data(name: str, n: int) -> Tuple[GridFunction, GridFunction]:
  r""" Named initial states: 'bump' (a polynomial bump in `u`), 'pulse'
  (a narrow Gaussian in `u`) and 'zero' """
  x = np.linspace(0., 1., int(n))
  name = str(name).lower()
  if name == 'bump':
    u = 16. * x**2 * (1. - x)**2
  elif name == 'pulse':
    u = np.exp(-200. * (x - 0.5)**2)
  elif name == 'zero':
    u = np.zeros_like(x)
  else:
    raise ValueError("Unknown initial data: %s" % name)
  return GridFunction(u), GridFunction(np.zeros_like(x))


def _project_initial(b: BlockOperator, u: GridFunction,
                     w: GridFunction) -> Tuple[GridFunction, GridFunction, bool]:
  c = b.constraints
  t = np.array([u.values[0], u.values[-1], w.values[0], w.values[-1]])
  violation = np.linalg.norm(c @ t)
  if violation <= INITIAL_DATA_TOL * max(1., np.linalg.norm(t)):
    return u, w, False
  t = t - np.linalg.pinv(c) @ (c @ t)
  uv, wv = np.array(u.values), np.array(w.values)
  uv[0], uv[-1], wv[0], wv[-1] = t
  logger.warning("Initial data violates the boundary constraints by %.3e, "
                 "endpoint values projected", violation)
  return GridFunction(uv), GridFunction(wv), True


def evolve(cfg: EvolutionConfig,
           u0: GridFunction,
           w0: GridFunction,
           verbose: bool = False) -> Trajectory:
  r""" Implicit Euler `z_{k+1} = (1 + τA)^{-1} z_k`

  Return:
    `Trajectory` with `steps + 1` states, the first one being the (possibly
    projected) initial data
  """
  if u0.n != cfg.n or w0.n != cfg.n:
    raise ValueError("Initial data must have %d nodes" % cfg.n)
  solver = ResolventSolver(cfg.block, cfg.tau, cfg.n)
  u, w, projected = _project_initial(cfg.block, u0, w0)
  states = [(u, w)]
  energies = [discrete_energy(u, w)]
  for _ in tqdm(range(cfg.steps),
                desc="Evolve %s" % ('' if cfg.name is None else cfg.name),
                disable=not verbose):
    u, w = solver.solve(u, w)
    states.append((u, w))
    energies.append(discrete_energy(u, w))
  return Trajectory(tau=cfg.tau,
                    states=states,
                    energies=np.asarray(energies),
                    projected=projected)


# ===========================================================================
# Grid convergence
# ===========================================================================
def manufactured_pair(b: BlockOperator) -> Tuple[TestFunction1D, TestFunction1D]:
  r""" A smooth `(u*, w*)` in the domain of `A`: `x^2 (1 - x)^2` and
  `1/2 + x - x^3`, corrected by boundary data functions to meet the
  constraints """
  u = TestFunction1D([0., 0., 1., -2., 1.])
  w = TestFunction1D([0.5, 1., 0., -1.])
  return satisfy_constraints(b, u, w)


def convergence_study(b: BlockOperator, tau: float,
                      grids: Sequence[int]) -> ConvergenceResult:
  r""" Observed order of the resolvent solver against a manufactured
  solution, the least-squares slope of `log(error)` against `log(Δ)` """
  grids = [int(i) for i in grids]
  if len(grids) < 3:
    raise ValueError("Need at least 3 grids, given: %s" % str(grids))
  if any(i >= j for i, j in zip(grids[:-1], grids[1:])):
    raise ValueError("Grids must be strictly increasing: %s" % str(grids))
  if not tau > 0:
    raise ValueError("Time step must be positive, given: %s" % str(tau))
  u_star, w_star = manufactured_pair(b)
  f = u_star + w_star.derivative() * tau
  g = w_star + u_star.derivative() * tau
  errors = []
  for n in grids:
    u, w = resolvent_solve(b, tau, GridFunction.from_function(f, n),
                           GridFunction.from_function(g, n))
    x = u.nodes
    err = max(np.max(np.abs(u.values - u_star(x))),
              np.max(np.abs(w.values - w_star(x))))
    logger.debug("convergence n=%d error=%.3e", n, err)
    errors.append(err)
  spacings = 1. / (np.asarray(grids) - 1.)
  errors = np.asarray(errors)
  order = np.polyfit(np.log(spacings), np.log(errors), 1)[0]
  return ConvergenceResult(grids=grids,
                           spacings=spacings,
                           errors=errors,
                           order=float(order))

r""" Boundary data spaces of `d/dx` on the interval (0, 1).

Both `BD(G)` and `BD(D)` are the solutions of `u'' = u`, spanned by
`{cosh, sinh}`, and carry the graph inner product
`<u|v> + <u'|v'>`. A coordinate pair `(a, b)` stands for
`a cosh + b sinh`.

The module also holds `TestFunction1D`, the closed-form function algebra
`span{polynomials of degree <= 6, cosh, sinh}` used to represent elements
of `H^1(0, 1)` exactly, and the Gauss-Legendre rule every integral is
evaluated with.
"""
from __future__ import absolute_import, division, print_function

import dataclasses
from functools import lru_cache
from typing import Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import roots_legendre

from mmbo.const import QUADRATURE_POINTS, BDKind, BoundaryQuantity
from mmbo.hilbert import HilbertSpace

__all__ = [
    'COSH1', 'SINH1', 'SWAP', 'BoundarySpace', 'BDVector', 'TestFunction1D',
    'boundary_space', 'gram_matrices', 'interpolation_matrix',
    'derivative_trace_matrix', 'project_boundary', 'apply_gdot', 'apply_ddot',
    'boundary_eval', 'bd_function', 'gauss_legendre', 'l2_inner',
    'graph_inner', 'quadrature_gram', 'trace_norm_constant'
]

COSH1 = float(np.cosh(1.))
SINH1 = float(np.sinh(1.))
# Ġ and Ḋ in {cosh, sinh} coordinates
SWAP = np.array([[0., 1.], [1., 0.]])
MAX_DEGREE = 6


# ===========================================================================
# Closed forms
# ===========================================================================
def gram_matrices() -> Tuple[np.ndarray, np.ndarray]:
  r""" Graph-norm Gram matrices of `BD(G)` and `BD(D)`, identical """
  s = np.sinh(2.) / 2.
  c = np.sinh(1.)**2
  gram = np.array([[s, c], [c, s]])
  return gram, gram.copy()


def interpolation_matrix() -> np.ndarray:
  r""" `Φ`: BD coordinates to the endpoint values `(u(0), u(1))` """
  return np.array([[1., 0.], [COSH1, SINH1]])


def derivative_trace_matrix() -> np.ndarray:
  r""" `Ψ`: BD coordinates to the endpoint derivatives `(u'(0), u'(1))` """
  return np.array([[0., 1.], [SINH1, COSH1]])


def trace_norm_constant() -> float:
  r""" Sharp `c` in `|u(0)|^2 + |u(1)|^2 <= c ||u||^2_{H^1}`, attained by
  `cosh(x - 1/2)` """
  return float(1. / np.tanh(0.5))


# ===========================================================================
# Spaces and vectors
# ===========================================================================
@dataclasses.dataclass(frozen=True, eq=False)
class BoundarySpace:
  kind: BDKind
  gram: np.ndarray
  eval0: np.ndarray
  eval1: np.ndarray
  deval0: np.ndarray
  deval1: np.ndarray

  @property
  def hilbert(self) -> HilbertSpace:
    return _hilbert(self.kind)

  def vector(self, coords) -> 'BDVector':
    return BDVector(self, coords)

  def functional(self, what: Union[str, BoundaryQuantity],
                 point: int) -> np.ndarray:
    what = BoundaryQuantity(what) if isinstance(what, str) else what
    if point not in (0, 1):
      raise ValueError("Boundary point must be 0 or 1, given: %s" %
                       str(point))
    if what == BoundaryQuantity.value:
      return self.eval0 if point == 0 else self.eval1
    return self.deval0 if point == 0 else self.deval1


@lru_cache(maxsize=2)
def boundary_space(kind: Union[str, BDKind] = BDKind.G) -> BoundarySpace:
  kind = BDKind.parse(kind)
  gram_g, gram_d = gram_matrices()
  phi = interpolation_matrix()
  psi = derivative_trace_matrix()
  return BoundarySpace(kind=kind,
                       gram=gram_g if kind == BDKind.G else gram_d,
                       eval0=phi[0],
                       eval1=phi[1],
                       deval0=psi[0],
                       deval1=psi[1])


@lru_cache(maxsize=2)
def _hilbert(kind: BDKind) -> HilbertSpace:
  return HilbertSpace(boundary_space(kind).gram, name='BD(%s)' % kind.value)


class BDVector(object):
  r""" The element `a cosh + b sinh` of a boundary data space """

  def __init__(self, space: BoundarySpace, coords):
    coords = np.array(coords, dtype=np.complex128).ravel()
    if coords.shape != (2,):
      raise ValueError("Boundary data vectors have 2 coordinates, given: %s" %
                       str(coords.shape))
    coords.setflags(write=False)
    self.space = space
    self.coords = coords

  @property
  def kind(self) -> BDKind:
    return self.space.kind

  def inner(self, other: 'BDVector') -> complex:
    return complex(self.coords.conj() @ self.space.gram @ other.coords)

  def norm(self) -> float:
    return float(np.sqrt(max(self.inner(self).real, 0.)))

  def to_function(self) -> 'TestFunction1D':
    return bd_function(self)

  def __repr__(self):
    return "<BDVector %s a=%s b=%s>" % (self.kind.value, self.coords[0],
                                        self.coords[1])


def _space_of(x) -> BoundarySpace:
  if not isinstance(x, BDVector):
    raise TypeError("Expect BDVector but given: %s" % str(type(x)))
  return x.space


def project_boundary(kind: Union[str, BDKind], trace0: complex,
                     trace1: complex) -> BDVector:
  r""" The element of `BD(kind)` with the given endpoint values, which is
  the graph-orthogonal projection of every `H^1` function with these
  traces """
  coords = np.linalg.solve(interpolation_matrix(),
                           np.array([trace0, trace1], dtype=np.complex128))
  return BDVector(boundary_space(kind), coords)


def apply_gdot(x: BDVector) -> BDVector:
  r""" `Ġ: BD(G) -> BD(D)`, differentiation """
  if _space_of(x).kind != BDKind.G:
    raise ValueError("Ġ acts on BD(G), given a vector of BD(%s)" %
                     x.kind.value)
  return BDVector(boundary_space(BDKind.D), SWAP @ x.coords)


def apply_ddot(z: BDVector) -> BDVector:
  r""" `Ḋ: BD(D) -> BD(G)`, differentiation """
  if _space_of(z).kind != BDKind.D:
    raise ValueError("Ḋ acts on BD(D), given a vector of BD(%s)" %
                     z.kind.value)
  return BDVector(boundary_space(BDKind.G), SWAP @ z.coords)


def boundary_eval(x: BDVector, what: Union[str, BoundaryQuantity] = 'value',
                  point: int = 0) -> complex:
  return complex(_space_of(x).functional(what, point) @ x.coords)


# ===========================================================================
# Function algebra
# ===========================================================================
class TestFunction1D(object):
  r""" `p(x) + a cosh(x) + b sinh(x)` with `deg p <= 6`

  Arguments:
    poly : polynomial coefficients, lowest degree first
    a, b : the cosh and sinh coefficients
  """
  __test__ = False

  def __init__(self, poly=(), a=0., b=0.):
    poly = np.array(poly, dtype=np.complex128).ravel()
    if poly.shape[0] > MAX_DEGREE + 1:
      if np.any(poly[MAX_DEGREE + 1:] != 0):
        raise ValueError("Polynomial degree must be at most %d" % MAX_DEGREE)
      poly = poly[:MAX_DEGREE + 1]
    coef = np.zeros(MAX_DEGREE + 1, dtype=np.complex128)
    coef[:poly.shape[0]] = poly
    coef.setflags(write=False)
    self.poly = coef
    self.a = complex(a)
    self.b = complex(b)

  @classmethod
  def random(cls, rng: np.random.RandomState,
             degree: int = MAX_DEGREE) -> 'TestFunction1D':
    poly = rng.randn(degree + 1) + 1j * rng.randn(degree + 1)
    # keep high order terms small so that values stay O(1) on (0, 1)
    poly /= np.arange(1, degree + 2)
    ab = rng.randn(2) + 1j * rng.randn(2)
    return cls(poly, ab[0], ab[1])

  @classmethod
  def cosh(cls) -> 'TestFunction1D':
    return cls(a=1.)

  @classmethod
  def sinh(cls) -> 'TestFunction1D':
    return cls(b=1.)

  # ====== evaluation ====== #
  def __call__(self, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return P.polyval(x, self.poly) + self.a * np.cosh(x) + \
      self.b * np.sinh(x)

  def derivative(self, order: int = 1) -> 'TestFunction1D':
    f = self
    for _ in range(int(order)):
      f = TestFunction1D(P.polyder(f.poly), a=f.b, b=f.a)
    return f

  def value(self, point: int) -> complex:
    if point == 0:
      return complex(self.poly[0] + self.a)
    if point == 1:
      return complex(np.sum(self.poly) + self.a * COSH1 + self.b * SINH1)
    raise ValueError("Boundary point must be 0 or 1, given: %s" % str(point))

  def trace(self) -> np.ndarray:
    r""" `(u(0), u(1))` """
    return np.array([self.value(0), self.value(1)])

  def derivative_trace(self) -> np.ndarray:
    return self.derivative().trace()

  @property
  def is_boundary_data(self) -> bool:
    r""" Whether `u'' - u = 0` holds identically """
    diff = self.derivative(2) - self
    return bool(np.all(diff.poly == 0) and diff.a == 0 and diff.b == 0)

  def boundary_part(self, kind: Union[str, BDKind] = BDKind.G) -> BDVector:
    r""" `π_BD u` """
    t = self.trace()
    return project_boundary(kind, t[0], t[1])

  def interior_part(self) -> 'TestFunction1D':
    r""" `u - π*_BD π_BD u`, an element with zero traces """
    return self - bd_function(self.boundary_part())

  # ====== algebra ====== #
  def __add__(self, other: 'TestFunction1D') -> 'TestFunction1D':
    return TestFunction1D(self.poly + other.poly, self.a + other.a,
                          self.b + other.b)

  def __sub__(self, other: 'TestFunction1D') -> 'TestFunction1D':
    return TestFunction1D(self.poly - other.poly, self.a - other.a,
                          self.b - other.b)

  def __mul__(self, scalar) -> 'TestFunction1D':
    scalar = complex(scalar)
    return TestFunction1D(self.poly * scalar, self.a * scalar,
                          self.b * scalar)

  __rmul__ = __mul__

  def __neg__(self) -> 'TestFunction1D':
    return self * -1.

  def __repr__(self):
    return "<TestFunction1D deg=%d a=%s b=%s>" % (
        int(np.max(np.nonzero(self.poly)[0], initial=0)), self.a, self.b)


def bd_function(x: BDVector) -> TestFunction1D:
  r""" `π*`: the function `a cosh + b sinh` """
  return TestFunction1D(a=x.coords[0], b=x.coords[1])


# ===========================================================================
# Quadrature
# ===========================================================================
@lru_cache(maxsize=8)
def gauss_legendre(n: int = QUADRATURE_POINTS) -> Tuple[np.ndarray, np.ndarray]:
  r""" Gauss-Legendre nodes and weights mapped to (0, 1) """
  nodes, weights = roots_legendre(int(n))
  nodes = 0.5 * (nodes + 1.)
  weights = 0.5 * weights
  nodes.setflags(write=False)
  weights.setflags(write=False)
  return nodes, weights


def l2_inner(u: TestFunction1D, v: TestFunction1D,
             n: int = QUADRATURE_POINTS) -> complex:
  r""" `∫ conj(u) v` over (0, 1) """
  nodes, weights = gauss_legendre(n)
  return complex(np.sum(weights * np.conj(u(nodes)) * v(nodes)))


def graph_inner(u: TestFunction1D, v: TestFunction1D,
                n: int = QUADRATURE_POINTS) -> complex:
  r""" `<u|v> + <u'|v'>`, the `H^1` inner product """
  return l2_inner(u, v, n) + l2_inner(u.derivative(), v.derivative(), n)


def quadrature_gram(n: int = QUADRATURE_POINTS) -> np.ndarray:
  r""" The graph-norm Gram of `{cosh, sinh}` by quadrature """
  basis = [TestFunction1D.cosh(), TestFunction1D.sinh()]
  return np.array([[graph_inner(u, v, n).real for v in basis] for u in basis])

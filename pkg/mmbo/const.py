from __future__ import absolute_import, division, print_function

from enum import Enum

# ===========================================================================
# Numerical tolerances
# ===========================================================================
# singular values below RANK_RTOL * (largest singular value) are zero
RANK_RTOL = 1e-10
GRAM_HERMITIAN_RTOL = 1e-14
# smallest eigenvalue of a Gram matrix relative to the largest one
GRAM_CONDITION = 1e-12
ORTHONORMAL_TOL = 1e-12
EQUAL_TOL = 1e-10
MONOTONE_TOL = 1e-11
RESIDUAL_RTOL = 1e-10
MINTY_LAMBDAS = (1., 0.1, 10.)
QUADRATURE_POINTS = 64


# ===========================================================================
# Enumerations
# ===========================================================================
class BDKind(Enum):
  r""" Which boundary data space: `BD(G)` or `BD(D)` """
  G = 'G'
  D = 'D'

  @classmethod
  def parse(cls, kind) -> 'BDKind':
    if isinstance(kind, cls):
      return kind
    return cls(str(kind).upper())


class MonotoneKind(Enum):
  operator = 'operator'
  relation = 'relation'
  selfadjoint = 'selfadjoint'

  @classmethod
  def parse(cls, kind) -> 'MonotoneKind':
    if isinstance(kind, cls):
      return kind
    return cls(str(kind).lower())


class ScenarioKind(Enum):
  trace_system = 'trace_system'
  boundary_relation = 'boundary_relation'


class BoundaryQuantity(Enum):
  value = 'value'
  derivative = 'derivative'

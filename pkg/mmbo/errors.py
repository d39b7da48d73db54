r""" Exceptions raised by `mmbo`.

Built-in `ValueError`/`RuntimeError` are kept as secondary bases so that
callers not aware of this module still catch the usual families.
"""
from __future__ import absolute_import, division, print_function

__all__ = [
    'MMBOError', 'InvalidGram', 'MalformedScenario', 'NotSelfadjoint',
    'NotMonotone', 'NotMaximalMonotone', 'InconsistencyError',
    'SingularSystem'
]


class MMBOError(Exception):
  r""" Base class of all errors in this package """


class InvalidGram(MMBOError, ValueError):
  r""" The Gram matrix is not Hermitian or not positive definite """


class MalformedScenario(MMBOError, ValueError):
  r""" A trace system or a scenario configuration cannot be used """


class NotSelfadjoint(MMBOError):
  r""" Raised when a relation differs from its adjoint.

  `certificate` is the largest principal angle between `C` and `C*`
  (or `inf` when the dimensions differ).
  """

  def __init__(self, msg, certificate=None):
    super(NotSelfadjoint, self).__init__(msg)
    self.certificate = certificate


class NotMonotone(MMBOError):

  def __init__(self, msg, witness=None, min_eigenvalue=None):
    super(NotMonotone, self).__init__(msg)
    self.witness = witness
    self.min_eigenvalue = min_eigenvalue


class NotMaximalMonotone(MMBOError):
  r""" `report` holds the `MonotonicityReport` that failed """

  def __init__(self, msg, report=None):
    super(NotMaximalMonotone, self).__init__(msg)
    self.report = report


class InconsistencyError(MMBOError, RuntimeError):
  r""" Two independent computations of the same fact disagree, this signals
  a tolerance problem rather than a mathematical statement """


class SingularSystem(MMBOError, RuntimeError):
  r""" The discrete resolvent system is rank deficient """

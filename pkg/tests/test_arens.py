from __future__ import absolute_import, division, print_function

import unittest

import numpy as np

from mmbo.arens import ArensDecomposition, decompose, reconstruct, sqrt_operator
from mmbo.errors import NotMonotone, NotSelfadjoint
from mmbo.hilbert import (HilbertSpace, complement, orthonormal_basis,
                          subspace_equal)
from mmbo.relation import LinearRelation, random_gram, random_monotone

np.random.seed(8)


def _decomposition(s):
  s = np.asarray(s, dtype=np.complex128)
  space = HilbertSpace.euclidean(s.shape[0])
  u = space.whole()
  return ArensDecomposition(space, u, s, complement(u))


class ArensTest(unittest.TestCase):

  def test_pure_multivalued(self):
    space = HilbertSpace.euclidean(2)
    dec = decompose(LinearRelation.multivalued(space))
    self.assertEqual(dec.u_dim, 0)
    self.assertEqual(dec.s_matrix.shape, (0, 0))
    self.assertEqual(dec.mult_part.dim, 2)
    self.assertEqual(sqrt_operator(dec).shape, (0, 0))

  def test_hermitian_operator(self):
    space = HilbertSpace.euclidean(2)
    c = LinearRelation.from_operator(space, np.diag([2., 5.]))
    dec = decompose(c)
    self.assertEqual(dec.u_dim, 2)
    self.assertEqual(dec.mult_part.dim, 0)
    np.testing.assert_allclose(np.sort(dec.eigenvalues), [2., 5.])
    np.testing.assert_allclose(dec.operator(), np.diag([2., 5.]), atol=1e-12)

  def test_mixed(self):
    # span{(e1, 2 e1), (0, e2)}
    space = HilbertSpace.euclidean(2)
    c = LinearRelation.from_spanning(space, space, [[1., 0.], [0., 0.]],
                                     [[2., 0.], [0., 1.]])
    dec = decompose(c)
    self.assertTrue(
        subspace_equal(dec.u_space, orthonormal_basis(space, [[1.], [0.]])))
    np.testing.assert_allclose(dec.s_matrix, [[2.]], atol=1e-12)
    self.assertTrue(
        subspace_equal(dec.mult_part, orthonormal_basis(space, [[0.], [1.]])))
    self.assertTrue(subspace_equal(dec.sqrt_domain, dec.u_space))

  def test_not_selfadjoint(self):
    space = HilbertSpace.euclidean(2)
    c = LinearRelation.from_operator(space, [[0., 1.], [-1., 0.]])
    with self.assertRaises(NotSelfadjoint) as cm:
      decompose(c)
    self.assertGreater(cm.exception.certificate, 1e-3)

  def test_round_trip_random(self):
    for seed in range(40):
      c = random_monotone(1 + seed % 6, 'selfadjoint', seed=seed)
      dec = decompose(c)
      self.assertTrue(dec.is_monotone())
      self.assertEqual(dec.u_dim + dec.mult_part.dim, c.src.dim)
      self.assertTrue(subspace_equal(reconstruct(dec).graph, c.graph,
                                     tol=1e-10))

  def test_weighted_gram(self):
    rng = np.random.RandomState(6)
    x = rng.randn(3, 3) + 1j * rng.randn(3, 3)
    space = HilbertSpace(np.eye(3) + x @ x.conj().T / 3.)
    q = orthonormal_basis(space, rng.randn(3, 3)).basis
    s = np.diag([0.5, 1., 4.])
    c = LinearRelation.from_operator(space, q @ s @ q.conj().T @ space.gram)
    dec = decompose(c)
    np.testing.assert_allclose(np.sort(dec.eigenvalues), [0.5, 1., 4.],
                               atol=1e-10)

  def test_multivalued_weighted_gram(self):
    # {0} x H under a non-identity Gram has no operator part
    rng = np.random.RandomState(13)
    for _ in range(50):
      space = HilbertSpace(random_gram(3, rng))
      c = LinearRelation.from_spanning(space, space, np.zeros((3, 3)),
                                       rng.randn(3, 3))
      self.assertEqual(c.domain().dim, 0)
      self.assertEqual(c.multivalued_part().dim, 3)
      dec = decompose(c)
      self.assertEqual(dec.u_dim, 0)
      self.assertEqual(dec.mult_part.dim, 3)
      self.assertTrue(subspace_equal(reconstruct(dec).graph, c.graph))

  def test_sqrt(self):
    np.testing.assert_allclose(sqrt_operator(_decomposition(np.diag([4.,
                                                                     9.]))),
                               np.diag([2., 3.]),
                               atol=1e-14)
    np.testing.assert_allclose(sqrt_operator(_decomposition(np.zeros((2, 2)))),
                               0.,
                               atol=1e-14)
    s = np.array([[2., 1.], [1., 2.]])
    r = sqrt_operator(_decomposition(s))
    np.testing.assert_allclose(r @ r, s, atol=1e-12)
    np.testing.assert_allclose(np.linalg.eigvalsh(r), [1., np.sqrt(3.)],
                               atol=1e-12)
    # a tiny negative eigenvalue is clamped
    r = sqrt_operator(_decomposition(np.diag([-1e-13, 1.])))
    np.testing.assert_allclose(r, np.diag([0., 1.]), atol=1e-14)
    with self.assertRaises(NotMonotone):
      sqrt_operator(_decomposition(np.diag([-1., 1.])))


if __name__ == '__main__':
  unittest.main()

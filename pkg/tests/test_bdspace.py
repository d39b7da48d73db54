from __future__ import absolute_import, division, print_function

import unittest

import numpy as np

from mmbo.bdspace import (COSH1, SINH1, SWAP, TestFunction1D, apply_ddot,
                          apply_gdot, bd_function, boundary_eval,
                          boundary_space, gauss_legendre, gram_matrices,
                          graph_inner, interpolation_matrix, l2_inner,
                          project_boundary, quadrature_gram,
                          trace_norm_constant)
from mmbo.const import BDKind

np.random.seed(8)


class BoundaryDataTest(unittest.TestCase):

  def test_gram_closed_form(self):
    gram_g, gram_d = gram_matrices()
    np.testing.assert_array_equal(gram_g, gram_d)
    self.assertAlmostEqual(gram_g[0, 0], 1.81343, places=5)
    self.assertAlmostEqual(gram_g[0, 1], SINH1**2, places=14)
    self.assertAlmostEqual(gram_g[0, 1], 1.3811, places=4)
    np.testing.assert_allclose(gram_g, quadrature_gram(64), rtol=0,
                               atol=1e-13)

  def test_quadrature(self):
    nodes, weights = gauss_legendre(64)
    self.assertAlmostEqual(np.sum(weights), 1., places=14)
    self.assertTrue(np.all((nodes > 0) & (nodes < 1)))
    x = TestFunction1D([0., 1.])
    self.assertAlmostEqual(l2_inner(x, x), 1. / 3, places=14)
    self.assertAlmostEqual(graph_inner(x, x), 4. / 3, places=14)

  def test_project_boundary(self):
    x = project_boundary(BDKind.G, 0., 0.)
    np.testing.assert_array_equal(x.coords, [0., 0.])
    x = project_boundary('G', 1., 0.)
    np.testing.assert_allclose(x.coords, [1., -COSH1 / SINH1], atol=1e-14)
    self.assertAlmostEqual(x.coords[1].real, -1.31304, places=5)
    x = project_boundary('G', 0., 1.)
    np.testing.assert_allclose(x.coords, [0., 1. / SINH1], atol=1e-14)
    self.assertAlmostEqual(x.coords[1].real, 0.85092, places=5)

  def test_projection_orthogonality(self):
    basis = [TestFunction1D.cosh(), TestFunction1D.sinh()]
    for u in (TestFunction1D([1., -1.]), TestFunction1D([0., 1.])):
      rest = u - bd_function(u.boundary_part())
      for z in basis:
        self.assertLess(abs(graph_inner(rest, z)), 1e-12)
    rng = np.random.RandomState(9)
    for _ in range(50):
      u = TestFunction1D.random(rng)
      interior = u.interior_part()
      np.testing.assert_allclose(interior.trace(), 0., atol=1e-13)
      for z in basis:
        self.assertLess(abs(graph_inner(interior, z)), 1e-11)

  def test_gdot_ddot(self):
    g, d = boundary_space('G'), boundary_space('D')
    z = apply_gdot(g.vector([1., 0.]))
    self.assertEqual(z.kind, BDKind.D)
    np.testing.assert_array_equal(z.coords, [0., 1.])
    for e in np.eye(2):
      np.testing.assert_array_equal(
          apply_ddot(apply_gdot(g.vector(e))).coords, e)
    np.testing.assert_array_equal(SWAP.T @ d.gram @ SWAP, g.gram)
    rng = np.random.RandomState(10)
    for _ in range(20):
      x = g.vector(rng.randn(2) + 1j * rng.randn(2))
      y = d.vector(rng.randn(2) + 1j * rng.randn(2))
      self.assertAlmostEqual(apply_gdot(x).inner(y), x.inner(apply_ddot(y)),
                             places=12)
      self.assertAlmostEqual(apply_gdot(x).norm(), x.norm(), places=12)
    with self.assertRaises(ValueError):
      apply_gdot(d.vector([1., 0.]))
    with self.assertRaises(ValueError):
      apply_ddot(g.vector([1., 0.]))

  def test_boundary_eval(self):
    g = boundary_space('G')
    cosh = g.vector([1., 0.])
    self.assertAlmostEqual(boundary_eval(cosh, 'value', 1), COSH1)
    self.assertAlmostEqual(boundary_eval(cosh, 'derivative', 0), 0.)
    y = g.vector([0.3, -0.7])
    # y'(0) = b
    self.assertAlmostEqual(boundary_eval(y, 'derivative', 0), -0.7)
    self.assertAlmostEqual(boundary_eval(apply_gdot(y), 'value', 0), -0.7)
    with self.assertRaises(ValueError):
      boundary_eval(y, 'value', 2)

  def test_bd_membership(self):
    rng = np.random.RandomState(11)
    for _ in range(10):
      z = boundary_space('G').vector(rng.randn(2))
      self.assertTrue(bd_function(z).is_boundary_data)
    self.assertFalse(TestFunction1D([0., 0., 1.]).is_boundary_data)

  def test_function_algebra(self):
    u = TestFunction1D([1., 2., 3.], a=0.5, b=-1.)
    x = np.linspace(0., 1., 7)
    expected = 1. + 2 * x + 3 * x**2 + 0.5 * np.cosh(x) - np.sinh(x)
    np.testing.assert_allclose(u(x), expected, atol=1e-14)
    du = u.derivative()
    np.testing.assert_allclose(du(x), 2. + 6 * x + 0.5 * np.sinh(x) -
                               np.cosh(x),
                               atol=1e-14)
    np.testing.assert_allclose(u.trace(), [u(0.), u(1.)], atol=1e-14)
    np.testing.assert_allclose((u - u).poly, 0.)
    np.testing.assert_allclose((2 * u)(x), 2 * expected, atol=1e-14)
    with self.assertRaises(ValueError):
      TestFunction1D(np.ones(8))
    with self.assertRaises(ValueError):
      u.value(0.5)

  def test_trace_constant(self):
    # attained by cosh(x - 1/2)
    u = TestFunction1D(a=np.cosh(-0.5), b=np.sinh(-0.5))
    ratio = np.sum(np.abs(u.trace())**2) / graph_inner(u, u).real
    self.assertAlmostEqual(ratio, trace_norm_constant(), places=12)
    rng = np.random.RandomState(12)
    for _ in range(20):
      u = TestFunction1D.random(rng)
      ratio = np.sum(np.abs(u.trace())**2) / graph_inner(u, u).real
      self.assertLessEqual(ratio, trace_norm_constant() * (1 + 1e-12))
    np.testing.assert_allclose(interpolation_matrix()[1], [COSH1, SINH1])


if __name__ == '__main__':
  unittest.main()

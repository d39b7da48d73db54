from __future__ import absolute_import, division, print_function

import unittest

import numpy as np

from mmbo.bdspace import (COSH1, SINH1, TestFunction1D, boundary_space,
                          l2_inner,
                          trace_norm_constant)
from mmbo.errors import MalformedScenario, NotSelfadjoint
from mmbo.hilbert import (HilbertSpace, null_space, orthonormal_basis,
                          subspace_equal)
from mmbo.relation import (LinearRelation, is_maximal_monotone,
                           is_selfadjoint, resolvent_apply)
from mmbo.scenarios import (dirichlet, full_trace, neumann, robin,
                            round_trip_suite, skew)
from mmbo.systemnode import (TraceSystem, block_operator,
                             boundary_constraints, check_hypothesis,
                             d_extends_residual, domain_membership,
                             evaluate_functional, forward_h,
                             functional_decomposition, functional_membership,
                             interior_defect,
                             key_identity_samples, rebase, reverse_construct,
                             riesz_resolvent, sample_domain_pair,
                             satisfy_constraints, staffans_form)

np.random.seed(8)


def _bd():
  return boundary_space('G').hilbert


def _same(h1, h2, tol=1e-9):
  return h1.dim == h2.dim and subspace_equal(h1.graph, h2.graph, tol=tol)


class TraceSystemTest(unittest.TestCase):

  def test_create(self):
    ts = TraceSystem.create([], [], 0)
    self.assertEqual(ts.v_basis.shape, (2, 0))
    self.assertEqual(ts.m.shape, (0, 2))
    ts = TraceSystem.create([1., 1.], [0., 2.])
    self.assertEqual(ts.v_basis.shape, (2, 1))
    self.assertEqual(ts.m.shape, (1, 2))
    self.assertEqual(ts.u_dim, 1)
    self.assertEqual(ts.v_dim, 1)

  def test_hypothesis(self):
    report = check_hypothesis(full_trace(), n_samples=30, seed=1)
    self.assertTrue(report.valid)
    self.assertAlmostEqual(report.upper_bound, 1. + trace_norm_constant())
    self.assertGreaterEqual(report.min_ratio, 1.)
    self.assertLessEqual(report.max_ratio, report.upper_bound)
    report = check_hypothesis(dirichlet())
    self.assertTrue(report.valid)
    self.assertEqual(report.v_dim, 0)
    self.assertEqual(report.u_dim, 0)
    self.assertAlmostEqual(report.max_ratio, 1.)
    self.assertIn('upper_bound', report.to_dict())
    self.assertTrue(report.contains_interior)

  def test_interior_defect(self):
    rng = np.random.RandomState(6)
    for ts in (dirichlet(), neumann(), robin(2.), full_trace()):
      report = check_hypothesis(ts, n_samples=10, seed=3)
      self.assertTrue(report.contains_interior, msg=str(ts))
      zero_trace = TestFunction1D.random(rng).interior_part()
      self.assertLess(interior_defect(ts, zero_trace), 1e-12)
      # a function with nonzero traces is not in H^1_0
      self.assertGreater(interior_defect(ts, TestFunction1D.cosh()), 0.1)
    self.assertEqual(interior_defect(dirichlet(), TestFunction1D()), 0.)

  def test_malformed(self):
    with self.assertRaises(MalformedScenario):
      check_hypothesis(TraceSystem.create([[1., 2.], [1., 2.]], np.eye(2)))
    with self.assertRaises(MalformedScenario):
      check_hypothesis(TraceSystem.create(np.eye(2), np.eye(3)))
    with self.assertRaises(MalformedScenario):
      check_hypothesis(TraceSystem.create(np.eye(2), np.eye(2), u_dim=1))
    with self.assertRaises(MalformedScenario):
      forward_h(TraceSystem.create(np.eye(2), [[np.nan, 0.]]))


class ForwardTest(unittest.TestCase):

  def test_dirichlet(self):
    h = forward_h(dirichlet()).h
    self.assertTrue(_same(h, LinearRelation.multivalued(_bd())))

  def test_neumann(self):
    h = forward_h(neumann()).h
    self.assertTrue(_same(h, LinearRelation.from_operator(_bd(),
                                                          np.zeros((2, 2)))))

  def test_full_trace(self):
    h = forward_h(full_trace()).h
    t_full = np.array([[2. * COSH1 / SINH1, 1.], [-1., 0.]])
    self.assertAlmostEqual(t_full[0, 0], 2. / np.tanh(1.), places=14)
    self.assertAlmostEqual(t_full[0, 0], 2.6261, places=4)
    self.assertTrue(_same(h, LinearRelation.from_operator(_bd(), t_full)))
    self.assertTrue(is_selfadjoint(h))
    self.assertTrue(is_maximal_monotone(h).maximal)

  def test_robin(self):
    for k in (0.5, 1., 2.):
      h = forward_h(robin(k)).h
      # y'(0) = 0, y'(1) = k x(1)
      for x in np.eye(2):
        x1 = x[0] * COSH1 + x[1] * SINH1
        # y = c cosh + d sinh: d = 0, c sinh(1) = k x(1)
        y = np.array([k * x1 / SINH1, 0.])
        self.assertTrue(h.contains(x, y, tol=1e-10))
      self.assertEqual(h.dim, 2)
    with self.assertRaises(ValueError):
      robin(0.)

  def test_constraints(self):
    b = forward_h(dirichlet())
    c = boundary_constraints(b)
    self.assertEqual(b.rank, 2)
    np.testing.assert_allclose(np.linalg.norm(c, axis=1), 1.)
    kernel = orthonormal_basis(HilbertSpace.euclidean(4), null_space(c))
    expected = orthonormal_basis(HilbertSpace.euclidean(4), np.eye(4)[:, 2:])
    self.assertTrue(subspace_equal(kernel, expected))
    b = forward_h(neumann())
    kernel = orthonormal_basis(HilbertSpace.euclidean(4),
                               null_space(b.constraints))
    expected = orthonormal_basis(HilbertSpace.euclidean(4), np.eye(4)[:, :2])
    self.assertTrue(subspace_equal(kernel, expected))
    b = forward_h(full_trace())
    for t in ([1., 0., -1., 0.], [0., 1., 0., 1.]):
      np.testing.assert_allclose(b.constraints @ np.array(t), 0., atol=1e-12)
    self.assertGreater(np.linalg.norm(b.constraints @ np.array([1., 0., 1.,
                                                                0.])), 1e-3)

  def test_block_operator_rank(self):
    for name, h in round_trip_suite(seed=3):
      self.assertEqual(block_operator(h).rank, 4 - h.dim, msg=name)


class ReverseTest(unittest.TestCase):

  def test_neumann(self):
    ts = reverse_construct(forward_h(neumann()).h)
    self.assertEqual(ts.v_dim, 2)
    self.assertEqual(ts.u_dim, 2)
    np.testing.assert_allclose(ts.m, 0., atol=1e-10)

  def test_dirichlet(self):
    ts = reverse_construct(forward_h(dirichlet()).h)
    self.assertEqual(ts.v_dim, 0)
    self.assertEqual(ts.u_dim, 0)
    self.assertEqual(ts.m.shape, (0, 2))

  def test_skew_rejected(self):
    with self.assertRaises(NotSelfadjoint) as cm:
      reverse_construct(skew())
    self.assertGreater(cm.exception.certificate, 1e-3)

  def test_round_trip(self):
    for seed in (0, 1, 2):
      suite = round_trip_suite(seed)
      self.assertEqual(len(suite), 8)
      for name, h in suite:
        ts = reverse_construct(h, name=name)
        self.assertTrue(_same(forward_h(ts).h, h), msg=name)

  def test_rebase(self):
    rng = np.random.RandomState(2)
    ts = full_trace()
    z = rng.randn(2, 2) + 1j * rng.randn(2, 2)
    unitary = np.linalg.qr(z)[0]
    h = forward_h(ts).h
    self.assertTrue(_same(forward_h(rebase(ts, unitary)).h, h))
    with self.assertRaises(ValueError):
      rebase(ts, 2. * np.eye(2))


class DomainTest(unittest.TestCase):

  def test_zero_member(self):
    zero = TestFunction1D()
    for ts in (dirichlet(), neumann(), robin(1.), full_trace()):
      b = forward_h(ts)
      self.assertEqual(domain_membership(b, ts, zero, zero), (True, True))

  def test_dirichlet_member(self):
    ts = dirichlet()
    b = forward_h(ts)
    u = TestFunction1D([0., 1., -1.])
    w = TestFunction1D([0.3, -2., 0., 1.5])
    self.assertEqual(domain_membership(b, ts, u, w), (True, True))
    member, residual = functional_membership(ts, u, w)
    self.assertTrue(member)
    self.assertLess(residual, 1e-11)
    # recovered from the relation when no trace system is given
    self.assertEqual(domain_membership(block_operator(b.h), None, u, w),
                     (True, True))

  def test_full_trace_non_member(self):
    ts = full_trace()
    b = forward_h(ts)
    u, w = TestFunction1D.cosh(), TestFunction1D.sinh()
    self.assertEqual(domain_membership(b, ts, u, w), (False, False))
    dw, gamma = functional_decomposition(ts, u, w)
    np.testing.assert_allclose(gamma, [1., COSH1 - SINH1], atol=1e-14)
    self.assertAlmostEqual(gamma[1].real, np.exp(-1.), places=14)
    self.assertFalse(functional_membership(ts, u, w)[0])

  def test_sampling_agreement(self):
    rng = np.random.RandomState(4)
    for ts in (dirichlet(), neumann(), robin(0.5), full_trace()):
      b = forward_h(ts)
      for i in range(20):
        member = i % 4 != 0
        u, w = sample_domain_pair(b, rng, member=member)
        self.assertEqual(domain_membership(b, ts, u, w), (member, member),
                         msg=str(ts))
        if member:
          self.assertLess(d_extends_residual(ts, u, w, seed=i), 1e-10)
          self.assertGreaterEqual(staffans_form(u, w), -1e-10)

  def test_satisfy_constraints(self):
    rng = np.random.RandomState(5)
    ts = robin(2.)
    b = forward_h(ts)
    u, w = satisfy_constraints(b, TestFunction1D.random(rng),
                               TestFunction1D.random(rng))
    # w(0) = 0, w(1) = 2 u(1)
    self.assertAlmostEqual(w.value(0), 0., places=12)
    self.assertAlmostEqual(w.value(1), 2. * u.value(1), places=12)

  def test_functional(self):
    rng = np.random.RandomState(6)
    ts = full_trace()
    u, w = TestFunction1D.random(rng), TestFunction1D.random(rng)
    v = TestFunction1D.random(rng)
    value = evaluate_functional(ts, u, w, v)
    # <Kv|Ku> - <w|v'> = <w'|v> + gamma^H (v(0), v(1))
    dw, gamma = functional_decomposition(ts, u, w)
    expected = l2_inner(dw, v) + np.vdot(gamma, v.trace())
    self.assertAlmostEqual(value, expected, places=10)
    self.assertGreater(np.linalg.norm(gamma), 1e-3)

  def test_staffans_full_trace(self):
    # Re[<u|w'> + <w|u'>] = |u(0)|^2 + |u(1)|^2 under the impedance condition
    rng = np.random.RandomState(7)
    b = forward_h(full_trace())
    for _ in range(5):
      u, w = sample_domain_pair(b, rng)
      self.assertAlmostEqual(staffans_form(u, w),
                             np.sum(np.abs(u.trace())**2),
                             places=10)


class IdentityTest(unittest.TestCase):

  def test_key_identity(self):
    rng = np.random.RandomState(8)
    for ts in (dirichlet(), neumann(), robin(1.), full_trace()):
      key, sym = key_identity_samples(forward_h(ts), ts, 50, rng)
      self.assertLess(key, 1e-10)
      self.assertLess(sym, 1e-10)

  def test_riesz(self):
    rng = np.random.RandomState(9)
    for ts in (dirichlet(), neumann(), robin(0.5), full_trace()):
      h = forward_h(ts).h
      f = rng.randn(2) + 1j * rng.randn(2)
      u, v = riesz_resolvent(ts, f)
      self.assertTrue(h.contains(u, v, tol=1e-10))
      np.testing.assert_allclose(u, resolvent_apply(h, 1., f).coords,
                                 atol=1e-10)


if __name__ == '__main__':
  unittest.main()

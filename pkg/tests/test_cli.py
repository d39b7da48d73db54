from __future__ import absolute_import, division, print_function

import os
import shutil
import tempfile
import unittest
from unittest import mock

import numpy as np
import pandas as pd

from mmbo.cli import EXIT_FAILED, EXIT_SUCCESS, EXIT_USAGE, main
from mmbo.errors import MalformedScenario, SingularSystem
from mmbo.evaluate import (Report, ScenarioSettings, _aggregate, bd_checks,
                           property_checks, replay_checks, robust_check,
                           scenario_checks)
from mmbo.path import SCENARIO_DIR
from mmbo.relation import random_monotone, relation_to_dict
from mmbo.scenarios import load_scenario
from mmbo.utils import load_json, save_json

np.random.seed(8)

_FAST = ScenarioSettings(seed=1, n_samples=24, n_nonmembers=4, n_identity=10,
                         n_test=5)


def _scenario(name):
  return load_scenario(os.path.join(SCENARIO_DIR, name + '.json'))


class EvaluateTest(unittest.TestCase):

  def test_bd_checks(self):
    report = bd_checks(seed=3, n_samples=20)
    self.assertTrue(report.verdict, msg=str(report.to_dict()))
    self.assertIn('gdot_adjoint', [r.name for r in report.records])
    self.assertEqual(report.to_frame().shape[0], len(report.records))

  def test_property_checks(self):
    report = property_checks(dims=(1, 2), trials=6, seed=5)
    self.assertTrue(report.verdict, msg=str(report.failures))
    self.assertEqual(len(report.failures), 0)
    names = [r.name for r in report.records]
    for name in ('minty_equivalence', 'adjoint_involution',
                 'inverse_involution', 'resolvent_nonexpansive',
                 'operator_is_maximal'):
      self.assertIn(name, names)
    for r in report.to_dict()['records']:
      self.assertIn('tolerance', r)
    with self.assertRaises(ValueError):
      property_checks(trials=0)
    with self.assertRaises(ValueError):
      property_checks(dims=(0, 2), trials=3)

  def test_replay(self):
    c = random_monotone(3, 'selfadjoint', seed=11)
    report = replay_checks(dict(relation=relation_to_dict(c), seed=11))
    self.assertTrue(report.verdict)
    self.assertEqual(report.seed, 11)
    self.assertIn('arens_round_trip', [r.name for r in report.records])

  def test_robust_check(self):
    report = Report(name='r', seed=0, version='0')

    def _fail():
      raise RuntimeError("broken")

    self.assertIsNone(robust_check(report, 'broken', _fail))
    self.assertFalse(report.verdict)
    record = report.records[0]
    self.assertTrue(np.isnan(record.value))
    self.assertIn('RuntimeError', record.detail)

  def test_scenarios(self):
    for name in ('dirichlet', 'neumann', 'robin_1', 'full_trace'):
      cfg = _scenario(name)
      cfg.evolution = None
      report, traj = scenario_checks(cfg, _FAST)
      self.assertIsNone(traj)
      self.assertTrue(report.verdict, msg=str(report.to_dict()))
      names = [r.name for r in report.records]
      for check in ('hypothesis', 'round_trip', 'key_identity',
                    'domain_agreement', 'd_extends'):
        self.assertIn(check, names, msg=name)

  def test_full_corpus(self):
    report = property_checks(dims=(1, 2, 3, 4, 5, 6), trials=200, seed=42)
    self.assertTrue(report.verdict, msg=str(report.failures[:3]))
    self.assertEqual(report.failures, [])
    self.assertNotIn('no_exception', [r.name for r in report.records])

  def test_signed_worst_value(self):
    report = property_checks(dims=(2, 3), trials=12, seed=9)
    records = {r.name: r for r in report.records}
    # the largest resolvent norm minus one, not the largest magnitude
    value = records['resolvent_nonexpansive'].value
    self.assertLessEqual(value, 1e-10)
    self.assertGreater(value, -1.)
    self.assertGreaterEqual(records['arens_psd'].value, -1e-12)
    # a zero resolvent does not hide a larger norm
    report = Report(name='r', seed=0, version='0')
    stats = {}
    _aggregate(report, stats, [('resolvent_nonexpansive', True, -1., 0.),
                               ('arens_psd', True, 0.5, 0.)], {})
    _aggregate(report, stats, [('resolvent_nonexpansive', True, -0.2, 0.),
                               ('arens_psd', True, 0.1, 0.)], {})
    self.assertEqual(stats['resolvent_nonexpansive'][0], -0.2)
    self.assertEqual(stats['arens_psd'][0], 0.1)

  def test_evolution_records(self):
    for name, dissipative in (('dirichlet', False), ('full_trace', True)):
      cfg = _scenario(name)
      cfg.evolution = dict(tau=0.01, steps=10, n=64, initial='bump')
      report, traj = scenario_checks(cfg, _FAST)
      self.assertEqual(len(traj.states), 11)
      self.assertTrue(report.verdict, msg=str(report.to_dict()))
      names = [r.name for r in report.records]
      for check in ('energy_non_increasing', 'discrete_contraction',
                    'endpoint_constraints'):
        self.assertIn(check, names, msg=name)
      self.assertEqual('strict_decrease' in names, dissipative, msg=name)

  def test_round_trip_breakdown(self):
    cfg = _scenario('dirichlet')
    cfg.evolution = None
    with mock.patch('mmbo.evaluate.forward_h',
                    side_effect=MalformedScenario("hypothesis fails")):
      report, traj = scenario_checks(cfg, _FAST)
    self.assertIsNone(traj)
    self.assertFalse(report.verdict)
    record = [r for r in report.records if r.name == 'round_trip'][0]
    self.assertFalse(record.passed)
    self.assertIn('MalformedScenario', record.detail)

  def test_skew_rejected(self):
    report, traj = scenario_checks(_scenario('skew'), _FAST)
    self.assertIsNone(traj)
    self.assertTrue(report.verdict)
    record = [r for r in report.records if r.name == 'reverse_construct'][0]
    self.assertTrue(record.expected_failure)
    self.assertGreater(record.value, 1e-3)


class CommandLineTest(unittest.TestCase):

  def setUp(self):
    self.out = tempfile.mkdtemp()

  def tearDown(self):
    shutil.rmtree(self.out)

  def _run(self, *argv):
    return main(list(argv) + ['--out', self.out])

  def test_usage(self):
    self.assertEqual(main([]), EXIT_USAGE)
    self.assertEqual(main(['--version']), EXIT_SUCCESS)
    self.assertEqual(self._run('scenario', 'no_such_scenario'), EXIT_USAGE)
    self.assertEqual(self._run('verify-relations', '--trials', '0'),
                     EXIT_USAGE)
    self.assertEqual(self._run('verify-bd', '--tol-scale', '0'), EXIT_USAGE)
    path = os.path.join(self.out, 'broken.json')
    with open(path, 'w') as f:
      f.write('{"name": "broken", "kind": "trace_system"}')
    self.assertEqual(self._run('scenario', path), EXIT_USAGE)

  def test_scenario(self):
    self.assertEqual(self._run('scenario', 'dirichlet'), EXIT_SUCCESS)
    report = load_json(os.path.join(self.out, 'dirichlet.json'))
    self.assertTrue(report['verdict'])
    self.assertEqual(report['seed'], 42)
    self.assertTrue(
        os.path.exists(os.path.join(self.out, 'dirichlet_checks.csv')))
    energy = pd.read_csv(os.path.join(self.out, 'dirichlet_energy.csv'))
    self.assertEqual(energy.shape[0], 101)

  def test_failed_run_exit_code(self):
    with mock.patch('mmbo.evaluate.forward_h',
                    side_effect=MalformedScenario("hypothesis fails")):
      self.assertEqual(self._run('scenario', 'dirichlet'), EXIT_FAILED)
    with mock.patch('mmbo.cli.bd_checks',
                    side_effect=SingularSystem("breakdown")):
      self.assertEqual(self._run('verify-bd'), EXIT_FAILED)

  def test_scenario_rejected(self):
    self.assertEqual(self._run('scenario', 'skew'), EXIT_SUCCESS)
    report = load_json(os.path.join(self.out, 'skew.json'))
    self.assertTrue(report['verdict'])
    self.assertTrue(any(r['expected_failure'] for r in report['records']))

  def test_verify_bd_deterministic(self):
    self.assertEqual(self._run('verify-bd', '--seed', '7'), EXIT_SUCCESS)
    path = os.path.join(self.out, 'verify_bd.json')
    with open(path, 'rb') as f:
      first = f.read()
    self.assertEqual(self._run('verify-bd', '--seed', '7'), EXIT_SUCCESS)
    with open(path, 'rb') as f:
      self.assertEqual(f.read(), first)

  def test_verify_relations(self):
    self.assertEqual(
        self._run('verify-relations', '--dims', '1', '3', '--trials', '6'),
        EXIT_SUCCESS)
    report = load_json(os.path.join(self.out, 'verify_relations.json'))
    self.assertTrue(report['verdict'])
    self.assertEqual(report['failures'], [])

  def test_replay(self):
    c = random_monotone(2, 'relation', seed=4)
    path = save_json(os.path.join(self.out, 'relation'), relation_to_dict(c))
    self.assertEqual(self._run('verify-relations', '--replay', path),
                     EXIT_SUCCESS)
    replayed = load_json(os.path.join(self.out, 'replay_0.json'))
    self.assertEqual(replayed['verdict'],
                     replay_checks(relation_to_dict(c)).verdict)

  def test_evolve(self):
    self.assertEqual(
        self._run('evolve', 'full_trace', '--steps', '20', '--n', '64'),
        EXIT_SUCCESS)
    energy = pd.read_csv(os.path.join(self.out, 'full_trace_energy.csv'))
    self.assertEqual(list(energy.columns),
                     ['step', 't', 'energy', 'energy_ratio'])
    self.assertEqual(energy.shape[0], 21)
    self.assertTrue(np.all(np.diff(energy['energy'].values) <= 0.))

  def test_convergence(self):
    self.assertEqual(
        self._run('convergence', 'dirichlet', '--grids', '64', '128', '256'),
        EXIT_SUCCESS)
    report = load_json(os.path.join(self.out, 'convergence_dirichlet.json'))
    self.assertTrue(report['verdict'])
    frame = pd.read_csv(os.path.join(self.out, 'dirichlet_convergence.csv'))
    self.assertEqual(list(frame['n']), [64, 128, 256])


if __name__ == '__main__':
  unittest.main()

from __future__ import absolute_import, division, print_function

import json
import os
import shutil
import tempfile
import unittest

import numpy as np
import pandas as pd

from mmbo.const import ScenarioKind
from mmbo.errors import MalformedScenario
from mmbo.hilbert import subspace_equal
from mmbo.path import SCENARIO_DIR
from mmbo.relation import is_maximal_monotone, is_selfadjoint
from mmbo.scenarios import (build_scenario, get_block_operator, get_scenario,
                            get_scenario_meta, load_scenario, parse_scenario,
                            robin, scenario_to_dict)
from mmbo.systemnode import TraceSystem, forward_h
from mmbo.utils import (decode_complex, encode_complex, load_json,
                        save_data_to_csv, save_json)

np.random.seed(8)

_BUNDLED = ('dirichlet', 'neumann', 'robin_0.5', 'robin_1', 'robin_2',
            'full_trace', 'skew')


class IOTest(unittest.TestCase):

  def setUp(self):
    self.folder = tempfile.mkdtemp()

  def tearDown(self):
    shutil.rmtree(self.folder)

  def test_complex_codec(self):
    x = np.array([[1. + 2.j, -0.5], [0., 3.j]])
    self.assertEqual(encode_complex(x)[0][0], [1., 2.])
    np.testing.assert_array_equal(decode_complex(encode_complex(x), ndim=2), x)
    # plain reals are accepted
    np.testing.assert_array_equal(decode_complex([[1, 0], [0, 1]], ndim=2),
                                  np.eye(2))
    np.testing.assert_array_equal(decode_complex([1, 0], ndim=1), [1, 0])
    self.assertEqual(decode_complex([], ndim=2).shape, (0, 0))
    with self.assertRaises(ValueError):
      decode_complex([[1., 2.], [3.]], ndim=2)
    with self.assertRaises(ValueError):
      decode_complex([[True, 0.]], ndim=2)

  def test_atomic_writes(self):
    path = save_json(os.path.join(self.folder, 'report'), dict(b=1, a=[1.5]))
    self.assertTrue(path.endswith('report.json'))
    self.assertEqual(load_json(path), dict(a=[1.5], b=1))
    df = pd.DataFrame({'x': [0.1, 1. / 3]})
    path = save_data_to_csv(os.path.join(self.folder, 'data'), df)
    self.assertTrue(path.endswith('data.csv'))
    self.assertEqual(pd.read_csv(path)['x'].iloc[1], 1. / 3)
    # no temporary file is left behind
    self.assertEqual(sorted(os.listdir(self.folder)),
                     ['data.csv', 'report.json'])


class ScenarioTest(unittest.TestCase):

  def test_bundled(self):
    for name in _BUNDLED:
      cfg = load_scenario(os.path.join(SCENARIO_DIR, name + '.json'))
      h, ts = build_scenario(cfg)
      self.assertEqual(h.dim, 2, msg=name)
      self.assertTrue(is_maximal_monotone(h).maximal, msg=name)
      self.assertEqual(is_selfadjoint(h), not cfg.expect_reject, msg=name)
      self.assertEqual(ts is None,
                       cfg.kind == ScenarioKind.boundary_relation,
                       msg=name)

  def test_bundled_matches_registry(self):
    for file_name, name in (('robin_2', 'robin2'), ('full_trace',
                                                    'full_trace'),
                            ('dirichlet', 'dirichlet')):
      h, _ = build_scenario(
          load_scenario(os.path.join(SCENARIO_DIR, file_name + '.json')))
      self.assertTrue(
          subspace_equal(h.graph, get_block_operator(name).h.graph, tol=1e-9))

  def test_parse_errors(self):
    good = dict(name='s', kind='trace_system', v_basis=[[1, 0]], m=[])
    cfg = parse_scenario(good)
    self.assertEqual(cfg.v_basis.shape, (2, 1))
    self.assertEqual(cfg.m.shape, (0, 2))
    bad = [
        [],
        dict(good, name=''),
        dict(good, kind='operator'),
        dict(good, extra=1),
        dict(name='s', kind='trace_system', v_basis=[[1, 0]]),
        dict(good, v_basis=[[1, 0, 0]]),
        dict(good, m=[[1, 0], [1]]),
        dict(good, evolution=dict(tau=0.1, dt=0.1)),
        dict(name='s', kind='boundary_relation'),
        dict(name='s', kind='boundary_relation', h_form=[[1, 0], [0, 1]],
             h_basis=[[1, 0, 0, 0]]),
        dict(name='s', kind='boundary_relation', h_form=[[1, 0, 0]]),
        dict(name='s', kind='boundary_relation', h_basis=[[1, 0, 0]]),
        dict(name='s', kind='boundary_relation', v_basis=[[1, 0]]),
    ]
    for obj in bad:
      with self.assertRaises(MalformedScenario, msg=str(obj)):
        parse_scenario(obj)

  def test_load_errors(self):
    folder = tempfile.mkdtemp()
    try:
      with self.assertRaises(FileNotFoundError):
        load_scenario(os.path.join(folder, 'missing.json'))
      path = os.path.join(folder, 'broken.json')
      with open(path, 'w') as f:
        f.write('{"name": ')
      with self.assertRaises(MalformedScenario):
        load_scenario(path)
    finally:
      shutil.rmtree(folder)

  def test_to_dict(self):
    cfg = load_scenario(os.path.join(SCENARIO_DIR, 'full_trace.json'))
    obj = json.loads(json.dumps(scenario_to_dict(cfg)))
    cfg2 = parse_scenario(obj)
    np.testing.assert_array_equal(cfg2.v_basis, cfg.v_basis)
    np.testing.assert_array_equal(cfg2.m, cfg.m)
    self.assertEqual(cfg2.evolution, cfg.evolution)
    skew = load_scenario(os.path.join(SCENARIO_DIR, 'skew.json'))
    self.assertTrue(parse_scenario(scenario_to_dict(skew)).expect_reject)

  def test_h_basis(self):
    obj = dict(name='mv',
               kind='boundary_relation',
               h_basis=[[0, 0, 1, 0], [0, 0, 0, 1]])
    h, ts = build_scenario(parse_scenario(obj))
    self.assertIsNone(ts)
    self.assertEqual(h.multivalued_part().dim, 2)

  def test_registry(self):
    meta = get_scenario_meta()
    self.assertEqual(
        sorted(meta.keys()),
        sorted([
            'dirichlet', 'neumann', 'robin0.5', 'robin1', 'robin2',
            'full_trace', 'random_diag', 'random_rank1', 'skew'
        ]))
    self.assertIsInstance(get_scenario(' Robin1 '), TraceSystem)
    self.assertEqual(get_scenario('robin0.5').name, 'robin0.5')
    with self.assertRaises(ValueError):
      get_scenario('periodic')
    for name in meta:
      b = get_block_operator(name)
      self.assertEqual(b.rank, 2, msg=name)
    # random relations are selfadjoint and maximal monotone
    for name in ('random_diag', 'random_rank1'):
      h = get_scenario(name)
      self.assertTrue(is_selfadjoint(h))
      self.assertTrue(is_maximal_monotone(h).maximal)
    self.assertEqual(get_scenario('random_rank1').domain().dim, 1)
    self.assertEqual(forward_h(robin(0.5)).h.dim, 2)


if __name__ == '__main__':
  unittest.main()

from __future__ import absolute_import, division, print_function

import dataclasses
import json
import os
from functools import partial
from typing import List, Optional, Tuple, Union

import numpy as np

from mmbo.bdspace import boundary_space
from mmbo.const import BDKind, ScenarioKind
from mmbo.errors import MalformedScenario
from mmbo.hilbert import complement, orthonormal_basis
from mmbo.relation import LinearRelation
from mmbo.systemnode import (BlockOperator, TraceSystem, block_operator,
                             forward_h)
from mmbo.utils.io_utils import decode_complex, encode_complex

__all__ = [
    'ScenarioConfig', 'parse_scenario', 'load_scenario', 'scenario_to_dict',
    'build_scenario', 'dirichlet', 'neumann', 'robin', 'full_trace',
    'random_diag', 'random_rank1', 'skew', 'get_scenario_meta',
    'get_scenario', 'get_block_operator', 'round_trip_suite'
]

_COMMON_KEYS = {'name', 'kind', 'expect_reject', 'evolution', 'description'}
_PAYLOAD = {
    ScenarioKind.trace_system: {'v_basis', 'm'},
    ScenarioKind.boundary_relation: {'h_basis', 'h_form'},
}
_EVOLUTION_KEYS = {'tau', 'steps', 'n', 'initial'}


# ===========================================================================
# Config format
# ===========================================================================
@dataclasses.dataclass
class ScenarioConfig:
  r"""
  Attributes:
    v_basis : `[2, k]` spanning vectors of `V` (trace systems)
    m : `[u_dim, 2]` boundary map (trace systems)
    h_basis : `[4, k]` graph spanning vectors in BD coordinates
    h_form : `[2, 2]` matrix `K`, the relation is the operator
      `gram^{-1} K` on `BD(G)`
  """
  name: str
  kind: ScenarioKind
  v_basis: Optional[np.ndarray] = None
  m: Optional[np.ndarray] = None
  h_basis: Optional[np.ndarray] = None
  h_form: Optional[np.ndarray] = None
  expect_reject: bool = False
  evolution: Optional[dict] = None
  description: str = ''


def _matrix(obj, key, name) -> np.ndarray:
  try:
    return decode_complex(obj[key], ndim=2)
  except (ValueError, TypeError) as e:
    raise MalformedScenario("Scenario '%s': field '%s' is not a rectangular "
                            "complex matrix (%s)" % (name, key, e))


def parse_scenario(obj: dict) -> ScenarioConfig:
  r""" Validate a decoded JSON scenario

  Raises:
    MalformedScenario : missing or unknown fields, both or neither payload,
      non-rectangular matrices
  """
  if not isinstance(obj, dict):
    raise MalformedScenario("Scenario must be a JSON object, given: %s" %
                            type(obj).__name__)
  name = obj.get('name', None)
  if not isinstance(name, str) or len(name) == 0:
    raise MalformedScenario("Scenario needs a non-empty 'name'")
  try:
    kind = ScenarioKind(obj.get('kind', None))
  except ValueError:
    raise MalformedScenario("Scenario '%s': unknown kind %s" %
                            (name, obj.get('kind', None)))
  allowed = _COMMON_KEYS | _PAYLOAD[kind]
  extra = set(obj.keys()) - allowed
  if extra:
    raise MalformedScenario("Scenario '%s': unknown fields %s" %
                            (name, sorted(extra)))
  cfg = ScenarioConfig(name=name,
                       kind=kind,
                       expect_reject=bool(obj.get('expect_reject', False)),
                       description=str(obj.get('description', '')))
  if kind == ScenarioKind.trace_system:
    missing = _PAYLOAD[kind] - set(obj.keys())
    if missing:
      raise MalformedScenario("Scenario '%s': missing fields %s" %
                              (name, sorted(missing)))
    v = _matrix(obj, 'v_basis', name)
    if v.shape[0] > 0 and v.shape[1] != 2:
      raise MalformedScenario("Scenario '%s': V vectors must be pairs" % name)
    cfg.v_basis = v.reshape(-1, 2).T
    m = _matrix(obj, 'm', name)
    if m.shape[0] > 0 and m.shape[1] != 2:
      raise MalformedScenario("Scenario '%s': M needs 2 columns" % name)
    cfg.m = m.reshape(-1, 2)
  else:
    given = _PAYLOAD[kind] & set(obj.keys())
    if len(given) != 1:
      raise MalformedScenario("Scenario '%s': exactly one of h_basis, h_form "
                              "required" % name)
    if 'h_basis' in given:
      h = _matrix(obj, 'h_basis', name)
      if h.shape[0] == 0 or h.shape[1] != 4:
        raise MalformedScenario("Scenario '%s': h_basis needs 4-tuples" %
                                name)
      cfg.h_basis = h.T
    else:
      h = _matrix(obj, 'h_form', name)
      if h.shape != (2, 2):
        raise MalformedScenario("Scenario '%s': h_form must be 2 x 2" % name)
      cfg.h_form = h
  evolution = obj.get('evolution', None)
  if evolution is not None:
    if not isinstance(evolution, dict) or \
        set(evolution.keys()) - _EVOLUTION_KEYS:
      raise MalformedScenario("Scenario '%s': evolution accepts only %s" %
                              (name, sorted(_EVOLUTION_KEYS)))
    cfg.evolution = dict(evolution)
  return cfg


def load_scenario(path: str) -> ScenarioConfig:
  r""" Read a UTF-8 JSON scenario, `FileNotFoundError` when missing """
  if not os.path.isfile(path):
    raise FileNotFoundError("Cannot find scenario at: %s" % path)
  with open(path, 'r', encoding='utf-8') as f:
    try:
      obj = json.load(f)
    except json.JSONDecodeError as e:
      raise MalformedScenario("Invalid JSON in %s: %s" % (path, e))
  return parse_scenario(obj)


def scenario_to_dict(cfg: ScenarioConfig) -> dict:
  obj = dict(name=cfg.name, kind=cfg.kind.value)
  if cfg.kind == ScenarioKind.trace_system:
    obj['v_basis'] = encode_complex(cfg.v_basis.T)
    obj['m'] = encode_complex(cfg.m)
  elif cfg.h_basis is not None:
    obj['h_basis'] = encode_complex(cfg.h_basis.T)
  else:
    obj['h_form'] = encode_complex(cfg.h_form)
  if cfg.expect_reject:
    obj['expect_reject'] = True
  if cfg.evolution is not None:
    obj['evolution'] = dict(cfg.evolution)
  if cfg.description:
    obj['description'] = cfg.description
  return obj


def _relation_from_form(form) -> LinearRelation:
  space = boundary_space(BDKind.G).hilbert
  return LinearRelation.from_operator(space,
                                      np.linalg.solve(space.gram, form))


def build_scenario(
    cfg: ScenarioConfig
) -> Tuple[LinearRelation, Optional[TraceSystem]]:
  r""" The boundary relation of a scenario, and its trace system when the
  scenario gives one """
  if cfg.kind == ScenarioKind.trace_system:
    ts = TraceSystem.create(cfg.v_basis, cfg.m, name=cfg.name)
    return forward_h(ts).h, ts
  if cfg.h_form is not None:
    return _relation_from_form(cfg.h_form), None
  space = boundary_space(BDKind.G).hilbert
  return LinearRelation.from_spanning(space, space, cfg.h_basis[:2],
                                      cfg.h_basis[2:]), None


# ===========================================================================
# Named scenarios
# ===========================================================================
def dirichlet() -> TraceSystem:
  return TraceSystem.create(np.zeros((2, 0)), np.zeros((0, 2)), 0,
                            'dirichlet')


def neumann() -> TraceSystem:
  return TraceSystem.create(np.eye(2), np.zeros((0, 2)), 0, 'neumann')


def robin(k: float = 1.) -> TraceSystem:
  r""" `w(0) = 0`, `w(1) = k u(1)` """
  if not k > 0:
    raise ValueError("Robin coefficient must be positive, given: %s" % k)
  return TraceSystem.create(np.eye(2), [[0., np.sqrt(k)]], 1, 'robin%g' % k)


def full_trace() -> TraceSystem:
  r""" Impedance condition `w(0) = -u(0)`, `w(1) = u(1)` """
  return TraceSystem.create(np.eye(2), np.eye(2), 2, 'full_trace')


def random_diag(seed: int = 0) -> LinearRelation:
  r""" `S = Q diag(d) Q^H gram` for a random gram-orthonormal `Q` and
  `d` in [0.1, 3] """
  rng = np.random.RandomState(seed)
  space = boundary_space(BDKind.G).hilbert
  q = orthonormal_basis(space, rng.randn(2, 2) + 1j * rng.randn(2, 2)).basis
  d = rng.uniform(0.1, 3., size=2)
  return LinearRelation.from_operator(space,
                                      q @ np.diag(d) @ q.conj().T @ space.gram)


def random_rank1(seed: int = 0) -> LinearRelation:
  r""" `S` on a random line `U` plus the multivalued part `{0} x U⊥` """
  rng = np.random.RandomState(seed)
  space = boundary_space(BDKind.G).hilbert
  u = orthonormal_basis(space, rng.randn(2, 1) + 1j * rng.randn(2, 1))
  perp = complement(u)
  lam = rng.uniform(0.1, 3.)
  x = np.hstack([u.basis, np.zeros((2, 1))])
  y = np.hstack([lam * u.basis, perp.basis])
  return LinearRelation.from_spanning(space, space, x, y)


def skew() -> LinearRelation:
  r""" The maximal monotone, non selfadjoint rotation `gram^{-1} [[0, 1],
  [-1, 0]]` """
  return _relation_from_form(np.array([[0., 1.], [-1., 0.]]))


def get_scenario_meta():
  r"""
  Return:
    a Dictionary : mapping from scenario name -> factory()
  """
  return {
      # ====== trace systems ====== #
      'dirichlet': dirichlet,
      'neumann': neumann,
      'robin0.5': partial(robin, k=0.5),
      'robin1': partial(robin, k=1.),
      'robin2': partial(robin, k=2.),
      'full_trace': full_trace,
      # ====== boundary relations ====== #
      'random_diag': partial(random_diag, seed=1),
      'random_rank1': partial(random_rank1, seed=2),
      'skew': skew,
  }


def get_scenario(name: str) -> Union[TraceSystem, LinearRelation]:
  name = str(name).lower().strip()
  meta = get_scenario_meta()
  if name not in meta:
    raise ValueError("Cannot find scenario with name: %s, all available "
                     "scenarios are: %s" % (name, ', '.join(meta.keys())))
  return meta[name]()


def get_block_operator(name: str) -> BlockOperator:
  obj = get_scenario(name)
  if isinstance(obj, TraceSystem):
    return forward_h(obj)
  return block_operator(obj)


def round_trip_suite(seed: int = 0) -> List[Tuple[str, LinearRelation]]:
  r""" The boundary relations every trace system round trip is checked on:
  Dirichlet, Neumann, three Robin coefficients, full trace and two random
  selfadjoint relations (one with a multivalued part) """
  suite = []
  for name in ('dirichlet', 'neumann', 'robin0.5', 'robin1', 'robin2',
               'full_trace'):
    suite.append((name, forward_h(get_scenario(name)).h))
  suite.append(('random_diag', random_diag(seed)))
  suite.append(('random_rank1', random_rank1(seed + 1)))
  return suite

r""" Verification suites producing `Report`s of `CheckRecord`s, the
command line interface only schedules these and writes the results. """
from __future__ import absolute_import, division, print_function

import dataclasses
import logging
import sys
import traceback
from io import StringIO
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from mmbo.arens import decompose, reconstruct
from mmbo.bdspace import (COSH1, SINH1, SWAP, TestFunction1D, apply_ddot,
                          apply_gdot, bd_function, boundary_space,
                          gram_matrices, graph_inner, project_boundary,
                          quadrature_gram)
from mmbo.const import (EQUAL_TOL, MINTY_LAMBDAS, MONOTONE_TOL, BDKind,
                        MonotoneKind)
from mmbo.errors import (InconsistencyError, MalformedScenario,
                         NotMaximalMonotone, NotSelfadjoint)
from mmbo.hilbert import principal_angles, subspace_equal
from mmbo.relation import (LinearRelation, adjoint, inverse,
                           is_maximal_monotone, random_monotone,
                           relation_from_dict, relation_to_dict,
                           resolvent_apply, resolvent_norm,
                           selfadjoint_defect)
from mmbo.scenarios import ScenarioConfig, build_scenario
from mmbo.semigroup import (EvolutionConfig, Trajectory, contraction_ratio,
                            evolve, initial_data)
from mmbo.systemnode import (TraceSystem, block_operator, check_hypothesis,
                             domain_membership, forward_h,
                             functional_membership,
                             key_identity_samples, rebase, reverse_construct,
                             riesz_resolvent, sample_domain_pair,
                             staffans_form)

__all__ = [
    'CheckRecord', 'Report', 'robust_check', 'bd_checks', 'relation_checks',
    'property_checks', 'replay_checks', 'scenario_checks'
]

logger = logging.getLogger(__name__)


# ===========================================================================
# Records
# ===========================================================================
@dataclasses.dataclass
class CheckRecord:
  name: str
  passed: bool
  value: float
  tolerance: float
  expected_failure: bool = False
  detail: str = ''

  def to_dict(self) -> dict:
    return dict(name=self.name,
                passed=bool(self.passed),
                value=float(self.value),
                tolerance=float(self.tolerance),
                expected_failure=bool(self.expected_failure),
                detail=self.detail)


@dataclasses.dataclass
class Report:
  name: str
  seed: int
  version: str
  records: List[CheckRecord] = dataclasses.field(default_factory=list)
  failures: List[dict] = dataclasses.field(default_factory=list)

  @property
  def verdict(self) -> bool:
    return all(r.passed for r in self.records)

  def add(self, name, passed, value, tolerance, expected_failure=False,
          detail='') -> CheckRecord:
    record = CheckRecord(name=name,
                         passed=bool(passed),
                         value=float(value),
                         tolerance=float(tolerance),
                         expected_failure=bool(expected_failure),
                         detail=str(detail))
    self.records.append(record)
    if not record.passed:
      logger.warning("[%s] check '%s' failed: value=%g tolerance=%g %s",
                     self.name, name, record.value, record.tolerance, detail)
    return record

  def to_dict(self) -> dict:
    return dict(name=self.name,
                seed=int(self.seed),
                version=self.version,
                verdict=self.verdict,
                records=[r.to_dict() for r in self.records],
                failures=self.failures)

  def to_frame(self) -> pd.DataFrame:
    return pd.DataFrame([r.to_dict() for r in self.records],
                        columns=[
                            'name', 'passed', 'value', 'tolerance',
                            'expected_failure', 'detail'
                        ])


def robust_check(report: Report, check_name: str, fn, *args, **kwargs):
  r""" Run a check function and record an exception as a failed check
  without interrupting the suite """
  assert callable(fn)
  try:
    return fn(*args, **kwargs)
  except Exception as e:
    text = StringIO()
    traceback.print_exception(*sys.exc_info(), limit=None, file=text)
    text.seek(0)
    logger.debug(text.read().strip())
    report.add(check_name, False, np.nan, np.nan,
               detail='%s: %s' % (type(e).__name__, e))
    return None


def _version() -> str:
  from mmbo import __version__
  return __version__


# ===========================================================================
# Boundary data spaces
# ===========================================================================
def bd_checks(seed: int = 0, n_samples: int = 50,
              tol_scale: float = 1.) -> Report:
  r""" Closed forms, unitarity and projection properties of `BD(G)`,
  `BD(D)` """
  report = Report(name='verify-bd', seed=seed, version=_version())
  rng = np.random.RandomState(seed)
  gram_g, gram_d = gram_matrices()
  bd_g, bd_d = boundary_space(BDKind.G), boundary_space(BDKind.D)
  # closed forms
  err = float(np.max(np.abs(gram_g - quadrature_gram())))
  report.add('gram_quadrature', err <= 1e-13 * tol_scale, err,
             1e-13 * tol_scale)
  err = float(np.max(np.abs(gram_g - gram_d)))
  report.add('gram_g_equals_d', err == 0., err, 0.)
  err = float(np.linalg.norm(SWAP.T @ gram_d @ SWAP - gram_g))
  report.add('gdot_unitary', err <= 1e-14 * tol_scale, err,
             1e-14 * tol_scale)
  err = float(
      np.max(
          np.abs(
              project_boundary(BDKind.G, 1., 0.).coords -
              np.array([1., -COSH1 / SINH1]))))
  err = max(
      err,
      float(
          np.max(
              np.abs(
                  project_boundary(BDKind.G, 0., 1.).coords -
                  np.array([0., 1. / SINH1])))))
  report.add('projection_closed_form', err <= 1e-14 * tol_scale, err,
             1e-14 * tol_scale)
  # random samples
  adj_err, ident_err, orth_err, proj_err = 0., 0., 0., 0.
  members = True
  for _ in range(int(n_samples)):
    x = bd_g.vector(rng.randn(2) + 1j * rng.randn(2))
    z = bd_d.vector(rng.randn(2) + 1j * rng.randn(2))
    lhs, rhs = apply_gdot(x).inner(z), x.inner(apply_ddot(z))
    adj_err = max(adj_err, abs(lhs - rhs) / max(1., abs(lhs)))
    ident_err = max(ident_err,
                    float(np.max(np.abs(apply_ddot(apply_gdot(x)).coords -
                                        x.coords))))
    members &= bd_function(x).is_boundary_data
    u = TestFunction1D.random(rng)
    interior = u.interior_part()
    for basis in (TestFunction1D.cosh(), TestFunction1D.sinh()):
      orth_err = max(orth_err, abs(graph_inner(interior, basis)))
    residual = u - bd_function(u.boundary_part())
    proj_err = max(proj_err,
                   float(np.max(np.abs(residual.trace()))) /
                   max(1., float(np.max(np.abs(u.trace())))))
  report.add('gdot_adjoint', adj_err <= 1e-12 * tol_scale, adj_err,
             1e-12 * tol_scale)
  report.add('ddot_gdot_identity', ident_err == 0., ident_err, 0.)
  report.add('bd_membership', members, 0. if members else 1., 0.)
  report.add('interior_orthogonality', orth_err < 1e-11 * tol_scale, orth_err,
             1e-11 * tol_scale)
  report.add('projection_consistency', proj_err < 1e-13 * tol_scale,
             proj_err, 1e-13 * tol_scale)
  return report


# ===========================================================================
# Relation corpus
# ===========================================================================
def relation_checks(c: LinearRelation,
                    tol_scale: float = 1.) -> List[Tuple[str, bool, float,
                                                         float]]:
  r""" The checks run on every relation of the random corpus

  Return:
    list of `(check name, passed, measured value, tolerance)`
  """
  results = []
  eq_tol = EQUAL_TOL * tol_scale
  # Minty verdicts against C and C* monotone
  try:
    report = is_maximal_monotone(c, tol=MONOTONE_TOL * tol_scale)
    results.append(('minty_equivalence', True, 0., 0.))
  except InconsistencyError as e:
    logger.debug("Minty disagreement: %s", e)
    report = None
    results.append(('minty_equivalence', False, 1., 0.))
  # involutions
  angles = principal_angles(adjoint(adjoint(c)).graph, c.graph)
  value = float(np.max(angles, initial=0.))
  passed = subspace_equal(adjoint(adjoint(c)).graph, c.graph, tol=eq_tol)
  results.append(('adjoint_involution', passed, value, eq_tol))
  inv = inverse(inverse(c))
  value = float(np.max(principal_angles(inv.graph, c.graph), initial=0.))
  results.append(('inverse_involution',
                  subspace_equal(inv.graph, c.graph, tol=eq_tol), value,
                  eq_tol))
  # resolvent
  if report is not None and report.maximal:
    tol = 1e-10 * tol_scale
    value = max(resolvent_norm(c, lam) for lam in MINTY_LAMBDAS) - 1.
    results.append(('resolvent_nonexpansive', value <= tol, value, tol))
  # Arens decomposition
  if selfadjoint_defect(c) < eq_tol:
    dec = decompose(c)
    rec = reconstruct(dec)
    value = float(np.max(principal_angles(rec.graph, c.graph), initial=0.))
    results.append(('arens_round_trip',
                    subspace_equal(rec.graph, c.graph, tol=eq_tol), value,
                    eq_tol))
    if report is not None and report.monotone:
      eigs = dec.eigenvalues
      value = float(np.min(eigs, initial=0.))
      tol = 1e-12 * tol_scale
      results.append(('arens_psd', value >= -tol, value, tol))
  return results


# checks passing when the value stays above a lower bound
_LOWER_BOUNDED = ('arens_psd',)


def _aggregate(report: Report, stats: Dict[str, list], results, payload):
  for name, passed, value, tol in results:
    worst, tolerance, failed = stats.get(name, [np.nan, tol, 0])
    if np.isfinite(value):
      if np.isnan(worst):
        worst = value
      elif name in _LOWER_BOUNDED:
        worst = min(worst, value)
      else:
        worst = max(worst, value)
    if not passed:
      failed += 1
      report.failures.append(dict(payload, check=name))
    stats[name] = [worst, tolerance, failed]


def property_checks(dims: Sequence[int] = (1, 2, 3, 4, 5, 6),
                    trials: int = 200,
                    seed: int = 0,
                    tol_scale: float = 1.,
                    verbose: bool = False) -> Report:
  r""" Minty equivalence, involutions, resolvent nonexpansiveness and the
  Arens round trip over a random corpus of monotone relations

  Failing relations are stored in `report.failures` for replay.
  """
  dims = [int(d) for d in dims]
  if int(trials) < 1:
    raise ValueError("Need at least one trial, given: %s" % trials)
  if len(dims) == 0 or any(d < 1 or d > 8 for d in dims):
    raise ValueError("Dimensions must lie in [1, 8], given: %s" % dims)
  report = Report(name='verify-relations', seed=seed, version=_version())
  rng = np.random.RandomState(seed)
  kinds = list(MonotoneKind)
  stats = {}
  for trial in tqdm(range(int(trials)),
                    desc="Relation corpus",
                    disable=not verbose):
    kind = kinds[trial % len(kinds)]
    dim = dims[(trial // len(kinds)) % len(dims)]
    trial_seed = int(rng.randint(0, 2**31 - 1))
    c = random_monotone(dim, kind, trial_seed)
    payload = dict(trial=trial,
                   seed=trial_seed,
                   dim=dim,
                   kind=kind.value,
                   relation=relation_to_dict(c))
    try:
      results = relation_checks(c, tol_scale=tol_scale)
    except Exception as e:
      logger.debug("trial %d raised %s", trial, e)
      results = [('no_exception', False, np.nan, 0.)]
    if kind == MonotoneKind.operator:
      maximal = [r for r in results if r[0] == 'resolvent_nonexpansive']
      results.append(('operator_is_maximal', len(maximal) == 1, 0., 0.))
    _aggregate(report, stats, results, payload)
  for name, (worst, tol, failed) in stats.items():
    report.add(name, failed == 0, worst, tol,
               detail='%d/%d failed' % (failed, trials) if failed else '')
  return report


def replay_checks(obj: dict, tol_scale: float = 1.) -> Report:
  r""" Re-run the corpus checks on a serialized relation (a failure entry
  of a previous report, or a bare relation) """
  relation = obj['relation'] if 'relation' in obj else obj
  c = relation_from_dict(relation)
  report = Report(name='replay', seed=int(obj.get('seed', 0)),
                  version=_version())
  for name, passed, value, tol in relation_checks(c, tol_scale=tol_scale):
    report.add(name, passed, value, tol)
  return report


# ===========================================================================
# Scenarios
# ===========================================================================
@dataclasses.dataclass
class ScenarioSettings:
  seed: int = 0
  n_samples: int = 100
  n_nonmembers: int = 20
  n_identity: int = 50
  n_test: int = 20
  tol_scale: float = 1.
  evolve: bool = False
  tau: float = 0.01
  steps: int = 100
  n: int = 256
  initial: str = 'bump'
  verbose: bool = False


def _check_domain(report: Report, b, ts: TraceSystem,
                  settings: ScenarioSettings):
  rng = np.random.RandomState(settings.seed + 1)
  tol = settings.tol_scale
  n_non = min(int(settings.n_nonmembers), int(settings.n_samples))
  disagree, misplaced, d_ext, staffans = 0, 0, 0., np.inf
  for i in range(int(settings.n_samples)):
    member = i >= n_non
    u, w = sample_domain_pair(b, rng, member=member)
    bool_i, bool_ii = domain_membership(b, ts, u, w)
    disagree += int(bool_i != bool_ii)
    misplaced += int(bool_ii != member)
    if member:
      if i - n_non < settings.n_test:
        _, residual = functional_membership(ts, u, w, n_test=settings.n_test,
                                            seed=settings.seed + i)
        d_ext = max(d_ext, residual)
      scale = max(1., float(np.max(np.abs(np.concatenate(
          [u.trace(), w.trace()])))))**2
      staffans = min(staffans, staffans_form(u, w) / scale)
  report.add('domain_agreement', disagree == 0, disagree, 0.)
  report.add('domain_sampling', misplaced == 0, misplaced, 0.)
  report.add('d_extends', d_ext <= 1e-10 * tol, d_ext, 1e-10 * tol)
  report.add('staffans_monotone', staffans >= -1e-10 * tol, staffans,
             1e-10 * tol)


def _check_evolution(report: Report, b, settings: ScenarioSettings,
                     evolution: Optional[dict]) -> Trajectory:
  evolution = {} if evolution is None else evolution
  cfg = EvolutionConfig(block=b,
                        tau=float(evolution.get('tau', settings.tau)),
                        steps=int(evolution.get('steps', settings.steps)),
                        n=int(evolution.get('n', settings.n)),
                        name=report.name)
  u0, w0 = initial_data(evolution.get('initial', settings.initial), cfg.n)
  traj = evolve(cfg, u0, w0, verbose=settings.verbose)
  e = traj.energies
  increase = float(np.max(np.diff(e), initial=0.)) / e[0] if e[0] > 0 else 0.
  report.add('energy_non_increasing', increase <= 1e-3 * settings.tol_scale,
             increase, 1e-3 * settings.tol_scale)
  # discrete resolvent on random smooth data
  slack = 5. / (cfg.n - 1)**2 * settings.tol_scale
  ratio = contraction_ratio(b, cfg.tau, cfg.n,
                            np.random.RandomState(settings.seed + 2),
                            trials=3)
  report.add('discrete_contraction', ratio - 1. <= slack, ratio - 1., slack)
  # every computed state meets the endpoint constraints
  endpoint = 0.
  for u, w in traj.states[1:]:
    t = np.array([u.values[0], u.values[-1], w.values[0], w.values[-1]])
    endpoint = max(endpoint,
                   float(np.linalg.norm(b.constraints @ t)) /
                   max(1., float(np.linalg.norm(t))))
  report.add('endpoint_constraints', endpoint <= 1e-10 * settings.tol_scale,
             endpoint, 1e-10 * settings.tol_scale)
  # a nonzero K absorbs energy at the boundary
  ts = b.trace_system
  if ts is not None and ts.u_dim > 0 and np.linalg.norm(ts.m) > 0 and \
      len(e) > 1 and e[0] > 0:
    step = float(np.max(np.diff(e))) / e[0]
    report.add('strict_decrease', step < 0., step, 0.)
  return traj


def scenario_checks(
    cfg: ScenarioConfig,
    settings: ScenarioSettings = None) -> Tuple[Report, Optional[Trajectory]]:
  r""" Run every boundary relation check of a scenario

  Return:
    the report and the energy trajectory when an evolution was requested
  """
  settings = ScenarioSettings() if settings is None else settings
  tol = settings.tol_scale
  report = Report(name=cfg.name, seed=settings.seed, version=_version())
  h, ts = build_scenario(cfg)
  if ts is not None:
    hyp = check_hypothesis(ts, seed=settings.seed)
    report.add('hypothesis', hyp.valid, hyp.max_ratio, hyp.upper_bound,
               detail='; '.join(hyp.messages))
  mm = is_maximal_monotone(h, tol=MONOTONE_TOL * tol)
  report.add('maximal_monotone', mm.maximal, mm.min_eigenvalue,
             -MONOTONE_TOL * tol)
  # reverse direction, rejected for non selfadjoint relations
  try:
    ts_rev = reverse_construct(h, name=cfg.name)
  except (NotSelfadjoint, NotMaximalMonotone) as e:
    certificate = getattr(e, 'certificate', np.nan)
    report.add('reverse_construct',
               cfg.expect_reject,
               np.nan if certificate is None else certificate,
               EQUAL_TOL * tol,
               expected_failure=cfg.expect_reject,
               detail='%s: %s' % (type(e).__name__, e))
    return report, None
  if cfg.expect_reject:
    report.add('reverse_construct', False, 0., EQUAL_TOL * tol,
               detail='expected a rejection')
    return report, None
  defect = selfadjoint_defect(h)
  report.add('selfadjoint', defect < EQUAL_TOL * tol, defect, EQUAL_TOL * tol)
  # round trip of the main equivalence, a constructed system failing the
  # hypothesis is a failed check rather than a malformed input
  try:
    h2 = forward_h(ts_rev).h
  except MalformedScenario as e:
    report.add('round_trip', False, np.nan, 1e-9 * tol,
               detail='%s: %s' % (type(e).__name__, e))
    return report, None
  angle = float(np.max(principal_angles(h2.graph, h.graph), initial=0.)) \
    if h2.dim == h.dim else np.inf
  report.add('round_trip', subspace_equal(h2.graph, h.graph, tol=1e-9 * tol),
             angle, 1e-9 * tol)
  rng = np.random.RandomState(settings.seed)
  if ts_rev.u_dim > 0:
    z = rng.randn(ts_rev.u_dim, ts_rev.u_dim) + \
      1j * rng.randn(ts_rev.u_dim, ts_rev.u_dim)
    unitary, _ = np.linalg.qr(z)
    h3 = forward_h(rebase(ts_rev, unitary)).h
    report.add('rebase_invariance',
               subspace_equal(h3.graph, h.graph, tol=1e-9 * tol),
               float(np.max(principal_angles(h3.graph, h.graph),
                            initial=0.)), 1e-9 * tol)
  ts_used = ts_rev if ts is None else ts
  b = block_operator(h, ts_used)
  report.add('constraint_rank', b.rank == 4 - h.dim, b.rank, 4 - h.dim)
  key, sym = key_identity_samples(b, ts_used, settings.n_identity, rng)
  report.add('key_identity', key <= 1e-10 * tol, key, 1e-10 * tol)
  report.add('symmetric_identity', sym <= 1e-10 * tol, sym, 1e-10 * tol)
  f = rng.randn(2) + 1j * rng.randn(2)
  u, _ = riesz_resolvent(ts_used, f)
  err = float(np.linalg.norm(u - resolvent_apply(h, 1., f).coords))
  report.add('riesz_resolvent', err <= 1e-10 * tol, err, 1e-10 * tol)
  robust_check(report, 'domain', _check_domain, report, b, ts_used, settings)
  traj = None
  if settings.evolve or cfg.evolution is not None:
    traj = robust_check(report, 'evolution', _check_evolution, report, b,
                        settings, cfg.evolution)
  return report, traj

r""" Command line runner of the verification suites

Every subcommand writes a JSON report (and CSV plot data) into `--out`,
then exits with 0 on success, 1 when a check failed and 2 for malformed
configurations or arguments.
"""
from __future__ import absolute_import, division, print_function

import argparse
import inspect
import logging
import os
import sys
from typing import Optional, Tuple

import numpy as np
from omegaconf import OmegaConf

from mmbo import __version__
from mmbo.errors import MMBOError, MalformedScenario
from mmbo.evaluate import (Report, ScenarioSettings, bd_checks,
                           property_checks, replay_checks, scenario_checks)
from mmbo.path import CONFIG_PATH, SCENARIO_DIR, get_exp_dir
from mmbo.scenarios import (ScenarioConfig, build_scenario,
                            get_block_operator, get_scenario_meta,
                            load_scenario)
from mmbo.semigroup import (EvolutionConfig, convergence_study, evolve,
                            initial_data)
from mmbo.systemnode import BlockOperator, block_operator
from mmbo.utils.io_utils import load_json, save_data_to_csv, save_json

__all__ = ['main', 'run_scenario', 'run_property_suites', 'load_config']

logger = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


# ===========================================================================
# Helpers
# ===========================================================================
def _from_config(cfg, fn, overrides={}):
  assert callable(fn)
  spec = inspect.getfullargspec(fn)
  kw = {
      k: v for k, v in cfg.items() if k in spec.args or spec.varkw is not None
  }
  overrides = {
      k: v
      for k, v in overrides.items()
      if v is not None and (k in spec.args or spec.varkw is not None)
  }
  kw.update(overrides)
  return fn(**kw)


def load_config(path: Optional[str] = None):
  r""" The yaml configuration as a plain nested dictionary """
  path = CONFIG_PATH if path is None else path
  if not os.path.isfile(path):
    raise FileNotFoundError("Cannot find configuration at: %s" % path)
  return OmegaConf.to_container(OmegaConf.load(path), resolve=True)


def _resolve_scenario(name: str) -> str:
  r""" A path to a json scenario, or the name of a bundled one """
  if os.path.isfile(name):
    return name
  bundled = os.path.join(SCENARIO_DIR, name if name.endswith('.json') else
                         name + '.json')
  if os.path.isfile(bundled):
    return bundled
  raise FileNotFoundError("Cannot find scenario '%s' (bundled scenarios at "
                          "%s)" % (name, SCENARIO_DIR))


def _load_block(name: str) -> Tuple[str, BlockOperator]:
  r""" Block operator of a registry scenario or a json scenario file """
  if name in get_scenario_meta():
    return name, get_block_operator(name)
  cfg = load_scenario(_resolve_scenario(name))
  h, ts = build_scenario(cfg)
  return cfg.name, block_operator(h, ts)


def _finish(report: Report, outdir: str, tag: str) -> int:
  path = save_json(os.path.join(outdir, tag + '.json'), report.to_dict())
  save_data_to_csv(os.path.join(outdir, tag + '_checks.csv'),
                   report.to_frame())
  n_failed = sum(not r.passed for r in report.records)
  logger.info("[%s] %d checks, %d failed, report: %s", report.name,
              len(report.records), n_failed, path)
  return EXIT_SUCCESS if report.verdict else EXIT_FAILED


# ===========================================================================
# Operations
# ===========================================================================
def run_scenario(path: str,
                 outdir: str,
                 seed: int = 0,
                 tol_scale: float = 1.,
                 config: Optional[dict] = None,
                 verbose: bool = False) -> Report:
  r""" Load a scenario, run its checks and write the report, the check
  table and the energy trace (when the scenario evolves) into `outdir`

  Raises:
    FileNotFoundError : missing scenario
    MalformedScenario : invalid scenario
  """
  config = load_config() if config is None else config
  cfg: ScenarioConfig = load_scenario(_resolve_scenario(path))
  settings = _from_config(dict(config.get('scenario', {}),
                               **config.get('evolution', {})),
                          ScenarioSettings,
                          overrides=dict(seed=seed,
                                         tol_scale=tol_scale,
                                         verbose=verbose))
  report, traj = scenario_checks(cfg, settings)
  if traj is not None:
    save_data_to_csv(os.path.join(outdir, cfg.name + '_energy.csv'),
                     traj.to_frame())
  return report


def run_property_suites(dims, trials: int, seed: int = 0,
                        tol_scale: float = 1.,
                        verbose: bool = False) -> Report:
  r""" Minty equivalence, adjoint involution, resolvent nonexpansiveness
  and Arens round trip over random relations """
  if int(trials) < 1:
    raise ValueError("Need at least one trial, given: %s" % trials)
  return property_checks(dims=dims,
                         trials=trials,
                         seed=seed,
                         tol_scale=tol_scale,
                         verbose=verbose)


# ===========================================================================
# Subcommands
# ===========================================================================
def _cmd_verify_relations(args, config) -> int:
  tol_scale = args.tol_scale
  if args.replay is not None:
    obj = load_json(args.replay)
    failures = obj.get('failures', [obj]) if isinstance(obj, dict) else obj
    if len(failures) == 0:
      raise ValueError("Nothing to replay in %s" % args.replay)
    code = EXIT_SUCCESS
    for i, failure in enumerate(failures):
      report = replay_checks(failure, tol_scale=tol_scale)
      code = max(code, _finish(report, args.out, 'replay_%d' % i))
    return code
  report = _from_config(config.get('property', {}),
                        run_property_suites,
                        overrides=dict(dims=args.dims,
                                       trials=args.trials,
                                       seed=args.seed,
                                       tol_scale=tol_scale,
                                       verbose=args.verbose))
  return _finish(report, args.out, 'verify_relations')


def _cmd_verify_bd(args, config) -> int:
  report = bd_checks(seed=args.seed, tol_scale=args.tol_scale)
  return _finish(report, args.out, 'verify_bd')


def _cmd_scenario(args, config) -> int:
  report = run_scenario(args.config,
                        args.out,
                        seed=args.seed,
                        tol_scale=args.tol_scale,
                        config=config,
                        verbose=args.verbose)
  return _finish(report, args.out, report.name)


def _cmd_evolve(args, config) -> int:
  name, block = _load_block(args.scenario)
  evolution = dict(config.get('evolution', {}))
  for key in ('tau', 'steps', 'n', 'initial'):
    if getattr(args, key) is not None:
      evolution[key] = getattr(args, key)
  cfg = _from_config(evolution, EvolutionConfig,
                     overrides=dict(block=block, name=name))
  u0, w0 = initial_data(evolution.get('initial', 'bump'), cfg.n)
  traj = evolve(cfg, u0, w0, verbose=args.verbose)
  save_data_to_csv(os.path.join(args.out, name + '_energy.csv'),
                   traj.to_frame())
  report = Report(name='evolve_' + name, seed=args.seed, version=__version__)
  e = traj.energies
  increase = float(np.max(np.diff(e), initial=0.)) / e[0] if e[0] > 0 else 0.
  tol = 1e-3 * args.tol_scale
  report.add('energy_non_increasing', increase <= tol, increase, tol)
  report.add('initial_data_admissible', True, float(traj.projected), 0.,
             detail='projected' if traj.projected else '')
  return _finish(report, args.out, 'evolve_' + name)


def _cmd_convergence(args, config) -> int:
  name, block = _load_block(args.scenario)
  conv = dict(config.get('convergence', {}))
  if args.tau is not None:
    conv['tau'] = args.tau
  if args.grids is not None:
    conv['grids'] = args.grids
  result = convergence_study(block, float(conv.get('tau', 0.05)),
                             conv.get('grids', (64, 128, 256)))
  save_data_to_csv(os.path.join(args.out, name + '_convergence.csv'),
                   result.to_frame())
  report = Report(name='convergence_' + name,
                  seed=args.seed,
                  version=__version__)
  tol = 0.2 * args.tol_scale
  report.add('observed_order', abs(result.order - 2.) <= tol, result.order,
             tol, detail='expected order 2')
  return _finish(report, args.out, 'convergence_' + name)


# ===========================================================================
# Main
# ===========================================================================
def _parser() -> argparse.ArgumentParser:
  common = argparse.ArgumentParser(add_help=False)
  common.add_argument('--seed', type=int, default=None)
  common.add_argument('--out', type=str, default=None,
                      help="output folder, default: MMBO_EXP")
  common.add_argument('--tol-scale', dest='tol_scale', type=float,
                      default=None, help="multiplier of every tolerance")
  common.add_argument('--config', dest='config_path', type=str, default=None,
                      help="yaml configuration, default: MMBO_CFG")
  common.add_argument('--verbose', action='store_true')
  parser = argparse.ArgumentParser(
      prog='mmbo-verify',
      description="Verification of maximal monotone boundary relations")
  parser.add_argument('--version', action='version', version=__version__)
  sub = parser.add_subparsers(dest='command')
  sub.required = True
  # ====== relations ====== #
  p = sub.add_parser('verify-relations', parents=[common])
  p.add_argument('--dims', type=int, nargs='+', default=None)
  p.add_argument('--trials', type=int, default=None)
  p.add_argument('--replay', type=str, default=None,
                 help="json report or failure entry to re-run")
  p.set_defaults(fn=_cmd_verify_relations)
  # ====== boundary data ====== #
  p = sub.add_parser('verify-bd', parents=[common])
  p.set_defaults(fn=_cmd_verify_bd)
  # ====== scenario ====== #
  p = sub.add_parser('scenario', parents=[common])
  p.add_argument('config', type=str,
                 help="json scenario path or bundled scenario name")
  p.set_defaults(fn=_cmd_scenario)
  # ====== evolution ====== #
  p = sub.add_parser('evolve', parents=[common])
  p.add_argument('scenario', type=str)
  p.add_argument('--tau', type=float, default=None)
  p.add_argument('--steps', type=int, default=None)
  p.add_argument('--n', type=int, default=None)
  p.add_argument('--initial', type=str, default=None)
  p.set_defaults(fn=_cmd_evolve)
  p = sub.add_parser('convergence', parents=[common])
  p.add_argument('scenario', type=str)
  p.add_argument('--tau', type=float, default=None)
  p.add_argument('--grids', type=int, nargs='+', default=None)
  p.set_defaults(fn=_cmd_convergence)
  return parser


def main(argv=None) -> int:
  try:
    args = _parser().parse_args(argv)
  except SystemExit as e:
    return EXIT_SUCCESS if e.code == 0 else EXIT_USAGE
  logging.basicConfig(
      level=logging.DEBUG if args.verbose else logging.INFO,
      format="%(asctime)s %(levelname)s %(name)s: %(message)s")
  try:
    config = load_config(args.config_path)
    if args.seed is None:
      args.seed = int(config.get('seed', 0))
    if args.tol_scale is None:
      args.tol_scale = float(config.get('tol_scale', 1.))
    if not args.tol_scale > 0:
      raise ValueError("Tolerance scale must be positive, given: %s" %
                       args.tol_scale)
    args.out = get_exp_dir(args.out)
    return args.fn(args, config)
  except (MalformedScenario, FileNotFoundError, ValueError) as e:
    logger.error("%s: %s", type(e).__name__, e)
    return EXIT_USAGE
  except MMBOError as e:
    # numerical breakdown while running a valid command
    logger.error("%s: %s", type(e).__name__, e)
    return EXIT_FAILED


if __name__ == '__main__':
  sys.exit(main())

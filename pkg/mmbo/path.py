# add path in order of priority
# DEFAULT_BASE_DIR: default prefix path if no configuration is found
# EXP_DIR: path for storing reports, energy traces and replay files
# CONFIG_PATH: the yaml configuration
# SCENARIO_DIR: bundled json scenarios
import os
from os.path import expanduser

DEFAULT_BASE_DIR = expanduser("~")
_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))


def _select_dir(path):
  if not os.path.exists(path):
    os.makedirs(path)
  elif os.path.isfile(path):
    raise RuntimeError("Output path at '%s' must be a folder" % path)
  return path


# PATH for saving reports
if 'MMBO_EXP' in os.environ:
  EXP_DIR = os.environ['MMBO_EXP']
else:
  EXP_DIR = os.path.join(DEFAULT_BASE_DIR, 'mmbo_exp')


def get_exp_dir(path=None):
  r""" Return (and create on first use) the output folder """
  return _select_dir(EXP_DIR if path is None else str(path))


# ====== path for yaml configurations ====== #
if 'MMBO_CFG' in os.environ:
  CONFIG_PATH = os.path.abspath(os.environ['MMBO_CFG'])
else:
  CONFIG_PATH = os.path.join(_ROOT, 'configs', 'base.yaml')
if not os.path.isfile(CONFIG_PATH):
  raise RuntimeError("Cannot find configuration .yaml files at: %s" %
                     CONFIG_PATH)

if 'MMBO_SCENARIOS' in os.environ:
  SCENARIO_DIR = os.path.abspath(os.environ['MMBO_SCENARIOS'])
else:
  SCENARIO_DIR = os.path.join(_ROOT, 'configs', 'scenarios')

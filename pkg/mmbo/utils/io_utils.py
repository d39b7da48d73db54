from __future__ import absolute_import, division, print_function

import json
import os
import tempfile
from contextlib import contextmanager

import numpy as np
import pandas as pd

__all__ = [
    'save_data_to_csv', 'save_json', 'load_json', 'encode_complex',
    'decode_complex'
]


# ===========================================================================
# For saving data
# ===========================================================================
@contextmanager
def _atomic_open(outpath):
  r""" Write into a temporary file next to `outpath`, then rename it, readers
  never see a half written report """
  folder = os.path.dirname(os.path.abspath(outpath))
  if not os.path.exists(folder):
    os.makedirs(folder)
  fd, tmp = tempfile.mkstemp(dir=folder,
                             prefix='.' + os.path.basename(outpath),
                             suffix='.tmp')
  try:
    with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
      yield f
    os.replace(tmp, outpath)
  except BaseException:
    if os.path.exists(tmp):
      os.remove(tmp)
    raise


def save_data_to_csv(outpath, data: pd.DataFrame):
  if data is None:
    return
  if '.csv' not in outpath:
    outpath += '.csv'
  with _atomic_open(outpath) as f:
    data.to_csv(f, index=False, float_format='%.17g')
  return outpath


def save_json(outpath, obj):
  if '.json' not in outpath:
    outpath += '.json'
  with _atomic_open(outpath) as f:
    json.dump(obj, f, indent=2, sort_keys=True)
    f.write('\n')
  return outpath


def load_json(path):
  with open(path, 'r', encoding='utf-8') as f:
    return json.load(f)


# ===========================================================================
# Complex arrays as [re, im] pairs
# ===========================================================================
def encode_complex(x):
  r""" Encode a complex scalar or array into nested lists of `[re, im]` """
  x = np.asarray(x, dtype=np.complex128)
  if x.ndim == 0:
    return [float(x.real), float(x.imag)]
  return [encode_complex(i) for i in x]


def _decode_scalar(obj):
  if isinstance(obj, bool):
    raise ValueError("Boolean is not a number: %s" % str(obj))
  if isinstance(obj, (int, float)):
    return complex(obj)
  if (isinstance(obj, (list, tuple)) and len(obj) == 2 and
      all(isinstance(i, (int, float)) and not isinstance(i, bool)
          for i in obj)):
    return complex(obj[0], obj[1])
  raise ValueError("Cannot decode complex value from: %s" % str(obj))


def _decode(obj, ndim):
  if ndim == 0:
    return _decode_scalar(obj)
  if not isinstance(obj, (list, tuple)):
    raise ValueError("Expect a list but given: %s" % str(obj))
  return [_decode(i, ndim - 1) for i in obj]


def decode_complex(obj, ndim=1) -> np.ndarray:
  r""" Decode nested lists whose scalars are `[re, im]` pairs or plain reals

  Arguments:
    obj : nested lists
    ndim : number of dimensions of the result, the nesting depth is fixed so
      that `[[1, 0], [0, 1]]` with `ndim=2` is the real identity matrix and
      with `ndim=1` the vector `(1, 1j)`

  Return:
    a `numpy.ndarray` of dtype complex128
  """
  arr = np.asarray(_decode(obj, int(ndim)), dtype=np.complex128)
  if arr.ndim != ndim:
    # empty lists collapse dimensions, e.g. `[]` for a 0x2 matrix
    if arr.size == 0:
      return arr.reshape((0,) * int(ndim))
    raise ValueError("Matrix rows must have equal length, given: %s" %
                     str(obj))
  return arr

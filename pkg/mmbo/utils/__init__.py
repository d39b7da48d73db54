from __future__ import absolute_import, division, print_function

from mmbo.utils.io_utils import (decode_complex, encode_complex, load_json,
                                 save_data_to_csv, save_json)

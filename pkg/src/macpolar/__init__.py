"""Polar coding for binary-input multiple access channels."""
from .mac import (Mac, MacError, SingleUserChannel, bhattacharyya, form_information,
                  linear_image_info, map_error, marginalize_linear_form, mutual_info_subset,
                  rank_profile)
from .transform import (EXACT, AlphabetCapacityError, MergePolicy, apply_path,
                        exhaustive_polarization, merge_outputs, minus_transform,
                        plus_transform, sample_polarization, synthesize_all)
from .gf2 import BinaryMatrix
from .matroid import (IntRankFunction, enumerate_matroids, find_binary_representation,
                      is_binary, is_matroid, is_polymatroid, round_profile)
from .extremal import (InconsistencyError, NotPolarized, classify_pair,
                       recover_linear_forms)
from .code import (CodeSpec, SimReport, construct_by_reliability, construct_code,
                   decode_block, encode_block, simulate, synthesize_channel_stats)
from .channels import AwgnSpec, awgn_to_bmac, builtin, split_qary
from .kernels import BACKEND

__version__ = "0.1.0"

"""Latency-optimized mixed-precision quantization with the free-bits heuristic."""
from .errors import (FreeBitsError, NotProfiledError, ParseError, SearchSpaceError,
                     TopologyMismatchError, UnprofiledConfigError, ValidationError)
from .heuristic import candidates, free_bits, higher
from .latdict import (HardwareProfile, LatencyDictionary, builtin_profile, dump_latency_dict,
                      generate_dict, latency_terms, load_latency_dict, lookup,
                      synth_latency)
from .metrics import ConfigReport, compare, layer_bops, macs, render_table, total_bops, total_latency
from .netmodel import (FULL_SET, LOCKED_SET, Layer, LayerType, NetworkConfig, OpKind,
                       PrecisionPair, build_network, canonical_key, parse_network,
                       precision_set, serialize_network, unique_layer_types)
from .search import (ParetoPoint, SensitivityModel, brute_force_best, homogeneous_config,
                     lagrangian_sweep, pareto_front)

__version__ = "0.1.0"

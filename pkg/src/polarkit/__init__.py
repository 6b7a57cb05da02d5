"""Toolkit for designing and evaluating length-compatible punctured polar
codes: encoder, construction, SC/SCL decoding, Monte Carlo simulation, and a
differential-evolution search for puncturing patterns."""

from .construction import (ReliabilityVector, bec_bhattacharyya,
                           frozen_complement, ga_llr_means, noise_variance,
                           select_information_set)
from .core import (CodeSpec, bit_reversal_permutation, bit_reverse, encode,
                   generator_matrix)
from .decoders import (DecodeResult, SCDecoder, SCLDecoder, crc16_append,
                       crc16_ccitt, crc16_check, f_node, g_node, sc_decode,
                       scl_decode)
from .evolution import (DeConfig, DeResult, Population, de_optimize,
                        evaluation_seed, init_population, make_trial)
from .montecarlo import (BerReport, ChannelModel, DecoderConfig, channel_llrs,
                         objective, simulate)
from .puncturing import (PatternFileError, PuncturingPattern,
                         branch_role_counts, forbidden_set, load_pattern,
                         qup_pattern, reduced_dimension,
                         reference_pattern_path, rqup_pattern, save_pattern,
                         vector_to_pattern)

__version__ = "0.1.0"

__all__ = [
    "BerReport", "ChannelModel", "CodeSpec", "DeConfig", "DeResult",
    "DecodeResult", "DecoderConfig", "PatternFileError", "Population",
    "PuncturingPattern", "ReliabilityVector", "SCDecoder", "SCLDecoder",
    "bec_bhattacharyya", "bit_reversal_permutation", "bit_reverse",
    "branch_role_counts", "channel_llrs", "crc16_append", "crc16_ccitt",
    "crc16_check", "de_optimize", "encode", "evaluation_seed", "f_node",
    "forbidden_set", "frozen_complement", "g_node", "ga_llr_means",
    "generator_matrix",
    "init_population", "load_pattern", "make_trial", "noise_variance",
    "objective", "qup_pattern", "reduced_dimension", "reference_pattern_path",
    "rqup_pattern", "save_pattern", "sc_decode", "scl_decode",
    "select_information_set", "simulate", "vector_to_pattern",
]

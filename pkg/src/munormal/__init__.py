"""Explicit mu-normal digit sequences built from concatenated weighted blocks."""

from .blocks import WeightedBlock, build_block, check_normal, epsilon_bound
from .counting import FrequencyReport, count_all_of_length, count_blocks
from .languages import GOLDEN, GOLDEN_SQUARED, BetaShift, FullShift, ParryData, beta_shift, full_shift
from .measures import GaussMeasure, LuerothMeasure, ParryMeasure, QaryMeasure
from .numerals import value_of
from .schedule import Schedule, StageSpec, SymbolicSchedule, validate_good, validate_symbolic
from .stream import DigitStream

__all__ = [
    "BetaShift", "DigitStream", "FrequencyReport", "FullShift", "GOLDEN", "GOLDEN_SQUARED",
    "GaussMeasure", "LuerothMeasure", "ParryData", "ParryMeasure", "QaryMeasure", "Schedule",
    "StageSpec", "SymbolicSchedule", "WeightedBlock", "beta_shift", "build_block", "check_normal",
    "count_all_of_length", "count_blocks", "epsilon_bound", "full_shift", "validate_good",
    "validate_symbolic", "value_of",
]
__version__ = "0.1.0"

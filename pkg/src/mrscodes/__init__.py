"""Multi-rate sequential erasure codes over GF(2) with rate-region analysis."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:
    __version__ = "0.0.0"

from .gf2 import BitMatrix, BitVector, IncrementalSolver, InconsistentSystem, InsertOutcome, batch_solve, rank
from .stepfn import (
    GParameter, NoCapacityError, SamplingAtoms, StepFunction, fa_cdf, integral_check, inverse_rate,
    is_achievable, optimal_g, rate_from_g, sampling_atoms,
)
from .region import (
    FeasibilityVerdict, OnOffNetwork, RatePair, example3_check, example3_superposition_check,
    mdc_one_or_all_check, one_or_all_check, one_or_all_g, superposition_feasible, two_sum_check,
    verify_witness,
)
from .codes import Blockwise, ExNonOpt, Multiplexed, SubBlock, Superposition, descriptor, spec_from_json, spec_to_json
from .codec import DecoderSession, EncoderSession
from .channel import ChannelSpec, TrialConfig, TrialResult, estimate_admissibility, run_trial, sweep

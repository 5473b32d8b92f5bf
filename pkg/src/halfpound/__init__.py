"""Adaptive low-pass filtering for hiding animation-clip discontinuities.

The core primitive is a speed-adaptive exponential smoother whose cutoff
frequency interpolates between tuned bounds (see `filters`), parameters
for which can be estimated from motion data automatically (`tuning`).
A derivative-envelope trigger policy engages the filter only where a
clip join actually breaks the motion's kinematic envelope (`policy`).
Classic transition baselines, evaluation metrics, BVH ingestion and a
benchmark runner round out the toolkit; the `halfpound` CLI drives them.
"""

from .baselines import InertializerState, TransitionSpec, crossfade, deadblend, inertialize
from .channel import Channel, derivative_tracks, unwrap_degrees
from .clips import JoinedBenchmark, join_clips, synth_benchmark, synth_components
from .errors import (
    BvhParseError,
    CoverageError,
    DegenerateChannel,
    HalfPoundError,
    InsufficientSamples,
    InvalidSample,
    InvalidTimestep,
)
from .filters import (
    HalfPoundFilter,
    HpfParams,
    HpfState,
    OneEuroFilter,
    OneEuroParams,
    OneEuroState,
    StackedParams,
    StackedState,
    clamp01,
    hpf_step,
    lowpass_alpha,
    one_euro_step,
    stacked_step,
)
from .metrics import (
    EvalReport,
    EvalRow,
    PowerSpectrum,
    mse,
    normalized_power_spectrum,
    npss,
    npss_aggregate,
    reference_spectrum,
)
from .policy import (
    AutoState,
    DerivativeBounds,
    are_in_range,
    auto_hpf_step,
    extract_bounds,
)
from .tuning import (
    ChannelExtrema,
    GainBlendSchedule,
    apply_tuning_gain,
    estimate_fc_max,
    estimate_fc_min,
    gain_blend_params,
    gb_hpf_defaults,
    scan_extrema,
)

__version__ = "0.1.0"

"""Window-size versus accuracy evaluation for voice activity detectors."""

from .audio import AudioClip, clip_duration_seconds, load_wav
from .engines import (
    PredictionTrace,
    aggregate_subwindows,
    import_trace,
    rms_dbfs,
    rms_vad_score,
    score_clip_rms,
)
from .fixtures import FixtureSpec, synthesize
from .framing import WindowGrid, WindowSpan, make_grid, subdivide
from .hysteresis import HysteresisConfig, apply_hysteresis, grid_search_hysteresis
from .labels import SegmentLabels, WindowLabelTrack, parse_labels, prevalence, window_labels
from .metrics import (
    ConfusionCounts,
    MetricReport,
    confusion,
    mcc,
    mcc_threshold_sweep,
    per_file_report,
    pr_curve,
    roc_curve,
)

__version__ = "0.1.0"

"""Dendritic Cell Algorithm for anomaly detection."""
from .aggregation import (
    ANOMALOUS,
    MATURE,
    NORMAL,
    SEMI_MATURE,
    LymphNode,
    McavReport,
    PresentationRecord,
    accuracy_sweep,
    classify,
    compute_mcav,
    presentation_ratio,
)
from .engine import DendriticCell, EngineConfig, RunStats, cell_cycle, init_population, run
from .events import AntigenEvent, SignalEvent
from .ingest import (
    MAPPINGS,
    Maxima,
    RawSample,
    SignalMapping,
    apply_mapping,
    derive_signals,
    generate_session,
    parse_session,
)
from .model import DEFAULT_WEIGHTS, OutputVector, SignalVector, WeightMatrix, transform
from .tissue import Tissue

__version__ = "0.1.0"

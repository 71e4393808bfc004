"""In-storage spatiotemporal pattern matching on simulated NAND strings."""

from .array import (
    ArrayGeometry,
    ArrayState,
    QueryResult,
    aggregate,
    capacity,
    document_to_state,
    program_array,
    query,
    state_to_document,
)
from .baselines import (
    LshIndex,
    MinHashSignature,
    brute_force_match,
    build_lsh_index,
    event_set,
    jaccard,
    lsh_query,
    minhash_signature,
)
from .bench import BenchConfig, BenchReport, SweepReport, run_benchmark, run_sweep
from .datagen import (
    LifParams,
    SpikeTrain,
    Stimulus,
    generate_dataset,
    lif_simulate,
    make_shape_stimulus,
)
from .device import (
    CellPair,
    DeviceParams,
    InputSymbol,
    ReadVoltage,
    StoredSymbol,
    VthLevel,
    cell_conducts,
    encode_input,
    encode_stored,
    fefet_conducts,
    symbols_match,
)
from .errors import (
    CapacityError,
    ConfigError,
    DimensionError,
    MissingBlockError,
    StpmError,
)
from .patterns import SpatiotemporalPattern, pattern_from_strings
from .perf import PerfParams, PerfReport, estimate_pattern_query, estimate_query, sweep_patterns
from .strings import (
    GatePulse,
    PulseSchedule,
    StringDecision,
    StringProgram,
    build_pulse_schedule,
    program_string,
    simulate_string,
    string_match_oracle,
)

__version__ = "0.1.0"

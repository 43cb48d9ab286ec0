"""Edit-aware gaze analysis over evolving source code.

The pipeline: load a recorded session (original/final text, change log,
gaze log), replay the edits into time-stamped snapshots, verify the replay
against the saved final file, tokenize every snapshot, thread stable token
ids across edits, partition gazes by snapshot validity, detect fixations,
and attribute each fixation to the token under it. Queries then aggregate
over the whole session without losing track of tokens that moved or died.

An ingestion benchmark reproduces the high-rate retention measurement for
the screen-to-text resolution hot path.
"""

from .errors import (
    DeleteMismatch,
    GazeTraceError,
    InvariantViolation,
    MalformedRecord,
    MissingFile,
    NegativeOffset,
    NonMonotonicTimestamps,
    OffsetOutOfRange,
    OutputUnwritable,
    PositionOutOfFile,
    RangeInconsistency,
    UnknownBatch,
    UnknownGrammar,
    UnknownTokenId,
)
from .session import (
    EditEvent,
    EditKind,
    GazeSample,
    SessionArchive,
    SessionConfig,
    Validity,
    load_session,
    parse_change_log,
    parse_gaze_log,
    parse_session_config,
    serialize_change_log,
    serialize_gaze_log,
    validate_and_normalize_edits,
)
from .snapshots import (
    EditBatch,
    Snapshot,
    VerificationReport,
    apply_edit,
    batch_edits,
    build_snapshots,
    compose_edit_hull,
    verify_final,
)
from .textpos import CharRange
from .tokenizer import (
    KEYWORDS,
    RawToken,
    TokenKind,
    grammar_names,
    register_grammar,
    tokenize,
)
from .tracking import (
    TokenSighting,
    TokenTable,
    TokenTimeline,
    advance,
    assign_initial_ids,
    build_timelines,
    edited_range,
    track_tokens,
)
from .fixations import (
    FIXATION_ALGORITHMS,
    FilterConfig,
    Fixation,
    GazeSlice,
    detect_fixations,
    map_to_token,
    partition_gazes,
    register_fixation_algorithm,
)
from .queries import (
    ChangeSet,
    ProcessedSession,
    SampleCounts,
    adjust_to_snapshot,
    fixations_on_token,
    process_session,
    tokens_changed_by,
)
from .bench import (
    BenchConfig,
    EditorGeometry,
    RetentionReport,
    display_row_to_buffer_line,
    resolve_point,
    run_benchmark,
)

__version__ = "0.1.0"

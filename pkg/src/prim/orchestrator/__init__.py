from prim.orchestrator.compare import EmptyGroup, compare_runs, to_csv, to_table
from prim.orchestrator.config import ConfigError, RunConfig
from prim.orchestrator.loop import (LoopState, RunAborted, Runner, RunSummary, records_from_log,
                                    replay, run, run_prim, run_vanilla_agent, run_vanilla_mas,
                                    summarize)
from prim.orchestrator.runlog import (CorruptLog, LogError, RunLog, SchemaVersionMismatch,
                                      TruncatedLog, read_events, strip_timestamps)

"""Instance generation, batch runs and reports."""

from spanner_forge.bench.batch import (
    ORACLE_NAMES,
    BatchEntry,
    make_oracle,
    run_batch,
    run_instance,
    summarize,
)
from spanner_forge.bench.generators import (
    GENERATOR_BY_NAME,
    GeneratedInstance,
    InstanceSpec,
    generate,
    select_terminals,
)
from spanner_forge.bench.reports import (
    FORMATS,
    SCHEMA_VERSION,
    dumps_report,
    dumps_rows,
    make_report,
    report_rows,
    rounded,
)

__all__ = [
    "FORMATS",
    "GENERATOR_BY_NAME",
    "ORACLE_NAMES",
    "SCHEMA_VERSION",
    "BatchEntry",
    "GeneratedInstance",
    "InstanceSpec",
    "dumps_report",
    "dumps_rows",
    "generate",
    "make_oracle",
    "make_report",
    "report_rows",
    "rounded",
    "run_batch",
    "run_instance",
    "select_terminals",
    "summarize",
]

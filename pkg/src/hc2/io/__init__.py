"""File formats: ``.ts`` archives and results files."""

from hc2.io.results import ResultsFile, RunDescriptor, atomic_write, quantise, read_results, write_results
from hc2.io.ts import TsFormatError, TsHeader, load_ts, parse_ts, save_ts, write_ts

__all__ = [
    "ResultsFile",
    "RunDescriptor",
    "TsFormatError",
    "TsHeader",
    "atomic_write",
    "load_ts",
    "parse_ts",
    "quantise",
    "read_results",
    "save_ts",
    "write_results",
    "write_ts",
]

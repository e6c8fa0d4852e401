"""HIVE-COTE 2.0 time series classification: TDE, DrCIF, Arsenal, STC and their meta-ensemble."""

from hc2.core import RandomStream, TimeSeriesDataset, stratified_resample

__version__ = "0.1.0"

__all__ = ["RandomStream", "TimeSeriesDataset", "stratified_resample", "__version__"]

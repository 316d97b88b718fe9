"""Experiment runner, reports and command-line interface."""

from .experiment import ExperimentSpec, ResultRecord, execute_cell, load_records, load_spec, run_experiment
from .report import classification_report, dump_front, summarize

__all__ = ["ExperimentSpec", "ResultRecord", "execute_cell", "load_records", "load_spec",
           "run_experiment", "classification_report", "dump_front", "summarize"]

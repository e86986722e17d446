"""
Experiment-Modul für Läufe, Berichte und Kommandozeile
"""
from tmo.experiment.runner import ExperimentSpec, SeedResult, RunReport, run_experiment, run_comparison, run_seed
from tmo.experiment.report import emit_report, emit_records, emit_table, parse_report
from tmo.experiment.cli import main

__all__ = [
    # Läufe
    'ExperimentSpec',
    'SeedResult',
    'RunReport',
    'run_experiment',
    'run_comparison',
    'run_seed',

    # Berichte
    'emit_report',
    'emit_records',
    'emit_table',
    'parse_report',

    # Kommandozeile
    'main'
]

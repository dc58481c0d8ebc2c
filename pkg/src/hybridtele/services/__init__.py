"""Hybridtele services - simulation and analysis layer."""

from .acceptance import CheckResult, run_acceptance
from .channel_gen import GenerationConfig, HeraldedChannel, generate_channel
from .config import ConfigManager, SweepConfig
from .demodulation import DemodOutcome, SuccessComparison, demod_coherent, demod_swap
from .fock import DensityOperator, FockState, Projector, project
from .optics import BeamSplitterSpec, DualRailGate, apply_beam_splitter, apply_displacement
from .qubit import Qubit
from .reports import ReportWriter, Table
from .teleport import HybridChannel, OutcomeRecord, build_channel, teleport

__all__ = [
    "BeamSplitterSpec",
    "CheckResult",
    "ConfigManager",
    "DemodOutcome",
    "DensityOperator",
    "DualRailGate",
    "FockState",
    "GenerationConfig",
    "HeraldedChannel",
    "HybridChannel",
    "OutcomeRecord",
    "Projector",
    "Qubit",
    "ReportWriter",
    "SuccessComparison",
    "SweepConfig",
    "Table",
    "apply_beam_splitter",
    "apply_displacement",
    "build_channel",
    "demod_coherent",
    "demod_swap",
    "generate_channel",
    "project",
    "run_acceptance",
    "teleport",
]

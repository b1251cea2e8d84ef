"""Simulation of hybrid systems, LTL evaluation on hybrid arcs, sampled
certificate checks and automata for a co-safe LTL fragment."""

from .hybrid import (
    HybridArc, HybridSystem, HybridTimeDomain, Ordering, Phase, PropositionSet,
    compare_hybrid_times, sample_at, validate_domain,
)
from .config import SystemConfig, builtin_examples, load_config, read_config, resolve_system
from .simulate import SimOptions, SimResult, locate_boundary, measure_settling_time, simulate

__all__ = [
    "HybridArc", "HybridSystem", "HybridTimeDomain", "Ordering", "Phase", "PropositionSet",
    "SimOptions", "SimResult", "SystemConfig", "builtin_examples", "compare_hybrid_times",
    "load_config", "locate_boundary", "measure_settling_time", "read_config",
    "resolve_system", "sample_at", "simulate", "validate_domain",
]
__version__ = "0.1.0"

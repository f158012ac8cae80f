"""Hardness certificates: bipartite digraphs, completion, critical ternary relations."""

from .bipartite import (
    BipAnalysis,
    BipDigraph,
    CompletionError,
    analyze_bipartite,
    build_bipartite,
    compose,
    make_complete,
)
from .critical import CriticalWitness, critical_failures, is_critical_ternary, synthesize_critical
from .patterns import Finding, detect_patterns
from .pipeline import Report, analyze_language, cycle_to_implication, generate_instances
from .trace import Construction, TraceStep, replay

__all__ = [
    "BipAnalysis", "BipDigraph", "CompletionError", "Construction", "CriticalWitness", "Finding",
    "Report", "TraceStep", "analyze_bipartite", "analyze_language", "build_bipartite",
    "compose", "critical_failures", "cycle_to_implication", "detect_patterns",
    "generate_instances", "is_critical_ternary", "make_complete", "replay",
    "synthesize_critical",
]

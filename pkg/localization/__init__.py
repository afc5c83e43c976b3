"""
Localization Module

Envelopes of (F, a, G) triples and of index-free families, decay verdicts,
tail operator norms and truncated families.
"""
from .decay import DecayFit, Verdict, classify_decay, shell_maxima
from .envelope import CenterAssignment, Envelope, LocalizationReport
from .maps import (
    dominates,
    envelope_from_map,
    envelope_index_free,
    self_localization_check,
    shift_envelope_check,
)
from .tails import (
    TailNorm,
    analysis_gap_norm,
    tail_matrix,
    tail_operator_norm,
    truncate_family,
    truncation_gap_bound,
    truncation_profile,
)

__all__ = [
    "DecayFit",
    "Verdict",
    "classify_decay",
    "shell_maxima",
    "CenterAssignment",
    "Envelope",
    "LocalizationReport",
    "dominates",
    "envelope_from_map",
    "envelope_index_free",
    "self_localization_check",
    "shift_envelope_check",
    "TailNorm",
    "analysis_gap_norm",
    "tail_matrix",
    "tail_operator_norm",
    "truncate_family",
    "truncation_gap_bound",
    "truncation_profile",
]

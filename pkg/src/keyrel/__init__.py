"""Reliability of heterogeneous random key predistribution networks under link failures."""

from .analytic import (AnalyticSummary, Unachievable, approx_lambda1, asymptotic_diagnostics,
                       critical_alpha, critical_k1, edge_prob, expected_isolated,
                       mean_edge_prob, mean_edge_probs, scaling_coefficient,
                       thinned_mean_edge_prob)
from .experiment import (SweepResult, estimate_ci, run_trials, scaling_sweep,
                         sweep_alpha, sweep_k1)
from .graphalgo import TrialOutcome, components, count_isolated
from .model import InvalidParams, ModelParams, ScalingConfig, validate
from .sampler import RngSpec, SampledGraph, sample_graph, trial_rng

__version__ = "0.1.0"

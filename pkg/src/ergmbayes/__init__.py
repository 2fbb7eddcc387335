"""Bayesian inference for exponential random graph models."""

__version__ = "0.1.0"

from .graph import (Graph, GraphError, degree_histogram, esp_histogram, from_edge_list,
                    geodesic_histogram, load_network, read_edge_list, toggle_edge)
from .terms import ModelError, ModelSpec, ModelTerm, change_stats, compute_stats
from .formula import FormulaError, parse_formula
from .prior import PriorSpec
from .simulate import SimControl, simulate_network, simulate_stats
from .exchange import (ExchangeControl, PosteriorSample, ads_propose, exchange_log_alpha,
                       run_exchange)
from .calibrate import (CalibrateControl, CalibrationMap, calibrate_sample,
                        estimate_map_and_hessians, fit_mple, pseudo_loglik,
                        run_calibration, sample_pseudo_posterior)
from .gof import GofResult, run_gof
from .summary import SummaryTable, summarize


def example_path(name):
    """Filesystem path of a bundled example file, e.g. ``example_path("school.edges")``."""
    from importlib.resources import files
    return str(files(__name__) / "data" / name)

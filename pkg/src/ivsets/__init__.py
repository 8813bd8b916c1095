"""Identification of direct effects in recursive linear SEMs with instrumental sets."""

from .diagram import BidirectedEdge, CausalDiagram, DirectedEdge, Parametrization, build_diagram
from .dsl import ModelDocument, load_model, parse_model, serialize_model
from .errors import IdentificationError
from .io import export_covariance, load_covariance
from .iv import (
    EdgeResult,
    IvTriple,
    build_phi_system,
    check_conditional_iv,
    check_instrumental_set,
    conditional_iv_estimate,
    find_conditional_iv,
    find_instrumental_set,
    identify_effects,
    normalize_triples,
    solve_identification,
)
from .partial import evaluate_phi, extract_b_coefficients, partial_correlation, phi, psi
from .paths import Path, d_separates, enumerate_unblocked_paths, is_blocked
from .simulate import Dataset, estimate_covariance, sample_data, sample_parametrization
from .wright import CovarianceModel, expand_correlation, implied_covariance, standardize, wright_correlation

__all__ = [
    "BidirectedEdge", "CausalDiagram", "CovarianceModel", "Dataset", "DirectedEdge", "EdgeResult",
    "IdentificationError", "IvTriple", "ModelDocument", "Parametrization", "Path",
    "build_diagram", "build_phi_system", "check_conditional_iv", "check_instrumental_set",
    "conditional_iv_estimate", "d_separates", "enumerate_unblocked_paths", "estimate_covariance",
    "evaluate_phi", "expand_correlation", "export_covariance", "extract_b_coefficients",
    "find_conditional_iv", "find_instrumental_set", "identify_effects", "implied_covariance",
    "is_blocked", "load_covariance", "load_model", "normalize_triples", "parse_model",
    "partial_correlation", "phi", "psi", "sample_data", "sample_parametrization",
    "serialize_model", "solve_identification", "standardize", "wright_correlation",
]

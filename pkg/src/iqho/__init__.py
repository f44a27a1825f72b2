"""Swanson-type oscillator H_theta and its inverted-oscillator limit, checked exactly and by quadrature."""
from .coherent import bicoherent, identity_resolution_IQHO, identity_resolution_L2
from .distrib import RhoSpace, SchwartzProbe, distribution_pairing, weak_limit_study
from .pbops import Kind, Regime, ThetaParams, biortho_matrix, build_operators, eigenfamily, norm_sq
from .polygauss import DiffOp, PolyGaussFn, apply_op, pairing
from .report import Report, ReportRow

__all__ = [
    "PolyGaussFn", "DiffOp", "apply_op", "pairing", "ThetaParams", "Kind", "Regime",
    "build_operators", "eigenfamily", "biortho_matrix", "norm_sq", "bicoherent",
    "identity_resolution_L2", "identity_resolution_IQHO", "SchwartzProbe", "RhoSpace",
    "distribution_pairing", "weak_limit_study", "Report", "ReportRow",
]

"""Exact Kronecker-power spans, universal tensor sequences and rank bounds."""

from kronspan.basis import build_t_g, expand_power, monomial_eval, orbit_check, t_g_entry, verify_expansion
from kronspan.bounds import (
    BoundReport,
    MMRankTable,
    MMSpec,
    asymptotic_bound_from_basis,
    build_mm,
    strassen_degeneration_maps,
    strassen_sigma_bound,
    tg_rank_bound,
    verify_support_degeneration,
)
from kronspan.compositions import Composition, Support, enumerate_compositions, phi, rank_composition, unrank_composition
from kronspan.config import BudgetExceeded, RunConfig, VerificationFailed
from kronspan.exact_rank import exact_rank_small
from kronspan.fields import QQ, PrimeField
from kronspan.interpolation import build_scheme, interpolate_t_g, span_dimension
from kronspan.kernels import BACKEND
from kronspan.secant import absence_bound, build_n_matrix, greedy_span, kernel_dimension
from kronspan.tensor import SparseTensor3, direct_sum, kronecker_power, kronecker_product, unit_tensor
from kronspan.tightness import decide_tight, enumerate_tight_supports, verify_certificate
from kronspan.universal import UniversalSpec, build_universal, sequence_stats, universal_entry

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundReport",
    "BudgetExceeded",
    "Composition",
    "MMRankTable",
    "MMSpec",
    "PrimeField",
    "QQ",
    "RunConfig",
    "SparseTensor3",
    "Support",
    "UniversalSpec",
    "VerificationFailed",
    "absence_bound",
    "asymptotic_bound_from_basis",
    "build_mm",
    "build_n_matrix",
    "build_scheme",
    "build_t_g",
    "build_universal",
    "decide_tight",
    "direct_sum",
    "enumerate_compositions",
    "enumerate_tight_supports",
    "exact_rank_small",
    "expand_power",
    "greedy_span",
    "interpolate_t_g",
    "kernel_dimension",
    "kronecker_power",
    "kronecker_product",
    "monomial_eval",
    "orbit_check",
    "phi",
    "rank_composition",
    "sequence_stats",
    "span_dimension",
    "strassen_degeneration_maps",
    "strassen_sigma_bound",
    "t_g_entry",
    "tg_rank_bound",
    "unit_tensor",
    "unrank_composition",
    "universal_entry",
    "verify_certificate",
    "verify_expansion",
    "verify_support_degeneration",
]

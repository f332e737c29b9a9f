"""Exact Chern/Segre calculus and residual-intersection bookkeeping for type II
exceptional curves in surface fibrations."""

from .class_ring import (
    BundlePiece, GradedClass, RingContext, Variable, VirtualBundle, degree_part, mul,
    projective_pushforward, segre_total, top_chern, twist_by_line, whitney_sum,
)
from .family import (
    ExpansionInputs, ExpansionReport, KuranishiModel, chi_line, dimension_triple,
    fiber_product_vclass, localized_class, residual_expansion, rank_omega, stabilize,
    tau_class, w_prime_ranks,
)
from .lattice import (
    Febd, LatticeClass, SurfaceGeometry, TypeTag, adjunction_delta, expected_dimension,
    is_exceptional, pair, typeI_codimension,
)
from .nodal import CoeffSeries, k3_type2_vanishing, virtual_count_report, yau_zaslow_series
from .scheme import Collection, Schedule, cone_partial_order, enumerate_collections, linearize

__version__ = "0.1.0"

__all__ = [
    "BundlePiece", "GradedClass", "RingContext", "Variable", "VirtualBundle", "degree_part", "mul",
    "projective_pushforward", "segre_total", "top_chern", "twist_by_line", "whitney_sum",
    "ExpansionInputs", "ExpansionReport", "KuranishiModel", "chi_line", "dimension_triple",
    "fiber_product_vclass", "localized_class", "residual_expansion", "rank_omega", "stabilize",
    "tau_class", "w_prime_ranks",
    "Febd", "LatticeClass", "SurfaceGeometry", "TypeTag", "adjunction_delta", "expected_dimension",
    "is_exceptional", "pair", "typeI_codimension",
    "CoeffSeries", "k3_type2_vanishing", "virtual_count_report", "yau_zaslow_series",
    "Collection", "Schedule", "cone_partial_order", "enumerate_collections", "linearize",
]

"""Exact-arithmetic engine for A-infinity structures on homology,
homological perturbation, and (Delta_n-)persistent homology barcodes."""

from .exactlin import Field, GF, QQ, SparseMatrix, NoSolution
from .complexes import (ChainComplex, ChainMap, Contraction, GradedBasis,
                        CheckReport, compose, homology_contraction,
                        koszul_sign, tensor_map, tensor_power, verify_complex)
from .dgalg import (AInfinityMorphism, AInfinityStructure, DGAlgebra,
                    DGCoalgebra, check_dga, check_dgc, dualize_dga,
                    dualize_dgc, endomorphism_dga, stasheff_defect,
                    strict_ainfinity, strict_coainfinity)
from .transfer import (CentralElement, CommutativityFailure, FreenessFailure,
                       TorsionFailure, bar_product, extend_step, gap_check,
                       kz_extend, morphism_defect, transfer_full,
                       transfer_start, u_map)
from .perturbation import (NilpotenceExceeded, Perturbation, bpl,
                           check_contraction, tensor_trick)
from .persistence import (FilteredComplex, PersistenceDiagram, ainfty_stage,
                          barcode, bottleneck, cech, delta_barcode,
                          persistent_rank, rips)

__all__ = [
    "Field", "GF", "QQ", "SparseMatrix", "NoSolution",
    "ChainComplex", "ChainMap", "Contraction", "GradedBasis", "CheckReport",
    "compose", "homology_contraction", "koszul_sign", "tensor_map",
    "tensor_power", "verify_complex",
    "AInfinityMorphism", "AInfinityStructure", "DGAlgebra", "DGCoalgebra",
    "check_dga", "check_dgc", "dualize_dga", "dualize_dgc",
    "endomorphism_dga", "stasheff_defect", "strict_ainfinity",
    "strict_coainfinity",
    "CentralElement", "CommutativityFailure", "FreenessFailure",
    "TorsionFailure", "bar_product", "extend_step", "gap_check", "kz_extend",
    "morphism_defect", "transfer_full", "transfer_start", "u_map",
    "NilpotenceExceeded", "Perturbation", "bpl", "check_contraction",
    "tensor_trick",
    "FilteredComplex", "PersistenceDiagram", "ainfty_stage", "barcode",
    "bottleneck", "cech", "delta_barcode", "persistent_rank", "rips",
]

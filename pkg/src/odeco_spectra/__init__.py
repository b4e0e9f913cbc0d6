"""Exact and numerical spectra of orthogonally decomposable tensors."""
from .complex_geometry import (build_incidence_complex, degeneration_check,
                               export_complex, formats_with_dimension,
                               generic_count)
from .errors import EnumerationTooLarge, NumericFailure, ValidationError
from .spectra_enum import (TypeIIComponent, TypeISpec, ZeroPattern,
                           enumerate_type1, enumerate_type2, realize_type1,
                           sample_base_point, type1_counts, type2_counts)
from .tensor_core import (DenseTensor, OdecoTensor, SingularTuple, TensorShape,
                          contract, materialize, random_odeco, singular_classify)

__version__ = "0.1.0"

__all__ = [
    "DenseTensor", "EnumerationTooLarge", "NumericFailure", "OdecoTensor", "SingularTuple",
    "TensorShape", "TypeIIComponent", "TypeISpec", "ValidationError", "ZeroPattern",
    "build_incidence_complex", "contract", "degeneration_check", "enumerate_type1",
    "enumerate_type2", "export_complex", "formats_with_dimension", "generic_count",
    "materialize", "random_odeco", "realize_type1", "sample_base_point",
    "singular_classify", "type1_counts", "type2_counts",
]

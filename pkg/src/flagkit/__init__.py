"""flagkit: exact computations with flag varieties over finite fields and Q.

Standard extensions between (isotropic) flag varieties, recovery of a
standard extension from a point table, and the generalized flag attached
to a direct system of strict standard extensions.
"""

from .errors import BudgetExceeded, DimensionMismatch, FlagkitError, InvariantViolation, NotAdapted, SpecError
from .field import GF, QQ, Field
from .flags import Flag, FlagType, FlagVariety, count_flags, enumerate_flags, project
from .forms import BilinearSpace, hyperbolic_space, labeled_form, orth_complement
from .linalg import LinearMap, Matrix, Subspace, annihilator, intersect, span, subspace_sum
from .stdext import StdExtSpec, compose, decompose_elementary, dualize, make_strict, transpose, validate
from .analysis import PointMapEmbedding, classify, is_admissible
from .genflag import DirectSystem, GeneralizedFlagPresentation, construct_limit_flag, truncate

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "DimensionMismatch", "FlagkitError", "InvariantViolation", "NotAdapted", "SpecError",
    "GF", "QQ", "Field", "Flag", "FlagType", "FlagVariety", "count_flags", "enumerate_flags", "project",
    "BilinearSpace", "hyperbolic_space", "labeled_form", "orth_complement",
    "LinearMap", "Matrix", "Subspace", "annihilator", "intersect", "span", "subspace_sum",
    "StdExtSpec", "compose", "decompose_elementary", "dualize", "make_strict", "transpose", "validate",
    "PointMapEmbedding", "classify", "is_admissible",
    "DirectSystem", "GeneralizedFlagPresentation", "construct_limit_flag", "truncate",
]

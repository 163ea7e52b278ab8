"""Small matroids: axioms, entropic and linear representability, almost affine codes, polar compression."""

__version__ = "0.1.0"

from .almost_affine import (
    AffineCode,
    SecretSharingMatrix,
    code_to_distribution,
    distribution_to_code,
    induced_matroid,
    is_almost_affine,
    is_secret_sharing,
    secret_sharing_matroid,
)
from .catalog import catalog, catalog_entries
from .entropy import (
    FiniteDistribution,
    as_entropic_matroid,
    conditional_entropy,
    entropic_rank,
    entropy,
    marginal,
)
from .exceptions import CapabilityError, EntropicMatroidError, FormatError, PreconditionError
from .matroid import (
    RankTable,
    bases,
    check_axioms,
    circuits,
    contract,
    delete,
    dual,
    from_bases,
    from_circuits,
    has_minor,
    is_isomorphic,
    uniform,
)
from .polar import PolarSourceCodec, SourceModel, exact_profile, kron_transform
from .representability import FpMatrix, Representation, find_representation, verify_representation
from .search import is_p_entropic, minor_closure_check

__all__ = [
    "AffineCode", "CapabilityError", "EntropicMatroidError", "FiniteDistribution", "FormatError",
    "FpMatrix", "PolarSourceCodec", "PreconditionError", "RankTable", "Representation",
    "SecretSharingMatrix", "SourceModel", "as_entropic_matroid", "bases", "catalog", "catalog_entries",
    "check_axioms", "circuits", "code_to_distribution", "conditional_entropy", "contract", "delete",
    "distribution_to_code", "dual", "entropic_rank", "entropy", "exact_profile", "find_representation",
    "from_bases", "from_circuits", "has_minor", "induced_matroid", "is_almost_affine", "is_isomorphic",
    "is_p_entropic", "is_secret_sharing", "kron_transform", "marginal", "minor_closure_check",
    "secret_sharing_matroid", "uniform", "verify_representation",
]

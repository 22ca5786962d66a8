"""Exact-arithmetic engine for curved A-infinity algebras over graded valued
coefficient rings: Hochschild/cyclic chain complexes in six variants,
truncated homology, and mechanical verification of the sign calculus and the
open-closed chain-map identities."""

__version__ = "0.1.0"

from .scalars import Cap, Context, FormalVarSpec, PiGroup, Scalar
from .graded import ChainComplex, Element, GradedModule, Word
from .ainfty import AInfty, builtin_algebras
from .complexes import ChainElt, Variant
from .homology import Truncation, homology, naive_oracle
from .openclosed import OCFamily, axiom_suite, chain_map_residual

__all__ = [
    "AInfty", "Cap", "ChainComplex", "ChainElt", "Context", "Element",
    "FormalVarSpec", "GradedModule", "OCFamily", "PiGroup", "Scalar",
    "Truncation", "Variant", "Word", "axiom_suite", "builtin_algebras",
    "chain_map_residual", "homology", "naive_oracle", "__version__",
]

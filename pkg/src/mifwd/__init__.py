"""Exact mutual-information feature selection and an analytic Gaussian benchmark."""

from .errors import MifwdError
from .info_theory import (JointPmf, conditional_entropy, conditional_mi,
                          entropy, mutual_information, tmi)
from .selection import (FeatureType, MethodKind, MethodSpec,
                        SelectionState, classify_feature, forward_select,
                        objective_value, prune_redundant, target_of, target_of_prime)

__version__ = "0.1.0"

__all__ = [
    "MifwdError", "JointPmf", "entropy", "conditional_entropy", "mutual_information",
    "conditional_mi", "tmi", "FeatureType", "MethodKind", "MethodSpec", "SelectionState",
    "classify_feature", "forward_select", "objective_value", "prune_redundant",
    "target_of", "target_of_prime",
]

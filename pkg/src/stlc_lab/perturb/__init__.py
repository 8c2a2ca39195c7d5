"""
Robustness of controllability under perturbations with high-order contact.
"""

from .contact_flow import ContactFlowResult, contact_flow_identity, random_rational_controls
from .experiments import (
    PerturbReport,
    example_directions_experiment,
    main_theorem_experiment,
    perturb_scaling_experiment,
    perturbation_map,
    selection_continuity,
)

__all__ = [
    "ContactFlowResult",
    "contact_flow_identity",
    "random_rational_controls",
    "PerturbReport",
    "example_directions_experiment",
    "main_theorem_experiment",
    "perturb_scaling_experiment",
    "perturbation_map",
    "selection_continuity",
]

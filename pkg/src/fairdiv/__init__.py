"""Fair division of indivisible goods through comparison queries only.

Allocation algorithms (PROP1, EF1, PROP1 + half-MMS) that learn preferences
exclusively by asking agents "which of these two bundles do you prefer?",
with per-agent query accounting, exact brute-force fairness verifiers, an
adaptive lower-bound adversary, a CLI, and a resumable elicitation service.
"""

from .core import Allocation, Bundle, Instance, QueryLog, bundle_value
from .oracle import (
    ComparisonOracle,
    ExactOracle,
    PendingComparison,
    Preferred,
    SessionOracle,
    TiePolicy,
)
from .prop1 import (
    hall_violator_and_matching,
    item_partition,
    prop1_general,
    prop1_identical,
    prop1_prop_subroutine,
    prop1_prop_subroutine_alt,
)
from .ef1 import cut_and_choose, ef1_identical, ef1_three_agents, envy_graph_finish
from .mms import main_algorithm
from .verify import (
    FairnessReport,
    MmsInfeasible,
    fairness_report,
    is_alpha_mms,
    is_ef,
    is_ef1,
    is_prop,
    is_prop1,
    mms_exact,
)
from .adversary import AdversaryOracle, realize_witness
from .generators import make_instance, spiky_instance, uniform_instance
from .registry import REGISTRY, run_algorithm

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "AdversaryOracle",
    "Bundle",
    "ComparisonOracle",
    "ExactOracle",
    "FairnessReport",
    "Instance",
    "MmsInfeasible",
    "PendingComparison",
    "Preferred",
    "QueryLog",
    "REGISTRY",
    "SessionOracle",
    "TiePolicy",
    "bundle_value",
    "cut_and_choose",
    "ef1_identical",
    "ef1_three_agents",
    "envy_graph_finish",
    "fairness_report",
    "hall_violator_and_matching",
    "is_alpha_mms",
    "is_ef",
    "is_ef1",
    "is_prop",
    "is_prop1",
    "item_partition",
    "main_algorithm",
    "make_instance",
    "mms_exact",
    "prop1_general",
    "prop1_identical",
    "prop1_prop_subroutine",
    "prop1_prop_subroutine_alt",
    "realize_witness",
    "run_algorithm",
    "spiky_instance",
    "uniform_instance",
]

"""combatsim: attrition-combat forward models for RTS games.

Simulate combats with closed-form and event-driven models, learn their
parameters from combat datasets, evaluate prediction quality, and play
an abstract region-graph game with an MCTS agent that uses the models
as forward models.
"""

from .core import (
    DpfProvenance,
    DpfTable,
    destroy_score,
    dpf_table_from_vector,
    ltd,
    ltd2,
    project_min_dpf,
    static_dpf,
)
from .errors import CombatSimError, ValidationError
from .models import (
    ArmyAggregates,
    CombatOutcome,
    LanchesterParams,
    Winner,
    decreasing_simulate,
    lanchester_params,
    lanchester_simulate,
    lanchester_state_at,
    sustained_simulate,
    tick_oracle_simulate,
)
from .policies import (
    BordaScores,
    PolicyKind,
    TargetSelectionPolicy,
    borda_policy,
    destroy_score_policy,
    random_policy,
)
from .types import Catalog, CombatState, Unit, UnitTypeStats

__version__ = "0.1.0"

"""Course-of-action planning engine.

Hierarchical task expansion over an activity knowledge base, temporal
constraint propagation, resource scheduling, terrain routing, attrition
and consumption bookkeeping, and bounded adversarial reasoning, driven
incrementally so a human stays in the loop between increments.
"""

from .combat import AttritionParams, CombatError, ConsumptionRates
from .engine import (
    EngineError,
    IncrementReport,
    InvalidEdit,
    PlanningSession,
    SessionParams,
    StepOnComplete,
)
from .kb import Diagnostic, KBLoadError, KnowledgeBase, default_kb_text, load_kb
from .model import (
    INF,
    Activity,
    Anchor,
    BosRow,
    Infeasibility,
    Interval,
    Plan,
    Side,
    Status,
    TemporalConstraint,
    Unit,
    fmt_time,
    project_state,
)
from .routing import RouteWeighting, TerrainNetwork, calculate_path, weighting_preset
from .storage import (
    IOLoadError,
    ScenarioDocument,
    build_sync_matrix,
    canonical_dumps,
    export_plan,
    export_sync_matrix,
    import_plan,
    load_scenario,
    make_plan,
)

__version__ = "1.0.0"

__all__ = [
    "INF",
    "Activity",
    "Anchor",
    "AttritionParams",
    "BosRow",
    "CombatError",
    "ConsumptionRates",
    "Diagnostic",
    "EngineError",
    "IncrementReport",
    "Infeasibility",
    "Interval",
    "InvalidEdit",
    "IOLoadError",
    "KBLoadError",
    "KnowledgeBase",
    "Plan",
    "PlanningSession",
    "RouteWeighting",
    "ScenarioDocument",
    "SessionParams",
    "Side",
    "Status",
    "StepOnComplete",
    "TemporalConstraint",
    "TerrainNetwork",
    "Unit",
    "build_sync_matrix",
    "calculate_path",
    "canonical_dumps",
    "default_kb_text",
    "export_plan",
    "export_sync_matrix",
    "fmt_time",
    "import_plan",
    "load_kb",
    "load_scenario",
    "make_plan",
    "project_state",
    "weighting_preset",
    "__version__",
]

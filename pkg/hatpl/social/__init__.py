from .config import FilterConfig, ForbiddenSequence, StepMatcher
from .filters import FilterReport, PlanVerdict, Violation, agent_efforts, effort_imbalance, filter_plans
from .schedule import Schedule, schedule, step_durations

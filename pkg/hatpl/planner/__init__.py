from .linearize import linearizations
from .plan import Plan, PlanResult, PlanStep, SearchOptions, SearchStatistics
from .replay import ReplayResult, replay_validate
from .search import BoundDecision, Planner, SearchNode, TaskInvocation, bound_check, ground_goal, plan

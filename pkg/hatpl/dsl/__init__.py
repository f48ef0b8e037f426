from .ast import AGENT, DomainModel, ProblemModel
from .parser import parse_domain, parse_goal, parse_problem
from .printer import format_domain, format_problem
from .validate import validate

import pytest

from hatpl.dsl import AGENT, parse_domain, parse_goal, parse_problem
from hatpl.dsl.ast import Arity, Direction, Exist, If, Mutability, SelectKind
from hatpl.errors import ParseError
from hatpl.values import EntityRef

ENTITIES = """
define entityType Crane, Location, Pile, Container;

define entityAttributes Agent {
  //An agent can be of type Robot or Crane
  static atom string type;

  //For cranes
  static atom Location attached;

  //For robots
  dynamic atom Location at;
  dynamic atom Container carry;
  dynamic atom bool loading;
}

define entityAttributes Location {
  static set Location adjacent;
  dynamic atom bool occupied;
}

define entityAttributes Pile {
  static atom Location attached;
  dynamic set Container contains;
  dynamic atom Container top;
}

define entityAttributes Container {
  dynamic atom Location in;
  dynamic atom Container on;
}
"""

INITIAL_STATE = """
R1, K1, K2 = new Agent;
L1, L2 = new Location;
P11, P12, P21, P22 = new Pile;
C1, C2 = new Container;

R1.type = ``ROBOT'';
R1.at = L1;
R1.carry = NULL;
R1.loading = false;

K1.type = ``CRANE'';
K1.attached = L1;
K2.type = “CRANE”;
K2.attached = L2;

L1.adjacent <<= L2;
L1.occupied = true;
L2.adjacent <<= L1;
L2.occupied = false;
"""


@pytest.fixture(scope="session")
def entities():
    return parse_domain(ENTITIES, source="entities.hatp")


def diagnostics_of(excinfo):
    return [d.message for d in excinfo.value.diagnostics]


## DOMAIN
def test_entity_declarations(entities):
    names = [t.name for t in entities.entity_types]
    assert names == [AGENT, "Crane", "Location", "Pile", "Container"]
    agent = entities.entity_type(AGENT)
    assert [a.name for a in agent.attributes] == ["type", "attached", "at", "carry", "loading"]
    assert agent.attribute("type").mutability is Mutability.STATIC
    assert agent.attribute("at").value_type == "Location"
    assert entities.attribute("Location", "adjacent").arity is Arity.SET


def test_empty_domain_has_agent_only():
    domain = parse_domain("")
    assert [t.name for t in domain.entity_types] == [AGENT]
    assert domain.methods == () and domain.operators == ()


def test_transport_method(dwr_domain):
    (transport,) = dwr_domain.methods_for("Transport")
    assert len(transport.empty_condition) == 1
    assert len(transport.cases) == 1
    (case,) = transport.cases
    assert isinstance(case.precondition[0], Exist)
    body = case.body
    assert [s.variable for s in body.selectors] == ["S", "R", "K1", "K2"]
    assert body.selectors[1].kind is SelectKind.SELECT_ORDERED
    assert body.selectors[1].direction is Direction.DESCENDING
    assert body.selectors[1].ordering.name == "distance"
    assert body.ordering == ((1, ()), (2, (1,)), (3, (2,)), (4, (3,)), (5, (4,)))


def test_move_operator(dwr_domain):
    move = dwr_domain.operator("Move")
    assert [p.name for p in move.params] == ["R", "From", "To", "FinalDest"]
    assert move.cost.name == "costToMove"
    assert sum(isinstance(e, If) for e in move.effects) == 3
    assert move.attachment_site is None


def test_unlabelled_subtasks_are_numbered_by_position():
    domain = parse_domain(
        """
        method Twice(Agent A) { { subtasks { Ping(A); Ping(A) > 1; }; } }
        action Ping(Agent A) { }
        """
    )
    (case,) = domain.methods_for("Twice")[0].cases
    assert case.body.ordering == ((1, ()), (2, (1,)))


def test_multiple_methods_per_task():
    domain = parse_domain(
        """
        method Go(Agent A) { { subtasks { 1: Ping(A); }; } }
        method Go(Agent A) { { subtasks { 1: Ping(A); 2: Ping(A) > 1; }; } }
        action Ping(Agent A) { }
        """
    )
    assert len(domain.methods_for("Go")) == 2


## DOMAIN ERRORS
def test_lexical_error_has_position():
    with pytest.raises(ParseError) as excinfo:
        parse_domain("define entityType Crane$;", source="bad.hatp")
    (diagnostic,) = excinfo.value.diagnostics
    assert diagnostic.message == "lexical error: unexpected character '$'"
    assert (diagnostic.source, diagnostic.line, diagnostic.column) == ("bad.hatp", 1, 24)
    assert str(diagnostic).startswith("bad.hatp:1:24: error:")


def test_unexpected_end_of_input():
    with pytest.raises(ParseError) as excinfo:
        parse_domain("define entityType Crane")
    assert diagnostics_of(excinfo) == ["unexpected end of input"]


def test_unknown_attribute_type():
    with pytest.raises(ParseError) as excinfo:
        parse_domain("define entityAttributes Agent {\n  dynamic atom Place at;\n}")
    (diagnostic,) = excinfo.value.diagnostics
    assert diagnostic.message == "unknown type Place"
    assert diagnostic.line == 2


def test_duplicate_declarations():
    with pytest.raises(ParseError) as excinfo:
        parse_domain(
            """
            define entityType Crane, Crane;
            define entityAttributes Agent { dynamic atom int n; dynamic atom bool n; }
            action Ping(Agent A) { }
            action Ping(Agent A) { }
            """
        )
    assert diagnostics_of(excinfo) == [
        "duplicate declaration of entity type Crane",
        "duplicate declaration of attribute Agent.n",
        "duplicate declaration of action Ping",
    ]


def test_construct_misuse():
    with pytest.raises(ParseError) as excinfo:
        parse_domain(
            """
            define entityAttributes Agent { dynamic atom bool busy; }
            action Work(Agent A)
            {
                preconditions { IF {A.busy == false;} {A.busy = true;} };
                effects { EXIST(Agent B, {}, {B.busy == true;}); A.busy = true; };
            }
            """
        )
    assert diagnostics_of(excinfo) == [
        "IF is only allowed in effects",
        "EXIST is only allowed in preconditions",
    ]


def test_ordering_constraint_errors():
    with pytest.raises(ParseError) as excinfo:
        parse_domain(
            """
            method Loop(Agent A) { { subtasks { 1: Ping(A) > 2; 2: Ping(A) > 1; 3: Ping(A) > 7; }; } }
            action Ping(Agent A) { }
            """
        )
    assert diagnostics_of(excinfo) == [
        "ordering constraint refers to unknown label 7",
        "ordering constraints between subtasks form a cycle",
    ]


def test_resolution_errors():
    with pytest.raises(ParseError) as excinfo:
        parse_domain(
            """
            define entityAttributes Agent { static atom int rank; }
            method Go(Agent A) { { subtasks { 1: Fly(A); 2: Ping(A, A) > 1; }; } }
            action Ping(Agent A) { preconditions { A.speed == 1; X.rank == 1; }; effects { A.rank = 2; }; }
            action Idle() { }
            """
        )
    assert diagnostics_of(excinfo) == [
        "action Idle must have at least one parameter (the agent)",
        "unknown task Fly",
        "task Ping takes 1 arguments, got 2",
        "type Agent has no attribute speed",
        "unbound variable X",
        "cannot write static attribute rank",
    ]


def test_selector_ordering_presence():
    with pytest.raises(ParseError) as excinfo:
        parse_domain(
            """
            method Go(Agent A) { { subtasks { B = SELECTORDERED(Agent, {}); 1: Ping(B); }; } }
            action Ping(Agent A) { }
            """
        )
    assert diagnostics_of(excinfo) == ["SELECTORDERED needs an ordering function and a direction"]


## PROBLEM
def test_initial_state(entities):
    problem = parse_problem(INITIAL_STATE, entities, source="state.hatpp")
    assert len(problem.entity_types) == 11
    assert problem.entity_types["K1"] == AGENT
    assigned = {(a.entity, a.attr, a.op): a.value for a in problem.assignments}
    assert assigned[("K1", "attached", "=")] == EntityRef("L1")
    assert assigned[("L1", "adjacent", "<<=")] == EntityRef("L2")
    assert assigned[("R1", "type", "=")] == "ROBOT"
    assert assigned[("K2", "type", "=")] == "CRANE"
    assert assigned[("R1", "carry", "=")] is None


def test_type_mismatch(entities):
    with pytest.raises(ParseError) as excinfo:
        parse_problem("R1 = new Agent; P11 = new Pile; R1.at = P11;", entities)
    assert diagnostics_of(excinfo) == ["type mismatch for R1.at: expected Location, got Pile"]


def test_problem_errors(entities):
    with pytest.raises(ParseError) as excinfo:
        parse_problem("X1 = new Robot; R1 = new Agent; R1.speed = 3; R1.at = L9;", entities)
    assert diagnostics_of(excinfo) == [
        "new of unknown type Robot",
        "assignment to undeclared attribute Agent.speed",
        "unknown entity L9",
    ]


def test_goal_clause(dwr_problem):
    assert [c.name for c in dwr_problem.goal] == ["Transport", "Transport"]
    assert [tuple(a.value for a in c.args) for c in dwr_problem.goal] == [
        (EntityRef("C1"), EntityRef("P21")),
        (EntityRef("C2"), EntityRef("P22")),
    ]


def test_tables(dwr_problem):
    table = dwr_problem.table("costToMove")
    assert table.key_types == ("Location", "Location")
    assert dict(table.rows)[(EntityRef("L1"), EntityRef("L2"))] == 5
    assert table.default == 100


def test_goal_override(dwr_domain, dwr_problem):
    goal = parse_goal("Transport(C2,P22); Transport(C1,P21)", dwr_domain, dwr_problem)
    assert [str(c.args[0].value) for c in goal] == ["C2", "C1"]
    with pytest.raises(ParseError):
        parse_goal("Transport(C9,P21)", dwr_domain, dwr_problem)

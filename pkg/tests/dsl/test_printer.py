from hatpl.dsl import format_domain, format_problem, parse_domain, parse_problem
from tests.micro import MICRO_DOMAIN, problem_text


def test_domain_round_trip(dwr_domain):
    text = format_domain(dwr_domain)
    assert parse_domain(text) == dwr_domain
    assert format_domain(parse_domain(text)) == text


def test_problem_round_trip(dwr_domain, dwr_problem):
    text = format_problem(dwr_problem)
    assert parse_problem(text, dwr_domain) == dwr_problem


def test_micro_round_trip():
    domain = parse_domain(MICRO_DOMAIN)
    assert parse_domain(format_domain(domain)) == domain
    for seed in range(10):
        problem = parse_problem(problem_text(seed), domain)
        assert parse_problem(format_problem(problem), domain) == problem


def test_labels_and_constraints_are_written(dwr_domain):
    text = format_domain(dwr_domain)
    assert "5: Put(K2, C, Target) > 4;" in text
    assert "R = SELECTORDERED(Agent, {" in text
    assert "cost{costToMove(From, To)};" in text

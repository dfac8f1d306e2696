import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causelog import scm
from causelog.errors import ParseError, ValidationError
from causelog.scm import And, Atom, Not, Or, evaluate, intervene, parse_formula, parse_model, satisfies

from conftest import FIXTURES
from oracle import NaiveModel, all_contexts
from strategies import model_and_context, models


@pytest.fixture(scope="module")
def squad():
    return parse_model((FIXTURES / "firing_squad.scm").read_text())


def test_firing_squad_structure(squad):
    assert squad.exogenous == ("U",)
    assert squad.endogenous == ("C", "A", "B", "D")
    assert squad.equations["D"].parents == ("A", "B")
    table = squad.equations["D"].table
    assert table == {("0", "0"): "0", ("0", "1"): "1", ("1", "0"): "1", ("1", "1"): "1"}


@pytest.mark.parametrize(
    "u, expected",
    [("1", dict(C="1", A="1", B="1", D="1")), ("0", dict(C="0", A="0", B="0", D="0"))],
)
def test_evaluate_firing_squad(squad, u, expected):
    assert evaluate(squad, {"U": u}) == {"U": u, **expected}


def test_identity_model():
    m = parse_model("exo U:{0,1}  var X:{0,1} = U")
    assert m.exogenous == ("U",) and m.endogenous == ("X",)
    assert m.equations["X"].table == {("0",): "0", ("1",): "1"}


def test_chain():
    m = parse_model("exo U\nvar X = U\nvar Y = X\nvar Z = Y\n")
    assert evaluate(m, {"U": 1}) == {"U": "1", "X": "1", "Y": "1", "Z": "1"}


def test_undeclared_parent_names_it():
    with pytest.raises(ParseError, match="undeclared parent Y"):
        parse_model("exo U\nvar X = Y\n")


@pytest.mark.parametrize(
    "src, msg",
    [
        ("exo U\nexo U\n", "duplicate variable U"),
        ("exo U\nvar A = B\nvar B = A\n", "cycle"),
        ("exo U\nvar X = {\n (U=0) -> 1;\n}\n", "not total"),
        ("exo U\nvar X = U &\n", "line 3, col 1: expected an expression"),
        ("exo U\nvar X:{a,b} = {\n (U=0) -> a;\n (U=1) -> c;\n}\n", "domain"),
    ],
)
def test_model_errors(src, msg):
    with pytest.raises(ParseError, match=msg):
        parse_model(src)


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as err:
        parse_model("exo U\nvar X = U ) \n")
    assert err.value.line == 2 and err.value.col is not None


def test_multivalued_table_and_comparison():
    src = """
    # altitude drives a warning
    exo U : {low, high}
    var alt : {0, 25} = { (U=low) -> 0; (U=high) -> 25; }
    var warn = alt == 25 & !(U == low)
    """
    m = parse_model(src)
    assert evaluate(m, {"U": "high"})["warn"] == "1"
    assert evaluate(m, {"U": "low"})["warn"] == "0"


def test_intervene_replaces_equation(squad):
    m = intervene(squad, {"A": 0})
    assert m.equations["A"].parents == () and m.equations["A"].table == {(): "0"}
    for n in ("C", "B", "D"):
        assert m.equations[n] == squad.equations[n]
    assert squad.equations["A"].parents == ("C",)


def test_empty_intervention_is_identity(squad):
    assert intervene(squad, {}) == squad


def test_constant_surgery_on_quiet_context(squad):
    assert evaluate(intervene(squad, {"D": 1}), {"U": 0}) == dict(U="0", C="0", A="0", B="0", D="1")


def test_satisfies_examples(squad):
    assert satisfies(squad, {"U": 1}, {"A": 0}, "D=1") is True
    assert satisfies(squad, {"U": 1}, {"A": 0, "B": 0}, "D=1") is False
    assert satisfies(squad, {"U": 1}, {}, "C=1 & A=1") is True


@pytest.mark.parametrize(
    "bad",
    [
        lambda m: evaluate(m, {}),
        lambda m: evaluate(m, {"U": 2}),
        lambda m: intervene(m, {"Q": 0}),
        lambda m: intervene(m, {"A": 7}),
        lambda m: intervene(m, {"U": 0}),
        lambda m: satisfies(m, {"U": 1}, {}, "Q=1"),
        lambda m: satisfies(m, {"U": 1}, {}, "D=5"),
    ],
)
def test_invalid_inputs_rejected(squad, bad):
    with pytest.raises(ValidationError):
        bad(squad)


def test_formula_parser():
    f = parse_formula("!(A = 1) && (B == 0 || C != 1)")
    assert f == And((Not(Atom("A", "1")), Or((Atom("B", "0"), Not(Atom("C", "1"))))))
    assert f.holds({"A": "0", "B": "1", "C": "0"})
    assert parse_formula(str(f)) == f
    with pytest.raises(ParseError):
        parse_formula("A = ")


def test_from_functions_tabulates():
    m = scm.CausalModel.from_functions({"U": (0, 1)}, [("X", (0, 1), ["U"], lambda u: 1 - int(u))])
    assert evaluate(m, {"U": 0})["X"] == "1"


# -- properties ------------------------------------------------------------


@given(model_and_context())
def test_evaluate_is_fixed_point(mc):
    m, ctx = mc
    vals = evaluate(m, ctx)
    for n, eq in m.equations.items():
        assert eq(vals) == vals[n]


@given(models(max_endo=4))
@settings(max_examples=50)
def test_empty_intervention_changes_nothing(m):
    for ctx in all_contexts(NaiveModel(m)):
        assert evaluate(intervene(m, {}), ctx) == evaluate(m, ctx)


@given(model_and_context(), st.data())
def test_intervened_variable_takes_value(mc, data):
    m, ctx = mc
    x = data.draw(st.sampled_from(m.endogenous))
    v = data.draw(st.sampled_from(m.domain(x)))
    assert evaluate(intervene(m, {x: v}), ctx)[x] == v


@given(model_and_context(), st.data())
def test_satisfies_matches_direct_evaluation(mc, data):
    m, ctx = mc
    x = data.draw(st.sampled_from(m.names))
    v = data.draw(st.sampled_from(m.domain(x)))
    f = Atom(x, v)
    assert satisfies(m, ctx, {}, f) == (evaluate(m, ctx)[x] == v)


@given(model_and_context(), st.data())
def test_evaluate_agrees_with_naive_solver(mc, data):
    m, ctx = mc
    x = data.draw(st.sampled_from(m.endogenous))
    v = data.draw(st.sampled_from(m.domain(x)))
    assert evaluate(intervene(m, {x: v}), ctx) == NaiveModel(m).solve(ctx, {x: v})


@given(models(max_endo=4))
@settings(max_examples=60)
def test_model_text_round_trip(m):
    again = parse_model(scm.format_model(m))
    assert again == m
    nm = NaiveModel(m)
    for ctx in all_contexts(nm):
        assert evaluate(again, ctx) == evaluate(m, ctx)


def test_round_trip_of_expression_model(squad):
    assert parse_model(scm.format_model(squad)) == squad


def test_contexts_enumerate_all():
    m = parse_model("exo U\nexo W:{a,b,c}\nvar X = U\n")
    got = list(all_contexts(NaiveModel(m)))
    assert len(got) == 6 and {tuple(c.values()) for c in got} == set(itertools.product("01", "abc"))

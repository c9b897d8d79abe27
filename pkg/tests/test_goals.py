import importlib.resources

import pytest
from hypothesis import given, strategies as st

from fdsteer.goals import (
    AllDifferent,
    Conj,
    DomainDecl,
    FdLabeling,
    GoalSyntaxError,
    Labeling,
    LinExpr,
    LinearRel,
    Minimize,
    ModelFormatError,
    NeqOffset,
    Relation,
    Safe,
    parse_goal,
    parse_model,
    render_goal,
)


def lin(pairs, const=0):
    return LinExpr.make(pairs, const)


def test_parse_all_different():
    assert parse_goal("fd_all_different([S,E,N,D])") == AllDifferent(
        ("S", "E", "N", "D"))


def test_parse_weighted_sum():
    got = parse_goal("1000*S+100*E+10*N+D #= 42")
    assert got == LinearRel(
        lin([(1000, "S"), (100, "E"), (10, "N"), (1, "D")]),
        Relation.EQ, lin([], 42))


def test_whitespace_is_free():
    a = parse_goal("1000*S+100*E+10*N+D #= 42")
    b = parse_goal("  1000 * S\n\t+ 100*E +10* N + D   #=   42 ")
    assert a == b


def test_error_position_inside_list():
    with pytest.raises(GoalSyntaxError) as exc:
        parse_goal("labeling([X,)")
    assert exc.value.line == 1
    assert exc.value.col == 13


def test_conjunction_and_single_atom_shapes():
    single = parse_goal("X #< Y")
    assert isinstance(single, LinearRel)
    both = parse_goal("X #< Y, fd_all_different([X,Y])")
    assert isinstance(both, Conj)
    assert len(both.goals) == 2


def test_minimize_takes_the_trailing_variable_as_cost():
    got = parse_goal("minimize(trace_labeling([Y,X]), X)")
    assert got == Minimize(Labeling(("Y", "X")), "X")
    multi = parse_goal("minimize(X #< 3, trace_labeling([X]), X)")
    assert multi == Minimize(
        Conj((LinearRel(lin([(1, "X")]), Relation.LT, lin([], 3)),
              Labeling(("X",)))), "X")


def test_leading_unary_minus():
    got = parse_goal("-X+3 #= 0")
    assert got == LinearRel(lin([(-1, "X")], 3), Relation.EQ, lin([], 0))


def test_duplicate_variables_merge():
    got = parse_goal("X+X #= 4")
    assert got.lhs == LinExpr(((2, "X"),), 0)
    gone = parse_goal("X-X #= 0")
    assert gone.lhs == LinExpr((), 0)


def test_variable_products_are_rejected():
    with pytest.raises(GoalSyntaxError, match="integer.variable products"):
        parse_goal("X*Y #= 2")
    with pytest.raises(GoalSyntaxError, match="variable after"):
        parse_goal("2*3 #= 6")


def test_unknown_construct():
    with pytest.raises(GoalSyntaxError, match="foo"):
        parse_goal("foo(X)")


@pytest.mark.parametrize("op,rel", [
    ("#=", Relation.EQ), ("#\\=", Relation.NEQ), ("#<", Relation.LT),
    ("#=<", Relation.LE), ("#>", Relation.GT), ("#>=", Relation.GE),
])
def test_every_relational_operator(op, rel):
    got = parse_goal("X %s 3" % op)
    assert got.rel is rel


def test_fd_domain_and_negative_bounds():
    got = parse_goal("fd_domain([X,Y],-2,5)")
    assert got == DomainDecl(("X", "Y"), -2, 5)


def test_render_canonical_forms():
    assert render_goal(AllDifferent(("S", "E"))) == "fd_all_different([S,E])"
    two = LinearRel(lin([(2, "X"), (3, "Y")]), Relation.EQ, lin([], 12))
    assert render_goal(two) == "2*X+3*Y #= 12"
    assert render_goal(Labeling(("Y", "X"))) == "trace_labeling([Y,X])"
    assert render_goal(FdLabeling("Q3")) == "fd_labeling(Q3)"


def test_render_offset_disequality():
    assert render_goal(NeqOffset("X", "Y", 3)) == "X #\\= Y+3"
    assert render_goal(NeqOffset("X", "Y", 0)) == "X #\\= Y"
    assert render_goal(NeqOffset("X", "Y", -2)) == "X #\\= Y-2"


# --- round trip over generated goals ---

_names = st.from_regex(r"[A-Z][A-Za-z0-9_]{0,3}", fullmatch=True)
_varlists = st.lists(_names, min_size=1, max_size=4).map(tuple)
_exprs = st.builds(
    lambda pairs, c: LinExpr.make(pairs, c),
    st.lists(st.tuples(st.integers(-50, 50).filter(bool), _names),
             max_size=4),
    st.integers(-100, 100))
_rels = st.builds(LinearRel, _exprs, st.sampled_from(list(Relation)), _exprs)
_plain_atoms = st.one_of(
    _rels,
    st.builds(AllDifferent, _varlists),
    st.builds(DomainDecl, _varlists, st.integers(-20, 20),
              st.integers(-20, 20)),
    st.builds(Labeling, _varlists),
    st.builds(FdLabeling, _names),
    st.builds(Safe, _varlists),
)
_atoms = st.one_of(
    _plain_atoms,
    st.builds(
        Minimize,
        st.one_of(_plain_atoms,
                  st.lists(_plain_atoms, min_size=2, max_size=3)
                  .map(lambda gs: Conj(tuple(gs)))),
        _names))
_goals = st.one_of(
    _atoms,
    st.lists(_atoms, min_size=2, max_size=4).map(lambda gs: Conj(tuple(gs))))


@given(_goals)
def test_parse_render_round_trip(ast):
    assert parse_goal(render_goal(ast)) == ast


@given(_goals)
def test_parse_is_deterministic(ast):
    text = render_goal(ast)
    assert parse_goal(text) == parse_goal(text)


# --- model files ---

def bundled(name):
    return (importlib.resources.files("fdsteer") / "models" /
            name).read_text()


def test_sendmore_model_shape():
    m = parse_model(bundled("sendmore.model"))
    assert m.name == "sendmore"
    assert m.all_vars() == ["S", "E", "N", "D", "M", "O", "R", "Y"]
    assert m.declarations == ((("S", "E", "N", "D", "M", "O", "R", "Y"),
                               0, 9),)
    assert len(m.buttons) == 5
    assert m.buttons[0] == "fd_domain([S,M],1,9)"
    assert parse_goal(m.buttons[1]).rel is Relation.EQ
    assert m.buttons[4] == "trace_labeling([Y,R,O,M,D,N,E,S])"


def test_queens_model_expands_parameters():
    m = parse_model(bundled("queens.model"))
    assert m.name == "queens"
    assert m.all_vars() == ["Q%d" % i for i in range(1, 9)]
    assert m.declarations[0][1:] == (1, 8)
    assert len(m.buttons) == 10
    assert parse_goal(m.buttons[0]) == Safe(tuple(m.all_vars()))
    for i in range(1, 9):
        assert m.buttons[i] == "fd_labeling(Q%d)" % i
    assert parse_goal(m.buttons[9]) == Labeling(tuple(m.all_vars()))


def test_queens_model_parameter_override():
    m = parse_model(bundled("queens.model"), overrides={"N": 5})
    assert m.all_vars() == ["Q1", "Q2", "Q3", "Q4", "Q5"]
    assert m.declarations[0][1:] == (1, 5)
    assert len(m.buttons) == 7


def test_duplicate_declaration_is_an_error():
    with pytest.raises(ModelFormatError) as exc:
        parse_model("vars S in 0..9\nvars S E in 1..2\n")
    assert exc.value.line == 2


def test_unknown_directive_and_parameter():
    with pytest.raises(ModelFormatError, match="unknown directive"):
        parse_model("frobnicate yes\n")
    with pytest.raises(ModelFormatError, match="unknown parameter"):
        parse_model("vars Q1..Q$N in 1..9\n")


def test_bad_button_goal_reports_the_line():
    with pytest.raises(ModelFormatError) as exc:
        parse_model('vars X in 0..9\n\nbutton "X #="\n')
    assert exc.value.line == 3


def test_comment_handling_respects_quotes():
    m = parse_model('vars X in 0..9  # digits\nbutton "X #= 3"  # post\n')
    assert m.buttons == ("X #= 3",)


def test_names_directive_sets_display_order():
    m = parse_model("vars A B C in 0..5\nnames C=gamma A=alpha\n")
    assert m.varnames == (("C", "gamma"), ("A", "alpha"))
    assert m.display_of("C") == "gamma"
    assert m.display_of("B") == "B"

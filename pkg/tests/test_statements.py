"""Statement vocabulary: arity, contrariness, rendering, JSON round trip."""

import pytest

from chaincase.statements import (
    ARITY,
    Predicate,
    Statement,
    StatementError,
    inputs_constant,
    parse_inputs_constant,
    quote,
)


def test_every_predicate_has_an_arity():
    assert set(ARITY) == set(Predicate)
    assert ARITY[Predicate.CONTROLS] == 2
    assert ARITY[Predicate.RELIABLE] == 1


def test_arity_enforced():
    with pytest.raises(StatementError):
        Statement(Predicate.CONTROLS, ("just-one",))
    with pytest.raises(StatementError):
        Statement(Predicate.RELIABLE, ("a", "b"))


def test_unknown_predicate_rejected():
    with pytest.raises(StatementError):
        Statement("owns", ("x", "y"))


def test_predicate_coerced_from_string():
    st = Statement("controls", ("e", "a"))
    assert st.predicate is Predicate.CONTROLS


def test_negation_and_contrariness():
    st = Statement(Predicate.CONTROLS, ("e", "a"))
    neg = st.negate()
    assert neg.negated
    assert neg.negate() == st
    assert st.is_contrary_of(neg)
    assert neg.is_contrary_of(st)
    assert not st.is_contrary_of(st)
    # Different args are never contraries, only exact negation is.
    other = Statement(Predicate.CONTROLS, ("e", "b"), negated=True)
    assert not st.is_contrary_of(other)
    different_pred = Statement(Predicate.LINKED, ("e", "a"), negated=True)
    assert not st.is_contrary_of(different_pred)


def test_render_and_quote():
    st = Statement(Predicate.CONTROLS, ("theone", "addr-1"))
    assert st.render() == "controls(theone, addr-1)"
    assert str(st.negate()) == "not controls(theone, addr-1)"
    assert quote(st) == "controls(theone, addr-1)"
    nested = Statement(Predicate.SIGN_OF, (quote(st), quote(st.negate())))
    assert nested.render() == (
        "sign_of(controls(theone, addr-1), not controls(theone, addr-1))")


def test_json_round_trip():
    st = Statement(Predicate.POSITION_TO_KNOW, ("exchange", "topic"), True)
    assert Statement.from_json_obj(st.to_json_obj()) == st
    assert st.to_json_obj() == {
        "predicate": "position_to_know",
        "args": ["exchange", "topic"],
        "negated": True,
    }


def test_inputs_constant_round_trip():
    constant = inputs_constant("tx-99")
    assert constant == "inputs(tx-99)"
    assert parse_inputs_constant(constant) == "tx-99"
    assert parse_inputs_constant("addr-plain") is None


def test_statements_hashable_and_frozen():
    st = Statement(Predicate.LINKED, ("a", "b"))
    assert st in {st}
    with pytest.raises(AttributeError):
        st.negated = True

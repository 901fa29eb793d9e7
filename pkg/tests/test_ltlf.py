import itertools
import pickle

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lisaforge.ltlf import (FALSE, TRUE, And, Atom, Finally, FormulaSyntaxError, Globally, Next,
                            Not, Op, Or, Partition, Release, Until, evaluate, evaluate_batch,
                            parse, parse_partition, propositions, split_conjuncts, to_nnf,
                            to_text)

from corpus import CORPUS, formulas
from oracles import all_words, word_props

a, b, c = Atom("a"), Atom("b"), Atom("c")


def formula_strategy(props=("a", "b", "c")):
    leaves = st.sampled_from([Atom(p) for p in props] + [TRUE, FALSE])

    def extend(children):
        return st.one_of(
            children.map(Not), children.map(Next), children.map(Finally),
            children.map(Globally),
            st.tuples(children, children).map(lambda t: And(*t)),
            st.tuples(children, children).map(lambda t: Or(*t)),
            st.tuples(children, children).map(lambda t: Until(*t)),
        )

    return st.recursive(leaves, extend, max_leaves=8)


traces = st.lists(st.frozensets(st.sampled_from("abc")), min_size=1, max_size=6)


# -- parsing ---------------------------------------------------------------------

def test_parse_single_operator():
    assert parse("F a") is Finally(a)


def test_until_binds_tighter_than_and():
    assert parse("a U b & G c") is And(Until(a, b), Globally(c))


def test_missing_operand_is_reported_with_position():
    with pytest.raises(FormulaSyntaxError) as info:
        parse("a U")
    assert info.value.line == 1


@pytest.mark.parametrize("text", ["(a & b", "a & b)", "a $ b", "a R b", "", "X", "a b"])
def test_malformed_inputs(text):
    with pytest.raises(FormulaSyntaxError):
        parse(text)


def test_error_position_on_later_line():
    with pytest.raises(FormulaSyntaxError) as info:
        parse("a &\n  b & )")
    assert (info.value.line, info.value.column) == (2, 7)


def test_precedence_chain():
    # <-> lowest, then ->, |, &, U, unary
    f = parse("a <-> b -> c | a & b U !c")
    g = parse("a <-> (b -> (c | (a & (b U !c))))")
    assert f is g


def test_implication_is_right_associative():
    assert parse("a -> b -> c") is parse("a -> (b -> c)")


def test_until_is_right_associative():
    assert parse("a U b U c") is Until(a, Until(b, c))


def test_and_or_are_flattened():
    f = parse("a & b & c")
    assert f.op is Op.AND and len(f.children) == 3
    assert len(parse("a | (b | c)").children) == 3


def test_comments_and_whitespace():
    assert parse("# goal\nF a  # trailing\n") is Finally(a)


def test_keywords_are_not_atoms():
    with pytest.raises(ValueError):
        Atom("X")
    with pytest.raises(ValueError):
        Atom("1a")


def test_hash_consing():
    assert parse("G (a -> F b)") is parse("G(a->F b)")
    assert And(a, b) is not And(b, a)


def test_pickle_preserves_identity():
    f = parse("a U X b")
    assert pickle.loads(pickle.dumps(f)) is f


@pytest.mark.parametrize("text", CORPUS)
def test_print_parse_round_trip(text):
    f = parse(text)
    assert parse(to_text(f)) is f


@settings(max_examples=200, deadline=None)
@given(formula_strategy(), traces)
def test_round_trip_generated(f, trace):
    # nested And/Or come back flattened; after that printing is a fixpoint
    g = parse(to_text(f))
    assert parse(to_text(g)) is g
    assert evaluate(trace, g) == evaluate(trace, f)


# -- structure ---------------------------------------------------------------------

def test_propositions():
    assert propositions(parse("a U (b & X c) | true")) == {"a", "b", "c"}


def test_split_conjuncts():
    assert split_conjuncts(parse("F a & (G b & c)")) == [Finally(a), Globally(b), c]
    assert split_conjuncts(parse("F a | b")) == [parse("F a | b")]


def test_nnf_until_release_duality():
    assert to_nnf(parse("!(a U b)")) is Release(Not(a), Not(b))


def test_nnf_eventually_always_duality():
    assert to_nnf(parse("!F a")) is Globally(Not(a))
    assert to_nnf(parse("!G a")) is Finally(Not(a))


def _negation_only_on_atoms_or_next(f):
    if f.op is Op.NOT:
        return f.children[0].op in (Op.ATOM, Op.NEXT) and all(
            _negation_only_on_atoms_or_next(c) for c in f.children[0].children)
    return all(_negation_only_on_atoms_or_next(c) for c in f.children)


@settings(max_examples=200, deadline=None)
@given(formula_strategy(), traces)
def test_nnf_preserves_semantics(f, trace):
    g = to_nnf(f)
    assert _negation_only_on_atoms_or_next(g)
    assert evaluate(trace, g) == evaluate(trace, f)


# -- semantics -----------------------------------------------------------------------

def test_empty_trace_rejected():
    with pytest.raises(ValueError):
        evaluate([], a)


def test_next_is_strong():
    assert not evaluate([{"a"}], parse("X a"))
    assert evaluate([{"a"}, {"a"}], parse("X a"))
    assert evaluate([{"a"}], parse("!X !a"))


def test_basic_semantics():
    assert evaluate([set(), {"a"}], parse("F a"))
    assert not evaluate([{"a"}, set()], parse("G a"))
    assert evaluate([{"a"}, {"a"}, {"b"}], parse("a U b"))
    assert not evaluate([{"a"}, {"a"}], parse("a U b"))
    assert evaluate([{"a"}], parse("G a"))


def test_release_semantics():
    f = Release(a, b)
    assert evaluate([{"b"}, {"b"}], f)
    assert evaluate([{"b"}, {"a", "b"}, set()], f)
    assert not evaluate([{"b"}, set()], f)


@settings(max_examples=150, deadline=None)
@given(formula_strategy(), st.integers(1, 4))
def test_batch_evaluation_matches_recursive(f, length):
    support = ["a", "b", "c"]
    words = all_words(3, length)
    if len(words) > 512:
        words = words[np.random.default_rng(length).choice(len(words), 512, replace=False)]
    got = evaluate_batch(words, f, support)
    want = [evaluate(word_props(w, support), f) for w in words]
    assert list(got) == want


# -- partitions -------------------------------------------------------------------------

def test_partition_parse_and_cover():
    p = parse_partition(".inputs: i j\n.outputs: o\n")
    assert p == Partition(("i", "j"), ("o",))
    assert parse_partition(p.to_text()) == p
    p.check_covers(parse("i U o"))
    with pytest.raises(ValueError):
        p.check_covers(parse("F z"))


def test_partition_rejects_overlap_and_garbage():
    with pytest.raises(ValueError):
        Partition(("a",), ("a",))
    with pytest.raises(ValueError):
        parse_partition(".inputs: a\n")
    with pytest.raises(ValueError):
        parse_partition(".inputs: a\n.outputs: 1x\n")

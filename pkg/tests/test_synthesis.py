import pytest

from lisaforge.bdd import BDD
from lisaforge.bench import gen_counter, gen_double_counter
from lisaforge.explicit import ExplicitDfa, from_ltlf
from lisaforge.ltlf import Partition, evaluate, parse
from lisaforge.symbolic import encode
from lisaforge.synthesis import extract_strategy, is_realizable, simulate, winning_set

from corpus import CORPUS, partition_for, swapped_partition
from oracles import game_tree_value, solve_game, strategy_always_wins

OUT_O = Partition((), ("o",))


def test_eventually_output_is_realizable():
    r = is_realizable(parse("F o"), OUT_O)
    assert r.realizable
    # W0 = accepting, W1 adds the start state, the third application changes nothing
    assert r.iterations == 2
    assert len(r.layers) == 2


def test_eventually_input_is_unrealizable():
    r = is_realizable(parse("F i"), Partition(("i",), ()))
    assert not r.realizable


def test_contradiction_is_unrealizable():
    assert not is_realizable(parse("G o & F !o"), OUT_O).realizable


def test_copy_previous_input_needs_a_falsy_last_input():
    # with strong next the last position needs !i; the environment can keep i high
    f, p = parse("G (i <-> X o)"), Partition(("i",), ("o",))
    d = from_ltlf(f)
    assert solve_game(d, p.inputs, p.outputs)[0] is False
    assert is_realizable(f, p).realizable is False


def test_accepting_start_is_won_at_seed():
    d = ExplicitDfa(("o",), 0, frozenset({0}), ((1, 0), (1, 1)))
    g = encode(d, BDD(), "d")
    r = winning_set(g, OUT_O)
    assert r.realizable
    assert g.bdd.evaluate(r.layers[0], {z: False for z in g.state_vars})


def test_fixpoint_is_monotone_and_contains_final():
    inst = gen_counter(3)
    r = is_realizable(inst.formula, inst.partition)
    m = r.game.bdd
    assert (r.game.final & ~r.winning_set).is_false
    for w0, w1 in zip(r.layers, r.layers[1:]):
        assert (w0 & w1) == w0 and w0 != w1
    assert r.iterations == len(r.layers)
    assert len(r.node_counts) == r.iterations + 1


def test_partition_must_cover_game():
    with pytest.raises(ValueError):
        is_realizable(parse("F o & F x"), OUT_O)
    g = encode(from_ltlf(parse("F x")), BDD(), "d")
    with pytest.raises(ValueError):
        winning_set(g, OUT_O)


def test_strategy_for_eventually_output():
    r = is_realizable(parse("F o"), OUT_O)
    s = extract_strategy(r.game, r, OUT_O)
    assert s.output(s.initial_state(), set()) == {"o"}
    sim = simulate(s, [set()])
    assert sim.trace == [{"o"}] and sim.accepted and sim.steps == 1


def test_strategy_prefers_false_outputs():
    r = is_realizable(parse("X true"), OUT_O)
    s = extract_strategy(r.game, r, OUT_O)
    assert s.output(s.initial_state(), set()) == frozenset()


def test_strategy_needs_realizable_result():
    r = is_realizable(parse("F i"), Partition(("i",), ()))
    with pytest.raises(ValueError):
        extract_strategy(r.game, r, r.partition)


def test_simulate_reports_short_inputs_and_rejects_unknown():
    p = Partition(("i",), ("o",))
    r = is_realizable(parse("X X o"), p)
    s = extract_strategy(r.game, r, p)
    sim = simulate(s, [set()])
    assert not sim.accepted and sim.steps == 1
    with pytest.raises(ValueError):
        simulate(s, [{"o"}])
    with pytest.raises(ValueError):
        simulate(s, [{"nope"}])


def test_two_bit_counter_wins_within_four_rounds():
    inst = gen_counter(2)
    r = is_realizable(inst.formula, inst.partition)
    s = extract_strategy(r.game, r, inst.partition)
    assert strategy_always_wins(s, 4)
    sim = simulate(s, [set()] * 4)
    assert sim.accepted
    assert evaluate(sim.trace, inst.formula)


def test_double_counter_strategy_against_all_inputs():
    inst = gen_double_counter(2)
    r = is_realizable(inst.formula, inst.partition)
    d = from_ltlf(inst.formula)
    assert r.realizable == solve_game(d, inst.partition.inputs, inst.partition.outputs)[0]
    s = extract_strategy(r.game, r, inst.partition)
    assert strategy_always_wins(s, d.num_states)


@pytest.mark.parametrize("mode", ["hybrid", "explicit", "symbolic"])
@pytest.mark.parametrize("text", CORPUS)
def test_verdict_matches_backward_induction(text, mode):
    f = parse(text)
    d = from_ltlf(f)
    for p in (partition_for(f), swapped_partition(f)):
        want, rank = solve_game(d, p.inputs, p.outputs)
        assert game_tree_value(d, p.inputs, p.outputs, d.num_states) == want
        r = is_realizable(f, p, mode=mode)
        assert r.realizable == want
        if want:
            s = extract_strategy(r.game, r, p)
            assert strategy_always_wins(s, d.num_states)

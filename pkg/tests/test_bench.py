import itertools

import pytest

from lisaforge.bench import (BenchmarkInstance, gen_counter, gen_double_counter, gen_nim,
                             gen_random, generate)
from lisaforge.composer import HybridComposer
from lisaforge.explicit import from_ltlf
from lisaforge.ltlf import Op, evaluate, evaluate_batch, parse, propositions
from lisaforge.synthesis import is_realizable

from oracles import (all_words, bouton_first_mover_wins, nim_first_mover_wins, run_batch,
                     solve_game)


def oracle_verdict(inst):
    d = from_ltlf(inst.formula)
    return solve_game(d, inst.partition.inputs, inst.partition.outputs)[0]


def test_counter_one_bit_shape():
    inst = gen_counter(1)
    assert inst.formula is parse("!c0 & (!c0 & X c0 | c0 & X !c0) U c0")
    assert inst.partition.inputs == () and inst.partition.outputs == ("c0",)
    assert inst.name == "counter_n1"


@pytest.mark.parametrize("n", [1, 2, 3])
def test_counter_realizable_per_oracle(n):
    inst = gen_counter(n)
    assert oracle_verdict(inst) is True
    assert is_realizable(inst.formula, inst.partition).realizable


def test_counter_trace_is_the_count():
    inst = gen_counter(2)
    trace = [set(), {"c0"}, {"c1"}, {"c0", "c1"}]
    assert evaluate(trace, inst.formula)
    assert not evaluate(trace[:3], inst.formula)
    assert not evaluate([set(), {"c1"}, {"c0", "c1"}], inst.formula)


def test_counter_size_grows():
    sizes = []
    for n in range(1, 6):
        c = HybridComposer(mode="explicit")
        c.compose(gen_counter(n).formula)
        sizes.append(c.min_dfa_states)
    assert sizes == sorted(set(sizes))


def test_gated_counter_is_unrealizable():
    inst = gen_counter(2, inc=True)
    assert inst.partition.inputs == ("inc",)
    assert oracle_verdict(inst) is False
    assert not is_realizable(inst.formula, inst.partition).realizable


@pytest.mark.parametrize("n", [1, 2])
def test_double_counter_per_oracle(n):
    inst = gen_double_counter(n)
    want = oracle_verdict(inst)
    for mode in ("hybrid", "explicit", "symbolic"):
        assert is_realizable(inst.formula, inst.partition, mode=mode).realizable == want


def test_double_counter_environment_cheating_hands_over_the_win():
    inst = gen_double_counter(1)
    # environment starts at 1 and then drops to 0 without being allowed to
    assert evaluate([{"e0"}, set()], inst.formula)
    # environment at max raises add
    assert evaluate([{"e0", "add"}], inst.formula)
    # honest environment that never matches yet: not accepted
    assert not evaluate([{"e0"}], inst.formula)


@pytest.mark.parametrize("p,q", list(itertools.product((1, 2), repeat=2)))
def test_nim_against_bouton(p, q):
    inst = gen_nim(p, q)
    first = bouton_first_mover_wins([q] * p)
    assert first == nim_first_mover_wins([q] * p)
    assert oracle_verdict(inst) == (not first)
    assert is_realizable(inst.formula, inst.partition).realizable == (not first)


def test_nim_single_token_play():
    inst = gen_nim(1, 1)
    # environment takes the token; the system has no legal reply
    assert not evaluate([{"h0_0", "ea_0"}], inst.formula)
    # an illegal environment move (amount zero) is a win
    assert evaluate([{"h0_0"}], inst.formula)


def test_nim_two_heaps_play():
    inst = gen_nim(2, 1)
    # env takes heap 0, system takes heap 1: board empty after the system move
    assert evaluate([{"h0_0", "h1_0", "ea_0", "si_0", "sa_0"}], inst.formula)
    # system answers on the already empty heap: illegal
    assert not evaluate([{"h0_0", "h1_0", "ea_0", "sa_0"}], inst.formula)


def test_random_is_deterministic():
    a = gen_random(2, 2, 7)
    b = gen_random(2, 2, 7)
    assert a.formula is b.formula and a.partition == b.partition
    assert a.name == "random_d2_p2_s7"


def test_random_depth_one_is_a_leaf():
    for seed in range(30):
        f = gen_random(1, 3, seed).formula
        assert f.op in (Op.ATOM, Op.TRUE, Op.FALSE)


def test_random_partition_alternates():
    inst = gen_random(3, 5, 0)
    assert inst.partition.inputs == ("p0", "p2", "p4")
    assert inst.partition.outputs == ("p1", "p3")


@pytest.mark.parametrize("seed", range(200))
def test_random_instances_convert_soundly(seed):
    inst = gen_random(1 + seed % 4, 1 + seed % 3, seed)
    f = inst.formula
    support = sorted(propositions(f))
    d = from_ltlf(f)
    for n in range(1, 5):
        words = all_words(len(support), n)
        assert (run_batch(d, words, support) == evaluate_batch(words, f, support)).all()


@pytest.mark.parametrize("inst", [gen_counter(3), gen_counter(2, inc=True), gen_double_counter(2),
                                  gen_nim(2, 2), gen_random(4, 3, 11)], ids=lambda i: i.name)
def test_file_round_trip(inst, tmp_path):
    ltlf, part = inst.write(tmp_path)
    back = BenchmarkInstance.read(ltlf, part, inst.family)
    assert back.formula is inst.formula
    assert back.partition == inst.partition
    assert back.name == inst.name


@pytest.mark.parametrize("seed", range(0, 400, 7))
def test_random_file_round_trip(seed, tmp_path):
    inst = gen_random(2 + seed % 5, 3, seed)
    ltlf, part = inst.write(tmp_path)
    assert BenchmarkInstance.read(ltlf, part).formula is inst.formula


def test_partitions_cover_formulas():
    for inst in [gen_counter(4), gen_double_counter(3), gen_nim(3, 3), gen_random(4, 3, 1)]:
        inst.partition.check_covers(inst.formula)


@pytest.mark.parametrize("call", [lambda: gen_counter(0), lambda: gen_counter(21),
                                  lambda: gen_double_counter(11), lambda: gen_nim(4, 1),
                                  lambda: gen_nim(1, 0), lambda: generate("chess")])
def test_parameter_ranges(call):
    with pytest.raises(ValueError):
        call()


def test_generate_dispatch():
    assert generate("nim", p=1, q=2).name == "nim_p1_q2"
    assert generate("counter", n=2, inc=True).name == "counter_inc_n2"

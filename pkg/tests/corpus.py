"""Fixed formula corpus shared by the tests.

HANDWRITTEN exercises every operator of the surface syntax. FUZZED was
produced once by a seeded grammar fuzzer (depth <= 4, at most 3
propositions) and frozen here so the corpus never drifts.
"""
from lisaforge.ltlf import Partition, parse, propositions

HANDWRITTEN = [
    "F a",
    "G a",
    "a U b",
    "X a",
    "X X a",
    "!X a",
    "F a & F b & F c",
    "G (a -> X b)",
    "G (a -> F b)",
    "F G a",
    "G F a",
    "a U (b U c)",
    "(a U b) U c",
    "!(a U b)",
    "a <-> X b",
    "F (a & X (b & X c))",
    "G (a | b) & F !a",
    "true",
    "false",
    "X true",
    "!a & X a & X X !a",
    "G a | G b",
    "F a -> F b",
    "(a U b) & (b U c) & (c U a)",
    "G !(a & b)",
    "X G a",
    "F (a U b) & G !c",
    "G (a <-> X !a)",
    "a U X b",
    "!F a | G b & X c",
]

FUZZED = [
    "b",
    "X (!b | a)",
    "a",
    "(!a | b) | G c",
    "!G a & a",
    "a & (!a | a U a)",
    "!a",
    "F !a",
    "F (c & c)",
    "a U (!a & a)",
    "!(((!c | a) & (c | !a)) U F c) | (!c | c) U a",
    "b U (!a | a) & (G true | b)",
    "F (a & a) & a",
    "G b & X b",
    "!(a & a) U (a U b | a)",
    "(!X a | b U b) & (X a | !(b U b)) | a",
    "(!a | a) | G a",
    "(!a | a U a & (a | a)) & (a | !(a U a & (a | a)))",
    "F (X c & !a)",
    "G b & ((!a | a) & (a | !a))",
    "F F (a & b)",
    "!(false & a) & G (a U a)",
    "!a U a",
    "X ((!b | b) & (b | !b)) & G X a",
    "((!(a U a) | a | a) & (a U a | !(a | a))) U G F a",
    "G !a U (!a | b)",
    "((!F a | (!a | a) & (a | !a)) & (F a | !((!a | a) & (a | !a)))) & (!a & (a & a))",
    "G (X b U (a U b))",
    "(b & a) & ((!false | a) & (false | !a)) | (!b | a)",
    "!F a & (a U a & a U a)",
]

CORPUS = HANDWRITTEN + FUZZED


def formulas():
    return [parse(t) for t in CORPUS]


def partition_for(f) -> Partition:
    """Sorted propositions alternate output, input, output, ..."""
    props = sorted(propositions(f))
    return Partition(tuple(props[1::2]), tuple(props[0::2]))


def swapped_partition(f) -> Partition:
    props = sorted(propositions(f))
    return Partition(tuple(props[0::2]), tuple(props[1::2]))

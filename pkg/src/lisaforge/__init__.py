"""LTLf to DFA compilation with hybrid explicit/symbolic composition, and synthesis."""
from .bdd import BDD, BddRef
from .composer import HybridComposer, Thresholds, compose, should_switch
from .errors import BudgetExceeded, NodeBudgetExceeded, StateBudgetExceeded
from .explicit import ExplicitDfa, accepts, from_ltlf, minimize, product
from .ltlf import Formula, Partition, evaluate, parse, split_conjuncts, to_nnf
from .symbolic import SymbolicDfa, decode, encode, symbolic_accepts, symbolic_product
from .synthesis import GameResult, Strategy, extract_strategy, is_realizable, simulate, winning_set

__version__ = "0.1.0"

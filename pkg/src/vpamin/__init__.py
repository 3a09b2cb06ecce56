"""State reduction for visibly pushdown automata by reachability-aware quotienting."""

from .encode import ClauseDb, NotLiveError, PairVar, build_instance
from .oracle import bounded_equiv, check_local_max, check_raq, direct_bisim_fa, fig1x, fig2x, sevpa
from .partition import StatePartition
from .quotient import MinimizeReport, MinimizeResult, assignment_to_partition, build_quotient, minimize
from .randgen import RandomSpec, generate
from .reachability import TopsMap, compute_tops, initial_partition, is_live, make_live, trim
from .solver import Assignment, EqualityContext, GreedySolver, Unsatisfiable, solve_baseline_exhaustive, solve_instance
from .textfmt import VpaSyntaxError, parse, serialize
from .vpa import BOTTOM, Alphabet, Vpa, accepts, classify_word, enumerate_language, validate

__version__ = "0.1.0"

"""Predicate nets over heterogeneous structures: states are extensions of
predicates, steps add and remove items locally."""

from .values import (
    Value, Sym, Int, Bool, Tup, SetV, TRUE, FALSE, value, compare,
    canonical_text, builtin_apply, BuiltinError,
)
from .signature import Signature, Structure, Product, Powerset, wf_check
from .terms import (
    Var, Const, App, TupleT, SetT, Lit, lit, sort_check, eval_term, match_term,
    DEFERRED,
)
from .net import (
    Place, Arc, Transition, Net, Marking, ModeOccurrence, enabled_bindings,
    all_enabled, fire, independent, concurrent_step, net_problems,
)
from .runs import (
    CausalRun, Condition, Event, RunResult, record_run, causal_order,
    linearizations, replay,
)
from .statespace import ReachabilityGraph, build_reachability, canonical_form
from .compose import ModuleNet, compose, empty_module, isomorphic
from .dsl import parse, parse_file, print_module, parse_value, parse_marking, DslError

__version__ = "0.1.0"

"""Conjunctive query entailment over SHIQ knowledge bases via completion forests."""
from .engine import Budget, BudgetExceeded, apply_rule, applicable_rule_instances, expand, materialize_model, sat
from .forest import CompletionForest, blocking, dump, init_forest
from .kb import KnowledgeBase, Role, nnf
from .query import EntailmentConfig, Query, blocking_depth, entails, maps_into
from .syntax import ParseError, parse_concept, parse_kb, parse_query

__version__ = "0.1.0"

__all__ = [
    "Budget", "BudgetExceeded", "CompletionForest", "EntailmentConfig", "KnowledgeBase", "ParseError", "Query",
    "Role", "apply_rule", "applicable_rule_instances", "blocking", "blocking_depth", "dump", "entails", "expand",
    "init_forest", "maps_into", "materialize_model", "nnf", "parse_concept", "parse_kb", "parse_query", "sat",
]

"""Finite-interpretation semantics and the brute-force model enumerator used to cross-check the reasoner."""
from .semantics import (
    Interpretation, UnknownName, eval_concept, is_model_forest, is_model_kb, query_matches, satisfies_query,
)

_LAZY = {
    "countermodel_search": "search",
    "concept_equivalence": "search",
    "initial_forest_comparison": "search",
    "preservation": "search",
    "OracleLimit": "compile",
    "BACKEND": "kernels",
}


def __getattr__(name):
    # search pulls in the query layer, which itself depends on this package
    if name in _LAZY:
        from importlib import import_module
        return getattr(import_module(f".{_LAZY[name]}", __name__), name)
    raise AttributeError(name)


__all__ = [
    "Interpretation", "UnknownName", "eval_concept", "is_model_forest", "is_model_kb", "query_matches",
    "satisfies_query", *_LAZY,
]

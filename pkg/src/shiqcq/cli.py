"""Command-line front end.

Every report is line-oriented ``key=value`` text, optionally followed by forest
dumps or a rendered interpretation. Exit codes:

* ``sat``: 0 satisfiable, 1 unsatisfiable, 2 error or budget abort
* ``entail``: 0 entailed, 1 not entailed, 2 error, budget abort, or not entailed
  at a blocking depth below the sufficient bound
* ``countermodel``: 0 found, 1 none up to ``--oracle-domain``, 2 error
* ``dump-forest``: 0 at least one forest printed, 1 none exist, 2 error
* ``validate``: 0 clean, 1 violations, 2 unreadable or malformed input
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Sequence

from .engine import Budget, BudgetExceeded, expand, sat
from .forest import dump
from .kb import KnowledgeBase, validate_kb
from .oracle.compile import OracleLimit
from .oracle.search import countermodel_search
from .query import EntailmentConfig, Query, blocking_depth, entails, query_issues
from .syntax import ParseError, parse_kb, parse_query

EXIT_OK, EXIT_NO, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    command: str
    kb: str
    query: str | None = None
    blocking_depth: int | None = None
    max_forests: int | None = None
    max_nodes: int | None = None
    timeout_ms: int | None = None
    oracle_domain: int = 3
    limit: int = 1
    verbose: bool = False

    @property
    def budget(self) -> Budget:
        return Budget(self.max_forests, self.max_nodes, self.timeout_ms)


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shiqcq", description="SHIQ satisfiability and conjunctive query entailment")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kb", required=True, help="knowledge base file (.shiq)")
    common.add_argument("--query", help="conjunctive query file (.cq)")
    common.add_argument("--blocking-depth", type=_positive, help="override the blocking depth")
    common.add_argument("--max-forests", type=_positive, help="abort after exploring this many forests")
    common.add_argument("--max-nodes", type=_positive, help="abort when a forest grows past this many nodes")
    common.add_argument("--timeout-ms", type=_positive, help="abort after this many milliseconds")
    common.add_argument("--oracle-domain", type=_positive, default=3, help="largest domain for countermodel search")
    common.add_argument("--verbose", action="store_true", help="print search statistics")
    for name, text in (
        ("sat", "decide satisfiability"),
        ("entail", "decide whether the query is entailed"),
        ("countermodel", "search small interpretations for a countermodel"),
        ("dump-forest", "print complete clash-free forests"),
        ("validate", "check the knowledge base for structural problems"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        if name == "dump-forest":
            p.add_argument("--limit", type=_positive, default=1, help="number of forests to print")
    return parser


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load(cfg: CliConfig, validate: bool = True) -> tuple[KnowledgeBase, Query | None]:
    try:
        kb = parse_kb(_read(cfg.kb), validate=validate)
    except ParseError as exc:
        raise UsageError(f"{cfg.kb}:{exc}") from None
    q = None
    if cfg.query is not None:
        try:
            q = parse_query(_read(cfg.query), kb)
        except ParseError as exc:
            raise UsageError(f"{cfg.query}:{exc}") from None
        issues = query_issues(kb, q)
        if issues:
            raise UsageError("; ".join(issues))
    return kb, q


def _need_query(cfg: CliConfig, q: Query | None) -> Query:
    if q is None:
        raise UsageError(f"{cfg.command} needs --query")
    return q


def _budget_abort(exc: BudgetExceeded, out) -> int:
    print(f"reason={exc.reason}", file=out)
    print(exc.stats.report(), file=out)
    return EXIT_ERROR


def _sat(cfg: CliConfig, out) -> int:
    kb, _ = _load(cfg)
    result = sat(kb, cfg.blocking_depth or 1, cfg.budget)
    print(f"satisfiable={str(result.satisfiable).lower()}", file=out)
    if cfg.verbose:
        print(result.stats.report(), file=out)
    return EXIT_OK if result.satisfiable else EXIT_NO


def _entail(cfg: CliConfig, out, err) -> int:
    kb, q = _load(cfg)
    q = _need_query(cfg, q)
    verdict = entails(kb, q, EntailmentConfig(cfg.blocking_depth, cfg.budget))
    if verdict.params.warning:
        print(f"warning: {verdict.params.warning}", file=err)
    print(verdict.line(), file=out)
    print(f"derivation={verdict.params.derivation} bound={verdict.params.bound}", file=out)
    if cfg.verbose:
        print(verdict.stats.report(), file=out)
    if verdict.entailed:
        return EXIT_OK
    print("witness:", file=out)
    out.write(dump(verdict.witness, verdict.params.depth))
    if verdict.countermodel is not None:
        print("countermodel:", file=out)
        out.write(verdict.countermodel.render())
    return EXIT_NO if verdict.params.complete else EXIT_ERROR


def _countermodel(cfg: CliConfig, out) -> int:
    kb, q = _load(cfg)
    q = _need_query(cfg, q)
    found = countermodel_search(kb, q, cfg.oracle_domain)
    if found is None:
        print(f"countermodel=none max_domain={cfg.oracle_domain}", file=out)
        return EXIT_NO
    print(f"countermodel=found domain={len(found.domain)}", file=out)
    out.write(found.render())
    return EXIT_OK


def _dump_forest(cfg: CliConfig, out) -> int:
    kb, q = _load(cfg)
    if cfg.blocking_depth is not None:
        n = cfg.blocking_depth
    elif q is not None:
        n = blocking_depth(kb, q).depth
    else:
        n = 1
    run = expand(kb, n, cfg.budget)
    printed = 0
    for f in run.ccf():
        print(f"forest {printed + 1} blocking={n}", file=out)
        out.write(dump(f, n))
        printed += 1
        if printed >= cfg.limit:
            break
    print(f"forests={printed}", file=out)
    if cfg.verbose:
        print(run.stats.report(), file=out)
    return EXIT_OK if printed else EXIT_NO


def _validate(cfg: CliConfig, out) -> int:
    kb, _ = _load(cfg, validate=False)
    issues = validate_kb(kb)
    for issue in issues:
        print(f"issue {issue}", file=out)
    print(f"valid={str(not issues).lower()}", file=out)
    return EXIT_NO if issues else EXIT_OK


def run(cfg: CliConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        if cfg.command == "sat":
            return _sat(cfg, out)
        if cfg.command == "entail":
            return _entail(cfg, out, err)
        if cfg.command == "countermodel":
            return _countermodel(cfg, out)
        if cfg.command == "dump-forest":
            return _dump_forest(cfg, out)
        if cfg.command == "validate":
            return _validate(cfg, out)
        raise UsageError(f"unknown command {cfg.command}")
    except BudgetExceeded as exc:
        return _budget_abort(exc, out)
    except (UsageError, OracleLimit) as exc:
        print(f"error: {exc}", file=err)
    return EXIT_ERROR


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = CliConfig(
        command=args.command,
        kb=args.kb,
        query=args.query,
        blocking_depth=args.blocking_depth,
        max_forests=args.max_forests,
        max_nodes=args.max_nodes,
        timeout_ms=args.timeout_ms,
        oracle_domain=args.oracle_domain,
        limit=getattr(args, "limit", 1),
        verbose=args.verbose,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

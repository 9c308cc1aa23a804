"""Command-line driver.

Exit codes: 0 on success (including realizer checks that pass or are only
inconclusive), 1 on a negative answer (false, unknown, fails, no witness),
2 on errors such as bad syntax or ill-typed input.

Settings come from flags, falling back to a TOML workspace file given by
``--workspace`` or the ``IRK_WORKSPACE`` environment variable::

    registry = "registry.json"
    state = "state.json"        # or "default"
    gamma = [0, 1]
    bound = 64
    max_iters = 1000
    budget = 1000000
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import state as st
from .domains import stabilize
from .evaluator import BudgetExceeded, EvalBudget, IllTyped, eval_at, normalize
from .extraction import LoopConfig, MaxItersExceeded, extract_witness
from .kernel import NAT, TypeCheckError, contains_skolem, type_to_text, typecheck
from .logic import NotArithmetical, SkolemRegistry, UnregisteredIndex, check_formula
from .realizability import (
    CandidatePool, Fails, MatrixNotDecidable, TypeMismatch, check_at,
)
from .syntax import ParseError, parse_formula, parse_term, print_formula, print_term
from .truth import (
    DEFAULT_BOUND, BoundExhausted, Unknown, ground_truth, truth_with_log,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class UsageError(Exception):
    pass


@dataclass
class Workspace:
    registry_path: Optional[Path] = None
    state: st.State = st.DEFAULT
    gamma: Optional[frozenset] = None
    bound: int = DEFAULT_BOUND
    max_iters: int = 1000
    budget: int = 10**6

    def __post_init__(self):
        self.registry = SkolemRegistry()
        self._loaded = 0
        if self.registry_path is not None and self.registry_path.exists():
            data = json.loads(self.registry_path.read_text())
            self.registry = SkolemRegistry.from_json(data, parse_formula)
            self._loaded = len(self.registry)
        if self.bound < 1:
            raise UsageError("bound must be at least 1")

    @property
    def eval_budget(self) -> EvalBudget:
        return EvalBudget(self.budget)

    def save_registry(self):
        """Persist formulas registered while running, so state indices keep their meaning."""
        if self.registry_path is not None and len(self.registry) != self._loaded:
            self.registry_path.write_text(
                json.dumps(self.registry.to_json(print_formula), indent=2) + "\n")


def read_state(spec: str) -> st.State:
    if spec == "default":
        return st.DEFAULT
    path = Path(spec)
    text = path.read_text() if path.exists() else spec
    try:
        return st.from_json(json.loads(text))
    except (json.JSONDecodeError, AttributeError, TypeError) as err:
        raise UsageError(f"cannot read state {spec!r}: {err}") from None


def read_arg(text: str) -> str:
    """Arguments starting with ``@`` name a file holding the actual text."""
    if text.startswith("@"):
        return Path(text[1:]).read_text()
    return text


def parse_gamma(text) -> Optional[frozenset]:
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return frozenset(int(x) for x in text)
    return frozenset(int(x) for x in str(text).split(",") if x.strip())


def load_workspace(args) -> Workspace:
    path = args.workspace or os.environ.get("IRK_WORKSPACE")
    conf = {}
    base = Path(".")
    if path:
        p = Path(path)
        conf = tomllib.loads(p.read_text())
        base = p.parent

    def pick(flag, key, default):
        value = getattr(args, flag, None)
        if value is not None:
            return value
        return conf.get(key, default)

    registry = pick("registry", "registry", None)
    if registry is not None and getattr(args, "registry", None) is None:
        registry = base / registry
    state_spec = pick("state", "state", "default")
    if state_spec != "default" and getattr(args, "state", None) is None:
        candidate = base / state_spec
        state_spec = str(candidate) if candidate.exists() else state_spec
    return Workspace(
        registry_path=Path(registry) if registry is not None else None,
        state=read_state(state_spec),
        gamma=parse_gamma(pick("gamma", "gamma", None)),
        bound=int(pick("bound", "bound", DEFAULT_BOUND)),
        max_iters=int(pick("max_iters", "max_iters", 1000)),
        budget=int(pick("budget", "budget", 10**6)),
    )


# ----------------------------------------------------------------------------
# Subcommands


def cmd_typecheck(args, ws, out) -> int:
    t = parse_term(Path(args.file).read_text())
    print(type_to_text(typecheck(t)), file=out)
    return 0


def cmd_normalize(args, ws, out) -> int:
    t = parse_term(Path(args.file).read_text())
    if contains_skolem(t):
        nf, log = eval_at(t, ws.state, ws.eval_budget)
    else:
        nf, log = normalize(t, ws.eval_budget), []
    print(print_term(nf), file=out)
    if args.log:
        print(json.dumps([q.as_list() for q in log]), file=out)
    return 0


def _formula_args(f, raw):
    if not raw:
        return {}
    if all("=" in a for a in raw):
        return {k: int(v) for k, v in (a.split("=", 1) for a in raw)}
    return [int(a) for a in raw]


def cmd_truth(args, ws, out) -> int:
    f = parse_formula(read_arg(args.formula))
    values = _formula_args(f, args.args)
    if args.ground:
        verdict = ground_truth(f, values, ws.bound)
        text = f"unknown({verdict.bound})" if isinstance(verdict, Unknown) else str(verdict).lower()
        print(text, file=out)
        return 0 if verdict is True else 1
    value, log = truth_with_log(f, values, ws.state, ws.registry, budget=ws.eval_budget)
    ws.save_registry()
    print("true" if value else "false", file=out)
    if args.explain:
        points = []
        for q in log:
            e = ws.registry.entry(q.index)
            points.append({"index": q.index, "arg": q.arg, "answer": q.answer,
                           "formula": print_formula(e.formula),
                           "params": list(e.params), "witness": e.witness})
        print(json.dumps(points), file=out)
    return 0 if value else 1


def cmd_check_realizer(args, ws, out) -> int:
    t = parse_term(read_arg(args.term))
    f = parse_formula(read_arg(args.formula))
    pool = CandidatePool.for_formula(f)
    verdict = check_at(t, f, ws.state, ws.registry, pool, ws.gamma, ws.eval_budget)
    ws.save_registry()
    print(json.dumps(verdict.to_json()), file=out)
    return 1 if isinstance(verdict, Fails) else 0


def cmd_extract(args, ws, out) -> int:
    t = parse_term(read_arg(args.term))
    f = parse_formula(read_arg(args.formula))
    cfg = LoopConfig(ws.max_iters, ws.bound, ws.gamma, ws.eval_budget)
    try:
        witness, _, trace = extract_witness(t, f, ws.state, ws.registry, cfg)
    except MaxItersExceeded as err:
        if args.trace and err.trace is not None:
            err.trace.dump(args.trace, args.timing)
        print(f"no witness: {err}", file=out)
        return 1
    finally:
        ws.save_registry()
    if args.trace:
        trace.dump(args.trace, args.timing)
    print(witness, file=out)
    return 0


def cmd_stabilize(args, ws, out) -> int:
    t = parse_term(read_arg(args.term))
    res = stabilize(t, ws.state, ws.registry, ws.gamma, ws.bound, ws.max_iters, ws.eval_budget)
    print(json.dumps({"value": print_term(res.value), "iterations": res.iterations,
                      "state": st.to_json(res.state)}), file=out)
    return 0


def cmd_register(args, ws, out) -> int:
    f = parse_formula(read_arg(args.formula))
    params = [p for p in (args.params or "").split(",") if p]
    check_formula(f, {v: NAT for v in params + [args.witness]})
    i = ws.registry.register(f, params, args.witness)
    if ws.registry_path is None:
        raise UsageError("register needs --registry (or a workspace registry)")
    ws.save_registry()
    print(i, file=out)
    return 0


# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workspace", help="TOML workspace file")
    common.add_argument("--registry", help="Skolem registry (JSON)")
    common.add_argument("--state", help="state: 'default', a JSON file or inline JSON")
    common.add_argument("--gamma", help="comma-separated Skolem indices tracked")
    common.add_argument("--bound", type=int, help="search bound for ground truth")
    common.add_argument("--max-iters", dest="max_iters", type=int)
    common.add_argument("--budget", type=int, help="evaluation step budget")

    parser = argparse.ArgumentParser(prog="irk", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("typecheck", parents=[common], help="print the type of a term file")
    p.add_argument("file")
    p.set_defaults(run=cmd_typecheck)

    p = sub.add_parser("normalize", parents=[common], help="normal form of a term file")
    p.add_argument("file")
    p.add_argument("--log", action="store_true", help="also print consulted oracle points")
    p.set_defaults(run=cmd_normalize)

    p = sub.add_parser("truth", parents=[common], help="truth of a formula at a state")
    p.add_argument("formula")
    p.add_argument("--args", nargs="*", help="values, positional or name=value")
    p.add_argument("--explain", action="store_true", help="list the oracle points consulted")
    p.add_argument("--ground", action="store_true", help="bounded ground truth instead")
    p.set_defaults(run=cmd_truth)

    p = sub.add_parser("check-realizer", parents=[common], help="check t realizes F at a state")
    p.add_argument("term")
    p.add_argument("formula")
    p.set_defaults(run=cmd_check_realizer)

    p = sub.add_parser("extract", parents=[common], help="extract a witness of ex y. P")
    p.add_argument("term")
    p.add_argument("formula")
    p.add_argument("--trace", help="write the JSON-lines trace here")
    p.add_argument("--timing", action="store_true", help="include wall_ms in the trace")
    p.set_defaults(run=cmd_extract)

    p = sub.add_parser("stabilize", parents=[common], help="stabilize a term's oracle points")
    p.add_argument("term")
    p.set_defaults(run=cmd_stabilize)

    p = sub.add_parser("register", parents=[common], help="add a formula to the registry")
    p.add_argument("formula")
    p.add_argument("--params", default="", help="comma-separated parameter names")
    p.add_argument("--witness", default="y")
    p.set_defaults(run=cmd_register)
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ws = load_workspace(args)
        return args.run(args, ws, out)
    except ParseError as e:
        print(f"parse error at line {e.line}, column {e.column}: {e.message}", file=err)
    except TypeCheckError as e:
        print(f"type error: {e}", file=err)
    except (TypeMismatch, IllTyped, NotArithmetical, MatrixNotDecidable) as e:
        print(f"error: {e}", file=err)
    except BoundExhausted as e:
        print(f"undecided: {e}", file=err)
        return 1
    except BudgetExceeded as e:
        print(f"error: {e}", file=err)
    except MaxItersExceeded as e:
        print(f"no result: {e}", file=err)
        return 1
    except (UsageError, UnregisteredIndex, OSError, ValueError) as e:
        print(f"error: {e}", file=err)
    return 2


def main():
    sys.exit(run())

"""Independent reference answers computed with plain Python arithmetic.

Nothing here goes through the evaluator: atoms are interpreted directly on
the term tree, quantifiers by nested loops.
"""

from irk.kernel import Const, Def, Num, Var, spine
from irk.logic import And, Atomic, Exists, Implies, Minus, Or, inv_negate

PY_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: max(a - b, 0),
    "mul": lambda a, b: a * b,
    "eq": lambda a, b: a == b,
    "lt": lambda a, b: a < b,
    "leq": lambda a, b: a <= b,
    "and": lambda a, b: a and b,
    "or": lambda a, b: a or b,
    "imp": lambda a, b: (not a) or b,
    "not": lambda a: not a,
    "pred": lambda a: max(a - 1, 0),
    "iszero": lambda a: a == 0,
    "tri": lambda a: a * (a + 1) // 2,
    "cpair": lambda a, b: (a + b) * (a + b + 1) // 2 + b,
}


def py_value(t, env):
    """Value of a first-order arithmetic term under ``env`` (names to ints)."""
    if isinstance(t, Num):
        return t.value
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        if t.tag == "true":
            return True
        if t.tag == "false":
            return False
        raise ValueError(f"oracle cannot read constant {t.tag}")
    head, args = spine(t)
    if isinstance(head, Def):
        return PY_OPS[head.name](*(py_value(a, env) for a in args))
    if isinstance(head, Const) and head.tag == "S":
        return py_value(args[0], env) + 1
    if isinstance(head, Const) and head.tag == "if":
        c, a, b = args
        return py_value(a, env) if py_value(c, env) else py_value(b, env)
    raise ValueError(f"oracle cannot read {t!r}")


def py_truth(f, env, bound):
    """Truth with every quantifier ranging over 0..bound (no Unknown)."""
    if isinstance(f, Atomic):
        return bool(py_value(f.term, env))
    if isinstance(f, And):
        return py_truth(f.left, env, bound) and py_truth(f.right, env, bound)
    if isinstance(f, Or):
        return py_truth(f.left, env, bound) or py_truth(f.right, env, bound)
    if isinstance(f, Implies):
        return (not py_truth(f.left, env, bound)) or py_truth(f.right, env, bound)
    if isinstance(f, Minus):
        return py_truth(f.left, env, bound) and py_truth(inv_negate(f.right), env, bound)
    vals = (py_truth(f.body, {**env, f.var: n}, bound) for n in range(bound + 1))
    return any(vals) if isinstance(f, Exists) else all(vals)


def least_witness(pred, limit):
    for n in range(limit + 1):
        if pred(n):
            return n
    return None


def cantor(a, b):
    return (a + b) * (a + b + 1) // 2 + b


"""Build, typecheck and normalize a few System T terms.

Run with ``python demos/01_terms.py``.
"""
from irk.evaluator import eval_at, normalize, normalize_by_steps
from irk.kernel import type_to_text, typecheck
from irk.state import DEFAULT, State
from irk.syntax import parse_term, print_term

# Primitive recursion: the sum 0 + 1 + ... + 9.
total = parse_term("rec[Nat] 0 (\\k:Nat. \\r:Nat. r + S k) 10")
print(print_term(total), ":", type_to_text(typecheck(total)))
print("normal form:", print_term(normalize(total)))

# The small-step reducer reaches the same numeral, one redex at a time.
steps = []
nf = normalize_by_steps(parse_term("(\\f:Nat -> Nat. f (f 1)) (\\x:Nat. x * 3)"),
                        on_step=steps.append)
print("by steps:", print_term(nf), "after", len(steps), "steps")

# Updates are finite tables of triples; cup keeps the left side on conflicts.
u = parse_term("cup upd{(0,1,2)} (cup (mkupd 0 1 3) (mkupd 4 4 4))")
print(print_term(u), "=>", print_term(normalize(u)))
print("min index:", print_term(normalize(parse_term("min upd{(2,0,1);(5,3,3)}"))))

# Oracle constants are read through a state; the log lists every point asked.
t = parse_term("phi{0} 5 + phi{1} (phi{0} 5)")
s = State({(0, 5): 2, (1, 2): 40})
value, log = eval_at(t, s)
print(print_term(t), "at", s, "=", print_term(value))
for q in log:
    print("  asked phi{%d} at %d, got %d" % (q.index, q.arg, q.answer))
print("at the default state:", print_term(eval_at(t, DEFAULT)[0]))

"""Checking interactive realizers, including the canonical ones for EM and SK."""
from irk.evaluator import eval_at
from irk.kernel import App, Num
from irk.logic import BOTTOM, SkolemRegistry
from irk.realizability import (
    CandidatePool, check_at, em1_realizer, em1_target, sk_realizer, sk_target,
)
from irk.state import DEFAULT, State
from irk.syntax import parse_formula, parse_term, print_term

reg = SkolemRegistry()
F = parse_formula("ex y:Nat. 2*y = 6")
for text in ("<3, upd{}>", "<2, upd{}>"):
    print(f"{text} realizes ex y. 2*y = 6:", check_at(parse_term(text), F, DEFAULT, reg).to_json())

# A realizer of falsity is allowed at a state as long as it teaches the
# state something true: here, that 7 is a witness for y = 7.
i = reg.register(parse_formula("y = 7"), [], "y")
learner = parse_term(f"upd{{({i},0,7)}}")
print("\nlearning update at default:", check_at(learner, BOTTOM, DEFAULT, reg).to_json())
print("same update once learned: ", check_at(learner, BOTTOM, State({(i, 0): 7}), reg).to_json())

# Excluded middle for ex y. 2*y = x, realized with the oracle for that formula.
j = reg.register(parse_formula("2*y = x"), ["x"], "y")
em = em1_realizer(j, reg)
for s in (State({(j, 6): 3}), DEFAULT):
    nf, _ = eval_at(App(em, Num(6)), s)
    side = "left (witness %s)" % print_term(nf.right.left.left) if nf.left.tag == "true" else "right"
    print(f"\nEM at x=6 in {s}: {side}")
    if side == "right":
        refute = nf.right.right
        print("  the 'no witness' branch, fed y=3, emits",
              print_term(eval_at(App(refute, Num(3)), s)[0]))

# Universals and implications are only sampled, so the best verdict is inconclusive.
pool = CandidatePool(nats=tuple(range(8)))
print("\nSK realizer:", check_at(sk_realizer(j, reg), sk_target(j, reg), DEFAULT, reg, pool).to_json())
print("EM realizer:", check_at(em, em1_target(j, reg), DEFAULT, reg, pool).to_json())

"""Truth of arithmetical formulas at a state, and how to make it exact."""
from irk.logic import SkolemRegistry
from irk.state import DEFAULT
from irk.syntax import parse_formula, print_term
from irk.truth import compile_truth, ground_truth, saturate_truth_state, truth_at, truth_with_log
from irk.domains import check_geq

reg = SkolemRegistry()
f = parse_formula("ex y:Nat. y * y = x")

# Quantifiers become oracle calls: ex y. A turns into A[phi<x>/y].
print("compiled:", print_term(compile_truth(f, reg)))

for n in (9, 10):
    print(f"x={n}: ground truth {ground_truth(f, [n])}, "
          f"truth at the default state {truth_at(f, [n], DEFAULT, reg)}")

# The default oracle answers 0, so the square root of 9 is missed.  Saturation
# writes the least witness into the state, after which both views agree.
s = saturate_truth_state(f, [9], DEFAULT, reg)
value, log = truth_with_log(f, [9], s, reg)
print("after saturation:", value, "oracle points", [q.as_list() for q in log])
print("new state extends the old one:", check_geq(s, DEFAULT, reg))

# Universal statements ask the oracle of the negated body for a counterexample.
g = parse_formula("all x:Nat. x < 10 -> (ex y:Nat. 2*y = 2*x)")
s = saturate_truth_state(g, [], DEFAULT, reg)
print(f"\n{'all x<10 has a half of 2x':30s} ground={ground_truth(g)} at s'={truth_at(g, [], s, reg)}")
h = parse_formula("all x:Nat. x * x < 50")
s = saturate_truth_state(h, [], DEFAULT, reg)
print(f"{'all x. x*x < 50':30s} ground={ground_truth(h)} at s'={truth_at(h, [], s, reg)}")
print("counterexample stored:", sorted(s.points()))

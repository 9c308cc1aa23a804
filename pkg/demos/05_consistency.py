"""No term realizes falsity everywhere: search for a state that refutes it."""
from irk.domains import check_geq
from irk.evaluator import eval_at
from irk.extraction import refute_bottom
from irk.kernel import App, Num, Proj
from irk.logic import BOTTOM, SkolemRegistry
from irk.realizability import check_at, em1_realizer
from irk.state import DEFAULT, State
from irk.syntax import parse_formula, parse_term, print_term

reg = SkolemRegistry()
seven = reg.register(parse_formula("y = 7"), [], "y")
half = reg.register(parse_formula("2*y = x"), ["x"], "y")
square = reg.register(parse_formula("y*y = x"), ["x"], "y")

# The refutation branch of EM, fed a number, claims to have learned a witness.
em_at_6 = App(em1_realizer(half, reg), Num(6))
candidates = {
    "EM branch, 2*3=6": App(Proj(1, Proj(1, em_at_6)), Num(3)),
    "bogus half of 7": parse_term(f"upd{{({half},7,3)}}"),
    "learn 7": parse_term(f"upd{{({seven},0,7)}}"),
    "oracle-driven": parse_term(f"mkupd {square} 16 (phi{{{half}}} 8)"),
    "empty": parse_term("upd{}"),
}

for name, t in candidates.items():
    print(f"{name}: {print_term(eval_at(t, DEFAULT)[0])} at the default state")
    print("  verdict there:", check_at(t, BOTTOM, DEFAULT, reg).to_json()["verdict"])
    s, trace = refute_bottom(t, DEFAULT, reg)
    print("  refuted at", s, "after", trace.result["iterations"], "round(s)")
    print("  steps:", [r["verdict"] for r in trace.records])
    assert check_geq(s, DEFAULT, reg)

# Starting higher in the order works the same way.
s0 = State({(half, 8): 4})
s, _ = refute_bottom(candidates["oracle-driven"], s0, reg)
print("\nfrom", s0, "the oracle-driven claim is refuted at", s)

"""Extracting a witness by learning: the realizer guesses, is corrected, retries."""
from irk.extraction import extract_witness
from irk.logic import SkolemRegistry
from irk.realizability import bounded_search, em_exists_realizer
from irk.state import DEFAULT
from irk.syntax import parse_formula, parse_term

problems = [
    "ex y:Nat. y*y + 2*y = 120",
    "ex y:Nat. 3*y = 2*y + 17",
    "ex y:Nat. 5 <= y && y*y = 3*y + 40",
]

for text in problems:
    reg = SkolemRegistry()
    f = parse_formula(text)
    i = reg.register(f.body, [], "y")
    # Ask the oracle first; if its answer is wrong, fall back on a bounded
    # search and teach the oracle what was found.
    t = em_exists_realizer(i, reg, bounded_search(f.body.term, "y", 32))
    n, s, trace = extract_witness(t, f, DEFAULT, reg)
    print(f"{text:40s} witness {n:3d} after {trace.result['iterations']} rounds")
    for rec in trace.records:
        print(f"    round {rec['iter']}: candidate {rec['candidate']}, "
              f"update {rec['update']}, {rec['verdict']}")

# A realizer that never emits updates still gets there: when its candidate
# fails, the loop stabilizes the oracle points it consulted.
reg = SkolemRegistry()
f = parse_formula("ex y:Nat. y*y = 49")
i = reg.register(f.body, [], "y")
n, _, trace = extract_witness(parse_term(f"<phi{{{i}}} 0, upd{{}}>"), f, DEFAULT, reg)
print("\noracle-only realizer:", n, [r["verdict"] for r in trace.records])
print(trace.to_jsonl(), end="")

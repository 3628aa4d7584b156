"""
Minimal matchings, matches and compartments
===========================================

The canonical matching takes, left to right, the smallest feasible
position in the second word and then in the first. It is always one of
the coordinatewise-minimal optimal pairs, but not always the one with the
fewest non-empty matches.
"""
from lcsvar import (
    ExperimentConfig,
    ModelParams,
    count_nonempty_matches,
    decompose_compartments,
    enumerate_matches,
    estimate_nonempty_matches,
    extract_minimal_matching,
    minimal_matchings,
)

a, b = [0, 1], [1, 0, 1]
pair = extract_minimal_matching(a, b)
print("canonical:", pair, " M_min:", minimal_matchings(a, b))

a, b = [0, 0, 1, 1], [0, 1, 1, 0, 0, 1]
pair = extract_minimal_matching(a, b)
for match in enumerate_matches(pair):
    print(match, "non-empty" if match.non_empty else "empty", list(match.unmatched))
print("non-empty matches:", count_nonempty_matches(pair))
print("all minimal pairs:", [(q.eta, count_nonempty_matches(q)) for q in minimal_matchings(a, b)])

y = [0, 1, 1, 0, 0, 0, 1, 0]
print("\ncompartments of", y, decompose_compartments(y, 2).intervals())
print("literal recursion    ", decompose_compartments(y, 2, rule="literal").intervals())

params = ModelParams(2, 0.5)
for k in (3, 6, 12):
    s = estimate_nonempty_matches(ExperimentConfig(params, 12, 200, 3), k=k, exhaustive=True)
    print(f"n=12, k={k:2d}: canonical equals the M_min minimum in "
          f"{s.extras['fraction_canonical_equals_min']:.0%} of replicates")

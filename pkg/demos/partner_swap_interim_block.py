"""Why no mechanism is interim stable on the 3x3 market.

Either the mechanism leaves some pair of mutual favourites apart (and that
pair walks away), or it is pinned down on every relabelling of one profile,
where swapping the first two men's partners helps every agent of every type.
Takes about a minute: it runs the LP over the 36 relabelled profiles.
"""

from matchaudit import random_stable_mechanism, uniform_random_full
from matchaudit.market import Market
from matchaudit.stability import interim_instability_witness

pair = interim_instability_witness(uniform_random_full(Market(3, 3)), run_search=False)
print("uniform perfect matching:", pair.kind, "at\n", pair.profile)
for a, c in sorted(pair.block.per_agent.items()):
    print(f"  {a}: {c.before} -> {c.after}")

grand = interim_instability_witness(random_stable_mechanism())
print("\nrandom stable matching:", grand.kind)
for c in grand.interim.per_type[:6]:
    print(f"  {c.agent} type {c.ranking}: {c.before} -> {c.after}")
print("  ...")
print("LP search over the relabellings, margin", grand.search.witness.epsilon)

"""The core pipeline: shrink an instance to a sketch, then run greedy on it.

A sketch keeps a random subset of elements (chosen by a seeded hash) and at
most a capped number of edges per kept element.  Solving k-cover on the
sketch gives nearly the same quality as solving on the full instance while
touching a fraction of the data.
"""

from coversketch import (
    HashSource,
    build_sketch,
    build_sketch_lazy,
    coverage,
    generate_planted,
    greedy_kcover,
    practical_params,
    theory_params,
)

inst, planted = generate_planted(k=100, m=10_000, k_prime=10_000, eps=0.2,
                                 seed=0)
print("instance:", inst)

k = 100
full = greedy_kcover(inst, k)
print("greedy on the full instance:", full.coverage_value)

# Practical mode: keep each element with probability rho, cap degrees at
# sigma.  The sketch below holds about 8% of the edges.
for rho, sigma in [(0.2, 100), (0.95, 10)]:
    sk = build_sketch(inst, practical_params(rho, sigma), HashSource(1))
    sol = greedy_kcover(sk, k)
    true_value = coverage(inst, sol.chosen)
    print(f"rho={rho} sigma={sigma}: "
          f"ratio={sk.instance.edge_count / inst.edge_count:.3f} "
          f"quality={true_value / full.coverage_value:.3f}")

# Theory mode derives the target edge mass and degree cap from (k, eps).
params = theory_params(inst.n, inst.m, inst.edge_count, k=k, eps=0.9)
print("\ntheory params: n_tilde =", params.n_tilde,
      "degree cap =", params.degree_cap)
sk = build_sketch(inst, params, HashSource(2))
sol = greedy_kcover(sk, k)
print("theory sketch quality:",
      coverage(inst, sol.chosen) / full.coverage_value)

# The lazy constructor builds the same kind of sketch from random access
# oracles, touching only the selected elements' lists.
lazy = build_sketch_lazy(
    inst.m,
    degree_oracle=lambda v: int(inst.elem_degrees[v]),
    edge_oracle=lambda v, i: int(inst.element_sets(v)[i]),
    params=params,
    source=HashSource(3),
    set_count=inst.n)
print("\nlazy construction touched", lazy.oracle_lookups,
      "oracle entries of", inst.edge_count + inst.m, "available")
print("lazy sketch holds", lazy.instance.edge_count, "edges")

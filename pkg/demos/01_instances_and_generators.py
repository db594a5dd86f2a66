"""Build coverage instances: from text, from graphs, and from generators.

A coverage instance is a bipartite graph between sets and elements.  The
edge-list text format is one `<set-id> <element-id>` pair per line.
"""

import numpy as np

from coversketch import (
    coverage,
    feature_pairs_instance,
    generate_adversarial,
    generate_planted,
    khop_dominating_instance,
    loads_edge_list,
    serialize_edge_list,
    stats,
)

# Load a tiny instance from text.  Ids are dense and 0-based.
inst = loads_edge_list("""
0 0
0 1
0 2
1 2
1 3
2 3
2 4
""")
print("loaded:", inst)
print("stats:", stats(inst).to_json_line())
print("union of sets {0, 2}:", coverage(inst, [0, 2]))

# Round-trips are exact: the serializer emits canonical set-major order.
print("\nserialized form:\n" + serialize_edge_list(inst))

# Dominating set as coverage: vertices are both sets and elements, and a set
# covers everything within `hops` edges of its vertex.
path = [[1], [0, 2], [1, 3], [2, 4], [3]]
dom = khop_dominating_instance(path, hops=2)
print("2-hop dominating view of a 5-path:", dom)
print("vertex 2 dominates:", dom.set_elements(2).tolist())

# Planted benchmark: a hidden partition of the ground set plus oversized
# random decoys.  The planted ids are the known optimum.
inst, planted = generate_planted(k=10, m=1000, k_prime=200, eps=0.2, seed=7)
print("\nplanted instance:", inst)
print("planted optimum covers everything:", coverage(inst, planted) == 1000)

# Adversarial instance: every set covers all "normal" elements, and each of
# the last k sets additionally owns a private block of bonus elements.
adv = generate_adversarial(n=50, k=5, beta=2.0, seed=0)
bonus_sets = list(range(45, 50))
print("\nadversarial instance:", adv)
print("bonus sets cover:", coverage(adv, bonus_sets), "of", adv.m)

# Feature selection as coverage: columns are sets, covered row pairs are
# elements (labels hold the encoded pair r1 * R + r2).
matrix = (np.random.default_rng(1).random((8, 4)) < 0.5).astype(int)
fp = feature_pairs_instance(matrix)
print("\nfeature-pairs instance from an 8x4 binary matrix:", fp)
print("pair codes:", fp.element_labels)

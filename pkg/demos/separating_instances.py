"""
Small instances on which individual and group fairness come apart, decided by
exhaustive enumeration of all n**m allocations.
"""

from groupfair.fixtures import build_all, certify
from groupfair.oracle import Query, enumerate_allocations

fx = build_all()  # large good worth 100

# Goods (100, 1, 1, 1), two groups of two: no allocation is both EF1 and WEFX.
res = enumerate_allocations(fx["prop2"], Query({"EF1", "WEFX"}))
print("EF1 and WEFX:", res.verdict, "after", res.allocations_examined, "allocations")

# Goods (100, 100, 1, 1): some EFX allocation fails WEF1. `forbidden` asks
# for allocations that fail a notion.
inst, _ = fx["prop3a"]
res = enumerate_allocations(inst, Query({"EFX"}, {"WEF1"}))
print("EFX but not WEF1:", res.witness.bundles)

res = enumerate_allocations(inst, Query({"EFX", "WEF1"}, mode="count"))
print("EFX and WEF1 allocations:", res.count, "of", res.allocations_examined)

# The separations depend on how large the big good is. At 2 the strict
# inequalities collapse and four of the ten certifications fail.
for c in (2, 10, 10 ** 6):
    results = certify(build_all(c))
    print(f"c={c}: {sum(r.ok for r in results)}/{len(results)} certified")
    for r in results:
        if not r.ok:
            print("   ", r.line())

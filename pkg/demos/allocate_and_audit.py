"""
Run the four allocation procedures on one small all-common instance and audit
each result.

Two groups: {p1, p2} and {p3, p4, p5}. Seven goods with a shared valuation.
"""

from groupfair import (
    Instance,
    audit,
    check_wefx,
    run_iwrr,
    run_sm,
    run_sm_iwrr,
    run_weighted_greedy,
)

inst = Instance([[12, 9, 9, 5, 3, 2, 1]] * 5, [[0, 1], [2, 3, 4]], "all-common")

for name, run in (("SM", run_sm), ("IWRR", run_iwrr), ("SM-IWRR", run_sm_iwrr)):
    alloc, trace = run(inst)
    report = audit(inst, alloc)
    held = {inst.agents[i]: [inst.goods[g] for g in b] for i, b in enumerate(alloc.bundles)}
    print(f"{name:8} {held}")
    print(f"{'':8} EF1={report.ef1.passed} EFX={report.efx.passed} "
          f"WEF1={report.wef1.passed} WEFX={report.wefx.passed}")

# SM ignores groups entirely, so its EFX output can still be unfair between
# groups. SM-IWRR keeps SM's bundles but hands them out group-aware.

galloc, trace = run_weighted_greedy(inst)
print("weighted greedy group bundles:",
      [[inst.goods[g] for g in b] for b in galloc.group_bundles],
      "WEFX:", check_wefx(inst, galloc).passed)

# Every procedure logs its picks; traces are plain JSON lines.
_, trace = run_iwrr(inst)
print(trace.to_jsonl().splitlines()[0])

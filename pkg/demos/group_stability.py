"""
Could an agent have done better by declaring a different group?

Each single-agent move (to a fresh singleton group or to another existing
group) is re-run through the mechanism. The agent passes if what it got is
worth at least the alternative minus that alternative's best good.
"""

from groupfair import Instance
from groupfair.stability import check_group_epsilon_stability

# Four singleton groups; p4 picks last in every round.
inst = Instance([[5, 4, 4, 6, 7], [9, 10, 3, 3, 7], [1, 10, 5, 3, 8], [1, 10, 5, 4, 9]],
                [[0], [1], [2], [3]])

verdict = check_group_epsilon_stability(inst, "iwrr")
print("IWRR stable:", verdict.passed, "over", len(verdict.ledger), "deviations")
for entry in verdict.violations():
    print("  ", entry.to_json(inst))

# Joining p1's group puts p4 in the first group of the tie order. It then
# takes g2 (10) first and g3 (5) later, against g4 (4) when staying put:
# 15 - 10 = 5 > 4.

# SM-IWRR is immune: a deviation only changes which SM bundle an agent gets,
# and SM bundles are EFX with respect to each other.
common = Instance([[9, 7, 6, 4, 3, 2]] * 4, [[0], [1], [2], [3]], "all-common")
print("SM-IWRR stable:", check_group_epsilon_stability(common, "sm_iwrr").passed)

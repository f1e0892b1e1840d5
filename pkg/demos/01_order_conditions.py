# Order conditions of the two published LIRK-W tableaux.
#
# Each LW-tree gives one condition: the elementary weight sum must equal
# 1/density for plain (meagre) trees and 0 for trees with fat or square vertices.
import numpy as np

from lirkw.tableau import table1_type1, table2_type2
from lirkw.trees import enumerate_trees, max_residual, to_bracket, verify_order

t1 = table1_type1()
print(f"{t1.name}: s={t1.s}, c = {np.round(t1.c, 4)}")
rows = verify_order(t1, mtype=1, p=3)
for r in rows:
    print(f"  {r.label:>4}  {to_bracket(r.tree):<18} target {str(r.target):>4}  residual {r.residual: .1e}")
print(f"max |residual| over {len(rows)} conditions: {max_residual(rows):.2e}")

# The type-2 family is parametrized by three free coefficients.
for params in [(0.25, -0.5, 0.3), (0.4, 0.1, 0.2)]:
    t2 = table2_type2(*params)
    rows = verify_order(t2, mtype=2, p=3)
    print(f"{t2.name}: {len(rows)} conditions, max |residual| {max_residual(rows):.2e}")

# table1 was built for type 1; under the type-2 interpretation one condition breaks.
bad = [r for r in verify_order(t1, mtype=2) if not r.passed()]
print("table1 read as type 2 fails:", [(r.label, round(r.residual, 4)) for r in bad])

# Tree counts per family up to order 3 and 4
for fam in ("T", "LW1", "LW2"):
    print(fam, [len(enumerate_trees(fam, p)) for p in (1, 2, 3, 4)])

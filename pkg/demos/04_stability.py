# Linear stability along the negative real axis.
#
# For y' = lambda y split as L y + (J - L) y the method gives y1 = R y0.
from lirkw.stability import log_grid, stability_scan, transfer_scalar
from lirkw.tableau import table1_type1, table2_type2

t1, t2 = table1_type1(), table2_type2(0.25, -0.5, 0.3)
grid = log_grid(0, 8, 1)

for label, tb, mtype in (("table1 type 1", t1, 1), ("table2 type 2", t2, 2)):
    for cfg in ("exact", "explicit"):
        rows = stability_scan(tb, mtype, grid, cfg)
        print(f"{label}, {cfg:<8}: " + " ".join(f"{r:.1e}" for _, r in rows))

# The first stage of table1 is explicit, so damping at infinity is incomplete.
print("table1 |R(-1e8)| =", abs(transfer_scalar(t1, 1, -1e8)))
print("table2 |R(-1e8)| =", abs(transfer_scalar(t2, 2, -1e8)))

# Stage operators growing faster than J: h L_i = (h lambda)^2, h L = h J = h lambda.
for z in (-1e2, -1e4, -1e6):
    print(f"fast stage operators, z={z:.0e}: |R| = {abs(transfer_scalar(t2, 2, z, 'fast')):.3e}")
# With h J held fixed and the stage operators growing, R tends to 1 + h J instead.

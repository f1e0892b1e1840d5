# Third-order convergence for arbitrary linear operators (the W-property).
#
# The same ODE is integrated with different choices of L: the exact Jacobian,
# the two-part AMF split, a random perturbation, and L = 0 (explicit limit).
from lirkw.convergence import fit_order, run_sweep
from lirkw.problems import make_adr2d, make_nonlinear_small
from lirkw.tableau import table1_type1, table2_type2

n_list = [16, 32, 64, 128, 256, 512]
t1, t2 = table1_type1(), table2_type2(0.25, -0.5, 0.3)

for tb, mtype in ((t1, 1), (t2, 2)):
    for cfg in ("exact-L", "amf-2part", "arbitrary-L"):
        p = make_adr2d(24, 24, l_config=cfg)
        rows = run_sweep(p, tb, n_list, mtype=mtype)
        print(f"type {mtype} adr2d {cfg:<12} errors "
              + " ".join(f"{r.error:.1e}" for r in rows)
              + f"  order {fit_order(rows):.2f}")

for name in ("brusselator", "vdpol-mild"):
    for cfg in ("exact-L", "arbitrary-L", "zero-L"):
        p = make_nonlinear_small(name, l_config=cfg)
        rows = run_sweep(p, t1, n_list, mtype=1)
        print(f"type 1 {name:<11} {cfg:<12} order {fit_order(rows):.2f}")

# Perturbing one coefficient of the linear coupling destroys the order.
g = t1.gamma.copy()
g[4, 1] += 0.1
p = make_nonlinear_small("brusselator", l_config="arbitrary-L")
rows = run_sweep(p, t1.replace(gamma=g), n_list, mtype=1)
print(f"gamma_52 + 0.1: order {fit_order(rows):.2f}")

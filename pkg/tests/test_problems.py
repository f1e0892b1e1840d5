import numpy as np
import pytest
import scipy.integrate

from lirkw.errors import UnknownProblem
from lirkw.integrators import integrate
from lirkw.problems import (ProblemSpec, build_problem, make_adr2d, make_linear_split,
                            make_nonlinear_small)
from lirkw.tableau import table1_type1

CONFIGS = ["exact-L", "arbitrary-L", "zero-L", "perturbed-L"]


@pytest.mark.parametrize("name", ["brusselator", "vdpol-mild"])
def test_equilibrium_is_constant(name):
    p = make_nonlinear_small(name, y0="equilibrium")
    np.testing.assert_allclose(p.rhs(p.y0), 0.0, atol=1e-15)
    y = integrate(p, table1_type1(), n_steps=20).y
    np.testing.assert_allclose(y, p.y0, atol=1e-14)


@pytest.mark.parametrize("name", ["brusselator", "vdpol-mild"])
def test_analytic_jacobian(name):
    p = make_nonlinear_small(name)
    y = p.y0 + 0.1
    eps = 1e-7
    fd = np.column_stack([(p.rhs(y + eps * e) - p.rhs(y - eps * e)) / (2 * eps) for e in np.eye(2)])
    np.testing.assert_allclose(p.jacobian(y), fd, atol=1e-7)


def test_adr2d_jacobian():
    p = make_adr2d(5, 4, l_config="exact-L")
    u = p.y0 + 0.05
    J = p.jacobian(u)
    eps = 1e-6
    fd = np.column_stack([(p.rhs(u + eps * e) - p.rhs(u - eps * e)) / (2 * eps) for e in np.eye(p.n)])
    np.testing.assert_allclose(J, fd, atol=1e-5)


def test_unknown_problem():
    with pytest.raises(UnknownProblem):
        make_nonlinear_small("lorenz")
    with pytest.raises(UnknownProblem):
        build_problem("swe")
    with pytest.raises(UnknownProblem):
        ProblemSpec("nope").build()


def test_constants_annihilated_in_interior():
    p = make_adr2d(8, 6, reaction="none")
    Lx, Ly = p.meta["parts"]
    out = (Lx.apply(np.ones(p.n)) + Ly.apply(np.ones(p.n))).reshape(p.meta["shape"])
    np.testing.assert_allclose(out[1:-1, 1:-1], 0.0, atol=1e-10)


def test_pure_diffusion_fourier_mode_decay():
    nx = ny = 10
    nu, tf = 0.1, 0.05
    p = make_adr2d(nx, ny, nu=nu, adv=(0.0, 0.0), reaction="none", tf=tf)
    dx = 1.0 / (nx + 1)
    lam = 2 * (-4 * nu / dx**2 * np.sin(np.pi * dx / 2) ** 2)
    # the discrete eigenvalue computed directly from the assembled operator
    Ld = sum(part.to_dense() for part in p.meta["parts"])
    assert np.abs(Ld @ p.y0 - lam * p.y0).max() < 1e-10
    ref = p.reference_solution(tf)
    np.testing.assert_allclose(ref, np.exp(lam * tf) * p.y0, atol=1e-10)


def test_amf_tilde_on_small_grid():
    p = make_adr2d(6, 6, l_config="amf-2part")
    op = p.operator(0.0, 0.01, 0.4)
    Lx, Ly = (part.to_dense() for part in p.meta["parts"])
    sigma = 0.004
    np.testing.assert_allclose(op.tilde_dense(sigma), Lx + Ly - sigma * Lx @ Ly,
                               rtol=0, atol=1e-10 * np.abs(Lx).max())


@pytest.mark.parametrize("config", CONFIGS + ["amf-2part"])
def test_operator_dimensions_adr2d(config):
    p = make_adr2d(5, 4, l_config=config)
    assert p.operator(0.0, 0.1, 0.3).n == p.n == 20


@pytest.mark.parametrize("config", CONFIGS)
def test_operator_dimensions_small(config):
    p = make_nonlinear_small("brusselator", l_config=config)
    assert p.operator(0.0, 0.1, 0.3).n == 2


def test_small_has_no_amf_split():
    with pytest.raises(ValueError):
        make_nonlinear_small("brusselator", l_config="amf-2part")


def test_seeded_operators_are_reproducible():
    a = make_nonlinear_small("vdpol-mild", l_config="arbitrary-L", seed=4)
    b = make_nonlinear_small("vdpol-mild", l_config="arbitrary-L", seed=4)
    c = make_nonlinear_small("vdpol-mild", l_config="arbitrary-L", seed=5)
    da = a.operator(0, 0.1, 0.2).to_dense()
    np.testing.assert_array_equal(da, b.operator(0, 0.1, 0.2).to_dense())
    assert not np.array_equal(da, c.operator(0, 0.1, 0.2).to_dense())


def test_rhs_deterministic():
    p = make_adr2d(6, 6)
    np.testing.assert_array_equal(p.rhs(p.y0), p.rhs(p.y0.copy()))


def test_grid_too_small():
    with pytest.raises(ValueError):
        make_adr2d(3, 6)


def test_linear_split_scalar_is_dahlquist():
    p = make_linear_split(1, seed=0, l_config="J")
    J = p.meta["J"]
    assert J.shape == (1, 1) and J[0, 0] < 0
    np.testing.assert_allclose(p.reference_solution(1.0), np.exp(J[0, 0]) * p.y0)


def test_linear_split_stable():
    J = make_linear_split(6, seed=3).meta["J"]
    assert np.linalg.eigvalsh(J + J.T).max() < 0


def test_linear_split_local_error_order():
    # one-step errors shrink like h^4 for a third-order method
    p = make_linear_split(3, seed=1, l_config="random")
    tb = table1_type1()
    errs = []
    for h in (0.1, 0.05):
        y = integrate(p, tb, tf=h, n_steps=1).y
        errs.append(np.abs(y - p.reference_solution(h)).max())
    assert np.log2(errs[0] / errs[1]) > 3.5


def test_reference_self_consistency():
    p = make_nonlinear_small("brusselator")
    ref = p.reference_solution(p.tf)
    radau = scipy.integrate.solve_ivp(lambda t, y: p.rhs(y), (0, p.tf), p.y0, method="Radau",
                                      rtol=1e-13, atol=1e-14).y[:, -1]
    assert np.abs(radau - ref).max() < 1e-10
    fine = integrate(p, table1_type1(), n_steps=8192).y
    assert np.abs(fine - ref).max() < 1e-10

"""Built-in test problems and their linear-operator configurations.

Every problem can be paired with one of these operator configurations:

``exact-L``
    Dense Jacobian of ``F`` at the initial state (frozen for the whole run).
``amf-2part``
    Two directional tridiagonal parts (``adr2d`` only).
``arbitrary-L``
    A fixed seeded random matrix (for ``adr2d`` the exact linear part plus a
    seeded random dense perturbation, so the stiff part stays captured).
``zero-L``
    ``L = 0``; every stepper reduces to the explicit method ``(a, b)``.
``perturbed-L``
    ``J + eps E`` with a seeded random ``E``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate
import scipy.linalg
import scipy.sparse

from .errors import UnknownProblem
from .integrators import IVProblem
from .linop import AmfOperator, DenseLinearPart, make_tridiag_part, zero_operator

L_CONFIGS = ("exact-L", "amf-2part", "arbitrary-L", "zero-L", "perturbed-L")


@dataclass(frozen=True)
class ProblemSpec:
    """Reproducible description of a built-in problem instance."""

    name: str
    params: tuple = ()
    l_config: str = "exact-L"
    seed: int = 0
    t0: float = 0.0
    tf: float = 1.0

    def param(self, key, default=None):
        return dict(self.params).get(key, default)

    def build(self) -> IVProblem:
        try:
            factory = REGISTRY[self.name]
        except KeyError:
            raise UnknownProblem(f"unknown problem {self.name!r}; known: {sorted(REGISTRY)}")
        return factory(self)


def _fixed(op):
    return lambda t, h, gamma_ii: op


def _random_matrix(n, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    return scale * rng.standard_normal((n, n)) / np.sqrt(n)


def _configure(p: IVProblem, spec: ProblemSpec, exact, amf=None, arbitrary=None):
    cfg = spec.l_config
    eps = spec.param("eps", 1.0)
    if cfg == "exact-L":
        op = AmfOperator([DenseLinearPart(exact)])
    elif cfg == "amf-2part":
        if amf is None:
            raise ValueError(f"{spec.name} has no two-part splitting")
        op = amf
    elif cfg == "arbitrary-L":
        op = AmfOperator([DenseLinearPart(arbitrary if arbitrary is not None
                                          else _random_matrix(p.n, spec.seed, 2.0))])
    elif cfg == "zero-L":
        op = zero_operator(p.n)
    elif cfg == "perturbed-L":
        op = AmfOperator([DenseLinearPart(exact + eps * _random_matrix(p.n, spec.seed))])
    else:
        raise ValueError(f"unknown operator configuration {cfg!r}; known: {L_CONFIGS}")
    p.operator_source = _fixed(op)
    p.meta["l_config"] = cfg
    return p


# -- linear split test problem ------------------------------------------------

def _stable_matrix(n, seed):
    rng = np.random.default_rng(seed)
    b = rng.standard_normal((n, n))
    c = rng.standard_normal((n, n))
    # symmetric part is negative definite
    return -(b @ b.T / n + 0.5 * np.eye(n)) + 0.5 * (c - c.T)


def make_linear_split(n=4, seed=0, l_config="exact-L", eps=1.0, tf=1.0) -> IVProblem:
    """Linear test problem ``y' = J y`` with a configurable splitting operator ``L``.

    ``l_config`` may also be ``"J"`` (same as exact), ``"random"`` (same as
    arbitrary) or ``"J+eps"`` (perturbed).  The exact solution uses ``expm``.
    """
    aliases = {"J": "exact-L", "random": "arbitrary-L", "J+eps": "perturbed-L"}
    spec = ProblemSpec("linear-split", (("n", n), ("eps", eps)),
                       aliases.get(l_config, l_config), seed, 0.0, tf)
    return _build_linear_split(spec)


def _build_linear_split(spec):
    n = spec.param("n", 4)
    J = _stable_matrix(n, spec.seed)
    y0 = np.random.default_rng(spec.seed + 1).standard_normal(n)

    def exact(t):
        return scipy.linalg.expm(J * (t - spec.t0)) @ y0

    p = IVProblem(n, lambda y: J @ y, None, y0, spec.t0, spec.tf, exact,
                  lambda y: J, "linear-split", {"spec": spec, "J": J})
    return _configure(p, spec, J, arbitrary=_random_matrix(n, spec.seed + 7, 2.0))


# -- 2D advection-diffusion-reaction -----------------------------------------

def make_adr2d(nx=24, ny=24, nu=0.1, adv=(1.0, 0.5), reaction="cubic", kappa=5.0,
               l_config="amf-2part", seed=0, tf=0.1) -> IVProblem:
    """Method-of-lines advection-diffusion-reaction problem on the unit square.

    ``u_t = nu (u_xx + u_yy) - ax u_x - ay u_y + r(u)`` with homogeneous
    Dirichlet boundaries, second-order central differences on an ``nx x ny``
    interior grid, ``r(u) = kappa u^2 (1 - u)`` (``reaction="cubic"``) or
    ``r = 0`` (``reaction="none"``), and ``u(0) = sin(pi x) sin(pi y)``.
    The state is the grid flattened in C order with shape ``(ny, nx)``.
    """
    spec = ProblemSpec("adr2d", (("nx", nx), ("ny", ny), ("nu", nu), ("ax", adv[0]),
                                 ("ay", adv[1]), ("reaction", reaction), ("kappa", kappa)),
                       l_config, seed, 0.0, tf)
    return _build_adr2d(spec)


def _directional_part(m, h, nu, a, shape, axis):
    lo = nu / h**2 + a / (2 * h)
    up = nu / h**2 - a / (2 * h)
    return make_tridiag_part((lo, -2.0 * nu / h**2, up), "dirichlet", shape=shape, axis=axis)


def _build_adr2d(spec):
    nx, ny = spec.param("nx", 24), spec.param("ny", 24)
    nu = spec.param("nu", 0.1)
    ax, ay = spec.param("ax", 1.0), spec.param("ay", 0.5)
    reaction = spec.param("reaction", "cubic")
    kappa = spec.param("kappa", 5.0) if reaction == "cubic" else 0.0
    if nx < 4 or ny < 4:
        raise ValueError("adr2d needs nx, ny >= 4")
    if reaction not in ("none", "cubic"):
        raise ValueError(f"unknown reaction {reaction!r}")
    shape = (ny, nx)
    hx, hy = 1.0 / (nx + 1), 1.0 / (ny + 1)
    x = np.arange(1, nx + 1) * hx
    y = np.arange(1, ny + 1) * hy
    Lx = _directional_part(nx, hx, nu, ax, shape, axis=1)
    Ly = _directional_part(ny, hy, nu, ay, shape, axis=0)
    amf = AmfOperator([Lx, Ly])
    u0 = np.outer(np.sin(np.pi * y), np.sin(np.pi * x)).ravel()
    n = nx * ny

    def rhs(u):
        out = amf.sum_apply(u)
        if kappa:
            out = out + kappa * u * u * (1.0 - u)
        return out

    A_sparse = _sparse_from_parts(amf)
    A_dense = A_sparse.toarray()

    def jac(u):
        return A_dense + np.diag(kappa * (2.0 * u - 3.0 * u * u))

    def jac_sparse(t, u):
        return A_sparse + scipy.sparse.diags(kappa * (2.0 * u - 3.0 * u * u))

    p = IVProblem(n, rhs, None, u0, spec.t0, spec.tf, None, jac, "adr2d",
                  {"spec": spec, "shape": shape, "parts": (Lx, Ly), "x": x, "y": y,
                   "jac_sparse": jac_sparse})
    p.reference_solution = functools.partial(_reference, spec)
    rng_e = _random_matrix(n, spec.seed + 11, 2.0)
    return _configure(p, spec, jac(u0), amf, arbitrary=jac(u0) + rng_e)


def _sparse_from_parts(amf):
    mats = []
    for part in amf.parts:
        mats.append(scipy.sparse.csr_matrix(part.to_dense()))
    return sum(mats[1:], mats[0]).tocsr()


# -- small nonlinear systems --------------------------------------------------

def _brusselator(params):
    A = params.get("A", 1.0)
    B = params.get("B", 3.0)

    def f(y):
        u, v = y
        return np.array([A + u * u * v - (B + 1.0) * u, B * u - u * u * v])

    def jac(y):
        u, v = y
        return np.array([[2 * u * v - (B + 1.0), u * u], [B - 2 * u * v, -u * u]])

    return f, jac, np.array([1.5, 3.0]), np.array([A, B / A])


def _vdpol_mild(params):
    mu = params.get("mu", 1.0)

    def f(y):
        return np.array([y[1], mu * (1.0 - y[0] ** 2) * y[1] - y[0]])

    def jac(y):
        return np.array([[0.0, 1.0], [-2.0 * mu * y[0] * y[1] - 1.0, mu * (1.0 - y[0] ** 2)]])

    return f, jac, np.array([2.0, 0.0]), np.zeros(2)


_SMALL = {"brusselator": _brusselator, "vdpol-mild": _vdpol_mild}


def make_nonlinear_small(name="brusselator", l_config="exact-L", seed=0, tf=1.0,
                         y0=None, **params) -> IVProblem:
    """Small smooth autonomous systems (``N = 2``).

    ``brusselator`` (parameters ``A``, ``B``) and ``vdpol-mild`` (``mu``).
    Pass ``y0="equilibrium"`` to start at the fixed point.

    Raises
    ------
    UnknownProblem
    """
    if name not in _SMALL:
        raise UnknownProblem(f"unknown small problem {name!r}; known: {sorted(_SMALL)}")
    extra = tuple(sorted(params.items()))
    if isinstance(y0, str):
        extra += (("y0", y0),)
    elif y0 is not None:
        extra += (("y0", tuple(float(v) for v in y0)),)
    spec = ProblemSpec(name, extra, l_config, seed, 0.0, tf)
    return _build_small(spec)


def _build_small(spec):
    params = dict(spec.params)
    f, jac, y_start, y_eq = _SMALL[spec.name](params)
    y0 = params.get("y0")
    if isinstance(y0, str):
        if y0 != "equilibrium":
            raise ValueError(f"unknown initial condition {y0!r}")
        y_start = y_eq
    elif y0 is not None:
        y_start = np.array(y0, dtype=float)
    p = IVProblem(2, f, None, y_start.copy(), spec.t0, spec.tf, None, jac, spec.name,
                  {"spec": spec, "equilibrium": y_eq})
    p.reference_solution = functools.partial(_reference, spec)
    return _configure(p, spec, jac(y_start), arbitrary=_random_matrix(2, spec.seed + 3, 2.0))


# -- references --------------------------------------------------------------

@functools.lru_cache(maxsize=32)
def _reference_cached(spec_key, t):
    spec = spec_key
    p = spec.build()
    if p.name == "adr2d":
        sol = scipy.integrate.solve_ivp(lambda _t, u: p.rhs(u), (spec.t0, t), p.y0,
                                        method="Radau", rtol=1e-12, atol=1e-14,
                                        jac=p.meta["jac_sparse"])
    else:
        sol = scipy.integrate.solve_ivp(lambda _t, u: p.rhs(u), (spec.t0, t), p.y0,
                                        method="DOP853", rtol=1e-13, atol=1e-15)
    if not sol.success:
        raise RuntimeError(f"reference integration failed: {sol.message}")
    out = sol.y[:, -1].copy()
    out.setflags(write=False)
    return out


def _reference(spec, t):
    """High-accuracy reference from scipy; independent of the operator configuration."""
    key = ProblemSpec(spec.name, spec.params, "zero-L", 0, spec.t0, spec.tf)
    return np.array(_reference_cached(key, float(t)))


REGISTRY = {
    "linear-split": _build_linear_split,
    "adr2d": _build_adr2d,
    "brusselator": _build_small,
    "vdpol-mild": _build_small,
}


def build_problem(name, l_config="exact-L", seed=0, tf=None, **params) -> IVProblem:
    """Construct a registered problem by name (used by the command line)."""
    defaults = {"linear-split": 1.0, "adr2d": 0.1, "brusselator": 1.0, "vdpol-mild": 1.0}
    if name not in REGISTRY:
        raise UnknownProblem(f"unknown problem {name!r}; known: {sorted(REGISTRY)}")
    tf = defaults[name] if tf is None else tf
    if name == "adr2d":
        params.setdefault("nx", 24)
        params.setdefault("ny", 24)
    spec = ProblemSpec(name, tuple(sorted(params.items())), l_config, seed, 0.0, tf)
    return spec.build()

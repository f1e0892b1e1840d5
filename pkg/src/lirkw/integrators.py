"""One-step maps for LIRK-W methods of types 1-3 and a fixed-step driver.

All three formulations share the stage structure

    (I - h gamma_ii L_i) Y_i = y_n + h sum_{j<i} a_ij F(Y_j) + (linear coupling),

and differ only in which operator multiplies the earlier stage values:

* type 1 uses the stage operator ``L_j`` of every earlier stage (``Lt`` of an
  AMF operator evaluated at ``sigma_j = h gamma_jj``);
* type 2 uses the exact sum ``L`` off the diagonal and the factored product only
  in the stage solve;
* type 3 uses the current stage operator ``L_i`` on the accumulated combination
  ``sum_{j<i} gamma_ij Y_j``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NonfiniteState
from .linop import AmfOperator, as_operator
from .tableau import MethodType, Tableau


@dataclass
class IVProblem:
    """Autonomous initial value problem ``y' = F(y)`` with a linear-operator source.

    Parameters
    ----------
    n : int
        State dimension.
    rhs : callable
        ``rhs(y) -> F(y)``.
    operator_source : callable or operator
        ``operator_source(t, h, gamma_ii)`` returning the operator for one stage
        (an :class:`~lirkw.linop.AmfOperator`, a linear part or a dense matrix).
        A fixed operator may be passed directly.  ``None`` means ``L = 0``.
    y0, t0, tf : optional
        Default initial condition and horizon.
    reference_solution : callable, optional
        ``reference_solution(t) -> y(t)``.
    jacobian : callable, optional
        ``jacobian(y) -> dF/dy`` as a dense matrix.
    """

    n: int
    rhs: Callable
    operator_source: object = None
    y0: Optional[np.ndarray] = None
    t0: float = 0.0
    tf: float = 1.0
    reference_solution: Optional[Callable] = None
    jacobian: Optional[Callable] = None
    name: str = "problem"
    meta: dict = field(default_factory=dict)

    def operator(self, t, h, gamma_ii) -> AmfOperator:
        src = self.operator_source
        if callable(src) and not isinstance(src, AmfOperator):
            src = src(t, h, gamma_ii)
        op = as_operator(src, self.n)
        if op.n != self.n:
            raise ValueError(f"operator has dimension {op.n}, problem has {self.n}")
        return op

    def with_operator(self, operator_source, name=None) -> "IVProblem":
        """Same ODE, different linear operator (the ODE itself never changes)."""
        return IVProblem(self.n, self.rhs, operator_source, self.y0, self.t0, self.tf,
                         self.reference_solution, self.jacobian, name or self.name,
                         dict(self.meta))


@dataclass
class StepRecord:
    t: float
    h: float
    y: np.ndarray
    y_next: np.ndarray
    stages: Optional[np.ndarray] = None


def _check_finite(x, stage):
    if not np.all(np.isfinite(x)):
        raise NonfiniteState(f"non-finite values in stage {stage + 1}", stage_index=stage)


def _stage_operators(p: IVProblem, tb: Tableau, t, h):
    return [p.operator(t, h, gii) for gii in np.diag(tb.gamma)]


def step_type1(p: IVProblem, tb: Tableau, t, y, h, return_stages=False):
    """One step of the type-1 formulation; returns ``y_{n+1}``."""
    y = np.asarray(y, dtype=float)
    if h == 0.0:
        return (y.copy(), None) if return_stages else y.copy()
    s = tb.s
    A, G = tb.a, tb.gamma
    ops = _stage_operators(p, tb, t, h)
    # z_j = L_j Y_j is only needed where some later row or g references it
    need_z = [(G[j + 1:, j] != 0).any() or tb.g[j] != 0 for j in range(s)]
    Y = np.empty((s, y.size))
    Fs = np.empty_like(Y)
    Z = np.zeros_like(Y)
    for i in range(s):
        rhs = y + h * (A[i, :i] @ Fs[:i] + G[i, :i] @ Z[:i])
        sigma = h * G[i, i]
        Y[i] = ops[i].product_solve(sigma, rhs) if G[i, i] != 0.0 else rhs
        _check_finite(Y[i], i)
        Fs[i] = p.rhs(Y[i])
        if need_z[i]:
            Z[i] = ops[i].tilde_apply(sigma, Y[i])
    y_new = y + h * (tb.b @ Fs + tb.g @ Z)
    _check_finite(y_new, s - 1)
    return (y_new, Y) if return_stages else y_new


def step_type2(p: IVProblem, tb: Tableau, t, y, h, return_stages=False):
    """One step of the type-2 formulation; returns ``y_{n+1}``.

    The exact ``L`` is the sum form of the operator returned for ``gamma_ii = 0``.
    """
    y = np.asarray(y, dtype=float)
    if h == 0.0:
        return (y.copy(), None) if return_stages else y.copy()
    s = tb.s
    A, G = tb.a, tb.gamma
    L = p.operator(t, h, 0.0)
    ops = _stage_operators(p, tb, t, h)
    Y = np.empty((s, y.size))
    Fs = np.empty_like(Y)
    for i in range(s):
        rhs = y + h * (A[i, :i] @ Fs[:i])
        if i and (G[i, :i] != 0).any():
            rhs = rhs + h * L.sum_apply(G[i, :i] @ Y[:i])
        Y[i] = ops[i].product_solve(h * G[i, i], rhs) if G[i, i] != 0.0 else rhs
        _check_finite(Y[i], i)
        Fs[i] = p.rhs(Y[i])
    y_new = y + h * (tb.b @ Fs + L.sum_apply(tb.g @ Y))
    _check_finite(y_new, s - 1)
    return (y_new, Y) if return_stages else y_new


def step_type3(p: IVProblem, tb: Tableau, t, y, h, stage_ops=None, return_stages=False):
    """One step of the type-3 formulation; returns ``y_{n+1}``.

    Parameters
    ----------
    stage_ops : sequence of s operators, optional
        Per-stage operators ``L_i``.  Each is used both in the stage solve and
        on the accumulated combination of earlier stages.  Defaults to the
        problem's operator source queried per stage.
    """
    y = np.asarray(y, dtype=float)
    if h == 0.0:
        return (y.copy(), None) if return_stages else y.copy()
    s = tb.s
    A, G = tb.a, tb.gamma
    L = p.operator(t, h, 0.0)
    if stage_ops is None:
        ops = _stage_operators(p, tb, t, h)
    else:
        if len(stage_ops) != s:
            raise ValueError(f"expected {s} stage operators, got {len(stage_ops)}")
        ops = [as_operator(op, p.n) for op in stage_ops]
    Y = np.empty((s, y.size))
    Fs = np.empty_like(Y)
    for i in range(s):
        sigma = h * G[i, i]
        rhs = y + h * (A[i, :i] @ Fs[:i])
        if i and (G[i, :i] != 0).any():
            rhs = rhs + h * ops[i].tilde_apply(sigma, G[i, :i] @ Y[:i])
        Y[i] = ops[i].product_solve(sigma, rhs) if G[i, i] != 0.0 else rhs
        _check_finite(Y[i], i)
        Fs[i] = p.rhs(Y[i])
    y_new = y + h * (tb.b @ Fs + L.sum_apply(tb.g @ Y))
    _check_finite(y_new, s - 1)
    return (y_new, Y) if return_stages else y_new


_STEPPERS = {MethodType.TYPE1: step_type1, MethodType.TYPE2: step_type2,
             MethodType.TYPE3: step_type3}


def stepper_for(mtype):
    return _STEPPERS[MethodType(int(mtype))]


@dataclass
class Trajectory:
    t: float
    y: np.ndarray
    n_steps: int
    records: list = field(default_factory=list)


def integrate(p: IVProblem, tb: Tableau, t0=None, tf=None, n_steps=1, y0=None,
              type3_ops=None, mtype=None, keep_records=False, keep_stages=False):
    """Fixed-step integration from ``t0`` to ``tf`` in ``n_steps`` equal steps.

    Parameters
    ----------
    type3_ops : callable, optional
        ``type3_ops(t, h, step_index) -> list of s operators`` for type-3 runs.
    mtype : int, optional
        Formulation to use; defaults to ``tb.method_type``.

    Raises
    ------
    NonfiniteState
        With ``step_index`` set to the failing step.
    """
    t0 = p.t0 if t0 is None else t0
    tf = p.tf if tf is None else tf
    y = np.array(p.y0 if y0 is None else y0, dtype=float)
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if not tf > t0:
        raise ValueError("tf must exceed t0")
    mtype = MethodType(int(tb.method_type if mtype is None else mtype))
    step = stepper_for(mtype)
    h = (tf - t0) / n_steps
    records = []
    for k in range(n_steps):
        t = t0 + k * h
        kw = {"return_stages": True}
        if mtype == MethodType.TYPE3 and type3_ops is not None:
            kw["stage_ops"] = type3_ops(t, h, k)
        try:
            # overflow surfaces as NonfiniteState from the stage checks
            with np.errstate(over="ignore", invalid="ignore"):
                y_next, stages = step(p, tb, t, y, h, **kw)
        except NonfiniteState as exc:
            exc.step_index = k
            exc.args = (f"step {k}: {exc.args[0]}",)
            raise
        if keep_records:
            records.append(StepRecord(t, h, y, y_next, stages if keep_stages else None))
        y = y_next
    return Trajectory(tf, y, n_steps, records)

"""Fixed-step convergence sweeps and order fitting."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .integrators import integrate


@dataclass(frozen=True)
class SweepRow:
    n_steps: int
    h: float
    error: float
    local_slope: float  # nan for the first row


def max_error(y, ref):
    return float(np.max(np.abs(np.asarray(y) - np.asarray(ref))))


def run_sweep(problem, tableau, n_list, mtype=None, reference=None, type3_ops=None):
    """Max-norm error at ``tf`` for each step count in ``n_list``.

    Rows are returned ordered by ``n_steps``.  ``local_slope`` is the observed
    order between consecutive rows.
    """
    if reference is None:
        reference = problem.reference_solution(problem.tf)
    rows = []
    prev = None
    for n in sorted(int(k) for k in n_list):
        traj = integrate(problem, tableau, n_steps=n, mtype=mtype, type3_ops=type3_ops)
        err = max_error(traj.y, reference)
        h = (problem.tf - problem.t0) / n
        slope = float("nan")
        if prev is not None and prev.error > 0 and err > 0:
            slope = float(np.log(prev.error / err) / np.log(prev.h / h))
        prev = SweepRow(n, h, err, slope)
        rows.append(prev)
    return rows


def fit_order(rows, tail=4):
    """Least-squares slope of ``log(error)`` against ``log(h)`` over the ``tail`` smallest ``h``."""
    use = sorted(rows, key=lambda r: r.h)[:tail]
    if len(use) < 2:
        raise ValueError("need at least two rows to fit an order")
    h = np.log([r.h for r in use])
    e = np.log([max(r.error, 1e-300) for r in use])
    return float(np.polyfit(h, e, 1)[0])

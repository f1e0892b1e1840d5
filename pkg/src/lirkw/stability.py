"""Transfer matrices of LIRK-W methods on the split linear test problem.

For ``y' = L y + (J - L) y`` one step of a LIRK-W method is a linear map
``y_{n+1} = R y_n``.  The stage vector ``Y = (Y_1, ..., Y_s)`` solves a dense
``sN x sN`` system assembled from Kronecker products of the tableau with the
(scaled) matrices ``hJ``, ``hL`` and the per-stage ``hL_i``.
"""
from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import SingularStageSystem
from .tableau import STIFFLY_ACCURATE, MethodType, Tableau, validate


@dataclass
class TransferMatrix:
    matrix: np.ndarray
    method_type: int
    tableau: str
    reduced: np.ndarray = None
    inputs: dict = field(default_factory=dict, repr=False)

    @property
    def n(self):
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def _as_mat(x, n=None):
    m = np.atleast_2d(np.asarray(x, dtype=float))
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if n is not None and m.shape[0] != n:
        raise ValueError(f"expected dimension {n}, got {m.shape[0]}")
    return m


def _blkdiag(blocks):
    return scipy.linalg.block_diag(*blocks)


def _solve_stages(M, rhs, s):
    """Block forward substitution for the block lower triangular stage system.

    Only the diagonal blocks ``I - gamma_ii hL_i`` are factored, so ill-scaled
    off-diagonal coupling (large ``|z|``) is not mistaken for singularity.
    """
    n = M.shape[0] // s
    Y = np.zeros_like(rhs, dtype=float)
    for i in range(s):
        rows = slice(i * n, (i + 1) * n)
        b = rhs[rows] - M[rows, :i * n] @ Y[:i * n]
        D = M[rows, rows]
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                lu, piv = scipy.linalg.lu_factor(D, check_finite=True)
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise SingularStageSystem(str(exc)) from exc
        udiag = np.abs(np.diag(lu))
        if udiag.min() <= 1e-14 * max(np.abs(D).max(), 1.0):
            raise SingularStageSystem(f"stage {i + 1} block is singular to working precision")
        Y[rows] = scipy.linalg.lu_solve((lu, piv), b)
    return Y


def _stiffly_accurate(tb):
    return validate(tb, STIFFLY_ACCURATE).passed


def transfer_type1(tb: Tableau, hJ, hL_list) -> TransferMatrix:
    """Transfer matrix ``R(hJ, hL_1, ..., hL_s)`` of the type-1 formulation.

    ``hL_list`` holds one scaled stage operator per stage.  Scalars are accepted
    for ``N = 1``.
    """
    hJ = _as_mat(hJ)
    n = hJ.shape[0]
    s = tb.s
    if len(hL_list) != s:
        raise ValueError(f"need {s} stage operators, got {len(hL_list)}")
    hL = [_as_mat(x, n) for x in hL_list]
    I_n = np.eye(n)
    expl = _blkdiag([hJ - m for m in hL])
    impl = _blkdiag(hL)
    M = (np.eye(s * n) - np.kron(tb.a, I_n) @ expl - np.kron(tb.a_hat, I_n) @ impl)
    Y = _solve_stages(M, np.kron(np.ones((s, 1)), I_n), s)
    out = (np.kron(tb.b[None, :], I_n) @ expl + np.kron(tb.b_hat[None, :], I_n) @ impl)
    R = I_n + out @ Y
    reduced = None
    if _stiffly_accurate(tb):
        reduced = Y[(s - 1) * n:]
    return TransferMatrix(R, 1, tb.name, reduced, {"hJ": hJ, "hL_list": hL})


def transfer_type2(tb: Tableau, hJ, hL, hL_list) -> TransferMatrix:
    """Transfer matrix of the type-2 formulation.

    ``hL`` is the exact operator used off the diagonal and in the output;
    ``hL_list`` holds the per-stage operators of the diagonal solves.
    """
    hJ = _as_mat(hJ)
    n = hJ.shape[0]
    hL = _as_mat(hL, n)
    s = tb.s
    if len(hL_list) != s:
        raise ValueError(f"need {s} stage operators, got {len(hL_list)}")
    hLi = [_as_mat(x, n) for x in hL_list]
    I_n = np.eye(n)
    d = np.diag(tb.gamma)
    corr = _blkdiag([d[i] * (hLi[i] - hL) for i in range(s)])
    M = (np.eye(s * n) - np.kron(tb.a, hJ - hL) - np.kron(tb.a_hat, hL) - corr)
    Y = _solve_stages(M, np.kron(np.ones((s, 1)), I_n), s)
    out = np.kron(tb.b[None, :], hJ - hL) + np.kron(tb.b_hat[None, :], hL)
    R = I_n + out @ Y
    reduced = None
    if _stiffly_accurate(tb):
        reduced = ((np.eye(s * n) - corr) @ Y)[(s - 1) * n:]
    return TransferMatrix(R, 2, tb.name, reduced,
                          {"hJ": hJ, "hL": hL, "hL_list": hLi})


def transfer(tb: Tableau, mtype, hJ, hL, hL_list=None) -> TransferMatrix:
    """Dispatch on the formulation; ``hL_list`` defaults to ``s`` copies of ``hL``."""
    mtype = MethodType(int(mtype))
    if hL_list is None:
        hL_list = [hL] * tb.s
    if mtype == MethodType.TYPE1:
        return transfer_type1(tb, hJ, hL_list)
    if mtype == MethodType.TYPE2:
        return transfer_type2(tb, hJ, hL, hL_list)
    raise NotImplementedError("transfer matrices are provided for types 1 and 2")


# -- scalar scans ------------------------------------------------------------

def scalar_config(name: str, c: float = 1.0):
    """Scalar operator configurations ``z -> (hJ, hL, [hL_i])`` for scans.

    ``exact``
        ``hJ = hL = hL_i = z``.
    ``explicit``
        ``hJ = z`` and every linear term zero.
    ``fast``
        ``hJ = hL = z`` and ``hL_i = c z**2``, so the stage operators outgrow
        both ``hJ`` and ``hL`` as ``|z|`` grows.
    """
    if name == "exact":
        return lambda z: (z, z, None)
    if name == "explicit":
        return lambda z: (z, 0.0, None)
    if name == "fast":
        return lambda z: (z, z, "fast")
    raise ValueError(f"unknown scalar configuration {name!r}")


def transfer_scalar(tb: Tableau, mtype, z, config="exact", c: float = 1.0) -> float:
    """Scalar ``R(z)`` under a named configuration."""
    hJ, hL, tag = scalar_config(config, c)(z)
    hL_list = [c * z * z] * tb.s if tag == "fast" else None
    return float(transfer(tb, mtype, hJ, hL, hL_list).matrix[0, 0])


def stability_scan(tb: Tableau, mtype, grid, config="exact", c: float = 1.0):
    """Tabulate ``|R(z)|`` over a grid of real ``z = h lambda``.

    Returns a list of ``(z, |R(z)|)`` pairs in grid order.
    """
    return [(float(z), abs(transfer_scalar(tb, mtype, z, config, c))) for z in grid]


def scan_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["h_lambda", "abs_R"])
    for z, r in rows:
        w.writerow([format(z, ".17g"), format(r, ".17g")])
    return buf.getvalue()


def log_grid(lo_exp=0, hi_exp=8, per_decade=4, include_zero=True):
    """Negative real grid ``-10**e`` for ``e`` in ``[lo_exp, hi_exp]``."""
    exps = np.linspace(lo_exp, hi_exp, int(round((hi_exp - lo_exp) * per_decade)) + 1)
    g = [-(10.0**e) for e in exps]
    return ([0.0] if include_zero else []) + g


__all__ = ["TransferMatrix", "transfer_type1", "transfer_type2", "transfer",
           "transfer_scalar", "stability_scan", "scan_to_csv", "log_grid",
           "scalar_config"]

"""Linear parts and the approximate-matrix-factorization (AMF) operator.

An :class:`AmfOperator` holds parts ``L_1, ..., L_R`` of ``L = sum_r L_r``.  It can

* multiply by the exact sum ``L`` (:meth:`AmfOperator.sum_apply`),
* solve with the factored matrix ``prod_r (I - sigma L_r)`` one factor at a time
  (:meth:`AmfOperator.product_solve`), and
* multiply by ``Lt(sigma)``, the operator defined by
  ``I - sigma Lt = (I - sigma L_1)(I - sigma L_2)...(I - sigma L_R)``
  (:meth:`AmfOperator.tilde_apply`).

Factors are ordered left to right by ascending part index.
"""
from __future__ import annotations

import itertools
import threading
import warnings
from collections import OrderedDict

import numpy as np
import scipy.linalg

from .errors import SingularFactor

PIVOT_TOL = 1e-14
_CACHE_SIZE = 16


class _FactorCache:
    """Small per-instance LRU of factorizations keyed by sigma."""

    def __init__(self, size=_CACHE_SIZE):
        self._data = OrderedDict()
        self._size = size
        self._lock = threading.Lock()

    def get(self, sigma, build):
        key = float(sigma)
        with self._lock:
            if key in self._data:
                self._data.move_to_end(key)
                return self._data[key]
        value = build(key)
        with self._lock:
            self._data[key] = value
            if len(self._data) > self._size:
                self._data.popitem(last=False)
        return value


class LinearPart:
    """Abstract linear operator on vectors of length ``n``.

    Subclasses implement :meth:`apply`, :meth:`shifted_solve` and :meth:`to_dense`.
    """

    kind = "abstract"
    n: int

    def apply(self, v):
        raise NotImplementedError

    def shifted_solve(self, sigma, rhs):
        """Solve ``(I - sigma * self) x = rhs``."""
        raise NotImplementedError

    def to_dense(self):
        raise NotImplementedError

    def _check(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ValueError(f"expected a vector of length {self.n}, got shape {v.shape}")
        return v


class DenseLinearPart(LinearPart):
    """A dense ``n x n`` matrix.  Shifted solves use a cached LU factorization."""

    kind = "dense"

    def __init__(self, matrix):
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"dense part must be square, got shape {m.shape}")
        m.setflags(write=False)
        self.matrix = m
        self.n = m.shape[0]
        self._lu = _FactorCache()

    def apply(self, v):
        return self.matrix @ self._check(v)

    def _factor(self, sigma):
        shifted = np.eye(self.n) - sigma * self.matrix
        with warnings.catch_warnings():
            # an exactly zero pivot is reported below as SingularFactor
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(shifted, check_finite=False)
        udiag = np.abs(np.diag(lu))
        if not np.all(np.isfinite(udiag)) or udiag.min() <= PIVOT_TOL * max(udiag.max(), 1.0):
            raise SingularFactor(f"I - {sigma!r} * L is singular to working precision")
        return lu, piv

    def shifted_solve(self, sigma, rhs):
        rhs = self._check(rhs)
        if sigma == 0.0:
            return rhs.copy()
        return scipy.linalg.lu_solve(self._lu.get(sigma, self._factor), rhs, check_finite=False)

    def to_dense(self):
        return np.array(self.matrix)


class DiagonalLinearPart(LinearPart):
    kind = "diagonal"

    def __init__(self, diag):
        d = np.array(diag, dtype=float).ravel()
        d.setflags(write=False)
        self.diag = d
        self.n = d.shape[0]

    def apply(self, v):
        return self.diag * self._check(v)

    def shifted_solve(self, sigma, rhs):
        rhs = self._check(rhs)
        den = 1.0 - sigma * self.diag
        if np.any(np.abs(den) <= PIVOT_TOL * max(np.abs(den).max(), 1.0)):
            raise SingularFactor(f"I - {sigma!r} * D has a zero diagonal entry")
        return rhs / den

    def to_dense(self):
        return np.diag(self.diag)


def _thomas_factor(lo, di, up):
    """Forward sweep of non-pivoting tridiagonal elimination.

    Returns the eliminated super-diagonal and the pivots.  ``lo[0]`` and
    ``up[-1]`` are ignored.
    """
    n = di.shape[0]
    piv = np.empty(n)
    cp = np.empty(n)
    scale = np.abs(di).max()
    piv[0] = di[0]
    for k in range(n):
        if k > 0:
            piv[k] = di[k] - lo[k] * cp[k - 1]
        if not np.isfinite(piv[k]) or abs(piv[k]) <= PIVOT_TOL * scale:
            raise SingularFactor(f"zero pivot in tridiagonal elimination at row {k}")
        cp[k] = up[k] / piv[k] if k < n - 1 else 0.0
    return cp, piv


def _thomas_solve(lo, cp, piv, d):
    """Solve with a factored tridiagonal matrix; ``d`` has shape ``(n, m)``."""
    n = d.shape[0]
    x = np.empty_like(d)
    x[0] = d[0] / piv[0]
    for k in range(1, n):
        x[k] = (d[k] - lo[k] * x[k - 1]) / piv[k]
    for k in range(n - 2, -1, -1):
        x[k] -= cp[k] * x[k + 1]
    return x


class TridiagonalLinearPart(LinearPart):
    """A (possibly periodic) tridiagonal operator acting along one grid axis.

    The operator acts on vectors of length ``prod(shape)`` which are reshaped
    (C order) to ``shape``; the tridiagonal matrix of size ``shape[axis]`` is
    applied along ``axis`` independently for every other index.  With the
    default ``shape=None`` this is an ordinary ``n x n`` tridiagonal matrix.

    Parameters
    ----------
    lower, main, upper : array_like
        Diagonals of length ``m = shape[axis]``; ``lower[i]`` multiplies
        ``x[i-1]`` and ``upper[i]`` multiplies ``x[i+1]`` in row ``i``.  For
        ``periodic`` boundaries ``lower[0]`` couples to ``x[m-1]`` and
        ``upper[m-1]`` to ``x[0]``; otherwise those two entries are ignored.
    boundary : {"dirichlet", "periodic"}
    """

    kind = "banded"
    bandwidth = 1

    def __init__(self, lower, main, upper, boundary="dirichlet", shape=None, axis=0):
        main = np.array(main, dtype=float).ravel()
        m = main.shape[0]
        lower = np.array(np.broadcast_to(np.asarray(lower, dtype=float), (m,)))
        upper = np.array(np.broadcast_to(np.asarray(upper, dtype=float), (m,)))
        if boundary not in ("dirichlet", "periodic"):
            raise ValueError(f"unknown boundary {boundary!r}")
        if boundary == "periodic" and m < 3:
            raise ValueError("periodic tridiagonal parts need at least 3 points")
        if boundary == "dirichlet":
            lower[0] = 0.0
            upper[-1] = 0.0
        if shape is None:
            shape = (m,)
        shape = tuple(int(k) for k in shape)
        if shape[axis] != m:
            raise ValueError(f"diagonals have length {m} but shape[{axis}] = {shape[axis]}")
        for arr in (lower, main, upper):
            arr.setflags(write=False)
        self.lower, self.main, self.upper = lower, main, upper
        self.boundary = boundary
        self.shape = shape
        self.axis = axis % len(shape)
        self.m = m
        self.n = int(np.prod(shape))
        self._fac = _FactorCache()

    def _to_cols(self, v):
        # (n,) -> (m, rest) with the active axis first
        arr = np.moveaxis(v.reshape(self.shape), self.axis, 0)
        return arr.reshape(self.m, -1)

    def _from_cols(self, cols):
        moved = [self.shape[self.axis]] + [k for i, k in enumerate(self.shape) if i != self.axis]
        return np.moveaxis(cols.reshape(moved), 0, self.axis).reshape(-1)

    def _apply_cols(self, x, lo, di, up):
        y = di[:, None] * x
        y[1:] += lo[1:, None] * x[:-1]
        y[:-1] += up[:-1, None] * x[1:]
        if self.boundary == "periodic":
            y[0] += lo[0] * x[-1]
            y[-1] += up[-1] * x[0]
        return y

    def apply(self, v):
        x = self._to_cols(self._check(v))
        return self._from_cols(self._apply_cols(x, self.lower, self.main, self.upper))

    def _factor(self, sigma):
        lo = -sigma * self.lower
        di = 1.0 - sigma * self.main
        up = -sigma * self.upper
        if self.boundary == "dirichlet":
            return lo, _thomas_factor(lo, di, up), None
        # Sherman-Morrison: A = B + u w^T with u = (alpha, 0, .., 0, beta),
        # w = (1, 0, .., 0, corner / alpha).
        alpha = -di[0]
        beta = up[-1]
        corner = lo[0]
        di_b = di.copy()
        di_b[0] -= alpha
        di_b[-1] -= beta * corner / alpha
        fac = _thomas_factor(lo, di_b, up)
        u = np.zeros((self.m, 1))
        u[0, 0] = alpha
        u[-1, 0] = beta
        z = _thomas_solve(lo, *fac, u)[:, 0]
        denom = 1.0 + z[0] + corner / alpha * z[-1]
        if abs(denom) <= PIVOT_TOL:
            raise SingularFactor("periodic tridiagonal factor is singular")
        return lo, fac, (z, denom, corner / alpha)

    def shifted_solve(self, sigma, rhs):
        rhs = self._check(rhs)
        if sigma == 0.0:
            return rhs.copy()
        lo, fac, sm = self._fac.get(sigma, self._factor)
        d = self._to_cols(rhs)
        x = _thomas_solve(lo, *fac, d)
        if sm is not None:
            z, denom, ratio = sm
            wx = x[0] + ratio * x[-1]
            x = x - np.outer(z, wx / denom)
        return self._from_cols(x)

    def to_dense(self):
        t = np.diag(self.main) + np.diag(self.lower[1:], -1) + np.diag(self.upper[:-1], 1)
        if self.boundary == "periodic":
            t[0, -1] += self.lower[0]
            t[-1, 0] += self.upper[-1]
        if len(self.shape) == 1:
            return t
        # Kronecker embedding along the active axis, C ordering.
        mats = [np.eye(k) for k in self.shape]
        mats[self.axis] = t
        out = mats[0]
        for mat in mats[1:]:
            out = np.kron(out, mat)
        return out


def make_tridiag_part(diagonals, boundary="dirichlet", n=None, shape=None, axis=0):
    """Build a tridiagonal :class:`LinearPart`.

    Parameters
    ----------
    diagonals : (lower, main, upper)
        Arrays, or scalars for a constant stencil (then give ``n`` or ``shape``).
    boundary : {"dirichlet", "periodic"}
    n : int, optional
        Matrix size when all diagonals are scalars and ``shape`` is not given.
    shape, axis : optional
        Grid shape and the axis the operator acts along.

    Examples
    --------
    >>> part = make_tridiag_part((1.0, -2.0, 1.0), n=5)
    >>> part.apply(np.ones(5))
    array([-1.,  0.,  0.,  0., -1.])
    """
    lower, main, upper = diagonals
    if shape is not None:
        m = shape[axis]
    elif np.ndim(main) > 0:
        m = np.size(main)
    elif n is not None:
        m = n
    else:
        raise ValueError("give n or shape when all diagonals are scalars")
    main = np.broadcast_to(np.asarray(main, dtype=float), (m,))
    return TridiagonalLinearPart(lower, main, upper, boundary=boundary, shape=shape, axis=axis)


class AmfOperator:
    """Ordered collection of linear parts with AMF semantics.

    Parameters
    ----------
    parts : sequence of LinearPart or ndarray
        Dense arrays are wrapped in :class:`DenseLinearPart`.
    """

    def __init__(self, parts):
        parts = [p if isinstance(p, LinearPart) else DenseLinearPart(p) for p in parts]
        if not parts:
            raise ValueError("an AMF operator needs at least one part")
        n = parts[0].n
        if any(p.n != n for p in parts):
            raise ValueError("all parts must share one dimension")
        self.parts = tuple(parts)
        self.n = n

    @property
    def R(self) -> int:
        return len(self.parts)

    def _check(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ValueError(f"expected a vector of length {self.n}, got shape {v.shape}")
        return v

    def sum_apply(self, v):
        """Exact ``L v = sum_r L_r v``."""
        v = self._check(v)
        out = self.parts[0].apply(v)
        for p in self.parts[1:]:
            out = out + p.apply(v)
        return out

    def product_apply(self, sigma, v):
        """``prod_r (I - sigma L_r) v``, rightmost factor first."""
        x = self._check(v)
        for p in reversed(self.parts):
            x = x - sigma * p.apply(x)
        return x

    def product_solve(self, sigma, rhs):
        """Solve ``prod_r (I - sigma L_r) x = rhs`` factor by factor.

        Raises
        ------
        SingularFactor
            With ``part_index`` set to the failing factor.
        """
        x = self._check(rhs)
        if sigma == 0.0:
            return x.copy()
        for r, p in enumerate(self.parts):
            try:
                x = p.shifted_solve(sigma, x)
            except SingularFactor as exc:
                raise SingularFactor(f"factor {r + 1} of {self.R}: {exc}", part_index=r) from exc
        return x

    def tilde_apply(self, sigma, v):
        """Apply ``Lt(sigma)``, defined by ``I - sigma Lt = prod_r (I - sigma L_r)``.

        Uses the accumulation ``d <- d + L_r (v - sigma d)`` over ``r = R, ..., 1``,
        which never forms ``(v - prod v) / sigma`` and is exact at ``sigma = 0``.
        """
        v = self._check(v)
        d = np.zeros_like(v)
        for p in reversed(self.parts):
            d = d + p.apply(v - sigma * d)
        return d

    def to_dense(self):
        return sum(p.to_dense() for p in self.parts)

    def tilde_dense(self, sigma):
        """Dense ``Lt(sigma)`` built column by column from :meth:`tilde_apply`."""
        eye = np.eye(self.n)
        return np.column_stack([self.tilde_apply(sigma, e) for e in eye])


def subset_expansion(parts, sigma):
    """Dense ``Lt(sigma)`` from the expanded product.

    ``Lt = sum over nonempty ordered subsets S of (-sigma)**(|S|-1) L_S`` where
    ``L_S`` multiplies the parts of ``S`` in ascending index order.  Cost grows
    as ``2**R``; intended as a reference for small ``R``.
    """
    mats = [p.to_dense() if isinstance(p, LinearPart) else np.asarray(p, dtype=float)
            for p in parts]
    n = mats[0].shape[0]
    out = np.zeros((n, n))
    for k in range(1, len(mats) + 1):
        for subset in itertools.combinations(range(len(mats)), k):
            prod = np.eye(n)
            for r in subset:
                prod = prod @ mats[r]
            out += (-sigma) ** (k - 1) * prod
    return out


def as_operator(obj, n=None) -> AmfOperator:
    """Coerce a part, matrix, operator or ``None`` (zero, needs ``n``) to an AmfOperator."""
    if isinstance(obj, AmfOperator):
        return obj
    if isinstance(obj, LinearPart):
        return AmfOperator([obj])
    if obj is None:
        if n is None:
            raise ValueError("a zero operator needs its dimension")
        return AmfOperator([DiagonalLinearPart(np.zeros(n))])
    return AmfOperator([DenseLinearPart(obj)])


def zero_operator(n) -> AmfOperator:
    return as_operator(None, n)

"""Coefficient tableaux for LIRK-W methods.

A tableau stores the explicit coupling ``a`` (strictly lower triangular), the
linear-term coupling ``gamma`` (lower triangular, diagonal included) and the two
weight vectors ``b`` and ``g``.  The implicit Runge-Kutta coefficients follow as
``a_hat = a + gamma`` and ``b_hat = b + g``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateParameters, TableauFormatError

VALIDATION_TOL = 1e-12


class MethodType(enum.IntEnum):
    TYPE1 = 1
    TYPE2 = 2
    TYPE3 = 3


def _frozen(x, ndim):
    arr = np.array(x, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Tableau:
    """Immutable LIRK-W coefficient set.

    Parameters
    ----------
    a : (s, s) array_like
        Explicit stage coupling, strictly lower triangular.
    gamma : (s, s) array_like
        Linear-term coupling ``a_hat - a``, lower triangular.
    b : (s,) array_like
        Explicit weights.
    g : (s,) array_like
        Linear-term weights ``b_hat - b``.
    method_type : MethodType
        Formulation the coefficients were designed for.
    name : str
        Label used in reports.
    """

    a: np.ndarray
    gamma: np.ndarray
    b: np.ndarray
    g: np.ndarray
    method_type: MethodType = MethodType.TYPE1
    name: str = field(default="custom")

    def __post_init__(self):
        object.__setattr__(self, "a", _frozen(self.a, 2))
        object.__setattr__(self, "gamma", _frozen(self.gamma, 2))
        object.__setattr__(self, "b", _frozen(self.b, 1))
        object.__setattr__(self, "g", _frozen(self.g, 1))
        object.__setattr__(self, "method_type", MethodType(self.method_type))
        s = self.b.shape[0]
        if s < 1:
            raise ValueError("a tableau needs at least one stage")
        for nm, arr, shape in (("a", self.a, (s, s)), ("gamma", self.gamma, (s, s)),
                               ("g", self.g, (s,))):
            if arr.shape != shape:
                raise ValueError(f"{nm} has shape {arr.shape}, expected {shape}")

    @property
    def s(self) -> int:
        return self.b.shape[0]

    @property
    def a_hat(self) -> np.ndarray:
        return self.a + self.gamma

    @property
    def b_hat(self) -> np.ndarray:
        return self.b + self.g

    @property
    def c(self) -> np.ndarray:
        """Stage abscissae, the row sums of ``a``."""
        return self.a.sum(axis=1)

    @property
    def gamma_diag(self) -> np.ndarray:
        return np.diag(self.gamma).copy()

    def replace(self, **changes) -> "Tableau":
        """Return a copy with some fields swapped out (arrays are copied)."""
        kw = dict(a=self.a.copy(), gamma=self.gamma.copy(), b=self.b.copy(),
                  g=self.g.copy(), method_type=self.method_type, name=self.name)
        kw.update(changes)
        return Tableau(**kw)

    def __repr__(self):
        return f"Tableau(name={self.name!r}, type={int(self.method_type)}, s={self.s})"


def table1_type1() -> Tableau:
    """Five-stage, third-order, stiffly accurate type-1 method."""
    a = [
        [0.0, 0.0, 0.0, 0.0, 0.0],
        [0.520300000000000, 0.0, 0.0, 0.0, 0.0],
        [0.026500000000000, 0.938000000000000, 0.0, 0.0, 0.0],
        [0.122175553766880, 0.105600000000000, 0.018300000000000, 0.0, 0.0],
        [-0.033950868284890, 0.218016324016351, 0.258600000000000, 0.557334544268539, 0.0],
    ]
    gamma = [
        [0.0, 0.0, 0.0, 0.0, 0.0],
        [-0.520300000000000, 0.520300000000000, 0.0, 0.0, 0.0],
        [0.911500000000000, -1.876000000000000, 0.964500000000000, 0.0, 0.0],
        [-0.401069249711528, 0.663393695944647, -0.508400000000000, 0.246075553766880, 0.0],
        [-0.155925222099085, -0.084089256959580, -1.070724285228281, 0.310738764286946, 1.0],
    ]
    b = [-0.033950868284890, 0.218016324016351, 0.258600000000000, 0.557334544268539, 0.0]
    g = [-0.155925222099085, -0.084089256959580, -1.070724285228281, 0.310738764286946, 1.0]
    return Tableau(a, gamma, b, g, MethodType.TYPE1, name="table1")


def stiff_limit_stages(a_hat) -> np.ndarray:
    """Limits of the stage values of ``Y = 1 + z A_hat Y`` as ``z -> -inf``.

    An explicit first stage keeps ``Y_1 = 1``; every later stage needs a nonzero
    diagonal.  For a stiffly accurate method the last entry is ``R(-inf)``.
    """
    a_hat = np.asarray(a_hat, dtype=float)
    s = a_hat.shape[0]
    y = np.empty(s)
    for i in range(s):
        if a_hat[i, i] == 0.0:
            if i:
                raise ValueError(f"stage {i + 1} is explicit; its stiff limit is unbounded")
            y[i] = 1.0
        else:
            y[i] = -(a_hat[i, :i] @ y[:i]) / a_hat[i, i]
    return y


def table2_type2(gam: float, gam54: float, a43: float, gam43=None) -> Tableau:
    """Five-stage, third-order, stiffly accurate type-2 family.

    Parameters
    ----------
    gam : float
        Common diagonal ``gamma_{i,i}`` for stages 2..5 (stage 1 is explicit).
    gam54 : float
        Free entry ``gamma_{5,4}``.
    a43 : float
        Free entry ``a_{4,3}``.
    gam43 : float, optional
        Free entry ``gamma_{4,3}``.  The third-order conditions hold for any
        value.  By default it is chosen so that the stability function with
        exact ``L`` vanishes at ``z -> -inf``; if that is impossible 0 is used.

    Notes
    -----
    ``a_{4,2}`` is taken as ``(2/3)(1 - 3 a43)``; this is the only sign for which
    the ``b a c`` and ``g a c`` conditions hold for every ``a43``.

    Raises
    ------
    DegenerateParameters
        If ``gam == 0`` or ``5 gam + 2 gam54`` vanishes.
    """
    den = 5.0 * gam + 2.0 * gam54
    if gam == 0.0 or abs(den) < 1e-14 * max(abs(gam), abs(gam54), 1.0):
        raise DegenerateParameters(
            f"degenerate type-2 parameters: gam={gam!r}, 5*gam + 2*gam54 = {den!r}")

    a32 = (9.0 * gam + 2.0 * gam54) / (3.0 * den)
    a42 = (2.0 / 3.0) * (1.0 - 3.0 * a43)
    a = np.zeros((5, 5))
    a[1, 0] = 1.0 / 6.0
    a[2, 0] = 1.0 / 3.0 - a32
    a[2, 1] = a32
    a[3, 0] = 0.5 - a42 - a43
    a[3, 1] = a42
    a[3, 2] = a43
    a[4, :] = [1.0, -1.5, 0.0, 1.5, 0.0]

    q = 2.0 * (3.0 * gam**2 + gam * gam54) / den

    def build_gamma(g43):
        gamma = np.zeros((5, 5))
        gamma[1, :2] = [-gam, gam]
        gamma[2, :3] = [q - gam, -q, gam]
        gamma[3, :4] = [2.0 * (gam + g43) - gam - g43, -2.0 * (gam + g43), g43, gam]
        gamma[4, :] = [0.0, 4.0 * gam + gam54, -5.0 * gam - 2.0 * gam54, gam54, gam]
        return gamma

    if gam43 is None:
        # R(-inf) is affine in gamma_{4,3}
        r0 = stiff_limit_stages(a + build_gamma(0.0))[-1]
        r1 = stiff_limit_stages(a + build_gamma(1.0))[-1]
        gam43 = -r0 / (r1 - r0) if abs(r1 - r0) > 1e-12 * max(abs(r0), 1.0) else 0.0
    gam43 = float(gam43)
    gamma = build_gamma(gam43)

    return Tableau(a, gamma, a[4].copy(), gamma[4].copy(), MethodType.TYPE2,
                   name=f"table2(gam={gam!r},gam54={gam54!r},a43={a43!r},gam43={gam43!r})")


# -- structural validation ---------------------------------------------------

TRIANGULAR = "triangular"
STIFFLY_ACCURATE = "stiffly_accurate"
ROW_SUM = "row_sum"
TYPE1_DIAGONAL = "type1_diagonal"
TYPE2_DIAGONAL = "type2_diagonal"

TYPE1_FLAGS = (TRIANGULAR, STIFFLY_ACCURATE, ROW_SUM, TYPE1_DIAGONAL)
TYPE2_FLAGS = (TRIANGULAR, STIFFLY_ACCURATE, ROW_SUM, TYPE2_DIAGONAL)


def _violation(t: Tableau, flag: str) -> float:
    if flag == TRIANGULAR:
        return float(max(np.abs(np.triu(t.a)).max(), np.abs(np.triu(t.gamma, 1)).max()))
    if flag == STIFFLY_ACCURATE:
        return float(max(np.abs(t.b - t.a[-1]).max(), np.abs(t.g - t.gamma[-1]).max()))
    if flag == ROW_SUM:
        return float(max(np.abs(t.gamma.sum(axis=1)).max(), abs(t.g.sum())))
    if flag == TYPE1_DIAGONAL:
        return float(np.abs(np.diag(t.gamma) - t.c).max())
    if flag == TYPE2_DIAGONAL:
        d = np.diag(t.gamma)
        return float(max(abs(d[0]), np.abs(d[1:] - d[1]).max(initial=0.0)))
    raise ValueError(f"unknown constraint {flag!r}")


@dataclass(frozen=True)
class ValidationReport:
    entries: tuple  # of (constraint, max_violation)
    tol: float = VALIDATION_TOL

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for _, v in self.entries)

    def violation(self, constraint: str) -> float:
        return dict(self.entries)[constraint]

    def failures(self):
        return [(c, v) for c, v in self.entries if v > self.tol]


def validate(t: Tableau, flags=None, tol: float = VALIDATION_TOL) -> ValidationReport:
    """Measure the largest violation of each requested structural constraint.

    ``flags`` defaults to the set matching ``t.method_type`` (type 3 gets the
    type-1 set without the diagonal rule).  Violations are reported, never raised.
    """
    if flags is None:
        flags = {MethodType.TYPE1: TYPE1_FLAGS,
                 MethodType.TYPE2: TYPE2_FLAGS,
                 MethodType.TYPE3: (TRIANGULAR, STIFFLY_ACCURATE, ROW_SUM)}[t.method_type]
    elif isinstance(flags, str):
        flags = (flags,)
    return ValidationReport(tuple((f, _violation(t, f)) for f in flags), tol)


# -- plain-text serialization ------------------------------------------------

_HEADER = "lirkw-tableau v1"


def _fmt_row(row) -> str:
    return " ".join(format(float(x), ".17g") for x in row)


def dumps(t: Tableau) -> str:
    """Serialize to the ``lirkw-tableau v1`` text format."""
    lines = [f"{_HEADER} type={int(t.method_type)} s={t.s}"]
    lines += [_fmt_row(r) for r in t.a]
    lines += [_fmt_row(r) for r in t.gamma]
    lines.append(_fmt_row(t.b))
    lines.append(_fmt_row(t.g))
    return "\n".join(lines) + "\n"


def loads(text: str, name: str = "file") -> Tableau:
    """Parse the ``lirkw-tableau v1`` text format.

    Blank lines and lines starting with ``#`` are ignored.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith(_HEADER):
        raise TableauFormatError("missing 'lirkw-tableau v1' header")
    try:
        meta = dict(tok.split("=", 1) for tok in lines[0][len(_HEADER):].split())
        mtype = MethodType(int(meta["type"]))
        s = int(meta["s"])
    except (KeyError, ValueError) as exc:
        raise TableauFormatError(f"bad header line: {lines[0]!r}") from exc
    body = lines[1:]
    if len(body) != 2 * s + 2:
        raise TableauFormatError(f"expected {2 * s + 2} coefficient rows, got {len(body)}")
    try:
        rows = [[float(x) for x in ln.split()] for ln in body]
    except ValueError as exc:
        raise TableauFormatError(str(exc)) from exc
    if any(len(r) != s for r in rows):
        raise TableauFormatError(f"every row must hold {s} values")
    try:
        return Tableau(rows[:s], rows[s:2 * s], rows[2 * s], rows[2 * s + 1], mtype, name=name)
    except ValueError as exc:
        raise TableauFormatError(str(exc)) from exc


def load(path) -> Tableau:
    with open(path) as fh:
        return loads(fh.read(), name=str(path))


def dump(t: Tableau, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(t))

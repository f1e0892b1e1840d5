"""LW-trees and order conditions for LIRK-W methods.

Trees carry three vertex colors:

* ``meagre`` -- an occurrence of ``F`` or one of its derivatives; any number of
  children, stored in canonical order;
* ``fat`` -- an application of the linear operator ``L``; at most one child
  (a childless fat vertex stands for ``L y``);
* ``square`` -- one time derivative of the fat vertex it ends in; exactly one
  child, which is square or fat.

A chain of ``p`` squares ending in a fat vertex is written ``θp[child]``.  The
bracket notation used throughout is ``[c1, c2]_.`` for a meagre vertex,
``[c]_o`` for a fat vertex and ``θp[c]`` for a square chain; an empty list
``[ ]`` marks a leaf.
"""
from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np

from .errors import FamilyMismatch, NotAMeagreTree
from .tableau import MethodType, Tableau

MEAGRE, FAT, SQUARE = "meagre", "fat", "square"
_RANK = {MEAGRE: 0, FAT: 1, SQUARE: 2}

FAMILIES = ("T", "LW1", "LW2", "LW3")
VERIFY_TOL = 1e-10


@dataclass(frozen=True)
class LWTree:
    color: str
    children: tuple = ()
    order: int = field(init=False, compare=False, repr=False)
    key: tuple = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.color not in _RANK:
            raise ValueError(f"unknown vertex color {self.color!r}")
        kids = tuple(sorted(self.children, key=lambda t: t.key))
        if self.color == FAT and len(kids) > 1:
            raise ValueError("fat vertices are singly branched")
        if self.color == SQUARE:
            if len(kids) != 1 or kids[0].color == MEAGRE:
                raise ValueError("a square vertex needs exactly one square or fat child")
        object.__setattr__(self, "children", kids)
        object.__setattr__(self, "order", 1 + sum(k.order for k in kids))
        object.__setattr__(self, "key", (_RANK[self.color], self.order, tuple(k.key for k in kids)))

    def __lt__(self, other):
        return self.key < other.key

    @property
    def rho(self) -> int:
        return self.order

    def vertices(self):
        yield self
        for k in self.children:
            yield from k.vertices()

    @property
    def is_meagre(self) -> bool:
        return all(v.color == MEAGRE for v in self.vertices())

    def families(self):
        """Names of the tree families that contain this tree."""
        out = ["LW1"]
        if self.color != SQUARE:
            out += ["LW2", "LW3"]
        if self.is_meagre:
            out.insert(0, "T")
        return tuple(out)

    def __str__(self):
        return to_bracket(self)


def meagre(*children) -> LWTree:
    return LWTree(MEAGRE, tuple(children))


def fat(child=None) -> LWTree:
    return LWTree(FAT, () if child is None else (child,))


def theta(p: int, child=None) -> LWTree:
    """``p`` square vertices ending in a fat vertex with optional ``child``."""
    if p < 1:
        raise ValueError("theta needs p >= 1")
    t = fat(child)
    for _ in range(p):
        t = LWTree(SQUARE, (t,))
    return t


def _unchain(t: LWTree):
    """Split a square-rooted tree into (p, child of the terminal fat vertex)."""
    p = 0
    while t.color == SQUARE:
        p += 1
        t = t.children[0]
    return p, (t.children[0] if t.children else None)


def to_bracket(t: LWTree) -> str:
    if t.color == SQUARE:
        p, child = _unchain(t)
        return f"θ{p}[{' ' if child is None else to_bracket(child)}]"
    inner = ", ".join(to_bracket(k) for k in t.children) or " "
    return f"[{inner}]_{'.' if t.color == MEAGRE else 'o'}"


_TOKEN = re.compile(r"\s*(θ\d+|theta\d+|\[|\]_\.|\]_o|\]|,)")


def parse_bracket(text: str) -> LWTree:
    """Inverse of :func:`to_bracket` (``theta2[...]`` is accepted for ``θ2[...]``)."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse tree at {text[pos:]!r}")
        tokens.append(m.group(1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def parse(i):
        tok = tokens[i]
        if tok.startswith(("θ", "theta")):
            p = int(tok.lstrip("θtheta"))
            if tokens[i + 1] != "[":
                raise ValueError("expected '[' after square chain")
            kids, i = parse_list(i + 2)
            if tokens[i] != "]":
                raise ValueError("square chain must close with ']'")
            if len(kids) > 1:
                raise ValueError("square chains carry at most one child")
            return theta(p, kids[0] if kids else None), i + 1
        if tok != "[":
            raise ValueError(f"unexpected token {tok!r}")
        kids, i = parse_list(i + 1)
        close = tokens[i]
        if close == "]_.":
            return meagre(*kids), i + 1
        if close == "]_o":
            if len(kids) > 1:
                raise ValueError("fat vertices are singly branched")
            return fat(kids[0] if kids else None), i + 1
        raise ValueError(f"unexpected closing token {close!r}")

    def parse_list(i):
        kids = []
        if tokens[i].startswith("]"):
            return kids, i
        while True:
            k, i = parse(i)
            kids.append(k)
            if tokens[i] == ",":
                i += 1
                continue
            return kids, i

    tree, end = parse(0)
    if end != len(tokens):
        raise ValueError("trailing tokens after tree")
    return tree


# -- enumeration -------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _trees_of_order(n: int) -> tuple:
    """All LW1 trees with exactly ``n`` vertices, canonical and sorted."""
    if n < 1:
        return ()
    out = set()
    if n == 1:
        out.add(meagre())
        out.add(fat())
    else:
        for child in _trees_of_order(n - 1):
            out.add(fat(child))
            if child.color != MEAGRE:
                out.add(LWTree(SQUARE, (child,)))
        for kids in _child_multisets(n - 1):
            out.add(meagre(*kids))
    return tuple(sorted(out))


def _child_multisets(total: int):
    """Multisets of LW1 trees whose vertex counts sum to ``total``."""
    pool = [t for k in range(1, total + 1) for t in _trees_of_order(k)]
    for m in range(1, total + 1):
        for combo in combinations_with_replacement(range(len(pool)), m):
            if sum(pool[i].order for i in combo) == total:
                yield tuple(pool[i] for i in combo)


def in_family(t: LWTree, family: str) -> bool:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    return family in t.families()


def enumerate_trees(family: str = "LW1", max_order: int = 3) -> list:
    """All trees of ``family`` with at most ``max_order`` vertices.

    Trees come ordered by vertex count, then canonical order.
    """
    if not 1 <= max_order <= 6:
        raise ValueError("max_order must lie in 1..6")
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    return [t for n in range(1, max_order + 1) for t in _trees_of_order(n) if in_family(t, family)]


def density(t: LWTree) -> int:
    """Butcher density: vertex count times the densities of the root's subtrees."""
    if not t.is_meagre:
        raise NotAMeagreTree(f"{to_bracket(t)} contains fat or square vertices")
    out = t.order
    for k in t.children:
        out *= density(k)
    return out


def target(t: LWTree) -> Fraction:
    """Right-hand side of the order condition: ``1/density`` on T, else 0."""
    return Fraction(1, density(t)) if t.is_meagre else Fraction(0)


# -- numeric evaluation ------------------------------------------------------

def _weights(tb: Tableau, t: LWTree, mtype: int):
    """Vector over stages ``j`` of the inner weight attached to subtree ``t``."""
    A, G = tb.a, tb.gamma
    d = np.diag(G)
    if t.color == MEAGRE:
        prod = np.ones(tb.s)
        for k in t.children:
            prod = prod * _weights(tb, k, mtype)
        return A @ prod
    if t.color == FAT:
        w = _weights(tb, t.children[0], mtype) if t.children else np.ones(tb.s)
        return G @ w
    p, child = _unchain(t)
    w = _weights(tb, child, mtype) if child is not None else np.ones(tb.s)
    if mtype == 1:
        return G @ (d**p * w)
    if mtype == 2:
        return d ** (p + 1) * w
    return d**p * (G @ w)


def phi_vector(tb: Tableau, t: LWTree, mtype=None) -> np.ndarray:
    """Per-stage terms whose sum is the left-hand side of the order condition."""
    mtype = int(tb.method_type if mtype is None else mtype)
    if mtype not in (1, 2, 3):
        raise ValueError(f"method type must be 1, 2 or 3, got {mtype!r}")
    if t.color == MEAGRE:
        out = tb.b.copy()
        for k in t.children:
            out = out * _weights(tb, k, mtype)
        return out
    if t.color == FAT:
        w = _weights(tb, t.children[0], mtype) if t.children else np.ones(tb.s)
        return tb.g * w
    if mtype != 1:
        raise FamilyMismatch(f"square-rooted tree {to_bracket(t)} is not in LW{mtype}")
    p, child = _unchain(t)
    w = _weights(tb, child, mtype) if child is not None else np.ones(tb.s)
    return tb.g * np.diag(tb.gamma) ** p * w


def phi_sum(tb: Tableau, t: LWTree, mtype=None) -> float:
    """Left-hand side ``sum_j Phi_j(t)`` of the order condition for ``t``."""
    return float(phi_vector(tb, t, mtype).sum())


# -- catalogue of the 23 trees up to order three -----------------------------

_CATALOGUE = (
    "[ ]_.", "[ ]_o",
    "[[ ]_.]_.", "[[ ]_o]_.", "[[ ]_.]_o", "[[ ]_o]_o", "θ1[ ]",
    "[[ ]_., [ ]_.]_.", "[[ ]_o, [ ]_.]_.", "[[ ]_o, [ ]_o]_.",
    "[[[ ]_.]_.]_.", "[[[ ]_o]_.]_.", "[[[ ]_o]_o]_.", "[[[ ]_.]_o]_.",
    "[[[ ]_.]_o]_o", "[[[ ]_.]_.]_o", "[[[ ]_o]_.]_o", "[[[ ]_o]_o]_o",
    "θ2[ ]", "[θ1[ ]]_o", "θ1[[ ]_o]", "θ1[[ ]_.]", "[θ1[ ]]_.",
)
TAU = {i + 1: parse_bracket(s) for i, s in enumerate(_CATALOGUE)}
_LABEL = {t: i for i, t in TAU.items()}


def tau(i: int) -> LWTree:
    """Tree number ``i`` (1..23) of the standard order-three listing."""
    return TAU[i]


def label_of(t: LWTree):
    """Standard label ``"τi"`` for trees of order <= 3, else the bracket string."""
    i = _LABEL.get(t)
    return f"τ{i}" if i is not None else to_bracket(t)


def elementary_differential(t: LWTree) -> str:
    """Human-readable elementary differential, e.g. ``f'(L f)``."""
    if t.color == MEAGRE:
        if not t.children:
            return "f"
        n = len(t.children)
        args = ", ".join(elementary_differential(k) for k in t.children)
        return f"f{chr(39) * n}({args})"
    if t.color == FAT:
        return "L " + (elementary_differential(t.children[0]) if t.children else "y")
    p, child = _unchain(t)
    return f"L{chr(39) * p} " + (elementary_differential(child) if child else "y")


@dataclass(frozen=True)
class OrderConditionRow:
    tree: LWTree
    label: str
    target: Fraction
    value: float
    residual: float
    families: tuple

    def passed(self, tol=VERIFY_TOL) -> bool:
        return abs(self.residual) <= tol


def _row(tb, t, mtype):
    val = phi_sum(tb, t, mtype)
    tgt = target(t)
    return OrderConditionRow(t, label_of(t), tgt, val, val - float(tgt), t.families())


def _sort_key(t):
    i = _LABEL.get(t)
    return (t.order, 0, i) if i is not None else (t.order, 1, t.key)


def verify_order(tb: Tableau, mtype=None, p: int = 3) -> list:
    """One order-condition row per tree of the family ``LW{mtype}`` with ``rho <= p``."""
    mtype = int(tb.method_type if mtype is None else mtype)
    trees = sorted(enumerate_trees(f"LW{mtype}", p), key=_sort_key)
    return [_row(tb, t, mtype) for t in trees]


def all_passed(rows, tol=VERIFY_TOL) -> bool:
    return all(r.passed(tol) for r in rows)


def max_residual(rows) -> float:
    return max((abs(r.residual) for r in rows), default=0.0)


REDUCED_TYPE1 = (1, 3, 5, 8, 11, 14, 15, 16, 22)
# The last two rows of the type-2 set are the trees with differentials L L' y
# and f'(L' y).
REDUCED_TYPE2 = (1, 3, 5, 8, 11, 14, 15, 16, 20, 23)


def reduced_trees(mtype: int) -> list:
    ids = {1: REDUCED_TYPE1, 2: REDUCED_TYPE2}[int(mtype)]
    return [TAU[i] for i in ids]


def reduced_conditions(mtype: int, tb: Tableau = None) -> list:
    """Reduced condition sets for tableaux built with the simplifying assumptions.

    Nine rows for type 1, ten for type 2.  Without a tableau the rows carry
    ``nan`` values and residuals (targets only).
    """
    rows = []
    for t in reduced_trees(mtype):
        if tb is None:
            rows.append(OrderConditionRow(t, label_of(t), target(t), float("nan"),
                                          float("nan"), t.families()))
        else:
            rows.append(_row(tb, t, mtype))
    return rows

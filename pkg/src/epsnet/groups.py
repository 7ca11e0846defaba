"""Planar rotations, hyperbolic rotations, translations and their compositions.

Group elements act on points numerically and on nets symbolically.  Angles
and offsets may be plain reals or scalar nets in eps; in the latter case the
element depends on the scale parameter and ``eps`` must be supplied when the
element is applied numerically.  Angles produced by per-eps factorization are
tabulated nets and only support the numeric path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import expr as ex
from .colombeau import CompactBox, Net, TabulatedNet, VectorNet

Angle = Union[float, Net, TabulatedNet]


class TabulatedAngleError(TypeError):
    """Raised when a symbolic form is requested from a tabulated quantity."""


def _scalar_at(value: Angle, eps: Optional[float]) -> float:
    if isinstance(value, (Net, TabulatedNet)):
        if eps is None:
            raise ValueError("eps is required: element carries generalized scalars")
        return value.value_at(eps)
    return float(value)


def _scalar_expr(value: Angle) -> ex.Expr:
    if isinstance(value, TabulatedNet):
        raise TabulatedAngleError("tabulated scalars have no closed form")
    if isinstance(value, Net):
        return value.body
    return ex.Const(float(value))


def _scalar_json(value: Angle):
    if isinstance(value, Net):
        return ex.to_text(value.body)
    if isinstance(value, TabulatedNet):
        return {"table": [[e, v] for e, v in value.table]}
    return ex.format_const(float(value))


def _depends_on_eps(value: Angle) -> bool:
    return isinstance(value, (Net, TabulatedNet))


@dataclass(frozen=True)
class PlanarFactor:
    """One rotation or boost acting in the (e_i, e_j) coordinate plane."""

    kind: str  # "rotation" | "boost"
    i: int
    j: int
    theta: Angle

    def __post_init__(self):
        if self.kind not in ("rotation", "boost"):
            raise ValueError(f"unknown factor kind {self.kind!r}")
        if not 1 <= self.i < self.j:
            raise ValueError(f"need 1 <= i < j, got ({self.i}, {self.j})")

    @property
    def is_generalized(self) -> bool:
        return _depends_on_eps(self.theta)

    def theta_at(self, eps: Optional[float] = None) -> float:
        return _scalar_at(self.theta, eps)

    def theta_expr(self) -> ex.Expr:
        return _scalar_expr(self.theta)

    def _cs(self, eps: Optional[float]):
        th = self.theta_at(eps)
        if self.kind == "rotation":
            return math.cos(th), math.sin(th)
        return math.cosh(th), math.sinh(th)

    def matrix(self, dimension: int, eps: Optional[float] = None) -> np.ndarray:
        if self.j > dimension:
            raise ValueError(f"factor axes ({self.i},{self.j}) exceed dimension {dimension}")
        c, s = self._cs(eps)
        M = np.eye(dimension)
        ii, jj = self.i - 1, self.j - 1
        if self.kind == "rotation":
            M[ii, ii], M[ii, jj] = c, -s
            M[jj, ii], M[jj, jj] = s, c
        else:
            M[ii, ii], M[ii, jj] = c, s
            M[jj, ii], M[jj, jj] = s, c
        return M

    def apply_points(self, X: np.ndarray, eps: Optional[float] = None) -> np.ndarray:
        c, s = self._cs(eps)
        ii, jj = self.i - 1, self.j - 1
        Y = X.copy()
        if self.kind == "rotation":
            Y[:, ii] = c * X[:, ii] - s * X[:, jj]
        else:
            Y[:, ii] = c * X[:, ii] + s * X[:, jj]
        Y[:, jj] = s * X[:, ii] + c * X[:, jj]
        return Y

    def compose_exprs(self, coords: Sequence[ex.Expr]) -> list:
        """Left-compose this factor onto coordinate expressions."""
        th = self.theta_expr()
        ii, jj = self.i - 1, self.j - 1
        out = list(coords)
        if self.kind == "rotation":
            c, s = ex.c_call("cos", th), ex.c_call("sin", th)
            out[ii] = ex.c_sub(ex.c_mul(c, coords[ii]), ex.c_mul(s, coords[jj]))
        else:
            c, s = ex.c_call("cosh", th), ex.c_call("sinh", th)
            out[ii] = ex.c_add(ex.c_mul(c, coords[ii]), ex.c_mul(s, coords[jj]))
        out[jj] = ex.c_add(ex.c_mul(s, coords[ii]), ex.c_mul(c, coords[jj]))
        return out

    def inverse(self) -> "PlanarFactor":
        th = self.theta
        if isinstance(th, Net):
            inv = Net(ex.c_neg(th.body), 0)
        elif isinstance(th, TabulatedNet):
            inv = TabulatedNet(tuple((e, -v) for e, v in th.table))
        else:
            inv = -float(th)
        return PlanarFactor(self.kind, self.i, self.j, inv)

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "i": self.i, "j": self.j, "theta": _scalar_json(self.theta)}


@dataclass(frozen=True)
class Translation:
    """Translation by a vector of reals or scalar nets."""

    offset: tuple

    def __post_init__(self):
        object.__setattr__(
            self,
            "offset",
            tuple(o if isinstance(o, (Net, TabulatedNet)) else float(o) for o in self.offset),
        )

    @property
    def is_generalized(self) -> bool:
        return any(_depends_on_eps(o) for o in self.offset)

    def offset_at(self, eps: Optional[float] = None) -> np.ndarray:
        return np.array([_scalar_at(o, eps) for o in self.offset])

    def apply_points(self, X: np.ndarray, eps: Optional[float] = None) -> np.ndarray:
        return X + self.offset_at(eps)[None, :]

    def compose_exprs(self, coords: Sequence[ex.Expr]) -> list:
        return [ex.c_add(c, _scalar_expr(o)) for c, o in zip(coords, self.offset)]

    def inverse(self) -> "Translation":
        out = []
        for o in self.offset:
            if isinstance(o, Net):
                out.append(Net(ex.c_neg(o.body), 0))
            elif isinstance(o, TabulatedNet):
                out.append(TabulatedNet(tuple((e, -v) for e, v in o.table)))
            else:
                out.append(-float(o))
        return Translation(tuple(out))

    def to_json_dict(self) -> dict:
        return {"kind": "translation", "offset": [_scalar_json(o) for o in self.offset]}


class GroupElement:
    """A composite transformation of R^d.

    Holds exactly one of: an ordered factor list (applied right to left), an
    explicit square matrix (entries reals or scalar nets), or explicit
    coordinate expressions.  Elements are immutable and safe to share.
    """

    __slots__ = ("dimension", "factors", "matrix", "coords")

    def __init__(self, dimension: int, factors=None, matrix=None, coords=None):
        given = sum(x is not None for x in (factors, matrix, coords))
        if given != 1:
            raise ValueError("provide exactly one of factors, matrix, coords")
        self.dimension = int(dimension)
        self.factors = tuple(factors) if factors is not None else None
        self.coords = tuple(coords) if coords is not None else None
        if matrix is not None:
            rows = tuple(tuple(v) for v in matrix)
            if len(rows) != self.dimension or any(len(r) != self.dimension for r in rows):
                raise ValueError("matrix must be square of size dimension")
            self.matrix = rows
        else:
            self.matrix = None
        if self.factors is not None:
            for f in self.factors:
                if isinstance(f, PlanarFactor) and f.j > self.dimension:
                    raise ValueError(f"factor axes exceed dimension {self.dimension}")
                if isinstance(f, Translation) and len(f.offset) != self.dimension:
                    raise ValueError("translation offset length must equal dimension")
        if self.coords is not None and len(self.coords) != self.dimension:
            raise ValueError("need one coordinate expression per axis")

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, dimension: int) -> "GroupElement":
        return cls(dimension, factors=())

    @classmethod
    def from_factors(cls, dimension: int, factors) -> "GroupElement":
        return cls(dimension, factors=tuple(factors))

    @classmethod
    def rotation(cls, dimension: int, i: int, j: int, theta: Angle) -> "GroupElement":
        return cls(dimension, factors=(PlanarFactor("rotation", i, j, theta),))

    @classmethod
    def boost(cls, dimension: int, i: int, j: int, theta: Angle) -> "GroupElement":
        return cls(dimension, factors=(PlanarFactor("boost", i, j, theta),))

    @classmethod
    def translation(cls, dimension: int, offset) -> "GroupElement":
        return cls(dimension, factors=(Translation(tuple(offset)),))

    @classmethod
    def from_matrix(cls, matrix) -> "GroupElement":
        rows = [list(r) for r in matrix]
        return cls(len(rows), matrix=rows)

    @classmethod
    def from_coords(cls, dimension: int, coords) -> "GroupElement":
        return cls(dimension, coords=tuple(coords))

    # -- structure ----------------------------------------------------------

    @property
    def is_generalized(self) -> bool:
        if self.factors is not None:
            return any(f.is_generalized for f in self.factors)
        if self.matrix is not None:
            return any(_depends_on_eps(v) for row in self.matrix for v in row)
        return any("eps" in ex.variables(c) for c in self.coords)

    def compose(self, other: "GroupElement") -> "GroupElement":
        """self after other (apply ``other`` first)."""
        if self.dimension != other.dimension:
            raise ValueError("dimension mismatch")
        if self.factors is not None and other.factors is not None:
            return GroupElement(self.dimension, factors=self.factors + other.factors)
        inner = other.symbolic_coords()
        outer = self.symbolic_coords()
        mapping = {f"x{k + 1}": inner[k] for k in range(self.dimension)}
        return GroupElement.from_coords(
            self.dimension, tuple(ex.subst(c, mapping) for c in outer)
        )

    # -- numeric application ------------------------------------------------

    def matrix_at(self, eps: Optional[float] = None) -> np.ndarray:
        """Dense matrix of a linear element (factors without translations, or
        explicit matrix) at a given eps."""
        if self.matrix is not None:
            return np.array(
                [[_scalar_at(v, eps) for v in row] for row in self.matrix], dtype=float
            )
        if self.factors is None:
            raise TabulatedAngleError("coordinate-expression elements are not matrix-backed")
        M = np.eye(self.dimension)
        for f in self.factors:
            if isinstance(f, Translation):
                raise ValueError("element contains translations; use apply_points")
            M = M @ f.matrix(self.dimension, eps)
        return M

    def apply_points(self, X, eps: Optional[float] = None) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        squeeze = X.ndim == 1
        if squeeze:
            X = X[None, :]
        if X.shape[1] != self.dimension:
            raise ValueError(f"points have dimension {X.shape[1]}, element {self.dimension}")
        if self.factors is not None:
            Y = X
            for f in reversed(self.factors):
                Y = f.apply_points(Y, eps)
        elif self.matrix is not None:
            Y = X @ self.matrix_at(eps).T
        else:
            if eps is None:
                if self.is_generalized:
                    raise ValueError("eps is required: element depends on eps")
                eps = 0.5  # irrelevant placeholder, no eps in the expressions
            cols = [ex.eval_points(c, eps, X) for c in self.coords]
            Y = np.stack(cols, axis=1)
        return Y[0] if squeeze else Y

    def apply(self, x, eps: Optional[float] = None) -> np.ndarray:
        return self.apply_points(np.asarray(x, dtype=float), eps)

    # -- symbolic form ------------------------------------------------------

    def symbolic_coords(self) -> tuple:
        """Coordinate expressions of the full map, in x1..xd (and eps)."""
        identity = [ex.Var(f"x{k}") for k in range(1, self.dimension + 1)]
        if self.coords is not None:
            return self.coords
        if self.matrix is not None:
            out = []
            for row in self.matrix:
                acc = ex.Const(0.0)
                for k, entry in enumerate(row):
                    acc = ex.c_add(acc, ex.c_mul(_scalar_expr(entry), identity[k]))
                out.append(acc)
            return tuple(out)
        coords = identity
        for f in reversed(self.factors):
            coords = f.compose_exprs(coords)
        return tuple(coords)

    def coordinate_vector_net(self) -> VectorNet:
        return VectorNet(tuple(Net(c, self.dimension) for c in self.symbolic_coords()))

    def to_json_dict(self) -> dict:
        if self.matrix is not None:
            return {
                "matrix": [[_scalar_json(v) for v in row] for row in self.matrix],
                "dimension": self.dimension,
            }
        if self.coords is not None:
            return {
                "coords": [ex.to_text(c) for c in self.coords],
                "dimension": self.dimension,
            }
        return {
            "factors": [f.to_json_dict() for f in self.factors],
            "dimension": self.dimension,
        }


def element_from_json(data: dict) -> GroupElement:
    """Inverse of :meth:`GroupElement.to_json_dict` (numeric or expression
    valued entries; tabulated angles round-trip as tables)."""

    def scalar(v):
        if isinstance(v, dict) and "table" in v:
            return TabulatedNet(tuple((e, val) for e, val in v["table"]))
        if isinstance(v, (int, float)):
            return float(v)
        text = str(v)
        try:
            return float(text)
        except ValueError:
            return Net(ex.parse(text, 0), 0)

    if "matrix" in data:
        rows = [[scalar(v) for v in row] for row in data["matrix"]]
        return GroupElement.from_matrix(rows)
    if "coords" in data:
        d = int(data.get("dimension", len(data["coords"])))
        return GroupElement.from_coords(d, tuple(ex.parse(t, d) for t in data["coords"]))
    factors = []
    for f in data["factors"]:
        if f.get("kind") == "translation":
            factors.append(Translation(tuple(scalar(v) for v in f["offset"])))
        else:
            factors.append(PlanarFactor(f["kind"], int(f["i"]), int(f["j"]), scalar(f["theta"])))
    return GroupElement.from_factors(int(data["dimension"]), factors)


def apply(g: GroupElement, x, eps: Optional[float] = None):
    """Apply a group element to a point (numeric) or to a vector net
    (symbolic composition g o x)."""
    if isinstance(x, VectorNet):
        if len(x.components) != g.dimension:
            raise ValueError("vector net component count does not match element dimension")
        coords = g.symbolic_coords()
        mapping = {f"x{k + 1}": x.components[k].body for k in range(g.dimension)}
        d = x.dimension
        return VectorNet(tuple(Net(ex.subst(c, mapping), d) for c in coords))
    return g.apply_points(np.asarray(x, dtype=float), eps)


def compose_net(f: Net, g: GroupElement) -> Net:
    """Substitute the coordinate expressions of ``g`` into ``f``.

    Callers are responsible for the compact-boundedness of ``g`` on the boxes
    they use downstream; the verify pipelines check it strictly.
    """
    if g.dimension != f.dimension:
        raise ValueError("element dimension does not match net dimension")
    coords = g.symbolic_coords()
    mapping = {f"x{k + 1}": coords[k] for k in range(f.dimension)}
    return Net(ex.subst(f.body, mapping), f.dimension)


def group_law_check(kind: str, i: int, j: int, theta1: float, theta2: float, box: CompactBox) -> float:
    """Max lattice deviation between g_{t1+t2} and g_{t1} o g_{t2}."""
    d = box.dimension
    combined = PlanarFactor(kind, i, j, float(theta1) + float(theta2))
    first = PlanarFactor(kind, i, j, float(theta2))
    second = PlanarFactor(kind, i, j, float(theta1))
    X = box.lattice()
    lhs = combined.apply_points(X)
    rhs = second.apply_points(first.apply_points(X))
    if d == 0:
        return 0.0
    return float(np.max(np.linalg.norm(lhs - rhs, axis=1)))


@dataclass(frozen=True)
class CoordinateFlow:
    """A user-supplied one-parameter family given by coordinate expressions
    over x1..xd and the reserved parameter name ``theta``."""

    dimension: int
    templates: tuple

    @classmethod
    def parse(cls, texts, dimension: int) -> "CoordinateFlow":
        templates = tuple(ex.parse(t, dimension, extra_vars=("theta",)) for t in texts)
        return cls(dimension, templates)

    def element(self, theta: Angle) -> GroupElement:
        th = _scalar_expr(theta)
        coords = tuple(ex.subst(t, {"theta": th}) for t in self.templates)
        return GroupElement.from_coords(self.dimension, coords)


def planar_flow(kind: str, dimension: int, i: int, j: int):
    """The canonical rotation/boost flow as a theta -> GroupElement factory."""

    def factory(theta: Angle) -> GroupElement:
        return GroupElement.from_factors(dimension, (PlanarFactor(kind, i, j, theta),))

    return factory

"""Finite-dimensional rational normed spaces with polyhedral unit balls, and
linear maps between them."""

from fractions import Fraction
import os

from ..extdist import INF
from .linalg import dot, eye, mat, mat_scale, mat_sub, matmul, matvec, rank, vec
from .lp import solve_lp
from .polytope import ball_facets, facet_support


class BanError(ValueError):
    """Usage error for normed-space inputs."""


def max_dim():
    return int(os.environ.get("METCAT_MAX_DIM", "8"))


def max_generators():
    return int(os.environ.get("METCAT_MAX_GENS", "256"))


class PolyNormedSpace:
    """R^dim (rational points) normed by the ball conv(+-generators).

    ``facets`` may be supplied (checked against the generators) or computed
    later with ``ensure_facets``.
    """

    def __init__(self, dim, generators, facets=None, name=None, check=True):
        self.dim = int(dim)
        gens = []
        for g in generators:
            g = vec(g)
            if len(g) != self.dim:
                raise BanError(f"generator {g} has the wrong length for dim {self.dim}")
            if any(g) and g not in gens and tuple(-x for x in g) not in gens:
                gens.append(g)
        self.generators = tuple(gens)
        self.name = name
        self._norms = {}
        self._facets = None
        if check:
            if self.dim > max_dim():
                raise BanError(f"dimension {self.dim} exceeds METCAT_MAX_DIM={max_dim()}")
            if len(gens) > max_generators():
                raise BanError(f"{len(gens)} generators exceed METCAT_MAX_GENS={max_generators()}")
            if rank(list(gens), self.dim) != self.dim:
                raise BanError("generators do not span the space")
        if facets is not None:
            self.set_facets(facets)

    # -- facets -----------------------------------------------------------
    @property
    def facets(self):
        return self._facets

    def set_facets(self, facets):
        facets = tuple(vec(a) for a in facets)
        for a in facets:
            if len(a) != self.dim:
                raise BanError("facet functional has the wrong length")
            if any(abs(dot(a, g)) > 1 for g in self.generators):
                raise BanError(f"facet {a} cuts off a generator")
            sup = facet_support(a, self.generators)
            if len(sup) < self.dim or rank([s + (Fraction(1),) for s in sup],
                                           self.dim + 1) < self.dim:
                raise BanError(f"facet {a} is not supported by dim affinely independent generators")
        self._facets = facets

    def ensure_facets(self):
        if self._facets is None:
            self._facets = tuple(ball_facets(self.generators, self.dim))
        return self._facets

    # -- norm -------------------------------------------------------------
    def norm(self, x):
        return norm_eval(self, x)

    def zero(self):
        return tuple(Fraction(0) for _ in range(self.dim))

    def __eq__(self, other):
        if not isinstance(other, PolyNormedSpace):
            return NotImplemented
        return self.dim == other.dim and self.generators == other.generators

    def __hash__(self):
        return hash((self.dim, self.generators))

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<PolyNormedSpace{label} dim={self.dim} gens={len(self.generators)}>"

    def reduced(self):
        """Same ball, keeping only generators that are vertices."""
        keep = list(self.generators)
        i = 0
        while i < len(keep):
            others = keep[:i] + keep[i + 1:]
            if others and rank(others, self.dim) == self.dim and \
                    _norm_lp(others, self.dim, keep[i]) <= 1:
                keep = others
            else:
                i += 1
        out = PolyNormedSpace(self.dim, keep, name=self.name, check=False)
        return out


def zero_space(name=None):
    return PolyNormedSpace(0, (), name=name)


def l1_space(n, name=None):
    return PolyNormedSpace(n, eye(n), name=name)


def linf_space(n, name=None):
    from itertools import product as cart
    gens = [(Fraction(1),) + tuple(Fraction(s) for s in signs)
            for signs in cart((1, -1), repeat=n - 1)] if n else []
    return PolyNormedSpace(n, gens, name=name)


def _norm_lp(gens, dim, x):
    k = len(gens)
    A = [[g[r] for g in gens] + [-g[r] for g in gens] for r in range(dim)]
    res = solve_lp([1] * (2 * k), A, x)
    if not res.ok:
        raise BanError(f"vector {x} is outside the span of the generators")
    return res.value


def norm_eval(X, x):
    """Least t >= 0 with x in t * conv(+-generators), by exact LP."""
    x = vec(x)
    if len(x) != X.dim:
        raise BanError("vector length does not match the space")
    if not any(x):
        return Fraction(0)
    v = X._norms.get(x)
    if v is None:
        v = _norm_lp(X.generators, X.dim, x)
        X._norms[x] = v
    return v


class LinMap:
    """A rational matrix dom -> cod (rows indexed by cod coordinates)."""

    def __init__(self, dom, cod, matrix, name=None):
        M = mat(matrix)
        if len(M) != cod.dim or any(len(r) != dom.dim for r in M):
            raise BanError(f"matrix shape does not match {cod.dim}x{dom.dim}")
        self.dom, self.cod, self.matrix, self.name = dom, cod, M, name

    def __call__(self, x):
        return matvec(self.matrix, vec(x))

    def __matmul__(self, other):
        if other.cod != self.dom:
            raise BanError("maps are not composable")
        return LinMap(other.dom, self.cod, matmul(self.matrix, other.matrix, other.dom.dim))

    def __sub__(self, other):
        if other.dom != self.dom or other.cod != self.cod:
            raise BanError("maps are not parallel")
        return LinMap(self.dom, self.cod, mat_sub(self.matrix, other.matrix))

    def scaled(self, c):
        return LinMap(self.dom, self.cod, mat_scale(Fraction(c), self.matrix))

    def __eq__(self, other):
        if not isinstance(other, LinMap):
            return NotImplemented
        return (self.dom, self.cod, self.matrix) == (other.dom, other.cod, other.matrix)

    def __hash__(self):
        return hash((self.dom, self.cod, self.matrix))

    def __repr__(self):
        rows = "; ".join(" ".join(str(v) for v in r) for r in self.matrix)
        return f"<LinMap {self.dom.dim}->{self.cod.dim} [{rows}]>"

    def is_zero(self):
        return not any(any(r) for r in self.matrix)


def identity_map(X):
    return LinMap(X, X, eye(X.dim))


def zero_map(X, Y):
    return LinMap(X, Y, [[0] * X.dim for _ in range(Y.dim)])


def op_norm(f):
    """Operator norm: a convex function, so its max over the ball sits at a generator."""
    best = Fraction(0)
    for g in f.dom.generators:
        v = norm_eval(f.cod, f(g))
        if v > best:
            best = v
    return best


def op_norm_leq(f, c):
    c = Fraction(c)
    return all(norm_eval(f.cod, f(g)) <= c for g in f.dom.generators)


def _min_norm_on_face(f, points):
    """min over x in conv(points) of ||f x||_cod (points are domain vectors)."""
    Y = f.cod
    imgs = [f(p) for p in points]
    k, m = len(imgs), len(Y.generators)
    # variables: lambda (k), mu+ (m), mu- (m)
    A = [[im[r] for im in imgs] + [-g[r] for g in Y.generators] + [g[r] for g in Y.generators]
         for r in range(Y.dim)]
    A.append([1] * k + [0] * (2 * m))
    b = [0] * Y.dim + [1]
    res = solve_lp([0] * k + [1] * (2 * m), A, b)
    return res.value


def min_norm_on_sphere(f):
    """min ||f x|| over the unit sphere of dom, facet by facet.

    Needs dom facets (see ``PolyNormedSpace.ensure_facets``). On the zero space
    the sphere is empty and the answer is INF.
    """
    X = f.dom
    if X.facets is None:
        raise BanError("domain has no facets; call ensure_facets() first")
    if X.dim == 0:
        return INF
    seen = set()
    best = None
    for a in X.facets:
        if tuple(-v for v in a) in seen:
            continue  # the opposite facet gives the same values
        seen.add(a)
        v = _min_norm_on_face(f, facet_support(a, X.generators))
        if best is None or v < best:
            best = v
    return best


def is_eps_isometry_ban(f, eps):
    """(1 - eps)||x|| <= ||f x|| <= (1 + eps)||x|| for all x."""
    eps = Fraction(eps)
    if not op_norm_leq(f, 1 + eps):
        return False
    f.dom.ensure_facets()
    return min_norm_on_sphere(f) >= 1 - eps


def is_isometry_ban(f):
    return is_eps_isometry_ban(f, 0)

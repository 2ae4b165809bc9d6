"""Finite generalized (pseudo)metric spaces and nonexpanding maps.

Everything is exact: distances are Fractions or ``INF`` and every sup/inf is
a max/min over a finite, ordered point set.
"""

from collections import namedtuple
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
import os

from ..extdist import INF, ext, ext_max, fmt

ZERO = Fraction(0)


class MetError(ValueError):
    """Usage error: malformed spaces or maps, mismatched (co)domains."""


def max_hom_size():
    return int(os.environ.get("METCAT_MAX_HOM", "2000000"))


@dataclass(frozen=True)
class Verdict:
    """Boolean outcome plus whatever witness or value justified it."""

    ok: bool
    witness: object = None
    value: object = None

    def __bool__(self):
        return bool(self.ok)


def _dist_value(v):
    if v is INF or (type(v) is Fraction and v._numerator >= 0):
        return v
    try:
        return ext(v)
    except (TypeError, ValueError) as exc:
        raise MetError(str(exc)) from None


class PseudoMetSpace:
    """A finite generalized pseudometric space.

    ``dist`` is either a square matrix aligned with ``points`` or a dict
    ``{(p, q): d}``; unlisted pairs default to ``INF``. Tables are validated
    on construction unless ``check=False`` (used by constructions whose output
    is a metric by design).
    """

    positive = False

    def __init__(self, points, dist=None, name=None, check=True):
        points = tuple(points)
        index = {}
        for i, p in enumerate(points):
            if p in index:
                raise MetError(f"duplicate point {p!r}")
            index[p] = i
        n = len(points)
        if dist is None:
            dist = {}
        if isinstance(dist, dict):
            rows = [[ZERO if i == j else INF for j in range(n)] for i in range(n)]
            for (p, q), v in dist.items():
                if p not in index or q not in index:
                    raise MetError(f"distance for unknown pair {(p, q)!r}")
                i, j = index[p], index[q]
                v = _dist_value(v)
                other = dist.get((q, p))
                if other is not None and ext(other) != v:
                    raise MetError(f"asymmetric declaration for {(p, q)!r}")
                rows[i][j] = v
                rows[j][i] = v
        else:
            if len(dist) != n or any(len(r) != n for r in dist):
                raise MetError("distance table is not square")
            rows = [[_dist_value(v) for v in r] for r in dist]
        self.points = points
        self.index = index
        self.d = tuple(tuple(r) for r in rows)
        self.name = name
        self._hash = None
        if check:
            self.validate()

    def validate(self):
        n = len(self.points)
        d = self.d
        for i in range(n):
            if d[i][i] != 0:
                raise MetError(f"nonzero self-distance at {self.points[i]!r}")
            for j in range(i + 1, n):
                if d[i][j] != d[j][i]:
                    raise MetError(
                        f"asymmetric distance between {self.points[i]!r} and {self.points[j]!r}")
                if self.positive and d[i][j] == 0:
                    raise MetError(
                        f"distinct points {self.points[i]!r}, {self.points[j]!r} at distance 0")
        for k in range(n):
            dk = d[k]
            for i in range(n):
                dik = d[i][k]
                if dik is INF:
                    continue
                di = d[i]
                for j in range(n):
                    if di[j] > dik + dk[j]:
                        raise MetError(
                            "triangle inequality fails for "
                            f"{self.points[i]!r}, {self.points[k]!r}, {self.points[j]!r}")
        return self

    def dist(self, x, y):
        return self.d[self.index[x]][self.index[y]]

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, x):
        return x in self.index

    def __eq__(self, other):
        if not isinstance(other, PseudoMetSpace):
            return NotImplemented
        return self.points == other.points and self.d == other.d

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.points, self.d))
        return self._hash

    def __repr__(self):
        kind = type(self).__name__
        pairs = ", ".join(
            f"{self.points[i]}-{self.points[j]}:{fmt(self.d[i][j])}"
            for i in range(len(self)) for j in range(i + 1, len(self)))
        label = f" {self.name}" if self.name else ""
        return f"<{kind}{label} {list(self.points)} {{{pairs}}}>"

    def diameter(self):
        return ext_max(v for r in self.d for v in r)

    def is_metric(self):
        n = len(self)
        return all(self.d[i][j] != 0 for i in range(n) for j in range(i + 1, n))

    def relabel(self, fn, name=None):
        cls = MetSpace if self.is_metric() else PseudoMetSpace
        return cls([fn(p) for p in self.points], self.d, name=name or self.name, check=False)

    def with_name(self, name):
        out = object.__new__(type(self))
        out.__dict__.update(self.__dict__)
        out.name = name
        return out


class MetSpace(PseudoMetSpace):
    """A finite generalized metric space: distinct points are at positive distance."""

    positive = True


def as_metric(space):
    """Upgrade a PseudoMetSpace whose table happens to be positive."""
    if isinstance(space, MetSpace):
        return space
    if not space.is_metric():
        raise MetError("space has distinct points at distance 0")
    return MetSpace(space.points, space.d, name=space.name, check=False)


# ---------------------------------------------------------------------------
# small named spaces

def empty_space(name=None):
    return MetSpace((), (), name=name, check=False)


def one_point(label="*", name=None):
    return MetSpace((label,), ((ZERO,),), name=name, check=False)


def two_point(eps, labels=("p1", "p2"), name=None):
    """The space 2_eps: two points at distance eps (eps > 0, possibly INF)."""
    eps = ext(eps)
    if eps == 0:
        raise MetError("2_eps needs eps > 0")
    return MetSpace(labels, ((ZERO, eps), (eps, ZERO)), name=name)


def discrete(labels, name=None):
    labels = tuple(labels)
    n = len(labels)
    return MetSpace(labels, [[ZERO if i == j else INF for j in range(n)] for i in range(n)],
                    name=name, check=False)


def line(values, labels=None, name=None):
    """Subspace of the real line on the given distinct rationals."""
    values = [Fraction(v) for v in values]
    if labels is None:
        labels = [fmt(v) for v in values]
    return MetSpace(labels, [[abs(a - b) for b in values] for a in values], name=name)


# ---------------------------------------------------------------------------
# maps

class SetFunction:
    """A bare function between the point sets of two spaces (no metric check)."""

    def __init__(self, dom, cod, images):
        if isinstance(images, dict):
            missing = [p for p in dom.points if p not in images]
            if missing:
                raise MetError(f"assignment undefined on {missing!r}")
            images = [images[p] for p in dom.points]
        images = tuple(images)
        if len(images) != len(dom):
            raise MetError("assignment length does not match domain")
        try:
            idx = tuple(cod.index[y] for y in images)
        except KeyError as exc:
            raise MetError(f"image {exc.args[0]!r} not in codomain") from None
        self.dom = dom
        self.cod = cod
        self.images = images
        self.idx = idx

    def __call__(self, x):
        return self.images[self.dom.index[x]]

    def as_dict(self):
        return dict(zip(self.dom.points, self.images))

    def __eq__(self, other):
        if not isinstance(other, SetFunction):
            return NotImplemented
        return self.dom == other.dom and self.cod == other.cod and self.idx == other.idx

    def __hash__(self):
        return hash((self.dom, self.cod, self.idx))

    def __repr__(self):
        body = ", ".join(f"{x}->{y}" for x, y in zip(self.dom.points, self.images))
        return f"<{type(self).__name__} {{{body}}}>"

    def is_surjective(self):
        return len(set(self.idx)) == len(self.cod)

    def is_injective(self):
        return len(set(self.idx)) == len(self.idx)


class NonexpMap(SetFunction):
    """A nonexpanding map d(fx, fy) <= d(x, y), checked on construction."""

    def __init__(self, dom, cod, images, check=True, name=None):
        super().__init__(dom, cod, images)
        self.name = name
        if check:
            bad = expansion_witness(self)
            if bad is not None:
                x, y = bad
                raise MetError(f"map expands the distance between {x!r} and {y!r}")

    def __matmul__(self, other):
        return compose(self, other)


def expansion_witness(f):
    d, e, idx = f.dom.d, f.cod.d, f.idx
    n = len(idx)
    for i in range(n):
        for j in range(i + 1, n):
            if e[idx[i]][idx[j]] > d[i][j]:
                return f.dom.points[i], f.dom.points[j]
    return None


def compose(g, f):
    """g after f."""
    if f.cod != g.dom:
        raise MetError("maps are not composable")
    gi = g.idx
    return NonexpMap(f.dom, g.cod, [g.cod.points[gi[i]] for i in f.idx], check=False)


def identity(X):
    return NonexpMap(X, X, X.points, check=False)


def constant(dom, cod, y):
    return NonexpMap(dom, cod, [y] * len(dom), check=False)


def inclusion(sub, X):
    """Inclusion of a space whose labels are points of X (must be distance preserving)."""
    f = NonexpMap(sub, X, sub.points)
    if not is_isometry(f):
        raise MetError("not a subspace")
    return f


def subspace(X, labels, name=None):
    """Induced subspace on ``labels`` (kept in X's order) with its inclusion."""
    keep = set(labels)
    rows = [i for i, p in enumerate(X.points) if p in keep]
    if len(rows) != len(keep):
        raise MetError("subspace labels not in space")
    cls = MetSpace if isinstance(X, MetSpace) else PseudoMetSpace
    S = cls([X.points[i] for i in rows], [[X.d[i][j] for j in rows] for i in rows],
            name=name, check=False)
    return S, NonexpMap(S, X, S.points, check=False)


def hom_distance(f, g):
    """sup_a d(f a, g a); 0 on an empty domain."""
    if f.dom != g.dom or f.cod != g.cod:
        raise MetError("hom_distance needs parallel maps")
    e = f.cod.d
    return ext_max((e[i][j] for i, j in zip(f.idx, g.idx)), default=ZERO)


def is_isometry(f):
    """Distance preservation; on failure the witness is an offending pair."""
    d, e, idx = f.dom.d, f.cod.d, f.idx
    n = len(idx)
    for i in range(n):
        for j in range(i + 1, n):
            if e[idx[i]][idx[j]] != d[i][j]:
                return Verdict(False, (f.dom.points[i], f.dom.points[j]))
    return Verdict(True)


def is_coisometry(f):
    """Dense image, which for finite spaces means surjective."""
    return Verdict(f.is_surjective())


def homset(A, X, cap=None):
    """All nonexpanding maps A -> X, in lexicographic order of image indices.

    Backtracking; prunes as soon as a partial assignment expands a distance.
    """
    cap = max_hom_size() if cap is None else cap
    if len(X) ** len(A) > cap and len(A) > 0:
        raise MetError(f"hom-set size {len(X)}^{len(A)} exceeds cap {cap}")
    return [NonexpMap(A, X, [X.points[k] for k in t], check=False)
            for t in _hom_tuples(A, X)]


def _hom_tuples(A, X):
    n, m = len(A), len(X)
    d, e = A.d, X.d
    out = []
    cur = [0] * n

    def rec(i):
        if i == n:
            out.append(tuple(cur))
            return
        di = d[i]
        for c in range(m):
            ec = e[c]
            if all(ec[cur[j]] <= di[j] for j in range(i)):
                cur[i] = c
                rec(i + 1)

    rec(0)
    return out


# ---------------------------------------------------------------------------
# colimits: final pseudometrics and metric quotients

Leg = namedtuple("Leg", "dom images")


@dataclass
class Cocone:
    """Legs from finite spaces into a bare carrier set.

    Each leg is ``Leg(dom, images)`` with ``images`` aligned to ``dom.points``
    (a NonexpMap is accepted too; its images are used).
    """

    carrier: tuple
    legs: list = field(default_factory=list)

    def __post_init__(self):
        self.carrier = tuple(self.carrier)
        self.legs = [Leg(l.dom, tuple(l.images)) for l in self.legs]


def final_pseudometric(c):
    """Largest pseudometric on the carrier making every leg nonexpanding.

    Shortest paths on the graph with an edge (f u, f v) of weight d(u, v) for
    every leg f and pair u, v; unreachable pairs end at INF.
    """
    index = {p: i for i, p in enumerate(c.carrier)}
    n = len(index)
    hit = [False] * n
    D = [[ZERO if i == j else INF for j in range(n)] for i in range(n)]
    for leg in c.legs:
        try:
            img = [index[y] for y in leg.images]
        except KeyError as exc:
            raise MetError(f"leg image {exc.args[0]!r} not in carrier") from None
        dd = leg.dom.d
        for a, ia in enumerate(img):
            hit[ia] = True
            row = dd[a]
            Dia = D[ia]
            for b, ib in enumerate(img):
                w = row[b]
                if w < Dia[ib]:
                    Dia[ib] = w
    if not all(hit):
        missing = [c.carrier[i] for i in range(n) if not hit[i]]
        raise MetError(f"cocone is not jointly surjective: {missing!r} not hit")
    floyd_warshall(D)
    return PseudoMetSpace(c.carrier, D, check=False)


def floyd_warshall(D):
    """In-place all-pairs shortest paths on a square ExtDist matrix.

    Finite entries are scaled to integers by their common denominator first;
    integer relaxation is much faster than Fraction arithmetic.
    """
    n = len(D)
    den = 1
    for row in D:
        for v in row:
            if v is not INF:
                q = Fraction(v).denominator
                den = den * q // gcd(den, q)
    W = [[v if v is INF else int(v * den) for v in row] for row in D]
    for k in range(n):
        Wk = W[k]
        finite_k = [(j, Wk[j]) for j in range(n) if Wk[j] is not INF]
        for i in range(n):
            dik = W[i][k]
            if dik is INF:
                continue
            Wi = W[i]
            for j, dkj in finite_k:
                s = dik + dkj
                w = Wi[j]
                if w is INF or s < w:
                    Wi[j] = s
    for i in range(n):
        D[i] = [v if v is INF else Fraction(v, den) for v in W[i]]
    return D


def metric_quotient(p):
    """Identify points at distance 0; classes are labeled by their first member."""
    n = len(p)
    rep = [None] * n
    reps = []
    for i in range(n):
        if rep[i] is not None:
            continue
        rep[i] = len(reps)
        reps.append(i)
        for j in range(i + 1, n):
            if rep[j] is None and p.d[i][j] == 0:
                rep[j] = rep[i]
    Q = MetSpace([p.points[i] for i in reps],
                 [[p.d[i][j] for j in reps] for i in reps], name=p.name, check=False)
    proj = NonexpMap(p, Q, [Q.points[rep[i]] for i in range(n)], check=False)
    return Q, proj


def coproduct(X, Y, name=None):
    """Disjoint union, cross distances INF; labels kept unless they collide."""
    if set(X.points) & set(Y.points):
        lx = [(1, x) for x in X.points]
        ly = [(2, y) for y in Y.points]
    else:
        lx, ly = list(X.points), list(Y.points)
    n, m = len(X), len(Y)
    rows = [list(X.d[i]) + [INF] * m for i in range(n)]
    rows += [[INF] * n + list(Y.d[j]) for j in range(m)]
    S = MetSpace(lx + ly, rows, name=name, check=False)
    return S, NonexpMap(X, S, lx, check=False), NonexpMap(Y, S, ly, check=False)


def product(X, Y, name=None):
    """Cartesian product with the max metric; the projection cone is conical."""
    pts = [(x, y) for x in X.points for y in Y.points]
    coords = [(i, j) for i in range(len(X)) for j in range(len(Y))]
    rows = [[max(X.d[i][k], Y.d[j][l]) for (k, l) in coords] for (i, j) in coords]
    P = MetSpace(pts, rows, name=name, check=False)
    p1 = NonexpMap(P, X, [x for x, _ in pts], check=False)
    p2 = NonexpMap(P, Y, [y for _, y in pts], check=False)
    return P, p1, p2


def conical_limit(objects, arrows):
    """Limit of a finite diagram in Met.

    ``objects`` is a list of spaces, ``arrows`` a list of ``(s, t, f)`` with f a
    map objects[s] -> objects[t]. The limit is the set of compatible families
    inside the product, with the max metric; families are found by
    backtracking so the full product is never materialised. Returns the limit
    space (points are tuples of component labels) and its projections.
    """
    k = len(objects)
    constraints = [[] for _ in range(k)]
    for s, t, f in arrows:
        if f.dom != objects[s] or f.cod != objects[t]:
            raise MetError("diagram arrow does not match its objects")
        later = max(s, t)
        constraints[later].append((s, t, f.idx))
    families = []
    cur = [0] * k

    def rec(c):
        if c == k:
            families.append(tuple(cur))
            return
        for v in range(len(objects[c])):
            cur[c] = v
            if all(f_idx[cur[s]] == cur[t] for s, t, f_idx in constraints[c]):
                rec(c + 1)

    rec(0)
    pts = [tuple(objects[c].points[v] for c, v in enumerate(fam)) for fam in families]
    rows = [[ext_max((objects[c].d[a[c]][b[c]] for c in range(k)), default=ZERO)
             for b in families] for a in families]
    L = MetSpace(pts, rows, check=False) if _positive(rows) else PseudoMetSpace(pts, rows, check=False)
    projs = [NonexpMap(L, objects[c], [objects[c].points[fam[c]] for fam in families], check=False)
             for c in range(k)]
    return L, projs


def _positive(rows):
    n = len(rows)
    return all(rows[i][j] != 0 for i in range(n) for j in range(i + 1, n))


# ---------------------------------------------------------------------------
# finite chains and their colimits

class FiniteChain:
    """K_0 -> K_1 -> ... -> K_m with links k_{i,i+1}."""

    def __init__(self, stages, links, isometric=False):
        stages = list(stages)
        links = list(links)
        if len(links) != max(len(stages) - 1, 0):
            raise MetError("a chain with m+1 stages needs m links")
        for i, f in enumerate(links):
            if f.dom != stages[i] or f.cod != stages[i + 1]:
                raise MetError(f"link {i} does not connect stages {i} and {i + 1}")
            if isometric and not is_isometry(f):
                raise MetError(f"link {i} is not an isometry")
        self.stages = stages
        self.links = links
        self._comp = {}

    def __len__(self):
        return len(self.stages)

    def composite(self, i, j):
        """k_{ij} = k_{j-1,j} o ... o k_{i,i+1} (identity when i == j)."""
        if not 0 <= i <= j < len(self.stages):
            raise MetError(f"no composite k_{i},{j}")
        key = (i, j)
        if key not in self._comp:
            f = identity(self.stages[i])
            for t in range(i, j):
                f = compose(self.links[t], f)
            self._comp[key] = f
        return self._comp[key]

    def is_isometric(self):
        return all(is_isometry(f) for f in self.links)

    def extended(self, link):
        return FiniteChain(self.stages + [link.cod], self.links + [link])


@dataclass
class ColimitCocone:
    apex: MetSpace
    legs: list


def colimit_chain(ch):
    """Colimit of a finite chain, built as in the directed-colimit recipe.

    Set colimit of the disjoint union under the link identifications, the
    final pseudometric for all stage legs, then the metric quotient. The apex
    points are labeled ``(i, x)`` by the earliest representative.
    """
    tagged = [(i, x) for i, K in enumerate(ch.stages) for x in K.points]
    parent = {t: t for t in tagged}

    def find(t):
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra == rb:
            return
        # keep the earlier tagged point as the root
        if order[ra] < order[rb]:
            parent[rb] = ra
        else:
            parent[ra] = rb

    order = {t: n for n, t in enumerate(tagged)}
    for i, f in enumerate(ch.links):
        for x, y in zip(f.dom.points, f.images):
            union((i, x), (i + 1, y))
    carrier = [t for t in tagged if find(t) == t]
    legs = [Leg(K, [find((i, x)) for x in K.points]) for i, K in enumerate(ch.stages)]
    P = final_pseudometric(Cocone(carrier, legs))
    Q, q = metric_quotient(P)
    out = [NonexpMap(K, Q, [q(y) for y in leg.images], check=False)
           for K, leg in zip(ch.stages, legs)]
    return ColimitCocone(Q, out)

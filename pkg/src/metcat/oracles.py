"""Brute-force oracles for auditing the constructions.

Nothing here calls into ``metcat.met.approx``, ``metcat.injectivity`` or the
Banach constructions; the only shared code is the plain data types and the
exact arithmetic in ``extdist``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product as cartesian
import os

from .extdist import INF, ext, ext_max, fmt
from .met.core import MetError, MetSpace, NonexpMap

ZERO = Fraction(0)
GRID_DISTANCES = (Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2), INF)


def hom_cap():
    return int(os.environ.get("METCAT_MAX_HOM", "2000000"))


# ---------------------------------------------------------------------------
# hom-sets

@dataclass
class HomSet:
    dom: MetSpace
    cod: MetSpace
    maps: list

    def __len__(self):
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)


def _is_nonexpanding(A, X, t):
    n = len(t)
    for i in range(n):
        for j in range(i + 1, n):
            if X.d[t[i]][t[j]] > A.d[i][j]:
                return False
    return True


def enumerate_hom(A, X, cap=None):
    """Every nonexpanding A -> X by filtering all |X|^|A| functions."""
    cap = hom_cap() if cap is None else cap
    total = len(X) ** len(A)
    if total > cap:
        raise MetError(f"|X|^|A| = {total} exceeds METCAT_MAX_HOM cap {cap}")
    maps = []
    for t in cartesian(range(len(X)), repeat=len(A)):
        if _is_nonexpanding(A, X, t):
            maps.append(NonexpMap(A, X, [X.points[k] for k in t], check=False))
    return HomSet(A, X, maps)


def sup_distance(f, g):
    """Pointwise sup of d(fa, ga), computed afresh."""
    best = ZERO
    for a in f.dom.points:
        v = f.cod.dist(f(a), g(a))
        if v > best:
            best = v
    return best


def composite_images(g, f):
    return [g(f(a)) for a in f.dom.points]


# ---------------------------------------------------------------------------
# shortest paths by repeated relaxation

def shortest_path_oracle(n, edges):
    """All-pairs distances on nodes 0..n-1 from undirected weighted edges.

    Bellman-Ford style: relax every edge from every source until nothing moves.
    """
    D = [[ZERO if i == j else INF for j in range(n)] for i in range(n)]
    for s in range(n):
        row = D[s]
        changed = True
        while changed:
            changed = False
            for a, b, w in edges:
                for x, y in ((a, b), (b, a)):
                    if row[x] is INF:
                        continue
                    c = row[x] + w
                    if c < row[y]:
                        row[y] = c
                        changed = True
    return D


def gluing_edges(carrier, legs):
    """Edges (f u, f v, d(u, v)) of a cocone, as index triples."""
    index = {p: i for i, p in enumerate(carrier)}
    edges = []
    for dom, images in legs:
        for a in range(len(dom)):
            for b in range(a + 1, len(dom)):
                w = dom.d[a][b]
                if w is not INF:
                    edges.append((index[images[a]], index[images[b]], w))
    return edges


# ---------------------------------------------------------------------------
# isometric matching

def find_isometric_bijection(X, Y, fixed=None):
    """An isometric bijection X -> Y as a dict, extending ``fixed``; None if none exists."""
    if len(X) != len(Y):
        return None
    fixed = dict(fixed or {})
    xs = list(X.points)
    assign = {}
    used = set()

    def ok(x, y):
        for x2, y2 in assign.items():
            if X.dist(x, x2) != Y.dist(y, y2):
                return False
        return True

    def rec(k):
        if k == len(xs):
            return True
        x = xs[k]
        choices = [fixed[x]] if x in fixed else Y.points
        for y in choices:
            if y in used or not ok(x, y):
                continue
            assign[x] = y
            used.add(y)
            if rec(k + 1):
                return True
            del assign[x]
            used.discard(y)
        return False

    return dict(assign) if rec(0) else None


# ---------------------------------------------------------------------------
# competitor grid

def metric_spaces(n, values=GRID_DISTANCES):
    """All metric spaces on points 0..n-1 with distances from ``values``."""
    pairs = list(combinations(range(n), 2))
    out = []
    for combo in cartesian(values, repeat=len(pairs)):
        d = [[ZERO] * n for _ in range(n)]
        for (i, j), v in zip(pairs, combo):
            d[i][j] = d[j][i] = v
        if all(d[i][j] <= d[i][k] + d[k][j]
               for i in range(n) for j in range(n) for k in range(n)):
            out.append(MetSpace([f"c{i}" for i in range(n)], d, check=False))
    return out


def competitor_grid(max_points=3, values=GRID_DISTANCES, sample4=6):
    """Deterministic competitor spaces: everything up to ``max_points`` (capped
    at 3) plus the first ``sample4`` four-point spaces when max_points >= 4."""
    grid = []
    for n in range(0, min(max_points, 3) + 1):
        grid.extend(metric_spaces(n, values))
    if max_points >= 4 and sample4:
        four = metric_spaces(4, values)
        step = max(1, len(four) // sample4)
        grid.extend(four[::step][:sample4])
    return grid


# ---------------------------------------------------------------------------
# universality

@dataclass
class UniversalityReport:
    construction: str
    competitors: int = 0
    mediator_counts: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations

    def __bool__(self):
        return self.passed

    def text(self):
        head = (f"verify {self.construction}: competitors={self.competitors} "
                f"{'PASS' if self.passed else 'FAIL'}")
        counts = " ".join(f"{k}:{v}" for k, v in sorted(self.mediator_counts.items()))
        lines = [head, f"mediator-counts {counts}"]
        lines += [f"violation {v}" for v in self.violations]
        return "\n".join(lines)


def _count(report, k):
    report.mediator_counts[k] = report.mediator_counts.get(k, 0) + 1


def _count_maps_through(apex, C, fixed):
    """Number of nonexpanding apex -> C agreeing with ``fixed`` (index -> set of C indices).

    Points not forced range over all of C.
    """
    cand = []
    for i in range(len(apex)):
        vals = fixed.get(i)
        if vals is None:
            cand.append(range(len(C)))
        elif len(vals) == 1:
            cand.append(tuple(vals))
        else:
            return 0
    return sum(1 for t in cartesian(*cand) if _is_nonexpanding(apex, C, t))


def _cocone_mediators(legs, pairs_in, C):
    """Mediators for a cocone: legs g_i: X_i -> apex, competitor maps k_i: X_i -> C."""
    fixed = {}
    for g, k in zip(legs, pairs_in):
        for gi, ki in zip(g.idx, k.idx):
            fixed.setdefault(gi, set()).add(ki)
    return _count_maps_through(legs[0].cod, C, fixed)


def _worst(D, xs, ys):
    return ext_max((D[i][j] for i, j in zip(xs, ys)), default=ZERO)


def verify_pushout(sq, competitors):
    """Strict universality of an eps-square among competitor spaces."""
    f1, f2, g1, g2, eps = sq.f1, sq.f2, sq.g1, sq.g2, ext(sq.eps)
    rep = UniversalityReport(f"eps-pushout eps={fmt(eps)}")
    slack = ext_max(g1.cod.dist(g1(f1(a)), g2(f2(a))) for a in f1.dom.points)
    if slack > eps:
        rep.violations.append(f"square slack {fmt(slack)} exceeds eps")
    for C in competitors:
        H1 = enumerate_hom(f1.cod, C).maps
        H2 = enumerate_hom(f2.cod, C).maps
        left = [[k.idx[i] for i in f1.idx] for k in H1]
        right = [[k.idx[i] for i in f2.idx] for k in H2]
        for k1, l1 in zip(H1, left):
            for k2, r2 in zip(H2, right):
                if _worst(C.d, l1, r2) > eps:
                    continue
                rep.competitors += 1
                n = _cocone_mediators([g1, g2], [k1, k2], C)
                _count(rep, n)
                if n != 1:
                    rep.violations.append(
                        f"competitor {C!r} k1={k1.images} k2={k2.images}: {n} mediators")
    return rep


def verify_coequalizer(u, v, eps, c, competitors):
    eps = ext(eps)
    rep = UniversalityReport(f"eps-coequalizer eps={fmt(eps)}")
    slack = ext_max(c.cod.dist(c(u(a)), c(v(a))) for a in u.dom.points)
    if slack > eps:
        rep.violations.append(f"slack {fmt(slack)} exceeds eps")
    for C in competitors:
        for k in enumerate_hom(u.cod, C).maps:
            if _worst(C.d, [k.idx[i] for i in u.idx], [k.idx[i] for i in v.idx]) > eps:
                continue
            rep.competitors += 1
            n = _cocone_mediators([c], [k], C)
            _count(rep, n)
            if n != 1:
                rep.violations.append(f"competitor {C!r} k={k.images}: {n} mediators")
    return rep


def _cone_table(legs):
    """Apex indices grouped by their tuple of leg images."""
    table = {}
    for i, key in enumerate(zip(*(leg.idx for leg in legs))):
        table.setdefault(key, []).append(i)
    return table


def _cone_mediators(W, apex, table, ws):
    """Mediators W -> apex for a cone with leg table ``table`` and competitor maps ws_i."""
    cand = [table.get(key, ()) for key in zip(*(w.idx for w in ws))]
    return sum(1 for t in cartesian(*cand) if _is_nonexpanding(W, apex, t))


def verify_equalizer(u, v, eps, m, competitors):
    eps = ext(eps)
    rep = UniversalityReport(f"eps-equalizer eps={fmt(eps)}")
    slack = ext_max((u.cod.dist(u(m(e)), v(m(e))) for e in m.dom.points), default=ZERO)
    if slack > eps:
        rep.violations.append(f"slack {fmt(slack)} exceeds eps")
    table = _cone_table([m])
    for W in competitors:
        for w in enumerate_hom(W, u.dom).maps:
            if _worst(u.cod.d, [u.idx[i] for i in w.idx], [v.idx[i] for i in w.idx]) > eps:
                continue
            rep.competitors += 1
            n = _cone_mediators(W, m.dom, table, [w])
            _count(rep, n)
            if n != 1:
                rep.violations.append(f"competitor {W!r} w={w.images}: {n} mediators")
    return rep


def verify_pullback(u, v, eps, p1, p2, competitors):
    eps = ext(eps)
    rep = UniversalityReport(f"eps-pullback eps={fmt(eps)}")
    slack = ext_max((u.cod.dist(u(p1(p)), v(p2(p))) for p in p1.dom.points), default=ZERO)
    if slack > eps:
        rep.violations.append(f"slack {fmt(slack)} exceeds eps")
    table = _cone_table([p1, p2])
    for W in competitors:
        Ha = enumerate_hom(W, u.dom).maps
        Hb = enumerate_hom(W, v.dom).maps
        ua = [[u.idx[i] for i in a.idx] for a in Ha]
        vb = [[v.idx[i] for i in b.idx] for b in Hb]
        for a, xs in zip(Ha, ua):
            for b, ys in zip(Hb, vb):
                if _worst(u.cod.d, xs, ys) > eps:
                    continue
                rep.competitors += 1
                n = _cone_mediators(W, p1.dom, table, [a, b])
                _count(rep, n)
                if n != 1:
                    rep.violations.append(
                        f"competitor {W!r} a={a.images} b={b.images}: {n} mediators")
    return rep


def verify_universal(kind, construction, competitors):
    """Dispatch on ``kind`` in {'pushout', 'coequalizer', 'equalizer', 'pullback'}.

    ``construction`` is the EpsSquare for pushouts, else a tuple
    ``(u, v, eps, result...)`` matching the verify_* signature.
    """
    if kind == "pushout":
        return verify_pushout(construction, competitors)
    fn = {"coequalizer": verify_coequalizer, "equalizer": verify_equalizer,
          "pullback": verify_pullback}[kind]
    return fn(*construction, competitors)


# ---------------------------------------------------------------------------
# classical (eps = 0) limits and colimits, computed the textbook way

def _classes(n, glue):
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for a, b in glue:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return [find(i) for i in range(n)]


def _quotient_metric(spaces_edges, n, glue, labels):
    """Largest metric on the quotient of n nodes by ``glue`` below the given edges."""
    cls = _classes(n, glue)
    reps = sorted(set(cls))
    pos = {r: k for k, r in enumerate(reps)}
    edges = [(pos[cls[a]], pos[cls[b]], w) for a, b, w in spaces_edges]
    D = shortest_path_oracle(len(reps), edges)
    # edges of distinct points are positive, so no further collapse happens
    return MetSpace([labels[r] for r in reps], D), cls, pos


def classical_coequalizer(u, v):
    B = u.cod
    edges = gluing_edges(B.points, [(B, B.points)])
    glue = [(B.index[u(a)], B.index[v(a)]) for a in u.dom.points]
    Q, cls, pos = _quotient_metric(edges, len(B), glue, list(B.points))
    return NonexpMap(B, Q, [Q.points[pos[cls[i]]] for i in range(len(B))])


def classical_pushout(f1, f2):
    B1, B2 = f1.cod, f2.cod
    labels = [("L", x) for x in B1.points] + [("R", y) for y in B2.points]
    n1 = len(B1)
    edges = [(a, b, w) for a, b, w in gluing_edges(B1.points, [(B1, B1.points)])]
    edges += [(n1 + a, n1 + b, w) for a, b, w in gluing_edges(B2.points, [(B2, B2.points)])]
    glue = [(B1.index[f1(a)], n1 + B2.index[f2(a)]) for a in f1.dom.points]
    Q, cls, pos = _quotient_metric(edges, len(labels), glue, labels)
    g1 = NonexpMap(B1, Q, [Q.points[pos[cls[i]]] for i in range(n1)])
    g2 = NonexpMap(B2, Q, [Q.points[pos[cls[n1 + i]]] for i in range(len(B2))])
    return Q, g1, g2


def classical_equalizer(u, v):
    A = u.dom
    keep = [x for x in A.points if u(x) == v(x)]
    E = MetSpace(keep, [[A.dist(x, y) for y in keep] for x in keep])
    return NonexpMap(E, A, keep)


def classical_pullback(u, v):
    B, C = u.dom, v.dom
    pts = [(b, c) for b in B.points for c in C.points if u(b) == v(c)]
    d = [[max(B.dist(b, b2), C.dist(c, c2)) for (b2, c2) in pts] for (b, c) in pts]
    P = MetSpace(pts, d)
    return P, NonexpMap(P, B, [b for b, _ in pts]), NonexpMap(P, C, [c for _, c in pts])


# ---------------------------------------------------------------------------
# normed-space oracles: no simplex, no facet enumeration

def _solve_square(M, y):
    """Gauss-Jordan on a square system; None when singular."""
    n = len(M)
    A = [list(M[i]) + [y[i]] for i in range(n)]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return None
        A[c], A[p] = A[p], A[c]
        pv = A[c][c]
        A[c] = [v / pv for v in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return [A[r][n] for r in range(n)]


def norm_by_bases(X, x):
    """min over bases of d generators of sum |lambda| with x = sum lambda g.

    A vertex of the norm LP is supported on such a basis, so this is the exact
    polyhedral norm; it is also an explicit combination, hence an upper bound.
    """
    x = [Fraction(v) for v in x]
    d = X.dim
    if not any(x):
        return ZERO
    best = None
    for combo in combinations(X.generators, d):
        M = [[g[r] for g in combo] for r in range(d)]
        lam = _solve_square(M, x)
        if lam is None:
            continue
        s = sum((abs(v) for v in lam), ZERO)
        if best is None or s < best:
            best = s
    return best


def _lcm_den(vals):
    from math import lcm
    out = 1
    for v in vals:
        out = lcm(out, Fraction(v).denominator)
    return out


_GRID_CACHE = {}


def functional_grid(X, grid):
    """Integer functionals a in [-grid, grid]^d (first nonzero entry positive,
    gcd 1) paired with max_k |a.G_k| for the generators scaled to integers."""
    key = (X.dim, X.generators, grid)
    if key in _GRID_CACHE:
        return _GRID_CACHE[key]
    from math import gcd
    L = _lcm_den(v for g in X.generators for v in g)
    G = [[int(v * L) for v in g] for g in X.generators]
    out = []
    for a in cartesian(range(-grid, grid + 1), repeat=X.dim):
        nz = next((v for v in a if v), 0)
        if nz <= 0:
            continue
        if X.dim > 1:
            gg = 0
            for v in a:
                gg = gcd(gg, v)
            if gg != 1:
                continue
        den = max(abs(sum(ai * gi for ai, gi in zip(a, g))) for g in G)
        if den:
            out.append((a, den))
    _GRID_CACHE[key] = (L, out)
    return L, out


def lp_bracket(X, x, grid):
    """(lower, upper) around the norm of x.

    lower: best |a.x| / max_k |a.g_k| over integer functionals with entries in
    [-grid, grid]; upper: the best explicit combination over generator bases.
    """
    x = [Fraction(v) for v in x]
    if not any(x):
        return ZERO, ZERO
    Lg, funcs = functional_grid(X, grid)
    Lx = _lcm_den(x)
    xi = [int(v * Lx) for v in x]
    bn, bd = 0, 1
    for a, den in funcs:
        num = abs(sum(ai * v for ai, v in zip(a, xi)))
        if num * bd > bn * den:
            bn, bd = num, den
    return Fraction(bn * Lg, bd * Lx), norm_by_bases(X, x)


def op_norm_oracle(f):
    """max over domain generators of norm_by_bases of the image."""
    best = ZERO
    for g in f.dom.generators:
        y = [sum((f.matrix[r][c] * g[c] for c in range(f.dom.dim)), ZERO)
             for r in range(f.cod.dim)]
        v = norm_by_bases(f.cod, y)
        if v > best:
            best = v
    return best


def l1_coordinate_bound_oracle(A):
    """max of sum_j |a_j| over the ball, as the largest sign-functional value."""
    best = ZERO
    for s in cartesian((1, -1), repeat=A.dim):
        v = max((abs(sum((si * gi for si, gi in zip(s, g)), ZERO)) for g in A.generators),
                default=ZERO)
        if v > best:
            best = v
    return best

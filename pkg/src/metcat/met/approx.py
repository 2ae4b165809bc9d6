"""Weighted (epsilon) limits and colimits in Met, tensors, cotensors, and the
(surjective, isometry) factorization system."""

from dataclasses import dataclass

from ..extdist import deviation, ext
from .core import (
    ZERO, Cocone, Leg, MetError, MetSpace, NonexpMap, PseudoMetSpace, Verdict,
    compose, conical_limit, coproduct, final_pseudometric, hom_distance, homset, identity,
    is_isometry, metric_quotient, product, subspace,
)


@dataclass
class EpsSquare:
    """A span f1, f2 out of A completed by g1, g2 into an apex, commuting up to eps."""

    f1: NonexpMap
    f2: NonexpMap
    g1: NonexpMap
    g2: NonexpMap
    eps: object

    @property
    def apex(self):
        return self.g1.cod

    @property
    def slack(self):
        return hom_distance(compose(self.g1, self.f1), compose(self.g2, self.f2))

    def is_eps_commutative(self):
        return self.slack <= self.eps


def _bridge(eps):
    # a leg of this shape forces its two image points within eps
    return PseudoMetSpace(("s", "t"), ((ZERO, eps), (eps, ZERO)), check=False)


def _glue(space, pairs, eps):
    """Final metric on ``space`` after forcing every pair in ``pairs`` within eps."""
    legs = [Leg(space, space.points)]
    b = _bridge(eps)
    for x, y in pairs:
        if x != y:
            legs.append(Leg(b, (x, y)))
    P = final_pseudometric(Cocone(space.points, legs))
    Q, q = metric_quotient(P)
    return Q, NonexpMap(space, Q, q.images, check=False)


def _check_parallel(u, v):
    if u.dom != v.dom or u.cod != v.cod:
        raise MetError("maps are not parallel")


def eps_equalizer(u, v, eps):
    """Inclusion of {x : d(ux, vx) <= eps} into dom u."""
    _check_parallel(u, v)
    eps = ext(eps)
    e = u.cod.d
    keep = [x for x, i, j in zip(u.dom.points, u.idx, v.idx) if e[i][j] <= eps]
    _, m = subspace(u.dom, keep)
    return m


def eps_pullback(u, v, eps):
    """Pairs (b, c) with d(ub, vc) <= eps, with the max metric; and the two projections."""
    if u.cod != v.cod:
        raise MetError("eps_pullback needs a cospan")
    eps = ext(eps)
    P, p1, p2 = product(u.dom, v.dom)
    e = u.cod.d
    B, C = u.dom, v.dom
    keep = [(b, c) for b, c in P.points
            if e[u.idx[B.index[b]]][v.idx[C.index[c]]] <= eps]
    S, m = subspace(P, keep)
    return S, compose(p1, m), compose(p2, m)


def eps_coequalizer(u, v, eps):
    """Surjection out of cod u making u and v eps-close, universal among such."""
    _check_parallel(u, v)
    _, c = _glue(u.cod, zip(u.images, v.images), ext(eps))
    return c


def eps_pushout(f1, f2, eps):
    """Glue B1 + B2 with a bridge of length eps between f1(a) and f2(a) for each a."""
    if f1.dom != f2.dom:
        raise MetError("eps_pushout needs a span")
    eps = ext(eps)
    S, i1, i2 = coproduct(f1.cod, f2.cod)
    pairs = [(i1(x), i2(y)) for x, y in zip(f1.images, f2.images)]
    _, q = _glue(S, pairs, eps)
    return EpsSquare(f1, f2, compose(q, i1), compose(q, i2), eps)


def pushout_mediator(sq, k1, k2):
    """The map h: apex -> C' with h g1 = k1, h g2 = k2 (raises if there is none)."""
    C = k1.cod
    if k2.cod != C or k1.dom != sq.g1.dom or k2.dom != sq.g2.dom:
        raise MetError("competitor does not match the square")
    img = {}
    for g, k in ((sq.g1, k1), (sq.g2, k2)):
        for y, z in zip(g.images, k.images):
            if img.setdefault(y, z) != z:
                raise MetError("competitor is not constant on an apex point")
    return NonexpMap(sq.apex, C, [img[p] for p in sq.apex.points])


def tensor(M, L):
    """M x L with the sum metric."""
    pts = [(m, l) for m in M.points for l in L.points]
    co = [(i, j) for i in range(len(M)) for j in range(len(L))]
    rows = [[M.d[i][k] + L.d[j][l] for (k, l) in co] for (i, j) in co]
    return MetSpace(pts, rows, check=False)


def cotensor(M, L):
    """All nonexpanding maps M -> L with the sup metric; points are image tuples."""
    maps = homset(M, L)
    rows = [[hom_distance(f, g) for g in maps] for f in maps]
    return MetSpace([f.images for f in maps], rows, check=False)


def cotensor_via_pullbacks(M, L):
    """[M, L] as a conical limit of cotensors by at most two-point subspaces.

    [1, L] = L, [2_d, L] is the d-pullback of id_L against itself, and the
    restrictions along point inclusions glue these into [M, L].
    """
    n = len(M)
    idL = identity(L)
    objects, arrows = [], []
    slot = {}
    for y in range(n):
        slot[y] = len(objects)
        objects.append(L)
        for x in range(y):
            P, p1, p2 = eps_pullback(idL, idL, M.d[x][y])
            c = len(objects)
            objects.append(P)
            arrows.append((c, slot[x], p1))
            arrows.append((c, slot[y], p2))
    lim, _ = conical_limit(objects, arrows)
    labels = [tuple(fam[slot[x]] for x in range(n)) for fam in lim.points]
    return MetSpace(labels, lim.d, check=False)


@dataclass
class FactorizationPair:
    e: NonexpMap
    m: NonexpMap

    @property
    def composite(self):
        return compose(self.m, self.e)


def factorize(f):
    """f = m e with e onto the image (induced metric) and m the inclusion."""
    hit = set(f.images)
    image, m = subspace(f.cod, [y for y in f.cod.points if y in hit])
    e = NonexpMap(f.dom, image, f.images, check=False)
    return FactorizationPair(e, m)


def diagonal_fill_in(e, m, f, g):
    """Diagonal of the square m f = g e (e: A -> B surjective, m: C -> D isometry).

    Returns d: B -> C with d e = f and m d = g.
    """
    if e.dom != f.dom or e.cod != g.dom or f.cod != m.dom or g.cod != m.cod:
        raise MetError("maps do not form a square")
    if compose(m, f) != compose(g, e):
        raise MetError("square does not commute")
    if not e.is_surjective():
        raise MetError("left map is not surjective")
    if not is_isometry(m):
        raise MetError("right map is not an isometry")
    # m is injective on a metric space, so m^{-1} g is well defined on g's image
    back = {}
    for c, dpt in zip(m.dom.points, m.images):
        back.setdefault(dpt, c)
    dmap = NonexpMap(e.cod, m.dom, [back[y] for y in g.images])
    if compose(dmap, e) != f:
        raise MetError("diagonal does not restore the top map")
    return dmap


def check_sharp_sharp(f, eps):
    """|d(x, y) - d(fx, fy)| <= eps for all pairs; f may be any function."""
    eps = ext(eps)
    d, e, idx = f.dom.d, f.cod.d, f.idx
    n = len(idx)
    worst, where = ZERO, None
    for i in range(n):
        for j in range(i + 1, n):
            dv = deviation(d[i][j], e[idx[i]][idx[j]])
            if dv > worst:
                worst, where = dv, (f.dom.points[i], f.dom.points[j])
    return Verdict(worst <= eps, where if worst > eps else None, worst)


def eps_isometry_via_pushout(f, eps):
    """Whether the leg out of dom f in the eps-pushout of (f, id) is an isometry."""
    sq = eps_pushout(f, identity(f.dom), eps)
    return is_isometry(sq.g2)

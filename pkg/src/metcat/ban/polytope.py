"""Facets of a symmetric polytope conv(+-g_k) by the double description method.

The facets of the ball are the vertices of its polar {a : |a.g_k| <= 1}. We
enumerate the extreme rays of the homogenised cone {(a, s) : s -+ a.g_k >= 0}
one constraint at a time, with the combinatorial adjacency test.
"""

from fractions import Fraction

from .linalg import dot, independent_subset, inverse, transpose


def _normalise(v):
    m = max(abs(x) for x in v)
    return tuple(x / m for x in v) if m else v


def extreme_rays(rows, dim):
    """Extreme rays of the pointed cone {x : r.x >= 0 for r in rows} in R^dim.

    Rays are returned with their zero sets (indices of tight rows).
    """
    init = independent_subset(rows, dim)
    if len(init) < dim:
        raise ValueError("cone is not pointed")
    init = init[:dim]
    R = inverse([rows[i] for i in init])
    cols = transpose(R, dim)
    rays = []
    for j, col in enumerate(cols):
        zero = frozenset(init[i] for i in range(dim) if i != j)
        rays.append((_normalise(col), zero))
    done = set(init)
    for k, row in enumerate(rows):
        if k in done:
            continue
        done.add(k)
        vals = [dot(row, r) for r, _ in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        nxt = [(rays[i][0], rays[i][1] | {k} if vals[i] == 0 else rays[i][1])
               for i in range(len(rays)) if vals[i] >= 0]
        for p in pos:
            zp = rays[p][1]
            for n in neg:
                common = zp & rays[n][1]
                if len(common) < dim - 2:
                    continue
                if any(i != p and i != n and common <= z for i, (_, z) in enumerate(rays)):
                    continue
                vp, vn = vals[p], vals[n]
                w = tuple(vp * b - vn * a for a, b in zip(rays[p][0], rays[n][0]))
                nxt.append((_normalise(w), common | {k}))
        rays = nxt
    return rays


def ball_facets(generators, dim):
    """Facet functionals a (with max |a.g| = 1) of conv(+-generators), sorted."""
    if dim == 0:
        return []
    rows = []
    for g in generators:
        rows.append(tuple(-x for x in g) + (Fraction(1),))
        rows.append(tuple(g) + (Fraction(1),))
    out = set()
    for r, _ in extreme_rays(rows, dim + 1):
        s = r[-1]
        if s <= 0:
            raise ValueError("unit ball is unbounded; generators do not span")
        out.add(tuple(x / s for x in r[:-1]))
    return sorted(out)


def facet_support(a, generators):
    """Signed generators lying on the facet a.x = 1."""
    pts = []
    for g in generators:
        v = dot(a, g)
        if v == 1:
            pts.append(tuple(g))
        elif v == -1:
            pts.append(tuple(-x for x in g))
    return pts

"""Coproducts, quotients, (epsilon-)pushouts and chains of polyhedral spaces."""

from dataclasses import dataclass, field
from fractions import Fraction
import random

from .linalg import eye, independent_subset, matvec, nullspace, rank, scale, sub, vec
from .lp import solve_lp
from .spaces import (
    BanError, LinMap, PolyNormedSpace, identity_map, is_isometry_ban, norm_eval, op_norm,
)


def l1_coproduct(X, Y):
    """X + Y with norm ||x|| + ||y||: the union of the embedded generators."""
    n, m = X.dim, Y.dim
    gens = [tuple(g) + (Fraction(0),) * m for g in X.generators]
    gens += [(Fraction(0),) * n + tuple(g) for g in Y.generators]
    S = PolyNormedSpace(n + m, gens, check=False)
    i1 = LinMap(X, S, [[int(r == c) for c in range(n)] for r in range(n + m)])
    i2 = LinMap(Y, S, [[int(r == n + c) for c in range(m)] for r in range(n + m)])
    return S, i1, i2


def _enlarged(X, extra):
    """conv(ball X, +-extra), adding only vectors that fall outside the current ball."""
    gens = list(X.generators)
    cur = X
    for e in extra:
        e = vec(e)
        if any(e) and norm_eval(cur, e) > 1:
            gens.append(e)
            cur = PolyNormedSpace(X.dim, gens, check=False)
    return cur


def quotient_by_subspace(X, N):
    """X / span(N) with the quotient norm, and the projection.

    Coordinates on the quotient come from a basis of the annihilator of N, so
    the quotient ball is the image of X's ball.
    """
    N = [vec(v) for v in N]
    if any(len(v) != X.dim for v in N):
        raise BanError("kernel vectors have the wrong length")
    if rank(N, X.dim) != len(N):
        raise BanError("kernel vectors are not linearly independent")
    if not N:
        return X, identity_map(X)
    Q = nullspace(N, X.dim)  # rows a with a.n = 0 for all n in N
    gens = [matvec(Q, g) for g in X.generators]
    Y = PolyNormedSpace(len(Q), gens, check=False).reduced()
    return Y, LinMap(X, Y, Q)


@dataclass
class BanSquare:
    f1: LinMap
    f2: LinMap
    g1: LinMap
    g2: LinMap
    eps: Fraction

    @property
    def apex(self):
        return self.g1.cod

    @property
    def slack(self):
        return op_norm((self.g1 @ self.f1) - (self.g2 @ self.f2))


def _pushout_by_quotient(f1, f2):
    if f1.dom != f2.dom:
        raise BanError("pushout needs a span")
    S, i1, i2 = l1_coproduct(f1.cod, f2.cod)
    A = f1.dom
    rel = [sub(i1(f1(e)), i2(f2(e))) for e in eye(A.dim)]
    rel = [rel[k] for k in independent_subset(rel, S.dim)]
    Q, q = quotient_by_subspace(S, rel)
    return BanSquare(f1, f2, q @ i1, q @ i2, Fraction(0))


def pushout_ban(f1, f2, check=True):
    """Pushout of two isometries out of A: the l1 sum modulo {(f1 a, -f2 a)}."""
    if check and not (is_isometry_ban(f1) and is_isometry_ban(f2)):
        raise BanError("pushout_ban expects isometries")
    return _pushout_by_quotient(f1, f2)


def eps_coequalizer_ban(u, v, eps):
    """B with ball enlarged by (1/eps)(u - v)(generators of A); the map is the identity matrix.

    At eps = 0 this is the exact coequalizer B / im(u - v).
    """
    if u.dom != v.dom or u.cod != v.cod:
        raise BanError("maps are not parallel")
    eps = Fraction(eps)
    B = u.cod
    d = u - v
    if eps == 0:
        rel = [d(e) for e in eye(u.dom.dim)]
        rel = [rel[k] for k in independent_subset(rel, B.dim)]
        return quotient_by_subspace(B, rel)
    if eps < 0:
        raise BanError("eps must be nonnegative")
    C = _enlarged(B, [scale(1 / eps, d(g)) for g in u.dom.generators])
    return C, LinMap(B, C, eye(B.dim))


def eps_pushout_ban(f1, f2, eps):
    """eps-coequalizer of in1 f1 and in2 f2 on the l1 sum (exact pushout at eps = 0)."""
    if f1.dom != f2.dom:
        raise BanError("eps-pushout needs a span")
    eps = Fraction(eps)
    if eps == 0:
        return _pushout_by_quotient(f1, f2)
    S, i1, i2 = l1_coproduct(f1.cod, f2.cod)
    C, c = eps_coequalizer_ban(i1 @ f1, i2 @ f2, eps)
    return BanSquare(f1, f2, c @ i1, c @ i2, eps)


def eps_pushout_leg_isometry_ban(f, eps):
    """Whether the leg out of dom f in the eps-pushout of (f, id) is an isometry."""
    sq = eps_pushout_ban(f, identity_map(f.dom), eps)
    return is_isometry_ban(sq.g2)


# ---------------------------------------------------------------------------
# chains

class BanChain:
    """K_0 -> K_1 -> ... with isometric links (checked when check=True).

    ``spanning`` holds a designated spanning list per stage (default: the
    stage's generators). Chains may grow with ``append``.
    """

    def __init__(self, stages, links, spanning=None, check=True):
        stages, links = list(stages), list(links)
        if len(links) != max(len(stages) - 1, 0):
            raise BanError("a chain with m+1 stages needs m links")
        for i, k in enumerate(links):
            if k.dom != stages[i] or k.cod != stages[i + 1]:
                raise BanError(f"link {i} does not connect stages {i} and {i + 1}")
            if check and not is_isometry_ban(k):
                raise BanError(f"link {i} is not an isometry")
        self.stages = stages
        self.links = links
        self.spanning = list(spanning) if spanning else [list(K.generators) for K in stages]
        self._comp = {}

    def __len__(self):
        return len(self.stages)

    @property
    def top(self):
        return len(self.stages) - 1

    def append(self, link, check=False):
        if link.dom != self.stages[-1]:
            raise BanError("link does not start at the top stage")
        if check and not is_isometry_ban(link):
            raise BanError("appended link is not an isometry")
        self.stages.append(link.cod)
        self.links.append(link)
        self.spanning.append(list(link.cod.generators))

    def composite(self, i, j):
        if not 0 <= i <= j < len(self.stages):
            raise BanError(f"no composite k_{i},{j}")
        key = (i, j)
        if key not in self._comp:
            f = identity_map(self.stages[i])
            for t in range(i, j):
                f = self.links[t] @ f
            self._comp[key] = f
        return self._comp[key]


# ---------------------------------------------------------------------------
# approximate smallness: factor a map into the top through an earlier stage

@dataclass
class FactorCertificate:
    stage: int
    r: Fraction
    delta: Fraction
    eps: Fraction
    distances: list
    rescaled: bool
    slack: Fraction
    norm: Fraction

    @property
    def ok(self):
        return self.slack <= self.eps and self.norm <= 1

    def lines(self):
        from ..extdist import fmt
        return [f"stage={self.stage} r={fmt(self.r)} delta={fmt(self.delta)} "
                f"eps={fmt(self.eps)} rescaled={int(self.rescaled)} "
                f"slack={fmt(self.slack)} norm={fmt(self.norm)} "
                f"{'OK' if self.ok else 'FAIL'}"]


@dataclass
class FactorResult:
    ok: bool
    stage: int = None
    map: LinMap = None
    certificate: FactorCertificate = None
    best_delta: Fraction = None

    def __bool__(self):
        return self.ok


def coordinate_l1_bound(A):
    """r = max of sum_j |a_j| over the unit ball of A (attained at a generator)."""
    return max((sum((abs(x) for x in g), Fraction(0)) for g in A.generators),
               default=Fraction(0))


def nearest_in_image(k, y):
    """(min_u ||k u - y||, minimiser u) by exact LP."""
    K, T = k.dom, k.cod
    m, gens = K.dim, T.generators
    p = len(gens)
    cols_k = [[k.matrix[r][c] for c in range(m)] for r in range(T.dim)]
    A = [cols_k[r] + [-v for v in cols_k[r]] + [-g[r] for g in gens] + [g[r] for g in gens]
         for r in range(T.dim)]
    res = solve_lp([0] * (2 * m) + [1] * (2 * p), A, list(y))
    x = res.x
    u = tuple(x[c] - x[m + c] for c in range(m))
    return res.value, u


def factor_through_stage(A, ch, f, eps, start=0):
    """Find the earliest stage i >= start and f'': A -> K_i with ||k f'' - f|| <= eps, ||f''|| <= 1.

    With r the l1-coordinate bound of A and delta = eps/(2r), each basis image
    f(e_j) is approximated within delta from stage i (exact LP projection).
    The linear extension f' is then scaled by 1/(1 + eps/2), unless the
    factorisation is already exact.
    """
    eps = Fraction(eps)
    top = ch.top
    if f.dom != A or f.cod != ch.stages[top]:
        raise BanError("f must map A into the top stage")
    r = coordinate_l1_bound(A)
    delta = eps / (2 * r) if r else eps
    targets = [f(e) for e in eye(A.dim)]
    best_delta = None
    for i in range(start, top + 1):
        k = ch.composite(i, top)
        dists, cols = [], []
        for y in targets:
            dist, u = nearest_in_image(k, y)
            dists.append(dist)
            cols.append(u)
        worst = max(dists, default=Fraction(0))
        best_delta = worst if best_delta is None else min(best_delta, worst)
        if worst > delta:
            continue
        K = ch.stages[i]
        fp = LinMap(A, K, [[cols[j][row] for j in range(A.dim)] for row in range(K.dim)])
        exact = worst == 0
        fpp = fp if exact else fp.scaled(1 / (1 + eps / 2))
        slack = op_norm((k @ fpp) - f)
        cert = FactorCertificate(i, r, delta, eps, dists, not exact, slack, op_norm(fpp))
        return FactorResult(cert.ok, i, fpp, cert, worst)
    return FactorResult(False, None, None, None, best_delta)


# ---------------------------------------------------------------------------
# saturation in Ban

@dataclass
class SaturationRecord:
    task: int
    h_index: int
    u: tuple
    slack: Fraction
    dim_before: int
    dim_after: int


@dataclass
class SaturationCertificate:
    n: int
    records: list = field(default_factory=list)

    @property
    def ok(self):
        return all(r.slack <= Fraction(1, self.n) for r in self.records)


def sample_contraction(A, B, rng, spread=2):
    """A deterministic pseudo-random rational map A -> B of norm <= 1."""
    M = [[Fraction(rng.randint(-spread, spread), rng.randint(1, spread))
          for _ in range(A.dim)] for _ in range(B.dim)]
    u = LinMap(A, B, M)
    nrm = op_norm(u)
    return u.scaled(1 / nrm) if nrm > 1 else u


def saturation_step_ban(K, H, n, attach_budget, seed=0, order=None, check=True):
    """Attach up to ``attach_budget`` tasks (h, u) by 1/n-pushouts of h along u.

    ``K`` is a space (a new chain starts at it) or a BanChain (extended in
    place). Tasks cycle through H in ``order`` (default: catalogue order); u is
    drawn from a seeded sampler. Returns the chain and the certificate.
    """
    if check:
        for i, h in enumerate(H):
            if not is_isometry_ban(h):
                raise BanError(f"catalogue member {i} is not an isometry")
    ch = K if isinstance(K, BanChain) else BanChain([K], [], check=False)
    cert = SaturationCertificate(n)
    if not H:
        return ch, cert
    order = list(order) if order is not None else list(range(len(H)))
    rng = random.Random(seed)
    eps = Fraction(1, n)
    for t in range(attach_budget):
        hi = order[t % len(order)]
        h = H[hi]
        top = ch.stages[-1]
        u = sample_contraction(h.dom, top, rng)
        sq = eps_pushout_ban(u, h, eps)
        ch.append(sq.g1)
        cert.records.append(SaturationRecord(t, hi, u.matrix, sq.slack, top.dim, sq.apex.dim))
    return ch, cert

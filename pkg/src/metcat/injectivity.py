"""Approximate injectivity and the approximate small-object argument in Met,
at finite truncation (explicit n_max, rounds, chain lengths)."""

from dataclasses import dataclass, field
from fractions import Fraction

from .extdist import INF, ext, ext_max, fmt
from .met.approx import eps_pushout
from .met.core import (
    ZERO, FiniteChain, MetError, MetSpace, NonexpMap, Verdict, colimit_chain, compose,
    hom_distance, homset,
)


def injectivity_deficiency(h, f):
    """min over f': cod h -> X of d(f' h, f); INF when there is no such f'."""
    return best_extension(h, f)[0]


def best_extension(h, f):
    """(deficiency, f') with f' the first minimiser in hom-set order."""
    if h.dom != f.dom:
        raise MetError("h and f need a common domain")
    best, arg = INF, None
    X = f.cod
    for g in homset(h.cod, X):
        v = _pointwise_sup(X, [g.idx[i] for i in h.idx], f.idx)
        if arg is None or v < best:
            best, arg = v, g
            if v == 0:
                break
    return best, arg


def _pointwise_sup(X, a, b):
    e = X.d
    return ext_max((e[i][j] for i, j in zip(a, b)), default=ZERO)


def is_approx_injective(X, H, eps):
    """Worst injectivity deficiency of X over H, compared with eps.

    Witness is (h, f, deficiency) for the worst pair (first in order on ties).
    """
    eps = ext(eps)
    worst, wit = ZERO, None
    for h in H:
        for f in homset(h.dom, X):
            v = injectivity_deficiency(h, f)
            if wit is None or v > worst:
                worst, wit = v, (h, f, v)
            if worst is INF:
                break
    return Verdict(worst <= eps, wit, worst)


def consequence_by_triangles(h, h2, n_max):
    """Look for f_n: B' -> B with d(f_n h2, h) <= 1/n for every n <= n_max.

    Sufficient criterion only: True means "consequence up to the bound n_max".
    The witness is a dict n -> f_n; the value is the best achievable distance.
    """
    if h.dom != h2.dom:
        raise MetError("h and h' need a common domain")
    best, arg = INF, None
    for g in homset(h2.cod, h.cod):
        v = hom_distance(compose(g, h2), h)
        if arg is None or v < best:
            best, arg = v, g
    wit = {n: arg for n in range(1, n_max + 1) if arg is not None and best <= Fraction(1, n)}
    return Verdict(len(wit) == n_max, wit, best)


def cancellable_closure_member(g, H, n_max):
    """For each n <= n_max find h in H (same domain as g) and f_n with d(f_n g, h) <= 1/n."""
    wit = {}
    best = INF
    for n in range(1, n_max + 1):
        bound = Fraction(1, n)
        for k, h in enumerate(H):
            if h.dom != g.dom:
                continue
            for f in homset(g.cod, h.cod):
                v = hom_distance(compose(f, g), h)
                best = min(best, v)
                if v <= bound:
                    wit[n] = (k, f)
                    break
            if n in wit:
                break
    return Verdict(len(wit) == n_max, wit, best)


# ---------------------------------------------------------------------------
# approximately cellular composites

class CellularChain(FiniteChain):
    """A finite chain whose links are legs of recorded eps-squares."""

    def __init__(self, stages, links, squares):
        super().__init__(stages, links)
        self.squares = squares


def approx_cellular_compose(K0, script):
    """Attach each (h, u, eps) in turn by an eps-pushout of h along u."""
    stages, links, squares = [K0], [], []
    for step, (h, u, eps) in enumerate(script):
        if u.dom != h.dom or u.cod != stages[-1]:
            raise MetError(f"script step {step} does not attach to the current stage")
        sq = eps_pushout(u, h, eps)
        stages.append(sq.apex)
        links.append(sq.g1)
        squares.append(sq)
    return CellularChain(stages, links, squares)


# ---------------------------------------------------------------------------
# smallness at finite truncation

@dataclass
class SmallnessResult:
    ok: bool
    stage: int = None
    factor: NonexpMap = None
    deficiencies: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def smallness_witness(A, ch, f, eps, legs=None):
    """Smallest stage i with f' : A -> K_i such that d(k_i f', f) <= eps.

    ``legs`` are the maps K_i -> cod f; by default the colimit legs of ``ch``.
    ``deficiencies`` lists the best distance reached at each stage scanned.
    """
    eps = ext(eps)
    if legs is None:
        legs = colimit_chain(ch).legs
    if f.dom != A:
        raise MetError("f must start at A")
    defs = []
    for i, (K, k) in enumerate(zip(ch.stages, legs)):
        if k.cod != f.cod:
            raise MetError("f does not land in the colimit apex")
        best, arg = INF, None
        for g in homset(A, K):
            v = _pointwise_sup(f.cod, [k.idx[j] for j in g.idx], f.idx)
            if arg is None or v < best:
                best, arg = v, g
        defs.append(best)
        if arg is not None and best <= eps:
            return SmallnessResult(True, i, arg, defs)
    return SmallnessResult(False, None, None, defs)


def merge_witness(ch, i, f1, f2, eps):
    """Least j >= i with d(k_ij f1, k_ij f2) <= eps, or None."""
    eps = ext(eps)
    for j in range(i, len(ch)):
        k = ch.composite(i, j)
        if hom_distance(compose(k, f1), compose(k, f2)) <= eps:
            return j
    return None


# ---------------------------------------------------------------------------
# weak reflection by repeated 1/n-pushouts

@dataclass
class TaskRecord:
    round: int
    h_index: int
    u: tuple
    n: int
    attached_at: int
    history: list = field(default_factory=list)

    @property
    def deficiency(self):
        return self.history[-1]

    @property
    def ok(self):
        return self.deficiency <= Fraction(1, self.n)

    @property
    def monotone(self):
        return all(b <= a for a, b in zip(self.history, self.history[1:]))


@dataclass
class ReflectionCertificate:
    rounds: int
    n_max: int
    handled: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    sizes: list = field(default_factory=list)

    @property
    def ok(self):
        return all(t.ok and t.monotone for t in self.handled)

    def lines(self):
        out = []
        for t in self.handled:
            tag = "OK" if t.ok and t.monotone else "FAIL"
            u = ",".join(_label(p) for p in t.u)
            out.append(f"round={t.round} h={t.h_index} u=[{u}] n={t.n} "
                       f"deficiency={fmt(t.deficiency)} {tag}")
        return out

    def text(self):
        return "\n".join(self.lines())


def _label(p):
    if isinstance(p, tuple):
        return "(" + ",".join(_label(q) for q in p) + ")"
    return str(p)


def _attach(labels, D, B, h_idx, u_idx, eps, tag):
    """eps-pushout of h: A -> B along u: A -> K, K given by (labels, D).

    K and B are metric blocks joined by bridges of length eps > 0 between
    u(a) and h(a); distances are closed through the bridge endpoints only,
    which is enough because each block is already a metric. Points of K keep
    their labels, points of B become ``(tag, b)``.
    """
    nK, nB = len(labels), len(B)
    new_labels = list(labels) + [(tag, b) for b in B.points]
    if len(set(new_labels)) != len(new_labels):
        raise MetError(f"label clash while attaching task {tag}")
    N = nK + nB

    def base(x, y):
        if x < nK and y < nK:
            return D[x][y]
        if x >= nK and y >= nK:
            return B.d[x - nK][y - nK]
        return INF

    portals = sorted(set(u_idx) | {nK + j for j in h_idx})
    P = len(portals)
    pos = {p: k for k, p in enumerate(portals)}
    G = [[base(p, q) for q in portals] for p in portals]
    for i, j in zip(u_idx, h_idx):
        a, b = pos[i], pos[nK + j]
        if eps < G[a][b]:
            G[a][b] = G[b][a] = eps
    for k in range(P):
        for i in range(P):
            if G[i][k] is INF:
                continue
            for j in range(P):
                s = G[i][k] + G[k][j]
                if s < G[i][j]:
                    G[i][j] = s
    to_portal = [[base(x, p) for p in portals] for x in range(N)]
    newD = []
    for x in range(N):
        tx = to_portal[x]
        row = []
        for y in range(N):
            best = base(x, y)
            ty = to_portal[y]
            for a in range(P):
                if tx[a] is INF:
                    continue
                Ga = G[a]
                for b in range(P):
                    if Ga[b] is INF or ty[b] is INF:
                        continue
                    s = tx[a] + Ga[b] + ty[b]
                    if s < best:
                        best = s
            row.append(best)
        newD.append(row)
    return new_labels, newD


def weak_reflection(K, H, n_max, rounds, audit_residuals=False):
    """Repeatedly attach 1/n-pushouts of every h in H along every u into the stage.

    Each round enumerates the tasks (h, u, n) against the stage reached at the
    start of that round, ordered by h index, hom-set order of u, then n. Points
    of K keep their labels; a point b of cod h attached by task t is labeled
    ``(t, b)``. Returns r: K -> K_hat and the certificate.
    """
    if n_max < 1 or rounds < 1:
        raise MetError("n_max and rounds must be at least 1")
    labels = list(K.points)
    D = [list(r) for r in K.d]
    cert = ReflectionCertificate(rounds, n_max)
    cert.sizes.append(len(labels))
    pending = []  # (record, witness point labels for h(a), labels for u(a))
    task_no = 0
    for rnd in range(1, rounds + 1):
        stage = MetSpace(labels, D, check=False)
        tasks = []
        for hi, h in enumerate(H):
            for u in homset(h.dom, stage):
                for n in range(1, n_max + 1):
                    tasks.append((hi, h, u, n))
        for hi, h, u, n in tasks:
            tag = f"t{task_no}"
            task_no += 1
            index = {p: i for i, p in enumerate(labels)}
            u_idx = [index[y] for y in u.images]
            labels, D = _attach(labels, D, h.cod, h.idx, u_idx, Fraction(1, n), tag)
            rec = TaskRecord(rnd, hi, tuple(u.images), n, len(cert.sizes))
            ends = [(labels.index((tag, h.cod.points[j])), i) for j, i in zip(h.idx, u_idx)]
            pending.append((rec, ends))
            cert.handled.append(rec)
            # every handled task is re-measured in the new stage
            for r, pairs in pending:
                r.history.append(ext_max((D[a][b] for a, b in pairs), default=ZERO))
            cert.sizes.append(len(labels))
    Khat = MetSpace(labels, D, check=False)
    r = NonexpMap(K, Khat, K.points, check=False)
    cert.space = Khat
    if audit_residuals:
        for hi, h in enumerate(H):
            for f in homset(h.dom, Khat):
                v = injectivity_deficiency(h, f)
                cert.residuals.append((hi, tuple(f.images), v))
    return r, cert

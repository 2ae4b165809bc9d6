"""Extension along eps-isometries and the approximate back-and-forth between
two chains of finite-dimensional spaces with isometric links."""

from dataclasses import dataclass, field
from fractions import Fraction

from ..extdist import fmt
from .constructions import _pushout_by_quotient, eps_pushout_ban, factor_through_stage
from .linalg import inverse
from .spaces import BanError, LinMap, identity_map, op_norm


class BudgetExceeded(BanError):
    pass


class SaturationOracle:
    """Extends isometries into a chain, attaching exact pushouts on demand.

    ``extend(v, i, f, delta)`` takes an isometry v: A -> B and an isometry
    f: A -> K_i and returns (j, f'': B -> K_j, bound) with
    ||f'' v - k_ij f|| <= bound <= delta. When v is invertible the answer is
    f v^{-1} at stage i. Otherwise the pushout of (k_{i,top} f, v) becomes a
    new top stage. ``max_dim`` bounds the stages it is willing to build.
    """

    def __init__(self, chain, max_dim=12, attach_budget=64):
        self.chain = chain
        self.max_dim = max_dim
        self.attach_budget = attach_budget
        self.attached = 0

    def extend(self, v, i, f, delta):
        ch = self.chain
        A, B = v.dom, v.cod
        if f.dom != A or f.cod != ch.stages[i]:
            raise BanError("f must map dom v into stage i")
        if A.dim == B.dim:
            vinv = LinMap(B, A, inverse(v.matrix)) if A.dim else LinMap(B, A, [])
            fpp = f @ vinv
            return i, fpp, op_norm((fpp @ v) - f)
        if self.attached >= self.attach_budget:
            raise BudgetExceeded("oracle attach budget exhausted")
        top = ch.top
        ftop = ch.composite(i, top) @ f
        if ch.stages[top].dim + B.dim - A.dim > self.max_dim:
            raise BudgetExceeded(f"extension would exceed dimension {self.max_dim}")
        sq = _pushout_by_quotient(ftop, v)
        ch.append(sq.g1)
        self.attached += 1
        j = ch.top
        fpp = sq.g2
        return j, fpp, op_norm((fpp @ v) - (ch.composite(i, j) @ f))


@dataclass
class ExtendResult:
    stage: int
    map: LinMap
    bound: Fraction
    eps: Fraction
    delta: Fraction

    @property
    def ok(self):
        return self.bound <= self.eps + self.delta


def extend_along_eps_isometry(h, eps, f, i, oracle, delta):
    """f': cod h -> K_j with ||f' h - k_ij f|| <= eps + delta.

    h: A -> A' satisfies (1 - eps)||x|| <= ||h x|| and ||h|| <= 1; f: A -> K_i is
    an isometry. B is the eps-pushout of (h, id_A) with isometric legs
    u: A' -> B, v: A -> B, u h ~eps v; at eps = 0 the pushout is A' itself.
    """
    eps, delta = Fraction(eps), Fraction(delta)
    if eps == 0:
        u, v = identity_map(h.cod), h
    else:
        sq = eps_pushout_ban(h, identity_map(h.dom), eps)
        u, v = sq.g1, sq.g2
    j, fpp, _ = oracle.extend(v, i, f, delta)
    fp = fpp @ u
    bound = op_norm((fp @ h) - (oracle.chain.composite(i, j) @ f))
    return ExtendResult(j, fp, bound, eps, delta)


@dataclass
class BnFState:
    """One half-step: kind 'forth' builds f_{n+1} and bounds (**)_n,
    kind 'back' builds g_{n+1} and bounds (*)_{n+1}."""

    n: int
    kind: str
    i: int
    j: int
    map: LinMap
    iso_eps: Fraction
    extension_bound: Fraction
    value: Fraction
    limit: Fraction
    advanced: bool = True

    @property
    def ok(self):
        return self.value <= self.limit

    def line(self):
        tag = "(**)" if self.kind == "forth" else "(*)"
        idx = self.n if self.kind == "forth" else self.n + 1
        return (f"{tag} n={idx} i={self.i} j={self.j} value={fmt(self.value)} "
                f"limit={fmt(self.limit)} {'OK' if self.ok else 'FAIL'}")


@dataclass
class BnFRun:
    states: list = field(default_factory=list)
    complete: bool = False
    error: str = None
    f: LinMap = None
    g: LinMap = None

    @property
    def ok(self):
        return self.complete and all(s.ok for s in self.states)

    def lines(self):
        out = [s.line() for s in self.states]
        if not self.complete:
            out.append(f"INCOMPLETE {self.error}")
        return out


def _half_step(h, h_eps, src_idx, dst_chain, dst_oracle, target, ext_tol, start):
    """Extend along h (landing in dst_chain) and factor through a stage >= start."""
    A = h.cod
    ident = identity_map(dst_chain.stages[src_idx])
    delta = max(Fraction(0), ext_tol - h_eps)
    ext = extend_along_eps_isometry(h, h_eps, ident, src_idx, dst_oracle, delta)
    top = dst_chain.top
    t_top = dst_chain.composite(ext.stage, top) @ ext.map
    eta = min(ext_tol, target - ext.bound)
    if eta < 0:
        raise BudgetExceeded(f"extension bound {fmt(ext.bound)} leaves no room for {fmt(target)}")
    advanced = start <= top
    res = factor_through_stage(A, dst_chain, t_top, eta, start=start if advanced else top)
    if not res.ok:
        raise BudgetExceeded(f"no stage factors within {fmt(eta)} (best {fmt(res.best_delta)})")
    iso_eps = Fraction(0) if res.certificate.slack == 0 and ext.bound == 0 else eta
    return res, ext, iso_eps, advanced


def back_and_forth(chK, chL, oracleK, oracleL, N):
    """Run N rounds; round n records (**)_n then (*)_{n+1}.

    f_{n+1}: K_{i_{n+1}} -> L_{j_{n+1}} and g_{n+1}: L_{j_{n+1}} -> K_{i_{n+2}}
    are stage maps; the recorded values are exact operator norms of
    f_{n+1} g_n - l_{j_n j_{n+1}} and g_{n+1} f_{n+1} - k_{i_{n+1} i_{n+2}}.
    """
    if chK.stages[0].dim or chL.stages[0].dim:
        raise BanError("both chains must start at the zero space")
    run = BnFRun()
    i_next, j = 0, 0          # g_0 = id_0 : L_0 -> K_0
    g, g_eps = identity_map(chL.stages[0]), Fraction(0)
    f = None
    try:
        for n in range(N):
            target = Fraction(2, n + 1)
            # forth: t ~ l_{j_n} along g_n, then f_{n+1} through an L stage
            res, ext, f_eps, adv = _half_step(
                g, g_eps, j, chL, oracleL, target, Fraction(1, n + 1), j + 1)
            j_new = res.stage
            f = res.map
            val = op_norm((f @ g) - chL.composite(j, j_new))
            run.states.append(BnFState(n, "forth", i_next, j_new, f, f_eps, ext.bound, val,
                                       target, adv))
            j = j_new
            # back: t ~ k_{i_{n+1}} along f_{n+1}, then g_{n+1} through a K stage
            target2 = Fraction(2, n + 2)
            res, ext, g_eps, adv = _half_step(
                f, f_eps, i_next, chK, oracleK, target2, Fraction(1, n + 2), i_next + 1)
            i_new = res.stage
            g = res.map
            val = op_norm((g @ f) - chK.composite(i_next, i_new))
            run.states.append(BnFState(n, "back", i_new, j, g, g_eps, ext.bound, val,
                                       target2, adv))
            i_next = i_new
        run.complete = True
    except BanError as exc:
        run.error = str(exc)
    run.f, run.g = f, g
    return run

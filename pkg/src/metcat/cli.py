"""Command-line front end: ``metcat <subcommand> FILE [options]``.

Exit status: 0 when every certificate line passes, 1 when one fails, 2 on
parse or usage errors.
"""

import argparse
import os
import sys
from fractions import Fraction

from . import oracles
from .extdist import INF, fmt, parse_ext, parse_rational
from .met.core import MetError, colimit_chain, compose, hom_distance, is_isometry
from .met.approx import (
    cotensor, cotensor_via_pullbacks, eps_coequalizer, eps_equalizer, eps_pullback,
    eps_pushout, factorize,
)
from .textio import (
    ParseError, format_banmap, format_banspace, format_map, format_space, parse_file,
    stringify_space,
)


class UsageError(Exception):
    pass


class Output:
    def __init__(self):
        self.blocks = []
        self.cert = []

    def space(self, X, name):
        self.blocks.append(format_space(X, name))

    def map(self, f, name, dom, cod):
        self.blocks.append(format_map(f, name, dom, cod))

    def banspace(self, X, name):
        self.blocks.append(format_banspace(X, name))

    def banmap(self, f, name, dom, cod):
        self.blocks.append(format_banmap(f, name, dom, cod))

    def check(self, ok, text):
        self.cert.append(f"{text} {'OK' if ok else 'FAIL'}")

    def note(self, text):
        self.cert.append(text)

    @property
    def ok(self):
        return not any(line.endswith(" FAIL") for line in self.cert)


def _rat(s):
    try:
        return parse_rational(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _ext(s):
    try:
        return parse_ext(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def max_points():
    return int(os.environ.get("METCAT_MAX_POINTS", "64"))


def _check_caps(doc):
    cap = max_points()
    for name, X in doc.spaces.items():
        if len(X) > cap:
            raise UsageError(f"space {name} has {len(X)} points, over METCAT_MAX_POINTS={cap}")


def _get(table, name, what):
    if name not in table:
        raise UsageError(f"no {what} named {name!r} in the input")
    return table[name]


def _name_of(doc_table, obj, fallback):
    for k, v in doc_table.items():
        if v is obj or v == obj:
            return k
    return fallback


def _emit_inputs(out, doc, spaces):
    seen = set()
    for X in spaces:
        name = _name_of(doc.spaces, X, None)
        if name and name not in seen:
            seen.add(name)
            out.space(X, name)


# ---------------------------------------------------------------------------
# Met subcommands

def cmd_met_colimit(args, doc, out):
    ch = _get(doc.chains, args.chain, "chain")
    col = colimit_chain(ch)
    apex = stringify_space(col.apex)
    _emit_inputs(out, doc, ch.stages)
    out.space(apex, "Colim")
    for i, (K, k) in enumerate(zip(ch.stages, col.legs)):
        out.map(k, f"k{i}", _name_of(doc.spaces, K, f"K{i}"), "Colim")
    for i, k in enumerate(col.legs):
        ok = True
        K = ch.stages[i]
        for x in K.points:
            for y in K.points:
                want = min(ch.stages[j].dist(ch.composite(i, j)(x), ch.composite(i, j)(y))
                           for j in range(i, len(ch)))
                ok = ok and col.apex.dist(k(x), k(y)) == want
        out.check(ok, f"colimit-formula stage={i}")
    if args.audit:
        carrier = list(col.apex.points)
        legs = [(K, k.images) for K, k in zip(ch.stages, col.legs)]
        D = oracles.shortest_path_oracle(len(carrier), oracles.gluing_edges(carrier, legs))
        out.check([list(r) for r in col.apex.d] == D, "audit shortest-path")


def _met_eps(args):
    if args.eps is None:
        raise UsageError("--eps is required")
    return args.eps


def cmd_eps_pushout(args, doc, out):
    f1 = _get(doc.maps, args.f1, "map")
    f2 = _get(doc.maps, args.f2, "map")
    eps = _met_eps(args)
    sq = eps_pushout(f1, f2, eps)
    _emit_inputs(out, doc, [f1.dom, f1.cod, f2.cod])
    out.space(sq.apex, "P")
    out.map(sq.g1, "g1", _name_of(doc.spaces, f1.cod, "B1"), "P")
    out.map(sq.g2, "g2", _name_of(doc.spaces, f2.cod, "B2"), "P")
    out.check(sq.slack <= eps, f"eps-commutative slack={fmt(sq.slack)} eps={fmt(eps)}")
    if args.audit:
        rep = oracles.verify_pushout(sq, oracles.competitor_grid(args.max_points))
        out.check(rep.passed, f"audit universality competitors={rep.competitors}")


def cmd_eps_coequalizer(args, doc, out):
    u = _get(doc.maps, args.u, "map")
    v = _get(doc.maps, args.v, "map")
    eps = _met_eps(args)
    c = eps_coequalizer(u, v, eps)
    _emit_inputs(out, doc, [u.dom, u.cod])
    out.space(c.cod, "Q")
    out.map(c, "c", _name_of(doc.spaces, u.cod, "B"), "Q")
    slack = hom_distance(compose(c, u), compose(c, v))
    out.check(slack <= eps and c.is_surjective(),
              f"eps-coequalizer slack={fmt(slack)} eps={fmt(eps)} surjective={int(c.is_surjective())}")
    if args.audit:
        rep = oracles.verify_coequalizer(u, v, eps, c, oracles.competitor_grid(args.max_points))
        out.check(rep.passed, f"audit universality competitors={rep.competitors}")


def cmd_cotensor(args, doc, out):
    M = _get(doc.spaces, args.M, "space")
    L = _get(doc.spaces, args.L, "space")
    C = cotensor(M, L)
    out.space(C, "Cotensor")
    V = cotensor_via_pullbacks(M, L)
    out.check(V == C, f"via-pullbacks points={len(C)}")
    if args.audit:
        match = oracles.find_isometric_bijection(C, V)
        out.check(match is not None, "audit isometric-bijection")


def cmd_factorize(args, doc, out):
    f = _get(doc.maps, args.map, "map")
    fp = factorize(f)
    _emit_inputs(out, doc, [f.dom, f.cod])
    dn = _name_of(doc.spaces, f.dom, "A")
    cn = _name_of(doc.spaces, f.cod, "B")
    out.space(fp.e.cod, "Im")
    out.map(fp.e, "e", dn, "Im")
    out.map(fp.m, "m", "Im", cn)
    out.check(fp.composite == f, "m.e=f")
    out.check(fp.e.is_surjective(), "e-surjective")
    out.check(bool(is_isometry(fp.m)), "m-isometry")


def _catalogue(doc, names, table):
    if not names:
        raise UsageError("--H needs at least one map name")
    return [_get(table, n, "map") for n in names.split(",")]


def cmd_inject_check(args, doc, out):
    from .injectivity import injectivity_deficiency
    X = _get(doc.spaces, args.space, "space")
    H = _catalogue(doc, args.H, doc.maps)
    eps = _met_eps(args)
    from .met.core import homset
    for name, h in zip(args.H.split(","), H):
        worst = Fraction(0)
        for f in homset(h.dom, X):
            v = injectivity_deficiency(h, f)
            worst = max(worst, v)
        out.check(worst <= eps, f"h={name} worst-deficiency={fmt(worst)} eps={fmt(eps)}")
        if args.audit:
            ow = Fraction(0)
            for f in oracles.enumerate_hom(h.dom, X):
                best = min((oracles.sup_distance(NonexpComp(g, h), f)
                            for g in oracles.enumerate_hom(h.cod, X)), default=INF)
                ow = max(ow, best)
            out.check(ow == worst, f"audit h={name} deficiency={fmt(ow)}")


class NonexpComp:
    """g after h as a bare callable with the attributes sup_distance reads."""

    def __init__(self, g, h):
        self.g, self.h = g, h
        self.dom, self.cod = h.dom, g.cod

    def __call__(self, x):
        return self.g(self.h(x))


def cmd_weak_reflect(args, doc, out):
    from .injectivity import weak_reflection
    K = _get(doc.spaces, args.space, "space")
    H = _catalogue(doc, args.H, doc.maps)
    r, cert = weak_reflection(K, H, args.n_max, args.rounds)
    _emit_inputs(out, doc, [K])
    out.space(cert.space, "Khat")
    out.map(r, "r", args.space, "Khat")
    out.cert.extend(cert.lines())
    if args.audit:
        Khat = cert.space
        for t in cert.handled:
            h = H[t.h_index]
            u = oracles.NonexpMap(h.dom, Khat, list(t.u), check=False)
            try:
                cands = oracles.enumerate_hom(h.cod, Khat)
            except MetError:
                out.note(f"audit round={t.round} h={t.h_index} n={t.n} skipped: hom cap")
                continue
            best = min((oracles.sup_distance(NonexpComp(g, h), u) for g in cands), default=INF)
            out.check(best <= Fraction(1, t.n),
                      f"audit round={t.round} h={t.h_index} n={t.n} deficiency={fmt(best)}")


# ---------------------------------------------------------------------------
# Ban subcommands

def _emit_bans(out, doc, spaces, fallbacks):
    names = []
    for X, fb in zip(spaces, fallbacks):
        name = _name_of(doc.banspaces, X, fb)
        if name not in names:
            out.banspace(X, name)
        names.append(name)
    return names

def cmd_ban_pushout(args, doc, out):
    from .ban.constructions import pushout_ban
    from .ban.spaces import is_isometry_ban
    f1 = _get(doc.banmaps, args.f1, "banmap")
    f2 = _get(doc.banmaps, args.f2, "banmap")
    sq = pushout_ban(f1, f2)
    n1, n2 = _emit_bans(out, doc, [sq.f1.cod, sq.f2.cod], ["B1", "B2"])
    out.banspace(sq.apex, "P")
    out.banmap(sq.g1, "g1", n1, "P")
    out.banmap(sq.g2, "g2", n2, "P")
    out.check(sq.slack == 0, f"commutes slack={fmt(sq.slack)}")
    out.check(is_isometry_ban(sq.g1) and is_isometry_ban(sq.g2), "legs-isometric")
    if args.audit:
        s = oracles.op_norm_oracle((sq.g1 @ sq.f1) - (sq.g2 @ sq.f2))
        out.check(s == 0, f"audit slack={fmt(s)}")


def cmd_ban_eps_pushout(args, doc, out):
    from .ban.constructions import eps_pushout_ban
    f1 = _get(doc.banmaps, args.f1, "banmap")
    f2 = _get(doc.banmaps, args.f2, "banmap")
    eps = args.eps if args.eps is not None else None
    if eps is None or eps is INF:
        raise UsageError("--eps must be a finite rational")
    sq = eps_pushout_ban(f1, f2, eps)
    n1, n2 = _emit_bans(out, doc, [sq.f1.cod, sq.f2.cod], ["B1", "B2"])
    out.banspace(sq.apex, "P")
    out.banmap(sq.g1, "g1", n1, "P")
    out.banmap(sq.g2, "g2", n2, "P")
    out.check(sq.slack <= eps, f"eps-commutative slack={fmt(sq.slack)} eps={fmt(eps)}")
    if args.audit:
        s = oracles.op_norm_oracle((sq.g1 @ sq.f1) - (sq.g2 @ sq.f2))
        out.check(s == sq.slack, f"audit slack={fmt(s)}")


def cmd_ban_factor_stage(args, doc, out):
    from .ban.constructions import factor_through_stage
    A = _get(doc.banspaces, args.space, "banspace")
    ch = _get(doc.banchains, args.chain, "banchain")
    f = _get(doc.banmaps, args.map, "banmap")
    if args.eps is None or args.eps is INF:
        raise UsageError("--eps must be a finite rational")
    res = factor_through_stage(A, ch, f, args.eps, start=args.start)
    if not res.ok and res.certificate is None:
        best = fmt(res.best_delta) if res.best_delta is not None else "none"
        out.check(False, f"no-stage best-distance={best}")
        return
    _emit_bans(out, doc, [A], [args.space])
    out.banspace(ch.stages[res.stage], f"K{res.stage}")
    out.banmap(res.map, "fpp", args.space, f"K{res.stage}")
    out.cert.extend(res.certificate.lines())
    if args.audit:
        c = res.certificate
        r = oracles.l1_coordinate_bound_oracle(A)
        k = ch.composite(res.stage, ch.top)
        slack = oracles.op_norm_oracle((k @ res.map) - f)
        nrm = oracles.op_norm_oracle(res.map)
        delta = args.eps / (2 * r) if r else args.eps
        out.check(r == c.r and delta == c.delta, f"audit r={fmt(r)} delta={fmt(delta)}")
        out.check(slack == c.slack and slack <= args.eps, f"audit slack={fmt(slack)}")
        out.check(nrm == c.norm and nrm <= 1, f"audit norm={fmt(nrm)}")


def default_catalogue():
    """0 -> R, R -> linf^2 (diagonal), R -> l1^2 (first axis)."""
    from .ban.spaces import LinMap, l1_space, linf_space, zero_space
    Z, R = zero_space(), l1_space(1)
    return [LinMap(Z, R, [[]]), LinMap(R, linf_space(2), [[1], [1]]),
            LinMap(R, l1_space(2), [[1], [0]])]


def twin_chains(H, budget, seed):
    from .ban.constructions import saturation_step_ban
    from .ban.spaces import zero_space
    order_k = list(range(len(H)))
    order_l = [0] + list(reversed(range(1, len(H))))
    chK, _ = saturation_step_ban(zero_space(), H, 2, budget, seed=seed, order=order_k)
    chL, _ = saturation_step_ban(zero_space(), H, 2, budget, seed=seed + 1, order=order_l)
    return chK, chL


def cmd_gurarii_bnf(args, doc, out):
    from .ban.gurarii import SaturationOracle, back_and_forth
    H = _catalogue(doc, args.H, doc.banmaps) if args.H else default_catalogue()
    chK, chL = twin_chains(H, args.budget, args.seed)
    run = back_and_forth(chK, chL, SaturationOracle(chK), SaturationOracle(chL), args.N)
    out.cert.extend(s.line() for s in run.states)
    out.check(run.complete, f"steps={args.N} complete={int(run.complete)}")
    if run.f is not None:
        out.banspace(run.g.cod, "K_last")
        if run.f.cod != run.g.dom:
            raise UsageError("last maps do not share a middle stage")
        out.banspace(run.f.cod, "L_last")
        if run.f.dom != run.g.cod:
            out.banspace(run.f.dom, "K_prev")
        out.banmap(run.f, "f_last", "K_last" if run.f.dom == run.g.cod else "K_prev", "L_last")
        out.banmap(run.g, "g_last", "L_last", "K_last")
    if args.audit:
        from .ban.spaces import identity_map
        g_prev, f_cur = identity_map(chL.stages[0]), None
        j_prev = i_cur = 0
        for s in run.states:
            if s.kind == "forth":
                v = oracles.op_norm_oracle((s.map @ g_prev) - chL.composite(j_prev, s.j))
                f_cur, j_prev = s.map, s.j
            else:
                v = oracles.op_norm_oracle((s.map @ f_cur) - chK.composite(i_cur, s.i))
                g_prev, i_cur = s.map, s.i
            out.check(v == s.value and v <= s.limit, f"audit value={fmt(v)}")


def cmd_verify(args, doc, out):
    eps = _met_eps(args)
    grid = oracles.competitor_grid(args.max_points)
    kind = args.kind
    if kind == "pushout":
        f1, f2 = _get(doc.maps, args.f1, "map"), _get(doc.maps, args.f2, "map")
        rep = oracles.verify_pushout(eps_pushout(f1, f2, eps), grid)
    else:
        u, v = _get(doc.maps, args.u, "map"), _get(doc.maps, args.v, "map")
        if kind == "coequalizer":
            rep = oracles.verify_coequalizer(u, v, eps, eps_coequalizer(u, v, eps), grid)
        elif kind == "equalizer":
            rep = oracles.verify_equalizer(u, v, eps, eps_equalizer(u, v, eps), grid)
        else:
            _, p1, p2 = eps_pullback(u, v, eps)
            rep = oracles.verify_pullback(u, v, eps, p1, p2, grid)
    out.note(rep.text().splitlines()[1])
    for line in rep.text().splitlines()[2:]:
        out.note(line)
    out.check(rep.passed, f"verify {rep.construction} competitors={rep.competitors}")


COMMANDS = {
    "met-colimit": cmd_met_colimit, "eps-pushout": cmd_eps_pushout,
    "eps-coequalizer": cmd_eps_coequalizer, "cotensor": cmd_cotensor,
    "factorize": cmd_factorize, "inject-check": cmd_inject_check,
    "weak-reflect": cmd_weak_reflect, "ban-pushout": cmd_ban_pushout,
    "ban-eps-pushout": cmd_ban_eps_pushout, "ban-factor-stage": cmd_ban_factor_stage,
    "gurarii-bnf": cmd_gurarii_bnf, "verify": cmd_verify,
}


def build_parser():
    p = argparse.ArgumentParser(prog="metcat", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, needs_file=True):
        sp = sub.add_parser(name)
        if needs_file:
            sp.add_argument("input")
        else:
            sp.add_argument("input", nargs="?")
        sp.add_argument("-o", "--out", help="directory for result.txt and certificate.txt")
        sp.add_argument("--audit", action="store_true", help="recompute certificates with oracles")
        sp.add_argument("--seed", type=int, default=0)
        return sp

    sp = add("met-colimit"); sp.add_argument("--chain", required=True)
    for name in ("eps-pushout", "ban-pushout", "ban-eps-pushout"):
        sp = add(name)
        sp.add_argument("--f1", required=True)
        sp.add_argument("--f2", required=True)
        sp.add_argument("--eps", type=_ext)
        sp.add_argument("--max-points", type=int, default=2)
    sp = add("eps-coequalizer")
    sp.add_argument("--u", required=True); sp.add_argument("--v", required=True)
    sp.add_argument("--eps", type=_ext, required=True)
    sp.add_argument("--max-points", type=int, default=2)
    sp = add("cotensor"); sp.add_argument("--M", required=True); sp.add_argument("--L", required=True)
    sp = add("factorize"); sp.add_argument("--map", required=True)
    sp = add("inject-check")
    sp.add_argument("--space", required=True); sp.add_argument("--H", required=True)
    sp.add_argument("--eps", type=_ext, required=True)
    sp = add("weak-reflect")
    sp.add_argument("--space", required=True); sp.add_argument("--H", required=True)
    sp.add_argument("--n-max", type=int, required=True)
    sp.add_argument("--rounds", type=int, required=True)
    sp = add("ban-factor-stage")
    sp.add_argument("--space", required=True); sp.add_argument("--chain", required=True)
    sp.add_argument("--map", required=True); sp.add_argument("--eps", type=_rat, required=True)
    sp.add_argument("--start", type=int, default=0)
    sp = add("gurarii-bnf", needs_file=False)
    sp.add_argument("--N", type=int, default=8)
    sp.add_argument("--budget", type=int, default=3)
    sp.add_argument("--H", help="comma-separated banmap names (default: built-in catalogue)")
    sp = add("verify")
    sp.add_argument("--kind", choices=["pushout", "coequalizer", "equalizer", "pullback"],
                    required=True)
    sp.add_argument("--f1"); sp.add_argument("--f2"); sp.add_argument("--u"); sp.add_argument("--v")
    sp.add_argument("--eps", type=_ext, required=True)
    sp.add_argument("--max-points", type=int, default=2)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Output()
    try:
        if args.input:
            doc = parse_file(args.input)
        else:
            from .textio import Document
            doc = Document()
        _check_caps(doc)
        COMMANDS[args.command](args, doc, out)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, MetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    result = "\n\n".join(out.blocks) + ("\n" if out.blocks else "")
    cert = "\n".join(out.cert) + "\n"
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "result.txt"), "w", encoding="utf-8") as fh:
            fh.write(result)
        with open(os.path.join(args.out, "certificate.txt"), "w", encoding="utf-8") as fh:
            fh.write(cert)
    else:
        if result:
            sys.stdout.write(result + "\n")
        sys.stdout.write(cert)
    return 0 if out.ok else 1


if __name__ == "__main__":
    sys.exit(main())

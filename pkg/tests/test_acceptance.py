"""The fourteen acceptance criteria, each at its stated tolerance and time limit.

Every test prints one ``criterion NN PASS|FAIL`` line; the lines are also
collected by conftest and repeated in the terminal summary.
"""

import random
import time
from fractions import Fraction as F
from itertools import product as cartesian

import pytest

from conftest import ACCEPTANCE_LINES
from metcat import oracles as O
from metcat.ban.constructions import (
    BanChain, eps_coequalizer_ban, eps_pushout_leg_isometry_ban, factor_through_stage,
    pushout_ban, sample_contraction,
)
from metcat.ban.spaces import (
    LinMap, PolyNormedSpace, identity_map, is_eps_isometry_ban, l1_space, linf_space,
    norm_eval, op_norm,
)
from metcat.cli import main as cli_main
from metcat.extdist import INF, fmt
from metcat.injectivity import smallness_witness, weak_reflection
from metcat.met.approx import (
    check_sharp_sharp, cotensor, cotensor_via_pullbacks, diagonal_fill_in, eps_coequalizer,
    eps_equalizer, eps_isometry_via_pushout, eps_pullback, eps_pushout, factorize,
)
from metcat.met.core import (
    Cocone, FiniteChain, Leg, MetSpace, NonexpMap, compose, final_pseudometric, homset,
    identity, is_isometry, line, one_point, subspace, two_point,
)
from metcat.textio import format_banmap, format_banspace

EPS_GRID = (F(0), F(1, 2), F(1))


def report(no, name, ok, elapsed, limit, detail=""):
    ok = ok and elapsed < limit
    text = (f"criterion {no:2d} {'PASS' if ok else 'FAIL'} {name} "
            f"({elapsed:.1f}s of {limit}s) {detail}".rstrip())
    ACCEPTANCE_LINES[no] = text
    print(text)
    return ok


# ---------------------------------------------------------------------------
# deterministic space grids (distances 1/4, 1/2, 1, 2, inf)

SMALL = [X for n in (0, 1, 2) for X in O.metric_spaces(n)]
THREE = O.metric_spaces(3)
FOUR = O.metric_spaces(4)
COMPETITORS = SMALL + THREE[::9] + FOUR[::200]
COMPETITORS_3 = SMALL + THREE[::9]


def spans():
    """(f1, f2, competitors) over the grid."""
    nonempty = SMALL[1:]
    for A in SMALL:
        for B1, B2 in cartesian(nonempty, repeat=2):
            for f1 in homset(A, B1):
                for f2 in homset(A, B2):
                    yield f1, f2, COMPETITORS
    one = SMALL[1]
    for B1 in THREE[::7]:
        for B2 in SMALL[1:3]:
            for f1 in homset(one, B1):
                for f2 in homset(one, B2):
                    yield f1, f2, COMPETITORS
    for B in FOUR[::300]:
        f = homset(one, B)[0]
        yield f, f, COMPETITORS_3


def parallel_pairs():
    nonempty = SMALL[1:]
    for A in SMALL:
        for B in nonempty + THREE[::7]:
            H = homset(A, B)
            for u in H:
                for v in H:
                    yield u, v, COMPETITORS
    for A in SMALL[2:4]:
        for B in FOUR[::300]:
            H = homset(A, B)[:4]
            for u in H:
                for v in H:
                    yield u, v, COMPETITORS_3


def cospans():
    nonempty = SMALL[1:]
    for D in nonempty + THREE[::11]:
        comps = COMPETITORS if len(D) < 3 else COMPETITORS_3
        for B, C in cartesian(nonempty, repeat=2):
            for u in homset(B, D):
                for v in homset(C, D):
                    yield u, v, comps
    for B in FOUR[::300]:
        u = homset(B, SMALL[1])[0]
        yield u, u, COMPETITORS_3


# ---------------------------------------------------------------------------


def test_criterion_01_eps_coequalizer_instance():
    t = time.perf_counter()
    ok = True
    for eps in (F(1, 2), F(1), F(2)):
        X = two_point(eps)
        one = one_point()
        u = NonexpMap(one, X, ["p1"])
        v = NonexpMap(one, X, ["p2"])
        c = eps_coequalizer(u, v, eps / 2)
        target = two_point(eps / 2)
        ok &= c.cod == target and c.images == ("p1", "p2")
    assert report(1, "eps/2-coequalizer of 2_eps is 2_{eps/2}", ok,
                  time.perf_counter() - t, 1)


def test_criterion_02_eps_pushout_instance():
    t = time.perf_counter()
    ok = True
    one = one_point()
    for eps in (F(1, 4), F(1)):
        sq = eps_pushout(identity(one), identity(one), eps)
        ok &= sq.apex == two_point(eps, labels=((1, "*"), (2, "*")))
        ok &= sq.apex.dist(sq.g1("*"), sq.g2("*")) == eps
    assert report(2, "eps-pushout of 1 <- 1 -> 1 is 2_eps", ok, time.perf_counter() - t, 1)


def test_criterion_03_universality_suite():
    t = time.perf_counter()
    checked, failures, competitors = 0, [], 0
    for eps in EPS_GRID:
        for f1, f2, comps in spans():
            rep = O.verify_pushout(eps_pushout(f1, f2, eps), comps)
            checked += 1
            competitors += rep.competitors
            if not rep.passed:
                failures.append(rep.text())
        for u, v, comps in parallel_pairs():
            for rep in (O.verify_coequalizer(u, v, eps, eps_coequalizer(u, v, eps), comps),
                        O.verify_equalizer(u, v, eps, eps_equalizer(u, v, eps), comps)):
                checked += 1
                competitors += rep.competitors
                if not rep.passed:
                    failures.append(rep.text())
        for u, v, comps in cospans():
            _, p1, p2 = eps_pullback(u, v, eps)
            rep = O.verify_pullback(u, v, eps, p1, p2, comps)
            checked += 1
            competitors += rep.competitors
            if not rep.passed:
                failures.append(rep.text())
    ok = not failures and checked > 1000
    assert report(3, "universality of eps-(co)limits", ok, time.perf_counter() - t, 300,
                  f"constructions={checked} competitors={competitors} failures={len(failures)}"), \
        failures[:3]


def _consistent(pairs):
    fixed = {}
    for a, b in pairs:
        if fixed.setdefault(a, b) != b:
            return None
    return fixed


def _matches(X, Y, pairs):
    fixed = _consistent(pairs)
    return fixed is not None and O.find_isometric_bijection(X, Y, fixed) is not None


def test_criterion_04_eps_zero_is_classical():
    t = time.perf_counter()
    n, bad = 0, []
    for f1, f2, _ in spans():
        sq = eps_pushout(f1, f2, 0)
        Q, c1, c2 = O.classical_pushout(f1, f2)
        pairs = [(sq.g1(x), c1(x)) for x in f1.cod.points]
        pairs += [(sq.g2(y), c2(y)) for y in f2.cod.points]
        n += 1
        if not _matches(sq.apex, Q, pairs):
            bad.append(("pushout", f1, f2))
    for u, v, _ in parallel_pairs():
        c, c0 = eps_coequalizer(u, v, 0), O.classical_coequalizer(u, v)
        n += 1
        if not _matches(c.cod, c0.cod, [(c(b), c0(b)) for b in u.cod.points]):
            bad.append(("coequalizer", u, v))
        m, m0 = eps_equalizer(u, v, 0), O.classical_equalizer(u, v)
        back = {y: x for x, y in zip(m0.dom.points, m0.images)}
        n += 1
        if len(m.dom) != len(m0.dom) or not _matches(
                m.dom, m0.dom, [(x, back.get(m(x))) for x in m.dom.points]):
            bad.append(("equalizer", u, v))
    for u, v, _ in cospans():
        P, p1, p2 = eps_pullback(u, v, 0)
        P0, q1, q2 = O.classical_pullback(u, v)
        back = {(q1(z), q2(z)): z for z in P0.points}
        n += 1
        if len(P) != len(P0) or not _matches(
                P, P0, [(z, back.get((p1(z), p2(z)))) for z in P.points]):
            bad.append(("pullback", u, v))
    ok = not bad
    assert report(4, "eps = 0 constructions match classical ones", ok,
                  time.perf_counter() - t, 60, f"instances={n} mismatches={len(bad)}"), bad[:3]


def test_criterion_05_cotensor_via_pullbacks():
    t = time.perf_counter()
    grid = SMALL + THREE
    n, bad = 0, []
    for M in grid:
        for L in grid:
            C, V = cotensor(M, L), cotensor_via_pullbacks(M, L)
            n += 1
            match = O.find_isometric_bijection(C, V, {p: p for p in C.points if p in V.index})
            if match is None:
                bad.append((M, L))
    assert report(5, "cotensor via pullbacks equals cotensor", not bad,
                  time.perf_counter() - t, 120, f"pairs={n} mismatches={len(bad)}"), bad[:3]


def _surjections(spaces):
    for A in spaces:
        for B in spaces:
            for e in homset(A, B):
                if e.is_surjective():
                    yield e


def _isometries(spaces):
    for C in spaces:
        for D in spaces:
            for m in homset(C, D):
                if is_isometry(m):
                    yield m


def test_criterion_06_factorization_system():
    t = time.perf_counter()
    spaces = SMALL[1:] + THREE[::11]
    surj = list(_surjections(spaces))
    isos = list(_isometries(spaces))
    squares, bad = 0, []
    # every map factors as surjection then isometry
    for A in spaces:
        for B in spaces:
            for f in homset(A, B):
                fp = factorize(f)
                if not (fp.composite == f and fp.e.is_surjective() and is_isometry(fp.m)):
                    bad.append(("factorize", f))
    for e in surj:
        A, B = e.dom, e.cod
        for m in isos:
            C, D = m.dom, m.cod
            for f in homset(A, C):
                # g is forced on the image of e, which is all of B
                g_img = _consistent((e(a), m(f(a))) for a in A.points)
                if g_img is None:
                    continue
                try:
                    g = NonexpMap(B, D, [g_img[b] for b in B.points])
                except ValueError:
                    continue
                squares += 1
                diag = diagonal_fill_in(e, m, f, g)
                fills = [d for d in O.enumerate_hom(B, C)
                         if O.composite_images(d, e) == list(f.images)
                         and O.composite_images(m, d) == list(g.images)]
                if len(fills) != 1 or fills[0].images != diag.images:
                    bad.append((e, m, f, g, len(fills)))
    ok = not bad and squares > 0
    assert report(6, "factorization system and unique diagonal fill-in", ok,
                  time.perf_counter() - t, 120, f"squares={squares} failures={len(bad)}"), bad[:3]


def test_criterion_07_sharp_sharp_equivalence():
    t = time.perf_counter()
    grid = SMALL[1:] + THREE
    n, bad, positives = 0, [], 0
    for X in grid:
        for Y in grid:
            for f in homset(X, Y):
                for eps in (F(1, 4), F(1, 2), F(1)):
                    a = bool(check_sharp_sharp(f, 2 * eps))
                    b = bool(eps_isometry_via_pushout(f, eps))
                    n += 1
                    positives += a
                    if a != b:
                        bad.append((f, eps, a, b))
    assert report(7, "(##) at 2 eps iff eps-pushout leg is an isometry", not bad,
                  time.perf_counter() - t, 120,
                  f"cases={n} isometric={positives} disagreements={len(bad)}"), bad[:3]


def _hexagon():
    return PolyNormedSpace(2, [(1, 0), (0, 1), (1, 1)], name="hex")


def test_criterion_08_ban_sharp_equivalence():
    t = time.perf_counter()
    spaces = [l1_space(1), l1_space(2), linf_space(2), _hexagon()]
    rng = random.Random(8)
    maps = []
    for A in spaces:
        for B in spaces:
            if A.dim <= B.dim:
                # the coordinate embedding, scaled into the unit ball of maps
                f = LinMap(A, B, [[int(r == c) for c in range(A.dim)] for r in range(B.dim)])
                maps.append(f.scaled(1 / max(op_norm(f), 1)))
            for _ in range(4):
                maps.append(sample_contraction(A, B, rng))
    n, bad, yes = 0, [], 0
    for f in maps:
        for eps in (F(1, 4), F(1, 2), F(1)):
            a = is_eps_isometry_ban(f, eps)
            b = eps_pushout_leg_isometry_ban(f, eps)
            n += 1
            yes += a
            if a != b:
                bad.append((f, eps, a, b))
    ok = not bad and len(maps) >= 50
    assert report(8, "(#) iff eps-pushout leg is an isometry (Ban)", ok,
                  time.perf_counter() - t, 300,
                  f"maps={len(maps)} cases={n} true={yes} disagreements={len(bad)}"), bad[:3]


def test_criterion_09_ban_eps_coequalizer_universality():
    t = time.perf_counter()
    rng = random.Random(9)
    targets = [l1_space(2), linf_space(2), _hexagon()]
    sources = [l1_space(1), l1_space(2), linf_space(2)]
    accepted, bad, draws = 0, [], 0
    for inst in range(10):
        A = sources[inst % 3]
        B = targets[inst % 3]
        eps = (F(1, 4), F(1, 2), F(1))[inst % 3]
        u, v = sample_contraction(A, B, rng), sample_contraction(A, B, rng)
        C, c = eps_coequalizer_ban(u, v, eps)
        got = 0
        while got < 10:
            draws += 1
            Y = targets[rng.randrange(3)]
            cp = sample_contraction(B, Y, rng)
            if op_norm(cp @ (u - v)) > eps:
                continue
            got += 1
            med = LinMap(C, Y, cp.matrix)
            if not ((med @ c) == cp and O.op_norm_oracle(med) <= 1):
                bad.append((inst, cp))
        accepted += got
    ok = not bad and accepted == 100
    assert report(9, "Ban eps-coequalizer factors every valid competitor", ok,
                  time.perf_counter() - t, 300,
                  f"accepted={accepted} draws={draws} failures={len(bad)}"), bad[:3]


# -- criterion 10 --------------------------------------------------------------

def _unit_embedding(K, rng):
    """x -> x g for a generator g of norm 1 (an isometry R -> K)."""
    gens = [g for g in K.generators if norm_eval(K, g) == 1]
    g = gens[rng.randrange(len(gens))]
    return LinMap(l1_space(1), K, [[c] for c in g])


def _flip(K, rng):
    signs = [rng.choice((1, -1)) for _ in range(K.dim)]
    K2 = PolyNormedSpace(K.dim, [tuple(s * x for s, x in zip(signs, g)) for g in K.generators])
    return LinMap(K, K2, [[signs[r] if r == c else 0 for c in range(K.dim)]
                          for r in range(K.dim)])


def build_chain(seed):
    rng = random.Random(seed)
    R = l1_space(1)
    E = [LinMap(R, linf_space(2), [[1], [1]]), LinMap(R, l1_space(2), [[1], [0]]),
         LinMap(R, _hexagon(), [[1], [0]])]
    length = rng.randint(2, 5)
    stages, links = [rng.choice([R, linf_space(2), _hexagon()])], []
    while len(stages) < length:
        K = stages[-1]
        if K.dim < 3 and rng.random() < 0.6:
            sq = pushout_ban(_unit_embedding(K, rng), rng.choice(E), check=False)
            link = sq.g1
        else:
            link = _flip(K, rng)
        stages.append(link.cod)
        links.append(link)
    return BanChain(stages, links)


def _chain_file(A, ch, f):
    names = {}
    blocks = []
    for i, K in enumerate(ch.stages):
        names[i] = f"K{i}"
        blocks.append(format_banspace(K, f"K{i}"))
    for i, k in enumerate(ch.links):
        blocks.append(format_banmap(k, f"k{i}", f"K{i}", f"K{i + 1}"))
    blocks.append("banchain D\n" + "\n".join(
        [f"stage K{i}" for i in range(len(ch))] + [f"link k{i}" for i in range(len(ch.links))]))
    blocks.append(format_banspace(A, "A"))
    blocks.append(format_banmap(f, "f", "A", f"K{ch.top}"))
    return "\n\n".join(blocks) + "\n"


def test_criterion_10_factor_through_stage(tmp_path):
    t = time.perf_counter()
    sources = [l1_space(1), l1_space(2), linf_space(2), _hexagon(), l1_space(3)]
    runs, bad = 0, []
    for seed in range(20):
        ch = build_chain(seed)
        rng = random.Random(100 + seed)
        A = sources[seed % len(sources)]
        f = sample_contraction(A, ch.stages[ch.top], rng)
        eps = (F(1, 2), F(1, 4), F(1, 8), F(1))[seed % 4]
        res = factor_through_stage(A, ch, f, eps)
        k = ch.composite(res.stage, ch.top)
        exact_ok = (res.ok and O.op_norm_oracle((k @ res.map) - f) <= eps
                    and O.op_norm_oracle(res.map) <= 1
                    and res.certificate.r == O.l1_coordinate_bound_oracle(A))
        path = tmp_path / f"chain{seed}.txt"
        path.write_text(_chain_file(A, ch, f))
        out = tmp_path / f"out{seed}"
        code = cli_main(["ban-factor-stage", str(path), "--space", "A", "--chain", "D",
                         "--map", "f", "--eps", fmt(eps), "--audit", "-o", str(out)])
        cert = (out / "certificate.txt").read_text().splitlines()
        audit_ok = code == 0 and len(cert) == 4 and all(l.endswith(" OK") for l in cert)
        runs += 1
        if not (exact_ok and audit_ok):
            bad.append((seed, exact_ok, code, cert))
    assert report(10, "factor_through_stage certificates with audit", not bad,
                  time.perf_counter() - t, 300, f"chains={runs} failures={len(bad)}"), bad[:3]


# -- criterion 11 --------------------------------------------------------------

def reflection_instances():
    one = one_point()
    two1 = two_point(1)
    two2 = two_point(2, labels=("a", "b"))
    half = two_point(F(1, 2), labels=("u", "w"))
    empty = MetSpace([], [])
    to_two = NonexpMap(one, two1, ["p1"])
    squash = NonexpMap(two2, two1, ["p1", "p2"])
    L = line([0, F(1, 2), 1])
    end_pts = NonexpMap(two_point(1, labels=("a", "b")), L, ["0", "1"])
    return [
        (one, [to_two], 1, 3),
        (one, [to_two], 3, 2),
        (two1, [squash], 2, 1),
        (half, [NonexpMap(empty, one, [])], 3, 3),
        (line([0, 1]), [to_two, end_pts], 2, 1),
    ]


def test_criterion_11_weak_reflection_certificates():
    t = time.perf_counter()
    bad, tasks, audited = [], 0, 0
    for K, H, n_max, rounds in reflection_instances():
        r, cert = weak_reflection(K, H, n_max, rounds)
        Khat = cert.space
        for rec in cert.handled:
            tasks += 1
            if not (rec.ok and rec.monotone):
                bad.append(rec)
                continue
            h = H[rec.h_index]
            if len(Khat) ** len(h.cod) <= 200000:
                audited += 1
                u = NonexpMap(h.dom, Khat, list(rec.u), check=False)
                best = min((O.sup_distance(_Comp(g, h), u)
                            for g in O.enumerate_hom(h.cod, Khat)), default=INF)
                if best > F(1, rec.n):
                    bad.append(rec)
        if r.cod != Khat:
            bad.append(("r", K))
    ok = not bad and tasks > 0
    assert report(11, "weak reflection certificates", ok, time.perf_counter() - t, 300,
                  f"instances=5 tasks={tasks} audited={audited} failures={len(bad)}"), bad[:3]


class _Comp:
    def __init__(self, g, h):
        self.g, self.h, self.dom, self.cod = g, h, h.dom, g.cod

    def __call__(self, x):
        return self.g(self.h(x))


# -- criterion 12 --------------------------------------------------------------

def _prefix_chains(X):
    """Isometric chains of growing prefixes ending at X."""
    pts = list(X.points)
    for start in range(1, len(pts) + 1):
        stages = [subspace(X, pts[:k])[0] for k in range(start, len(pts) + 1)]
        links = [subspace(stages[i + 1], stages[i].points)[1] for i in range(len(stages) - 1)]
        yield FiniteChain(stages, links, isometric=True)


def cmet_instance(d, r):
    pts = [F(0)] + [d + F(1, k) for k in range(r, 0, -1)]
    K = line(pts + [d])
    stages = [subspace(K, [fmt(p) for p in pts[:1] + pts[len(pts) - k:]])[0]
              for k in range(1, r + 1)]
    links = [subspace(stages[i + 1], stages[i].points)[1] for i in range(r - 1)]
    legs = [subspace(K, S.points)[1] for S in stages]
    A = two_point(d, labels=("x", "y"))
    f = NonexpMap(A, K, ["0", fmt(d)])
    return A, FiniteChain(stages, links, isometric=True), f, legs


def test_criterion_12_smallness_regression_pair():
    t = time.perf_counter()
    bad, n1 = [], 0
    for X in SMALL[1:] + THREE:
        for ch in _prefix_chains(X):
            for A in SMALL:
                for f in homset(A, X):
                    for eps in (F(1, 4), F(1, 2), F(1)):
                        n1 += 1
                        legs = [subspace(X, K.points)[1] for K in ch.stages]
                        if not smallness_witness(A, ch, f, eps, legs=legs):
                            bad.append(("finite", X, f, eps))
    n2 = 0
    for d in (F(1, 2), F(1), F(2)):
        for r in range(1, 11):
            A, ch, f, legs = cmet_instance(d, r)
            for eps in (F(0), d / 4, d / 2, d - F(1, 100)):
                n2 += 1
                res = smallness_witness(A, ch, f, eps, legs=legs)
                if res or any(v != d for v in res.deficiencies):
                    bad.append(("cmet", d, r, eps, res.deficiencies))
    assert report(12, "smallness: finite succeeds, truncated completion fails at d", not bad,
                  time.perf_counter() - t, 60, f"finite={n1} truncations={n2} failures={len(bad)}"), \
        bad[:3]


# -- criterion 13 --------------------------------------------------------------

def test_criterion_13_back_and_forth_bounds(tmp_path):
    t = time.perf_counter()
    code = cli_main(["gurarii-bnf", "--N", "8", "--budget", "3", "--seed", "1", "--audit",
                     "-o", str(tmp_path)])
    lines = (tmp_path / "certificate.txt").read_text().splitlines()
    bounds = [l for l in lines if l.startswith("(")]
    ok = code == 0 and len(bounds) == 16
    for l in bounds:
        fields = dict(kv.split("=") for kv in l.split()[1:-1])
        n = int(fields["n"])
        value = F(fields["value"])
        ok &= value <= F(2, n + 1) and F(fields["limit"]) == F(2, n + 1) and l.endswith(" OK")
    worst = max((F(dict(kv.split("=") for kv in l.split()[1:-1])["value"]) for l in bounds),
                default=None)
    assert report(13, "back-and-forth values within 2/(n+1)", ok, time.perf_counter() - t, 600,
                  f"lines={len(bounds)} worst={fmt(worst) if worst is not None else '-'}"), lines


# -- criterion 14 --------------------------------------------------------------

def random_gluing(rng):
    n = rng.randint(1, 8)
    carrier = [f"v{i}" for i in range(n)]
    legs = [Leg(one_point(), (x,)) for x in carrier]
    for _ in range(rng.randint(0, 6)):
        k = rng.randint(1, 3)
        X = O.metric_spaces(k)[rng.randrange(len(O.metric_spaces(k)))] if k > 1 \
            else one_point()
        legs.append(Leg(X, tuple(rng.choice(carrier) for _ in range(len(X)))))
    return carrier, legs


def test_criterion_14_dual_oracle_agreement():
    t = time.perf_counter()
    rng = random.Random(14)
    bad = []
    for _ in range(200):
        carrier, legs = random_gluing(rng)
        P = final_pseudometric(Cocone(carrier, legs))
        D = O.shortest_path_oracle(len(carrier), O.gluing_edges(
            carrier, [(l.dom, l.images) for l in legs]))
        if [list(r) for r in P.d] != D:
            bad.append(("gluing", carrier, legs))
    X = PolyNormedSpace(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (1, -1, F(1, 2))])
    for _ in range(100):
        x = tuple(F(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(3))
        lo, hi = O.lp_bracket(X, x, 32)
        if not lo <= norm_eval(X, x) <= hi:
            bad.append(("bracket", x, lo, hi))
    assert report(14, "dual-oracle agreement", not bad, time.perf_counter() - t, 120,
                  f"gluings=200 brackets=100 failures={len(bad)}"), bad[:3]

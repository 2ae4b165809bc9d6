"""Line-oriented text formats for spaces, maps and chains.

Met::

    space X
    points a b c
    dist a b 1/2          # unlisted pairs are inf
    map f X -> Y
    a -> p
    chain C
    stage X
    link f

Ban::

    banspace V dim 2
    gen 1 0
    gen 0 1
    facet 1 0             # optional
    banmap f V -> W
    1 0                   # one row per codomain coordinate
    banchain D
    stage V
    link f
"""

from dataclasses import dataclass, field

from .extdist import INF, fmt, parse_ext, parse_rational
from .met.core import FiniteChain, MetError, MetSpace, NonexpMap, PseudoMetSpace


class ParseError(ValueError):
    def __init__(self, line, col, msg, path=None):
        self.line, self.col, self.msg, self.path = line, col, msg, path
        where = f"{path}:" if path else ""
        super().__init__(f"{where}{line}:{col}: {msg}")


@dataclass
class Document:
    spaces: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    chains: dict = field(default_factory=dict)
    banspaces: dict = field(default_factory=dict)
    banmaps: dict = field(default_factory=dict)
    banchains: dict = field(default_factory=dict)


KEYWORDS = {"space", "map", "chain", "banspace", "banmap", "banchain"}


def _tokens(line):
    """(column, token) pairs, 1-based columns, comments stripped."""
    out = []
    i, n = 0, len(line)
    while i < n:
        if line[i] == "#":
            break
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not line[j].isspace() and line[j] != "#":
            j += 1
        out.append((i + 1, line[i:j]))
        i = j
    return out


def parse_text(text, path=None):
    lines = []
    for no, raw in enumerate(text.splitlines(), 1):
        toks = _tokens(raw)
        if toks:
            lines.append((no, toks))
    doc = Document()
    k = 0
    while k < len(lines):
        no, toks = lines[k]
        col, kw = toks[0]
        if kw not in KEYWORDS:
            raise ParseError(no, col, f"expected a block keyword, got {kw!r}", path)
        end = k + 1
        while end < len(lines) and lines[end][1][0][1] not in KEYWORDS:
            end += 1
        body = lines[k + 1:end]
        try:
            _BLOCKS[kw](doc, no, toks, body, path)
        except ParseError:
            raise
        except (MetError, ValueError) as exc:
            raise ParseError(no, col, str(exc), path) from None
        k = end
    return doc


def parse_file(path):
    with open(path, encoding="utf-8") as fh:
        return parse_text(fh.read(), path)


def _need(toks, n, no, path, what):
    if len(toks) != n:
        col = toks[min(len(toks), n) - 1][0] if toks else 1
        raise ParseError(no, col, f"malformed {what} line", path)


def _arrow_header(toks, no, path, what):
    # <kw> <name> <dom> -> <cod>
    _need(toks, 5, no, path, what)
    if toks[3][1] != "->":
        raise ParseError(no, toks[3][0], "expected '->'", path)
    return toks[1][1], toks[2], toks[4]


def _lookup(table, tok, no, path, what):
    col, name = tok
    if name not in table:
        raise ParseError(no, col, f"unknown {what} {name!r}", path)
    return table[name]


def _rational(tok, no, path, ext=False):
    col, s = tok
    try:
        return parse_ext(s) if ext else parse_rational(s)
    except ValueError as exc:
        raise ParseError(no, col, str(exc), path) from None


def _space(doc, no, toks, body, path):
    _need(toks, 2, no, path, "space")
    name = toks[1][1]
    points, dist = None, {}
    for bno, bt in body:
        kw = bt[0][1]
        if kw == "points":
            if points is not None:
                raise ParseError(bno, bt[0][0], "points declared twice", path)
            points = [t for _, t in bt[1:]]
            if len(set(points)) != len(points):
                raise ParseError(bno, bt[0][0], "duplicate point", path)
        elif kw == "dist":
            _need(bt, 4, bno, path, "dist")
            if points is None:
                raise ParseError(bno, bt[0][0], "dist before points", path)
            p, q = bt[1][1], bt[2][1]
            for c, t in bt[1:3]:
                if t not in points:
                    raise ParseError(bno, c, f"unknown point {t!r}", path)
            v = _rational(bt[3], bno, path, ext=True)
            if p == q:
                if v != 0:
                    raise ParseError(bno, bt[3][0], "self-distance must be 0", path)
                continue
            for key in ((p, q), (q, p)):
                if key in dist and dist[key] != v:
                    raise ParseError(bno, bt[3][0], f"asymmetric declaration for {p} {q}", path)
            dist[(p, q)] = v
        else:
            raise ParseError(bno, bt[0][0], f"unexpected {kw!r} in space block", path)
    if points is None:
        points = []
    try:
        X = MetSpace(points, dist, name=name)
    except MetError as exc:
        raise ParseError(no, toks[0][0], f"space {name}: {exc}", path) from None
    doc.spaces[name] = X


def _map(doc, no, toks, body, path):
    name, dtok, ctok = _arrow_header(toks, no, path, "map")
    A = _lookup(doc.spaces, dtok, no, path, "space")
    X = _lookup(doc.spaces, ctok, no, path, "space")
    img = {}
    for bno, bt in body:
        _need(bt, 3, bno, path, "assignment")
        if bt[1][1] != "->":
            raise ParseError(bno, bt[1][0], "expected '->'", path)
        (c1, x), (c2, y) = bt[0], bt[2]
        if x not in A:
            raise ParseError(bno, c1, f"unknown point {x!r}", path)
        if y not in X:
            raise ParseError(bno, c2, f"unknown point {y!r}", path)
        if x in img:
            raise ParseError(bno, c1, f"point {x!r} assigned twice", path)
        img[x] = y
    try:
        doc.maps[name] = NonexpMap(A, X, img, name=name)
    except MetError as exc:
        raise ParseError(no, toks[0][0], f"map {name}: {exc}", path) from None


def _chain_parts(body, path, stages_tbl, links_tbl):
    stages, links = [], []
    for bno, bt in body:
        _need(bt, 2, bno, path, "chain")
        kw = bt[0][1]
        if kw == "stage":
            stages.append(_lookup(stages_tbl, bt[1], bno, path, "space"))
        elif kw == "link":
            links.append(_lookup(links_tbl, bt[1], bno, path, "map"))
        else:
            raise ParseError(bno, bt[0][0], f"unexpected {kw!r} in chain block", path)
    if not stages and links:
        stages = [links[0].dom] + [l.cod for l in links]
    return stages, links


def _chain(doc, no, toks, body, path):
    _need(toks, 2, no, path, "chain")
    stages, links = _chain_parts(body, path, doc.spaces, doc.maps)
    doc.chains[toks[1][1]] = FiniteChain(stages, links)


def _banspace(doc, no, toks, body, path):
    from .ban.spaces import PolyNormedSpace
    _need(toks, 4, no, path, "banspace")
    if toks[2][1] != "dim":
        raise ParseError(no, toks[2][0], "expected 'dim'", path)
    try:
        dim = int(toks[3][1])
    except ValueError:
        raise ParseError(no, toks[3][0], "dimension must be an integer", path) from None
    gens, facets = [], []
    for bno, bt in body:
        kw = bt[0][1]
        if kw not in ("gen", "facet"):
            raise ParseError(bno, bt[0][0], f"unexpected {kw!r} in banspace block", path)
        if len(bt) != dim + 1:
            raise ParseError(bno, bt[0][0], f"expected {dim} entries", path)
        row = tuple(_rational(t, bno, path) for t in bt[1:])
        (gens if kw == "gen" else facets).append(row)
    doc.banspaces[toks[1][1]] = PolyNormedSpace(dim, gens, facets or None, name=toks[1][1])


def _banmap(doc, no, toks, body, path):
    from .ban.spaces import LinMap
    name, dtok, ctok = _arrow_header(toks, no, path, "banmap")
    A = _lookup(doc.banspaces, dtok, no, path, "banspace")
    B = _lookup(doc.banspaces, ctok, no, path, "banspace")
    rows = []
    for bno, bt in body:
        if len(bt) != A.dim:
            raise ParseError(bno, bt[0][0], f"expected {A.dim} entries", path)
        rows.append(tuple(_rational(t, bno, path) for t in bt))
    if A.dim == 0 and not rows:
        rows = [()] * B.dim  # maps out of the zero space have empty rows
    if len(rows) != B.dim:
        raise ParseError(no, toks[0][0], f"banmap {name} needs {B.dim} rows", path)
    doc.banmaps[name] = LinMap(A, B, rows, name=name)


def _banchain(doc, no, toks, body, path):
    from .ban.constructions import BanChain
    _need(toks, 2, no, path, "banchain")
    stages, links = _chain_parts(body, path, doc.banspaces, doc.banmaps)
    doc.banchains[toks[1][1]] = BanChain(stages, links)


_BLOCKS = {"space": _space, "map": _map, "chain": _chain, "banspace": _banspace,
           "banmap": _banmap, "banchain": _banchain}


# ---------------------------------------------------------------------------
# writing

def render_label(p):
    if isinstance(p, tuple):
        return "(" + ",".join(render_label(q) for q in p) + ")"
    return str(p)


def stringify_space(X):
    """The same space with every label rendered as a single token."""
    labels = [render_label(p) for p in X.points]
    if len(set(labels)) != len(labels):
        raise MetError("rendered labels collide")
    if any(not s or any(c.isspace() or c == "#" for c in s) for s in labels):
        raise MetError("labels must be nonempty and free of whitespace and '#'")
    cls = MetSpace if isinstance(X, MetSpace) else PseudoMetSpace
    return cls(labels, X.d, name=X.name, check=False)


def stringify_map(f, dom=None, cod=None):
    dom = dom or stringify_space(f.dom)
    cod = cod or stringify_space(f.cod)
    return NonexpMap(dom, cod, [render_label(y) for y in f.images], check=False)


def format_space(X, name):
    X = stringify_space(X)
    out = [f"space {name}", "points " + " ".join(X.points)]
    n = len(X)
    for i in range(n):
        for j in range(i + 1, n):
            if X.d[i][j] is not INF:
                out.append(f"dist {X.points[i]} {X.points[j]} {fmt(X.d[i][j])}")
    return "\n".join(out)


def format_map(f, name, dom_name, cod_name):
    f = stringify_map(f)
    out = [f"map {name} {dom_name} -> {cod_name}"]
    out += [f"{x} -> {y}" for x, y in zip(f.dom.points, f.images)]
    return "\n".join(out)


def format_banspace(X, name, facets=False):
    out = [f"banspace {name} dim {X.dim}"]
    out += ["gen " + " ".join(fmt(v) for v in g) for g in X.generators]
    if facets and X.facets is not None:
        out += ["facet " + " ".join(fmt(v) for v in a) for a in X.facets]
    return "\n".join(out)


def format_banmap(f, name, dom_name, cod_name):
    out = [f"banmap {name} {dom_name} -> {cod_name}"]
    if f.dom.dim:
        out += [" ".join(fmt(v) for v in row) for row in f.matrix]
    return "\n".join(out)

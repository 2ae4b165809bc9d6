"""Small exact linear algebra over Fractions. Vectors are tuples, matrices are
tuples of row tuples."""

from fractions import Fraction


def vec(xs):
    return tuple(Fraction(x) for x in xs)


def mat(rows, ncols=None):
    rows = tuple(vec(r) for r in rows)
    if ncols is not None and any(len(r) != ncols for r in rows):
        raise ValueError("ragged matrix")
    return rows


def zeros(m, n):
    return tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(m))


def eye(n):
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def transpose(A, ncols):
    return tuple(tuple(A[i][j] for i in range(len(A))) for j in range(ncols))


def matvec(A, x):
    return tuple(sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in A)


def matmul(A, B, ncols):
    """A (m x k) times B (k x ncols); ncols is explicit so k = 0 works."""
    k = len(B)
    return tuple(tuple(sum((A[i][t] * B[t][j] for t in range(k)), Fraction(0))
                       for j in range(ncols)) for i in range(len(A)))


def add(x, y):
    return tuple(a + b for a, b in zip(x, y))


def sub(x, y):
    return tuple(a - b for a, b in zip(x, y))


def scale(c, x):
    return tuple(c * a for a in x)


def dot(x, y):
    return sum((a * b for a, b in zip(x, y)), Fraction(0))


def mat_sub(A, B):
    return tuple(sub(r, s) for r, s in zip(A, B))


def mat_scale(c, A):
    return tuple(scale(c, r) for r in A)


def rref(rows, ncols):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    R = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(R)) if R[i][c] != 0), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        p = R[r][c]
        R[r] = [v / p for v in R[r]]
        for i in range(len(R)):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == len(R):
            break
    return [tuple(x) for x in R[:r]], pivots


def rank(vectors, dim):
    return len(rref(vectors, dim)[1])


def nullspace(A, ncols):
    """Basis of {x : A x = 0}, one vector per free column."""
    R, piv = rref(A, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(R, piv):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def solve(A, b, ncols):
    """Some x with A x = b, or None."""
    aug = [tuple(r) + (bi,) for r, bi in zip(A, b)]
    R, piv = rref(aug, ncols + 1)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(R, piv):
        x[p] = row[ncols]
    return tuple(x)


def inverse(A):
    n = len(A)
    aug = [tuple(r) + e for r, e in zip(A, eye(n))]
    R, piv = rref(aug, 2 * n)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ValueError("singular matrix")
    return tuple(tuple(r[n:]) for r in R)


def independent_subset(vectors, dim):
    """Indices of a greedy maximal independent subset, in order."""
    keep, basis = [], []
    for i, v in enumerate(vectors):
        if rank(basis + [v], dim) > len(basis):
            basis.append(v)
            keep.append(i)
    return keep

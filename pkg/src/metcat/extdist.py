"""Extended nonnegative rationals: exact Fractions plus a saturating infinity."""

from fractions import Fraction


class _Infinity:
    """The value at the top of [0, inf].

    Compares above every Fraction/int and absorbs addition. There is exactly
    one instance, ``INF``.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("metcat-infinity")

    def __eq__(self, other):
        return other is self

    def __ne__(self, other):
        return other is not self

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        if other is self or isinstance(other, (int, Fraction)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other):
        # only positive scalings make sense on [0, inf]
        if isinstance(other, (int, Fraction)) and other > 0:
            return self
        if other is self:
            return self
        return NotImplemented

    __rmul__ = __mul__


INF = _Infinity()


def is_inf(x):
    return x is INF


def ext(value):
    """Coerce ``value`` to an extended distance.

    Accepts ints, Fractions, ``INF``, and strings like ``"3/4"``, ``"2"`` or
    ``"inf"``. Floats are rejected on purpose.
    """
    if value is INF:
        return INF
    if isinstance(value, bool):
        raise TypeError("bool is not a distance")
    if isinstance(value, int):
        v = Fraction(value)
    elif isinstance(value, Fraction):
        v = value
    elif isinstance(value, str):
        v = parse_ext(value)
        return v
    else:
        raise TypeError(f"not an exact distance: {value!r}")
    if v < 0:
        raise ValueError(f"negative distance {v}")
    return v


def parse_rational(text):
    """Parse ``p/q`` or an integer into a Fraction; reject anything else."""
    s = text.strip()
    if not s:
        raise ValueError("empty rational")
    num, sep, den = s.partition("/")
    if not _is_int(num) or (sep and not _is_int(den, signed=False)):
        raise ValueError(f"malformed rational {text!r}")
    if sep and int(den) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if sep else 1)


def _is_int(s, signed=True):
    if signed and s[:1] in "+-":
        s = s[1:]
    return s.isdigit() and s.isascii()


def parse_ext(text):
    if text.strip() == "inf":
        return INF
    v = parse_rational(text)
    if v < 0:
        raise ValueError(f"negative distance {text!r}")
    return v


def fmt(value):
    """Render an extended distance or rational as ``p/q``, an integer, or ``inf``."""
    if value is INF:
        return "inf"
    v = Fraction(value)
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def deviation(a, b):
    """|a - b| on [0, inf], with |inf - inf| taken as 0."""
    if a is INF or b is INF:
        return 0 if a is b else INF
    return abs(a - b)


def ext_min(values, default=INF):
    best = default
    for v in values:
        if v < best:
            best = v
    return best


def ext_max(values, default=Fraction(0)):
    best = default
    for v in values:
        if v > best:
            best = v
    return best

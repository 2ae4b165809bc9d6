"""Executable metric-enriched category theory on finite spaces.

Subpackages: ``metcat.met`` (finite generalized metric spaces), ``metcat.ban``
(polyhedral finite-dimensional normed spaces). ``metcat.oracles`` holds the
brute-force checkers used by the tests and by ``metcat verify``/``--audit``.
"""

from .extdist import INF, ext, fmt, parse_ext, parse_rational

__all__ = ["INF", "ext", "fmt", "parse_ext", "parse_rational"]
__version__ = "0.1.0"

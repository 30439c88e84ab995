"""Sparse multivariate polynomials with exact coefficients.

Coefficients live either in QQ (``gmpy2.mpq``, always in lowest terms) or in
a prime field GF(p) (plain ints in ``[0, p)``).  Exponent vectors are packed
into a single Python int, 16 bits per variable, so that monomial
multiplication is integer addition and divisibility is a single guarded
subtraction.  Every monomial order used here is a weight order that is linear
in the exponent vector, so each ring also maps a packed monomial to an
integer "order key" whose integer comparison is the monomial order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpq

from secantcat.errors import ArityMismatch, ModeMismatch, ParseError, RingMismatch

EXP_BITS = 16
EXP_MASK = (1 << EXP_BITS) - 1
# width of one prefix-sum field inside an order key
KEY_BITS = 24

DEFAULT_PRIME = 32003


# ---------------------------------------------------------------------------
# coefficient domains


class Domain:
    """Coefficient domain: QQ when ``p == 0``, otherwise GF(p)."""

    def __init__(self, p: int = 0):
        if p:
            if p == 2 or not gmpy2.is_prime(p):
                raise ValueError(f"prime field needs an odd prime, got {p}")
        self.p = p

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    @property
    def zero(self):
        return 0 if self.p else mpq(0)

    @property
    def one(self):
        return 1 if self.p else mpq(1)

    def convert(self, x):
        """Coerce an int / Fraction / mpq / numeric string into the domain."""
        if isinstance(x, str):
            x = Fraction(x.strip())
        if self.p:
            if isinstance(x, int):
                return x % self.p
            x = mpq(x)
            den = int(x.denominator)
            if den % self.p == 0:
                raise ZeroDivisionError(f"denominator {den} vanishes mod {self.p}")
            return int(x.numerator) * pow(den, -1, self.p) % self.p
        return mpq(x)

    def inv(self, x):
        if self.p:
            return pow(int(x), -1, self.p)
        return 1 / mpq(x)

    def to_text(self, c) -> str:
        if self.p:
            return str(int(c))
        c = mpq(c)
        if c.denominator == 1:
            return str(c.numerator)
        return f"{c.numerator}/{c.denominator}"

    def name(self) -> str:
        return f"FP:{self.p}" if self.p else "QQ"

    @classmethod
    def from_name(cls, text: str) -> "Domain":
        text = text.strip()
        if text.upper() == "QQ":
            return QQ
        m = re.fullmatch(r"(?i)(?:fp|gf)[:(]?(\d+)\)?", text)
        if not m:
            raise ParseError(f"unknown coefficient mode {text!r}")
        return Domain(int(m.group(1)))

    def __eq__(self, other):
        return isinstance(other, Domain) and self.p == other.p

    def __hash__(self):
        return hash(("Domain", self.p))

    def __repr__(self):
        return "QQ" if not self.p else f"GF({self.p})"


QQ = Domain(0)


def GF(p: int = DEFAULT_PRIME) -> Domain:
    return Domain(p)


# ---------------------------------------------------------------------------
# monomial orders


@dataclass(frozen=True)
class MonomialOrder:
    """``grevlex``, ``lex`` or ``block`` (grevlex on the first ``block``
    variables, then grevlex on the rest)."""

    kind: str = "grevlex"
    block: int = 0

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")

    def name(self) -> str:
        return f"block{self.block}" if self.kind == "block" else self.kind

    @classmethod
    def from_name(cls, text: str) -> "MonomialOrder":
        text = text.strip().lower()
        if text.startswith("block"):
            return cls("block", int(text[5:]))
        return cls(text)

    def weights(self, n: int) -> list[int]:
        """Per-variable integer weights; the order key of a monomial is the
        dot product of its exponent vector with these weights."""
        if self.kind == "lex":
            return [1 << (KEY_BITS * (n - 1 - i)) for i in range(n)]
        if self.kind == "grevlex":
            return _grevlex_weights(n)
        k = self.block
        if not 0 <= k <= n:
            raise ValueError(f"block size {k} out of range for {n} variables")
        shift = KEY_BITS * (n - k)
        return [w << shift for w in _grevlex_weights(k)] + _grevlex_weights(n - k)


def _grevlex_weights(n: int) -> list[int]:
    # key fields, most significant first: e_0+..+e_{n-1}, e_0+..+e_{n-2}, ..., e_0
    return [sum(1 << (KEY_BITS * j) for j in range(i, n)) for i in range(n)]


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def block_order(k: int) -> MonomialOrder:
    return MonomialOrder("block", k)


# ---------------------------------------------------------------------------
# rings


class PolyRing:
    """Polynomial ring over ``domain`` in the named variables.

    Two rings are equal iff they have the same variable names, order and
    coefficient domain.
    """

    def __init__(self, names, order: MonomialOrder = GREVLEX, domain: Domain = QQ):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("variable names must be distinct")
        self.names = names
        self.nvars = len(names)
        self.order = order
        self.domain = domain
        self._index = {v: i for i, v in enumerate(names)}
        self._weights = order.weights(self.nvars)
        self._key_cache: dict[int, int] = {}
        # order key -> packed exponent, filled lazily by the Groebner engine
        self.exp_of_key: dict[int, int] = {}
        self.guard = sum(1 << (EXP_BITS * i + EXP_BITS - 1) for i in range(self.nvars))

    # identity -------------------------------------------------------------
    def _ident(self):
        return (self.names, self.order, self.domain)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self._ident() == other._ident()

    def __hash__(self):
        return hash(self._ident())

    def __repr__(self):
        return f"PolyRing({list(self.names)}, order={self.order.name()}, mode={self.domain.name()})"

    def with_order(self, order: MonomialOrder) -> "PolyRing":
        return PolyRing(self.names, order, self.domain)

    def with_domain(self, domain: Domain) -> "PolyRing":
        return PolyRing(self.names, self.order, domain)

    # monomials ------------------------------------------------------------
    def pack(self, exps) -> int:
        exps = tuple(exps)
        if len(exps) != self.nvars:
            raise ArityMismatch(f"expected {self.nvars} exponents, got {len(exps)}")
        m = 0
        for i, e in enumerate(exps):
            if e < 0 or e >= 1 << (EXP_BITS - 1):
                raise ValueError(f"exponent {e} out of range")
            m |= e << (EXP_BITS * i)
        return m

    def unpack(self, m: int) -> tuple:
        return tuple((m >> (EXP_BITS * i)) & EXP_MASK for i in range(self.nvars))

    def mono_degree(self, m: int) -> int:
        return sum(self.unpack(m))

    def key(self, m: int) -> int:
        k = self._key_cache.get(m)
        if k is None:
            k = 0
            for i in range(self.nvars):
                e = (m >> (EXP_BITS * i)) & EXP_MASK
                if e:
                    k += e * self._weights[i]
            self._key_cache[m] = k
        return k

    def divides(self, a: int, b: int) -> bool:
        """True iff monomial ``a`` divides monomial ``b``."""
        g = self.guard
        return ((b | g) - a) & g == g

    def lcm(self, a: int, b: int) -> int:
        m = 0
        for i in range(self.nvars):
            s = EXP_BITS * i
            m |= max((a >> s) & EXP_MASK, (b >> s) & EXP_MASK) << s
        return m

    def monomials(self, degree: int) -> list[int]:
        """All monomials of the given total degree, largest first."""
        out = [self.pack(e) for e in _compositions(degree, self.nvars)]
        out.sort(key=self.key, reverse=True)
        return out

    # elements -------------------------------------------------------------
    @property
    def zero(self) -> "Poly":
        return Poly(self, {})

    @property
    def one(self) -> "Poly":
        return self.constant(1)

    def constant(self, c) -> "Poly":
        c = self.domain.convert(c)
        return Poly(self, {0: c} if c else {})

    def gens(self) -> list["Poly"]:
        return [self.var(i) for i in range(self.nvars)]

    def var(self, name) -> "Poly":
        i = name if isinstance(name, int) else self.index(name)
        return Poly(self, {1 << (EXP_BITS * i): self.domain.one})

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ParseError(f"unknown variable {name!r} in {self!r}") from None

    def monomial(self, exps, coeff=1) -> "Poly":
        return self.from_terms({tuple(exps): coeff})

    def from_terms(self, terms) -> "Poly":
        """Build from a mapping (or iterable of pairs) exponent tuple -> coeff."""
        items = terms.items() if hasattr(terms, "items") else terms
        out: dict[int, object] = {}
        dom = self.domain
        for exps, c in items:
            m = self.pack(exps)
            out[m] = out.get(m, 0) + dom.convert(c)
        if dom.p:
            out = {m: c % dom.p for m, c in out.items()}
        return Poly(self, {m: c for m, c in out.items() if c})

    def from_packed(self, terms: dict) -> "Poly":
        return Poly(self, {m: c for m, c in terms.items() if c})

    def parse(self, text: str) -> "Poly":
        return parse_poly(self, text)

    def __call__(self, text: str) -> "Poly":
        return parse_poly(self, text)


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Immutable sparse polynomial; ``terms`` maps packed monomials to
    nonzero coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms

    # coercion -------------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                if other.ring.domain != self.ring.domain:
                    raise ModeMismatch(f"{other.ring.domain!r} vs {self.ring.domain!r}")
                raise RingMismatch(f"{other.ring!r} vs {self.ring!r}")
            return other
        return self.ring.constant(other)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        p = self.ring.domain.p
        terms = dict(self.terms)
        for m, c in other.terms.items():
            v = terms.get(m)
            if v is None:
                terms[m] = c
            else:
                v = v + c
                if p:
                    v %= p
                if v:
                    terms[m] = v
                else:
                    del terms[m]
        return Poly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.domain.p
        if p:
            return Poly(self.ring, {m: (-c) % p for m, c in self.terms.items()})
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        other = self._coerce(other)
        p = self.ring.domain.p
        out: dict = {}
        get = out.get
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 + m2
                out[m] = get(m, 0) + c1 * c2
        if p:
            return Poly(self.ring, {m: c % p for m, c in out.items() if c % p})
        return Poly(self.ring, {m: c for m, c in out.items() if c})

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "Poly":
        dom = self.ring.domain
        c = dom.convert(c)
        if not c:
            return self.ring.zero
        if dom.p:
            return Poly(self.ring, {m: v * c % dom.p for m, v in self.terms.items()})
        return Poly(self.ring, {m: v * c for m, v in self.terms.items()})

    def __truediv__(self, c):
        return self.scale(self.ring.domain.inv(self.ring.domain.convert(c)))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = self.ring.one
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_monomial(self, m: int, c=None) -> "Poly":
        """Multiply by the packed monomial ``m`` (and optionally a scalar)."""
        if c is None:
            return Poly(self.ring, {k + m: v for k, v in self.terms.items()})
        return (Poly(self.ring, {k + m: v for k, v in self.terms.items()})).scale(c)

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        try:
            return self == self.ring.constant(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # structure ------------------------------------------------------------
    def __len__(self):
        return len(self.terms)

    def sorted_monomials(self) -> list[int]:
        """Packed monomials in decreasing monomial order."""
        return sorted(self.terms, key=self.ring.key, reverse=True)

    def items(self):
        """(exponent tuple, coefficient) pairs in decreasing monomial order."""
        unpack = self.ring.unpack
        return [(unpack(m), self.terms[m]) for m in self.sorted_monomials()]

    def leading_monomial(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=self.ring.key)

    def leading_coefficient(self):
        return self.terms[self.leading_monomial()]

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        return self.scale(self.ring.domain.inv(self.leading_coefficient()))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(self.ring.mono_degree(m) for m in self.terms)

    def degrees(self) -> set[int]:
        return {self.ring.mono_degree(m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def graded_component(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("degree must be nonnegative")
        deg = self.ring.mono_degree
        return Poly(self.ring, {m: c for m, c in self.terms.items() if deg(m) == e})

    def variables(self) -> set[int]:
        """Indices of variables that occur."""
        occ = 0
        for m in self.terms:
            occ |= m
        return {i for i in range(self.ring.nvars) if (occ >> (EXP_BITS * i)) & EXP_MASK}

    def coefficient(self, exps):
        return self.terms.get(self.ring.pack(exps), self.ring.domain.zero)

    # maps -----------------------------------------------------------------
    def apply_ring_map(self, images) -> "Poly":
        return apply_ring_map(self, images)

    def evaluate(self, point):
        """Exact value at ``point`` (one scalar per variable)."""
        dom = self.ring.domain
        vals = [dom.convert(v) for v in point]
        if len(vals) != self.ring.nvars:
            raise ArityMismatch(f"expected {self.ring.nvars} values")
        total = dom.zero
        for m, c in self.terms.items():
            t = c
            for i, e in enumerate(self.ring.unpack(m)):
                if e:
                    t = t * vals[i] ** e
            total = total + t
        if dom.p:
            total %= dom.p
        return total

    def change_ring(self, ring: PolyRing) -> "Poly":
        """Reinterpret in a ring with the same variables in the same positions
        (different order and/or domain)."""
        if ring.names != self.ring.names:
            raise RingMismatch("change_ring needs identical variable lists")
        if ring.domain == self.ring.domain:
            return Poly(ring, dict(self.terms))
        if ring.domain.p and self.ring.domain.is_rational:
            return ring.from_packed({m: ring.domain.convert(c) for m, c in self.terms.items()})
        raise ModeMismatch("cannot lift prime-field coefficients to QQ")

    # text -----------------------------------------------------------------
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"


def apply_ring_map(f: Poly, images) -> Poly:
    """Substitute ``images[i]`` for variable ``i`` of ``f`` and expand."""
    images = list(images)
    if len(images) != f.ring.nvars:
        raise ArityMismatch(f"need {f.ring.nvars} images, got {len(images)}")
    if not images:
        raise ArityMismatch("ring map on a ring without variables")
    target = images[0].ring
    for g in images:
        if g.ring != target:
            raise RingMismatch("all images must share one target ring")
    powers: dict[tuple[int, int], Poly] = {}

    def power(i, e):
        key = (i, e)
        if key not in powers:
            powers[key] = images[i] ** e
        return powers[key]

    dom = target.domain
    acc: dict = {}
    for m, c in f.terms.items():
        c = dom.convert(c) if dom != f.ring.domain else c
        term = target.constant(c)
        for i, e in enumerate(f.ring.unpack(m)):
            if e:
                term = term * power(i, e)
                if not term.terms:
                    break
        for k, v in term.terms.items():
            acc[k] = acc.get(k, 0) + v
    if dom.p:
        acc = {k: v % dom.p for k, v in acc.items()}
    return target.from_packed(acc)


# ---------------------------------------------------------------------------
# text format:  3/2*x_1_2^2*x_2_1 - z_0

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*^]))")


def format_poly(f: Poly) -> str:
    if not f.terms:
        return "0"
    ring = f.ring
    dom = ring.domain
    pieces = []
    for exps, c in f.items():
        neg = False
        if dom.is_rational and c < 0:
            neg, c = True, -c
        factors = []
        for i, e in enumerate(exps):
            if e == 1:
                factors.append(ring.names[i])
            elif e:
                factors.append(f"{ring.names[i]}^{e}")
        ctext = dom.to_text(c)
        if not factors:
            body = ctext
        elif ctext == "1":
            body = "*".join(factors)
        else:
            body = "*".join([ctext] + factors)
        if not pieces:
            pieces.append(("-" if neg else "") + body)
        else:
            pieces.append(("- " if neg else "+ ") + body)
    return " ".join(pieces)


def parse_poly(ring: PolyRing, text: str) -> Poly:
    """Parse the exactpoly text format into ``ring``."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos} in {text!r}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    if not tokens:
        raise ParseError("empty polynomial text")
    dom = ring.domain
    result: dict = {}
    i = 0
    first = True
    while i < len(tokens):
        sign = 1
        if tokens[i] in (("op", "+"), ("op", "-")):
            sign = -1 if tokens[i][1] == "-" else 1
            i += 1
        elif not first:
            raise ParseError(f"expected + or - in {text!r}")
        first = False
        coeff = Fraction(1)
        exps = [0] * ring.nvars
        expect_factor = True
        seen_factor = False
        while i < len(tokens) and expect_factor:
            kind, val = tokens[i]
            if kind == "num":
                coeff *= Fraction(val)
                i += 1
            elif kind == "var":
                i += 1
                power = 1
                if i < len(tokens) and tokens[i] == ("op", "^"):
                    if i + 1 >= len(tokens) or tokens[i + 1][0] != "num" or "/" in tokens[i + 1][1]:
                        raise ParseError(f"bad exponent in {text!r}")
                    power = int(tokens[i + 1][1])
                    i += 2
                exps[ring.index(val)] += power
            else:
                raise ParseError(f"unexpected {val!r} in {text!r}")
            seen_factor = True
            if i < len(tokens) and tokens[i] == ("op", "*"):
                i += 1
                expect_factor = True
            else:
                expect_factor = False
        if not seen_factor:
            raise ParseError(f"dangling operator in {text!r}")
        m = ring.pack(exps)
        result[m] = result.get(m, 0) + dom.convert(sign * coeff)
    if dom.p:
        result = {m: c % dom.p for m, c in result.items()}
    return ring.from_packed(result)


def all_monomials_upto(ring: PolyRing, degree: int) -> list[int]:
    out = []
    for e in range(degree + 1):
        out.extend(ring.monomials(e))
    return out


def exponent_grid(nvars: int, degree: int):
    """Exponent tuples of total degree ``degree`` (deterministic order)."""
    return list(_compositions(degree, nvars))


__all__ = [
    "Domain", "QQ", "GF", "DEFAULT_PRIME", "MonomialOrder", "GREVLEX", "LEX",
    "block_order", "PolyRing", "Poly", "apply_ring_map", "parse_poly",
    "format_poly", "exponent_grid", "all_monomials_upto",
]

"""Explicit section rings and catalecticant matrices.

A :class:`SectionModel` records bases of H^0(A), H^0(B), H^0(L) and the
structure constants of the multiplication H^0(A) x H^0(B) -> H^0(L).  The
built-in models are monomial: rational normal curves (line bundles O(a), O(b)
on P^1) and Veronese embeddings of P^n.  Coordinates on P(H^0(L)) are named
``z_0, z_1, ...`` in the order of the L-basis.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from gmpy2 import mpq

from secantcat.errors import ParseError, UnsupportedProvenance
from secantcat.exactpoly import GREVLEX, QQ, Domain, Poly, PolyRing
from secantcat.groebner import Ideal, eliminate
from secantcat.linalg import determinant, rank


def _monomial_basis(nvars: int, degree: int) -> list[tuple]:
    """Degree-``degree`` exponent vectors, increasing in grevlex
    (x_0 > x_1 > ...); for two variables this is t^d, s t^(d-1), ..., s^d."""
    ring = PolyRing([f"v{i}" for i in range(nvars)])
    return [ring.unpack(m) for m in reversed(ring.monomials(degree))]


def _label(exps, names) -> str:
    parts = []
    for v, e in zip(names, exps):
        if e == 1:
            parts.append(v)
        elif e:
            parts.append(f"{v}^{e}")
    return "*".join(parts) or "1"


@dataclass
class SectionModel:
    dimA: int
    dimB: int
    dimL: int
    mult: dict  # (i, j) -> {gamma: coefficient}
    provenance: tuple
    labelsA: list = field(default_factory=list)
    labelsB: list = field(default_factory=list)
    labelsL: list = field(default_factory=list)
    # exponent vectors of the monomial bases (built-ins only)
    expsA: list | None = None
    expsB: list | None = None
    expsL: list | None = None
    param_names: tuple = ()

    @property
    def kind(self) -> str:
        return self.provenance[0]

    @property
    def is_builtin(self) -> bool:
        return self.kind in ("P1", "Veronese")

    @property
    def self_paired(self) -> bool:
        return self.dimA == self.dimB and self.expsA is not None and self.expsA == self.expsB

    def z_ring(self, domain: Domain = QQ) -> PolyRing:
        return PolyRing([f"z_{g}" for g in range(self.dimL)], GREVLEX, domain)

    def param_ring(self, domain: Domain = QQ) -> PolyRing:
        return PolyRing(self.param_names, GREVLEX, domain)

    def point(self, params) -> list:
        """Coordinates in P(H^0(L)) of the image of a parameter point."""
        if not self.is_builtin:
            raise UnsupportedProvenance("no parametrization for a user table")
        vals = [mpq(v) for v in params]
        out = []
        for exps in self.expsL:
            v = mpq(1)
            for x, e in zip(vals, exps):
                if e:
                    v *= x ** e
            out.append(v)
        return out

    def describe(self) -> dict:
        return {"provenance": list(self.provenance), "a": self.dimA, "b": self.dimB, "l": self.dimL}


def _monomial_model(nparams, degA, degB, names, provenance) -> SectionModel:
    ea = _monomial_basis(nparams, degA)
    eb = _monomial_basis(nparams, degB)
    el = _monomial_basis(nparams, degA + degB)
    index = {e: g for g, e in enumerate(el)}
    mult = {}
    for i, a in enumerate(ea):
        for j, b in enumerate(eb):
            mult[(i, j)] = {index[tuple(x + y for x, y in zip(a, b))]: mpq(1)}
    return SectionModel(
        dimA=len(ea), dimB=len(eb), dimL=len(el), mult=mult, provenance=provenance,
        labelsA=[_label(e, names) for e in ea], labelsB=[_label(e, names) for e in eb],
        labelsL=[_label(e, names) for e in el], expsA=ea, expsB=eb, expsL=el,
        param_names=tuple(names),
    )


def model_p1(degA: int, degB: int) -> SectionModel:
    """O(degA), O(degB) on P^1 with bases s^i t^(deg-i); z_e <-> s^e t^(L-e)."""
    if degA < 0 or degB < 0:
        raise ValueError("degrees must be nonnegative")
    # variable order (s, t): increasing grevlex lists t^d first
    return _monomial_model(2, degA, degB, ("s", "t"), ("P1", degA, degB))


def model_veronese(n: int, d1: int, d2: int) -> SectionModel:
    if n < 1 or d1 < 1 or d2 < 1:
        raise ValueError("need n, d1, d2 >= 1")
    names = tuple(f"x{i}" for i in range(n + 1))
    return _monomial_model(n + 1, d1, d2, names, ("Veronese", n, d1, d2))


def model_user_table(a: int, b: int, l: int, mult: dict, labelsL=None) -> SectionModel:
    """Structure constants supplied by the caller; only the shape is checked."""
    for (i, j), row in mult.items():
        if not (0 <= i < a and 0 <= j < b):
            raise ValueError(f"entry ({i}, {j}) outside a {a}x{b} table")
        for g in row:
            if not 0 <= g < l:
                raise ValueError(f"L-index {g} out of range")
    full = {(i, j): {g: mpq(c) for g, c in mult.get((i, j), {}).items() if c}
            for i in range(a) for j in range(b)}
    return SectionModel(
        dimA=a, dimB=b, dimL=l, mult=full, provenance=("UserTable",),
        labelsA=[f"alpha{i}" for i in range(a)], labelsB=[f"beta{j}" for j in range(b)],
        labelsL=list(labelsL) if labelsL else [f"z_{g}" for g in range(l)],
    )


def read_user_table(text: str) -> SectionModel:
    """Parse ``sections: a=.. b=.. l=..`` followed by ``i j : <poly in z>`` lines."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty section table")
    m = re.fullmatch(r"sections:\s*a=(\d+)\s+b=(\d+)\s+l=(\d+)", lines[0])
    if not m:
        raise ParseError(f"bad section table header {lines[0]!r}")
    a, b, l = (int(g) for g in m.groups())
    ring = PolyRing([f"z_{g}" for g in range(l)])
    mult = {}
    for ln in lines[1:]:
        mm = re.fullmatch(r"(\d+)\s+(\d+)\s*:\s*(.+)", ln)
        if not mm:
            raise ParseError(f"bad table line {ln!r}")
        i, j = int(mm.group(1)), int(mm.group(2))
        f = ring.parse(mm.group(3))
        if f.degree() > 1 or f.coefficient([0] * l):
            raise ParseError(f"entry {i} {j} is not a linear form")
        row = {}
        for exps, c in f.items():
            row[exps.index(1)] = c
        mult[(i, j)] = row
    return model_user_table(a, b, l, mult)


# ---------------------------------------------------------------------------


@dataclass
class CatalecticantMatrix:
    model: SectionModel
    ring: PolyRing
    entries: list  # rows of linear forms

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.entries), len(self.entries[0]) if self.entries else 0)

    def is_symmetric(self) -> bool:
        a, b = self.shape
        return a == b and all(self.entries[i][j] == self.entries[j][i]
                              for i in range(a) for j in range(a))

    def evaluate(self, point) -> list[list]:
        return [[f.evaluate(point) for f in row] for row in self.entries]


def build_catalecticant(model: SectionModel, domain: Domain = QQ) -> CatalecticantMatrix:
    ring = model.z_ring(domain)
    z = ring.gens()
    rows = []
    for i in range(model.dimA):
        row = []
        for j in range(model.dimB):
            f = ring.zero
            for g, c in model.mult.get((i, j), {}).items():
                f = f + z[g].scale(c)
            row.append(f)
        rows.append(row)
    return CatalecticantMatrix(model, ring, rows)


def _minors(entries, size: int, ring: PolyRing):
    """All size x size minors (row subset, column subset, determinant) by
    memoized Laplace expansion along the first chosen row."""
    a, b = len(entries), len(entries[0])
    memo: dict = {}

    def det(rows, cols):
        key = (rows, cols)
        if key in memo:
            return memo[key]
        if len(rows) == 1:
            val = entries[rows[0]][cols[0]]
        else:
            val = ring.zero
            r0, rest = rows[0], rows[1:]
            for k, c in enumerate(cols):
                e = entries[r0][c]
                if not e.terms:
                    continue
                sub = det(rest, cols[:k] + cols[k + 1:])
                if not sub.terms:
                    continue
                term = e * sub
                val = val + term if k % 2 == 0 else val - term
        memo[key] = val
        return val

    for rows in itertools.combinations(range(a), size):
        for cols in itertools.combinations(range(b), size):
            yield rows, cols, det(rows, cols)


def _bareiss_poly_det(entries, ring: PolyRing) -> Poly:
    """Fraction-free determinant of a square matrix of polynomials."""
    m = [list(r) for r in entries]
    n = len(m)
    prev = ring.one
    sign = 1
    for k in range(n - 1):
        if not m[k][k].terms:
            swap = next((i for i in range(k + 1, n) if m[i][k].terms), None)
            if swap is None:
                return ring.zero
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = exact_divide(m[k][k] * m[i][j] - m[i][k] * m[k][j], prev)
        prev = m[k][k]
    d = m[n - 1][n - 1]
    return d if sign > 0 else -d


def exact_divide(f: Poly, g: Poly) -> Poly:
    """f / g, assuming g divides f exactly."""
    if not g.terms:
        raise ZeroDivisionError("division by the zero polynomial")
    ring = f.ring
    lm = g.leading_monomial()
    lc_inv = ring.domain.inv(g.terms[lm])
    q = {}
    rem = f
    while rem.terms:
        m = rem.leading_monomial()
        if not ring.divides(lm, m):
            raise ArithmeticError("division is not exact")
        c = rem.terms[m] * lc_inv
        if ring.domain.p:
            c %= ring.domain.p
        q[m - lm] = c
        rem = rem - g.mul_monomial(m - lm, c)
    return ring.from_packed(q)


def minors(M: CatalecticantMatrix, size: int) -> list[Poly]:
    a, b = M.shape
    if not 1 <= size <= min(a, b):
        raise ValueError(f"minor size {size} out of range for a {a}x{b} matrix")
    if size <= 6:
        return [d for _, _, d in _minors(M.entries, size, M.ring)]
    out = []
    for rows in itertools.combinations(range(a), size):
        for cols in itertools.combinations(range(b), size):
            out.append(_bareiss_poly_det([[M.entries[r][c] for c in cols] for r in rows], M.ring))
    return out


def minors_ideal(M: CatalecticantMatrix, size: int) -> Ideal:
    """Ideal of all size x size minors (zero minors dropped, duplicates kept
    once)."""
    seen = set()
    gens = []
    for f in minors(M, size):
        if f.terms and f not in seen and -f not in seen:
            seen.add(f)
            gens.append(f)
    return Ideal(M.ring, gens)


@dataclass
class EmbeddedVarietyIdeal:
    model: SectionModel
    ideal: Ideal
    method: str


def parametrization(model: SectionModel, domain: Domain = QQ):
    """(ring with parameters then z's, list of z_gamma - monomial_gamma)."""
    if not model.is_builtin:
        raise UnsupportedProvenance("variety_ideal needs a built-in model")
    names = list(model.param_names) + [f"z_{g}" for g in range(model.dimL)]
    ring = PolyRing(names, GREVLEX, domain)
    k = len(model.param_names)
    gens = []
    for g, exps in enumerate(model.expsL):
        gens.append(ring.var(k + g) - ring.monomial(list(exps) + [0] * model.dimL))
    return ring, gens


def variety_ideal(model: SectionModel, domain: Domain = QQ, max_pairs=None) -> EmbeddedVarietyIdeal:
    """I(X, L): kernel of the monomial parametrization, by elimination."""
    ring, gens = parametrization(model, domain)
    keep = [f"z_{g}" for g in range(model.dimL)]
    elim = eliminate(Ideal(ring, gens), keep, max_pairs=max_pairs)
    zr = model.z_ring(domain)
    ideal = Ideal(zr, [Poly(zr, dict(g.terms)) for g in elim.gens])
    return EmbeddedVarietyIdeal(model, ideal, "Elimination")


def rank_profile(M: CatalecticantMatrix, point, domain: Domain = QQ) -> int:
    """Rank of the scalar matrix obtained by substituting z -> point."""
    if len(point) != M.model.dimL:
        raise ValueError(f"point needs {M.model.dimL} coordinates")
    return rank(M.evaluate(point), domain)


def minor_values(M: CatalecticantMatrix, size: int, point) -> list:
    """Values of all size x size minors at a point, via exact determinants."""
    vals = M.evaluate(point)
    a, b = M.shape
    out = []
    for rows in itertools.combinations(range(a), size):
        for cols in itertools.combinations(range(b), size):
            out.append(determinant([[vals[r][c] for c in cols] for r in rows]))
    return out


__all__ = [
    "SectionModel", "CatalecticantMatrix", "EmbeddedVarietyIdeal", "model_p1",
    "model_veronese", "model_user_table", "read_user_table", "build_catalecticant",
    "minors", "minors_ideal", "variety_ideal", "rank_profile", "minor_values",
    "parametrization", "exact_divide",
]

"""Exact linear algebra over QQ or GF(p): sparse echelon forms and
fraction-free rank/determinant for dense scalar matrices."""

from __future__ import annotations

from heapq import heapify, heappop, heappush
from math import lcm

from gmpy2 import mpq

from secantcat.exactpoly import QQ, Domain


class EchelonBasis:
    """Incrementally maintained echelon basis of a subspace of K^N.

    Rows are sparse dicts ``column -> coefficient``.  Column indices double as
    priorities: the pivot of a row is its smallest column index.  Callers that
    index columns by monomials in decreasing order therefore get pivots at
    leading monomials.
    """

    def __init__(self, domain: Domain = QQ):
        self.domain = domain
        self.pivots: dict[int, dict] = {}

    def __len__(self):
        return len(self.pivots)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: dict) -> dict:
        """Remainder of ``row`` after eliminating every pivot column."""
        p = self.domain.p
        row = {c: v for c, v in row.items() if v}
        if not self.pivots:
            return row
        pivots = self.pivots
        heap = list(row)
        heapify(heap)
        out = {}
        while heap:
            col = heappop(heap)
            v = row.pop(col, None)
            if v is None:
                continue
            prow = pivots.get(col)
            if prow is None:
                out[col] = v
                continue
            for c2, w in prow.items():
                if c2 == col:
                    continue
                cur = row.get(c2)
                if cur is None:
                    new = -v * w
                    if p:
                        new %= p
                    if new:
                        row[c2] = new
                        heappush(heap, c2)
                else:
                    new = cur - v * w
                    if p:
                        new %= p
                    if new:
                        row[c2] = new
                    else:
                        del row[c2]
        return out

    def add(self, row: dict) -> bool:
        """Insert ``row``; returns True iff it enlarged the span."""
        r = self.reduce(row)
        if not r:
            return False
        lead = min(r)
        inv = self.domain.inv(r[lead])
        p = self.domain.p
        if p:
            r = {c: v * inv % p for c, v in r.items()}
        else:
            r = {c: v * inv for c, v in r.items()}
        self.pivots[lead] = r
        return True

    def contains(self, row: dict) -> bool:
        return not self.reduce(row)

    def rref(self) -> list[dict]:
        """Fully reduced rows sorted by pivot column."""
        out = EchelonBasis(self.domain)
        # back-substitute from the last pivot upwards
        for col in sorted(self.pivots, reverse=True):
            r = out.reduce(self.pivots[col])
            out.pivots[col] = r
        return [out.pivots[c] for c in sorted(out.pivots)]

    def same_span(self, other: "EchelonBasis") -> bool:
        if self.rank != other.rank:
            return False
        return all(other.contains(r) for r in self.pivots.values())


def span_rank(rows, domain: Domain = QQ) -> int:
    basis = EchelonBasis(domain)
    for r in rows:
        basis.add(r)
    return basis.rank


# ---------------------------------------------------------------------------
# dense scalar matrices


def _as_integer_rows(matrix, domain: Domain):
    rows = []
    for row in matrix:
        if domain.p:
            rows.append([int(v) % domain.p for v in row])
        else:
            vals = [mpq(v) for v in row]
            den = lcm(*[int(v.denominator) for v in vals]) if vals else 1
            rows.append([int(v * den) for v in vals])
    return rows


def rank(matrix, domain: Domain = QQ) -> int:
    """Exact rank.  Over QQ rows are cleared of denominators and reduced by
    fraction-free (Bareiss) elimination; over GF(p) by ordinary elimination."""
    rows = _as_integer_rows(matrix, domain)
    if not rows or not rows[0]:
        return 0
    if domain.p:
        return _rank_mod_p(rows, domain.p)
    return _bareiss(rows)[0]


def determinant(matrix, domain: Domain = QQ):
    n = len(matrix)
    if any(len(r) != n for r in matrix):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return domain.one
    if domain.p:
        rows = [[int(v) % domain.p for v in r] for r in matrix]
        return _det_mod_p(rows, domain.p)
    scale = mpq(1)
    rows = []
    for r in matrix:
        vals = [mpq(v) for v in r]
        den = lcm(*[int(v.denominator) for v in vals])
        scale *= den
        rows.append([int(v * den) for v in vals])
    rk, det = _bareiss(rows)
    return mpq(det) / scale if rk == n else mpq(0)


def _bareiss(rows):
    """Fraction-free elimination with row pivoting; returns (rank, last pivot)
    where the last pivot is the determinant (up to sign) when full rank."""
    a = [list(r) for r in rows]
    nrows, ncols = len(a), len(a[0])
    prev = 1
    r = 0
    sign = 1
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if a[i][c]), None)
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
            sign = -sign
        pr = a[r]
        for i in range(r + 1, nrows):
            ai = a[i]
            f = ai[c]
            if f == 0:
                a[i] = [(pr[c] * x) // prev for x in ai]
                continue
            a[i] = [(pr[c] * ai[j] - f * pr[j]) // prev for j in range(ncols)]
        prev = pr[c]
        r += 1
    det = sign * prev if r == nrows == ncols else 0
    return r, det


def _rank_mod_p(rows, p):
    a = [list(r) for r in rows]
    nrows, ncols = len(a), len(a[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(r + 1, nrows):
            f = a[i][c]
            if f:
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
        if r == nrows:
            break
    return r


def _det_mod_p(rows, p):
    a = [list(r) for r in rows]
    n = len(a)
    det = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = det * a[c][c] % p
        inv = pow(a[c][c], -1, p)
        for i in range(c + 1, n):
            f = a[i][c] * inv % p
            if f:
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[c])]
    return det % p


def matmul(a, b):
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)]

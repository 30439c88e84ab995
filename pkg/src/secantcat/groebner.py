"""Buchberger's algorithm and the ideal operations built on it.

Internally a polynomial is a dict ``order key -> coefficient``; the ring's
``exp_of_key`` table recovers the packed exponent of a key.  Keys compare
like monomials, so the leading term is simply the largest key.

Pair selection follows the normal strategy (smallest lcm degree, then
smallest lcm in the monomial order, then insertion order) and pairs are
pruned with the Gebauer-Moeller installation of Buchberger's coprime and
chain criteria.  For homogeneous input the run can be stopped at a degree
bound and resumed later; the resulting truncated basis decides membership
for every polynomial up to that degree.
"""

from __future__ import annotations

import hashlib
import logging
from heapq import heapify, heappop, heappush

from secantcat.errors import BudgetExceeded, NoGB, NotHomogeneous, RingMismatch
from secantcat.exactpoly import (
    GREVLEX,
    EXP_BITS,
    EXP_MASK,
    Poly,
    PolyRing,
    block_order,
    format_poly,
)
from secantcat.linalg import EchelonBasis

log = logging.getLogger(__name__)


class _Elem:
    """Monic basis element: leading key/exponent plus the tail, sorted."""

    __slots__ = ("lkey", "lexp", "deg", "tail", "terms")

    def __init__(self, terms: dict, exp_of_key: dict, deg: int):
        lkey = max(terms)
        self.lkey = lkey
        self.lexp = exp_of_key[lkey]
        self.deg = deg
        self.terms = terms
        self.tail = [(k, exp_of_key[k], terms[k]) for k in sorted(terms, reverse=True)[1:]]


def _degree(exp: int, nvars: int) -> int:
    return sum((exp >> (EXP_BITS * i)) & EXP_MASK for i in range(nvars))


class _Engine:
    """Resumable Buchberger run over one ring."""

    def __init__(self, ring: PolyRing, gens):
        self.ring = ring
        self.p = ring.domain.p
        self.elems: list[_Elem] = []
        self.G: list[int] = []
        self.pairs: list[tuple] = []  # (lcm degree, lcm key, i, j)
        self.pairs_done = 0
        self.reduced_to_zero = 0
        self.homogeneous = all(g.is_homogeneous() for g in gens)
        self.done_degree = -1
        self.complete = False
        pending = []
        for g in gens:
            d = self.to_internal(g)
            if d:
                pending.append((g.degree(), d))
        # smaller generators first so that later ones are reduced against them
        pending.sort(key=lambda t: (t[0], max(t[1])))
        self.pending = pending

    def add_generators(self, gens):
        for g in gens:
            d = self.to_internal(g)
            if d:
                self.pending.append((g.degree(), d))
                self.homogeneous = self.homogeneous and g.is_homogeneous()
        self.pending.sort(key=lambda t: (t[0], max(t[1])))
        if self.pending:
            self.complete = False

    # conversion -----------------------------------------------------------
    def to_internal(self, f: Poly) -> dict:
        ring = self.ring
        key = ring.key
        table = ring.exp_of_key
        out = {}
        for m, c in f.terms.items():
            k = key(m)
            table[k] = m
            out[k] = c
        return out

    def to_poly(self, d: dict) -> Poly:
        table = self.ring.exp_of_key
        return Poly(self.ring, {table[k]: c for k, c in d.items()})

    # arithmetic -----------------------------------------------------------
    def _monic(self, d: dict) -> dict:
        lead = d[max(d)]
        if lead == 1:
            return d
        inv = self.ring.domain.inv(lead)
        if self.p:
            p = self.p
            return {k: c * inv % p for k, c in d.items()}
        return {k: c * inv for k, c in d.items()}

    def reduce(self, poly: dict, basis_idx, full: bool = True) -> dict:
        """Remainder of ``poly`` modulo the elements listed in ``basis_idx``."""
        elems = [self.elems[i] for i in basis_idx]
        p = self.p
        table = self.ring.exp_of_key
        guard = self.ring.guard
        poly = dict(poly)
        heap = [-k for k in poly]
        heapify(heap)
        rem = {}
        get = poly.get
        while heap:
            k = -heappop(heap)
            c = poly.pop(k, None)
            if c is None:
                continue
            e = table[k]
            eg = e | guard
            for g in elems:
                if (eg - g.lexp) & guard == guard:
                    break
            else:
                rem[k] = c
                if not full:
                    rem.update(poly)
                    return rem
                continue
            qk = k - g.lkey
            qe = e - g.lexp
            for tk, te, tc in g.tail:
                nk = tk + qk
                cur = get(nk)
                if cur is None:
                    v = -c * tc
                    if p:
                        v %= p
                    poly[nk] = v
                    if nk not in table:
                        table[nk] = te + qe
                    heappush(heap, -nk)
                else:
                    v = cur - c * tc
                    if p:
                        v %= p
                    if v:
                        poly[nk] = v
                    else:
                        del poly[nk]
        return rem

    def spoly(self, i: int, j: int) -> dict:
        f, g = self.elems[i], self.elems[j]
        ring = self.ring
        lcm = ring.lcm(f.lexp, g.lexp)
        lkey = ring.key(lcm)
        ring.exp_of_key[lkey] = lcm
        table = ring.exp_of_key
        p = self.p
        out = {}
        qk, qe = lkey - f.lkey, lcm - f.lexp
        for tk, te, tc in f.tail:
            nk = tk + qk
            out[nk] = tc
            if nk not in table:
                table[nk] = te + qe
        qk, qe = lkey - g.lkey, lcm - g.lexp
        for tk, te, tc in g.tail:
            nk = tk + qk
            cur = out.get(nk)
            if cur is None:
                out[nk] = -tc % p if p else -tc
                if nk not in table:
                    table[nk] = te + qe
            else:
                v = cur - tc
                if p:
                    v %= p
                if v:
                    out[nk] = v
                else:
                    del out[nk]
        return out

    # pair bookkeeping (Gebauer-Moeller) -----------------------------------
    def _pair(self, i, j):
        ring = self.ring
        lcm = ring.lcm(self.elems[i].lexp, self.elems[j].lexp)
        return (_degree(lcm, ring.nvars), ring.key(lcm), min(i, j), max(i, j), lcm)

    def insert(self, d: dict):
        ring = self.ring
        d = self._monic(d)
        h = len(self.elems)
        elem = _Elem(d, ring.exp_of_key, _degree(ring.exp_of_key[max(d)], ring.nvars))
        self.elems.append(elem)
        mh = elem.lexp
        guard = ring.guard

        def divides(a, b):
            return ((b | guard) - a) & guard == guard

        cand = [self._pair(h, g) for g in self.G]
        keep = []
        for idx, pr in enumerate(cand):
            lcm_hg = pr[4]
            g = pr[3] if pr[2] == h else pr[2]
            coprime = self.elems[g].lexp + mh == lcm_hg
            if coprime:
                keep.append(pr)
                continue
            others = cand[idx + 1:]
            if any(divides(o[4], lcm_hg) for o in others):
                continue
            if any(divides(o[4], lcm_hg) for o in keep):
                continue
            keep.append(pr)
        new_pairs = []
        for pr in keep:
            g = pr[3] if pr[2] == h else pr[2]
            if self.elems[g].lexp + mh != pr[4]:
                new_pairs.append(pr)
        old = []
        for pr in self.pairs:
            lcm12 = pr[4]
            e1, e2 = self.elems[pr[2]].lexp, self.elems[pr[3]].lexp
            if (not divides(mh, lcm12)
                    or ring.lcm(e1, mh) == lcm12
                    or ring.lcm(e2, mh) == lcm12):
                old.append(pr)
        self.pairs = old + new_pairs
        self.G = [g for g in self.G if not divides(mh, self.elems[g].lexp)]
        self.G.append(h)

    # main loop ------------------------------------------------------------
    def run(self, max_degree=None, max_pairs=None):
        if self.complete:
            return
        if max_degree is not None and not self.homogeneous:
            max_degree = None
        while True:
            # next event: a pending generator or the smallest pair
            best_pair = min(self.pairs) if self.pairs else None
            next_gen_deg = self.pending[0][0] if self.pending else None
            if best_pair is None and next_gen_deg is None:
                self.complete = True
                break
            take_gen = next_gen_deg is not None and (best_pair is None or next_gen_deg <= best_pair[0])
            deg = next_gen_deg if take_gen else best_pair[0]
            if max_degree is not None and deg > max_degree:
                break
            if take_gen:
                _, d = self.pending.pop(0)
            else:
                self.pairs.remove(best_pair)
                if max_pairs is not None and self.pairs_done >= max_pairs:
                    self.pairs.append(best_pair)
                    raise BudgetExceeded(max_pairs)
                self.pairs_done += 1
                d = self.spoly(best_pair[2], best_pair[3])
            r = self.reduce(d, self.G) if d else d
            if r:
                self.insert(r)
            else:
                self.reduced_to_zero += 1
        if max_degree is not None:
            self.done_degree = max(self.done_degree, max_degree)
        if self.complete:
            self.done_degree = None

    def covers(self, degree) -> bool:
        if self.complete:
            return True
        return self.homogeneous and degree is not None and self.done_degree is not None \
            and self.done_degree >= degree

    def reduced_basis(self) -> list[Poly]:
        """Interreduced, monic basis of the current G sorted by decreasing
        leading monomial."""
        out = []
        for idx in self.G:
            others = [g for g in self.G if g != idx]
            e = self.elems[idx]
            tail = {k: c for k, _, c in e.tail}
            r = self.reduce(tail, others) if tail else {}
            r[e.lkey] = 1 if self.p else self.ring.domain.one
            out.append((e.lkey, r))
        out.sort(key=lambda t: t[0], reverse=True)
        return [self.to_poly(r) for _, r in out]


# ---------------------------------------------------------------------------
# ideals


class Ideal:
    """Ideal given by generators, with a lazily computed Groebner basis."""

    def __init__(self, ring: PolyRing, gens=()):
        gens = list(gens)
        for g in gens:
            if g.ring != ring:
                raise RingMismatch(f"generator {g} not in {ring!r}")
        self.ring = ring
        self.gens = [g for g in gens if g.terms]
        self._engine: _Engine | None = None
        self._gb: list[Poly] | None = None

    def __repr__(self):
        return f"Ideal({self.ring!r}, {len(self.gens)} gens)"

    def __iter__(self):
        return iter(self.gens)

    def is_homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.gens)

    def max_gen_degree(self) -> int:
        return max((g.degree() for g in self.gens), default=-1)

    # Groebner machinery -------------------------------------------------
    def _get_engine(self) -> _Engine:
        if self._engine is None:
            self._engine = _Engine(self.ring, self.gens)
        return self._engine

    def has_gb(self, degree=None) -> bool:
        return self._engine is not None and self._engine.covers(degree)

    def groebner(self, max_pairs=None) -> list[Poly]:
        """Reduced monic Groebner basis (complete run)."""
        if self._gb is None:
            if not self.gens:
                self._gb = []
                return self._gb
            eng = self._get_engine()
            eng.run(max_pairs=max_pairs)
            self._gb = eng.reduced_basis()
        return self._gb

    @property
    def gb(self) -> list[Poly] | None:
        return self._gb

    def truncated(self, degree: int, max_pairs=None) -> "_Engine":
        """Run (or resume) Buchberger up to ``degree`` for a homogeneous ideal;
        falls back to a complete run otherwise."""
        eng = self._get_engine()
        if not eng.covers(degree):
            eng.run(max_degree=degree if self.is_homogeneous() else None, max_pairs=max_pairs)
        return eng

    def extended(self, new_gens) -> "Ideal":
        """The ideal with ``new_gens`` appended.

        When every new generator is homogeneous of degree above the degree
        already processed, the running Buchberger state moves to the new ideal
        (the truncated basis stays valid) and this ideal drops its cache.
        """
        new_gens = [g for g in new_gens if g.terms]
        out = Ideal(self.ring, self.gens + new_gens)
        eng = self._engine
        if (eng is not None and not eng.complete and eng.homogeneous
                and eng.done_degree is not None
                and all(g.is_homogeneous() and g.degree() > eng.done_degree for g in new_gens)):
            eng.add_generators(new_gens)
            out._engine = eng
            self._engine = None
            self._gb = None
        return out

    def stats(self) -> dict:
        eng = self._engine
        if eng is None:
            return {"gb_size": None, "pairs": 0}
        return {
            "gb_size": len(self._gb) if self._gb is not None else len(eng.G),
            "pairs": eng.pairs_done,
            "zero_reductions": eng.reduced_to_zero,
            "complete": eng.complete,
            "degree_bound": eng.done_degree,
        }

    def content_hash(self) -> str:
        """Hash of the reduced Groebner basis if known, else of the generators."""
        polys = self._gb if self._gb is not None else self.gens
        tag = "gb" if self._gb is not None else "gens"
        return hash_polys(self.ring, polys, tag)

    def __contains__(self, f):
        return ideal_member(f, self)


def hash_polys(ring: PolyRing, polys, tag: str = "gens") -> str:
    h = hashlib.sha256()
    h.update(ideal_header(ring).encode())
    h.update(tag.encode())
    for f in polys:
        h.update(b"\n")
        h.update(format_poly(f).encode())
    return h.hexdigest()[:16]


def buchberger(I: Ideal, max_pairs=None) -> Ideal:
    """Compute and cache the reduced monic Groebner basis of ``I``."""
    if not I.gens:
        raise ValueError("buchberger needs at least one generator")
    I.groebner(max_pairs=max_pairs)
    return I


def _check_ring(f: Poly, I: Ideal):
    if f.ring != I.ring:
        raise RingMismatch(f"{f.ring!r} vs {I.ring!r}")


def normal_form(f: Poly, I: Ideal, autocompute: bool = True, max_pairs=None) -> Poly:
    """Remainder of ``f`` on division by a Groebner basis of ``I``.

    For a homogeneous ideal only the part of the basis up to ``deg f`` is
    needed, so a truncated run is used.
    """
    _check_ring(f, I)
    if not f.terms:
        return f
    if not I.gens:
        return f
    deg = f.degree()
    if not I.has_gb(deg):
        if not autocompute:
            raise NoGB("no Groebner basis cached and autocompute disabled")
        I.truncated(deg, max_pairs=max_pairs)
    eng = I._engine
    r = eng.reduce(eng.to_internal(f), eng.G)
    return eng.to_poly(r)


def ideal_member(f: Poly, I: Ideal, max_pairs=None) -> bool:
    return normal_form(f, I, max_pairs=max_pairs).is_zero()


def ideal_contains(I: Ideal, J: Ideal, max_pairs=None) -> bool:
    """True iff every generator of ``J`` lies in ``I``."""
    if I.ring != J.ring:
        raise RingMismatch("ideals live in different rings")
    return all(ideal_member(g, I, max_pairs=max_pairs) for g in J.gens)


def ideal_equal(I: Ideal, J: Ideal, max_pairs=None) -> bool:
    return ideal_contains(I, J, max_pairs) and ideal_contains(J, I, max_pairs)


def _split_ring(ring: PolyRing, first: list[int], order_first_block: bool = True):
    """Ring with the variables ``first`` moved to the front, block order."""
    rest = [i for i in range(ring.nvars) if i not in first]
    perm = list(first) + rest
    names = [ring.names[i] for i in perm]
    new = PolyRing(names, block_order(len(first)), ring.domain)
    return new, perm


def _transport(f: Poly, target: PolyRing, positions: list[int]) -> Poly:
    """Move ``f`` into ``target`` sending variable i to ``positions[i]``."""
    src = f.ring
    out = {}
    for m, c in f.terms.items():
        exps = [0] * target.nvars
        for i, e in enumerate(src.unpack(m)):
            if e:
                exps[positions[i]] = e
        out[target.pack(exps)] = c
    return Poly(target, out)


def eliminate(I: Ideal, keep, max_pairs=None) -> Ideal:
    """Generators of ``I`` intersected with the subring on ``keep``.

    The result lives in a ring on the kept variables (original relative
    order, grevlex unless the input ring is lex/grevlex already).
    """
    ring = I.ring
    keep_idx = sorted(ring.index(v) if isinstance(v, str) else v for v in keep)
    drop = [i for i in range(ring.nvars) if i not in keep_idx]
    order = ring.order if ring.order.kind != "block" else GREVLEX
    out_ring = PolyRing([ring.names[i] for i in keep_idx], order, ring.domain)
    if not drop:
        return Ideal(out_ring, [g.change_ring(out_ring) for g in I.gens])
    work, perm = _split_ring(ring, drop)
    positions = [0] * ring.nvars
    for new_pos, old in enumerate(perm):
        positions[old] = new_pos
    J = Ideal(work, [_transport(g, work, positions) for g in I.gens])
    gb = J.groebner(max_pairs=max_pairs)
    k = len(drop)
    back = [None] * work.nvars
    for new_pos in range(k, work.nvars):
        back[new_pos] = keep_idx.index(perm[new_pos])
    out = []
    for g in gb:
        if any(v < k for v in g.variables()):
            continue
        out.append(_transport(g, out_ring, back))
    result = Ideal(out_ring, out)
    return result


def ideal_intersect(I: Ideal, J: Ideal, max_pairs=None) -> Ideal:
    """I ∩ J by eliminating t from t*I + (1-t)*J."""
    if I.ring != J.ring:
        raise RingMismatch("ideals live in different rings")
    ring = I.ring
    if not I.gens or not J.gens:
        return Ideal(ring, [])
    tname = "t"
    while tname in ring.names:
        tname += "_"
    ext = PolyRing((tname,) + ring.names, block_order(1), ring.domain)
    shift = list(range(1, ext.nvars))
    t = ext.var(0)
    gens = [t * _transport(g, ext, shift) for g in I.gens]
    gens += [(1 - t) * _transport(g, ext, shift) for g in J.gens]
    K = Ideal(ext, gens)
    gb = K.groebner(max_pairs=max_pairs)
    back = [None] + list(range(ring.nvars))
    out = [_transport(g, ring, back) for g in gb if 0 not in g.variables()]
    return Ideal(ring, out)


def graded_piece(I: Ideal, e: int):
    """Echelon basis of the degree-``e`` piece of a homogeneous ideal."""
    from secantcat.exactpoly import exponent_grid

    if e < 0:
        raise ValueError("degree must be nonnegative")
    if not I.is_homogeneous():
        raise NotHomogeneous("graded_piece needs homogeneous generators")
    ring = I.ring
    monos = ring.monomials(e)
    col = {m: i for i, m in enumerate(monos)}
    basis = EchelonBasis(ring.domain)
    for g in I.gens:
        dg = g.degree()
        if dg > e:
            continue
        for exps in exponent_grid(ring.nvars, e - dg):
            shift = ring.pack(exps)
            basis.add({col[m + shift]: c for m, c in g.terms.items()})
    return GradedPieceBasis(ring, e, monos, basis)


class GradedPieceBasis:
    """Row-echelon basis of I_e against the ambient degree-e monomials."""

    def __init__(self, ring: PolyRing, degree: int, monomials, basis: EchelonBasis):
        self.ring = ring
        self.degree = degree
        self.monomials = monomials
        self._basis = basis
        self._col = {m: i for i, m in enumerate(monomials)}

    @property
    def dim(self) -> int:
        return self._basis.rank

    @property
    def ambient_dim(self) -> int:
        return len(self.monomials)

    @property
    def echelon(self) -> EchelonBasis:
        return self._basis

    def vectors(self) -> list[dict]:
        return self._basis.rref()

    def polys(self) -> list[Poly]:
        return [self.row_to_poly(r) for r in self.vectors()]

    def row_to_poly(self, row: dict) -> Poly:
        return Poly(self.ring, {self.monomials[c]: v for c, v in row.items()})

    def poly_to_row(self, f: Poly) -> dict:
        if not f.terms:
            return {}
        if f.ring != self.ring:
            raise RingMismatch("polynomial from another ring")
        if f.degrees() != {self.degree}:
            raise NotHomogeneous(f"expected a form of degree {self.degree}")
        return {self._col[m]: c for m, c in f.terms.items()}

    def contains(self, f: Poly) -> bool:
        return self._basis.contains(self.poly_to_row(f))


def hilbert_count(I: Ideal, e: int) -> int:
    """dim I_e from the leading monomials of a (degree-e truncated) Groebner
    basis; independent of the linear-algebra route in graded_piece."""
    if not I.is_homogeneous():
        raise NotHomogeneous("hilbert_count needs a homogeneous ideal")
    ring = I.ring
    if not I.gens:
        return 0
    eng = I.truncated(e)
    leads = [eng.elems[i].lexp for i in eng.G]
    return sum(1 for m in ring.monomials(e) if any(ring.divides(l, m) for l in leads))


# ---------------------------------------------------------------------------
# ideal files


def ideal_header(ring: PolyRing) -> str:
    return f"ring: vars=[{','.join(ring.names)}] order={ring.order.name()} mode={ring.domain.name()}"


def write_ideal(I: Ideal, comments=()) -> str:
    lines = [ideal_header(I.ring)]
    lines += [f"# {c}" for c in comments]
    lines += [format_poly(g) for g in I.gens]
    return "\n".join(lines) + "\n"


def read_ideal(text: str) -> Ideal:
    import re

    from secantcat.errors import ParseError
    from secantcat.exactpoly import Domain, MonomialOrder, parse_poly

    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty ideal file")
    m = re.fullmatch(r"ring:\s*vars=\[([^\]]*)\]\s+order=(\S+)\s+mode=(\S+)", lines[0])
    if not m:
        raise ParseError(f"bad ideal header {lines[0]!r}")
    names = [v.strip() for v in m.group(1).split(",") if v.strip()]
    ring = PolyRing(names, MonomialOrder.from_name(m.group(2)), Domain.from_name(m.group(3)))
    return Ideal(ring, [parse_poly(ring, ln) for ln in lines[1:]])

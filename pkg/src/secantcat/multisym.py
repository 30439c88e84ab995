"""Configurations of d points in affine n-space.

The ring k[x_i_j] (coordinate i of point j) carries the action of S_d that
permutes the points.  This module builds the alternating and twisted
projectors, the ideal J_d generated by alternating polynomials, the ideal of
the big diagonal, and the degreewise checks comparing them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from secantcat.certificate import INCONCLUSIVE, Certificate
from secantcat.errors import BudgetExceeded, ModeUnsupported, RingMismatch
from secantcat.exactpoly import EXP_BITS, EXP_MASK, QQ, Domain, Poly, PolyRing
from secantcat.groebner import (
    Ideal,
    graded_piece,
    hash_polys,
    ideal_contains,
    ideal_intersect,
    ideal_member,
)
from secantcat.linalg import EchelonBasis


# ---------------------------------------------------------------------------
# permutations (0-based tuples: sigma[j] is the image of point j)


def sign(sigma) -> int:
    s = 1
    seen = [False] * len(sigma)
    for i in range(len(sigma)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = sigma[j]
            length += 1
        if length % 2 == 0:
            s = -s
    return s


def compose(sigma, tau):
    """(sigma o tau)(j) = sigma(tau(j))."""
    return tuple(sigma[t] for t in tau)


def from_cycles(d: int, *cycles) -> tuple:
    """Permutation of {1..d} from 1-based cycles, e.g. ``from_cycles(3, (1, 2, 3))``."""
    img = list(range(d))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            img[a - 1] = b - 1
    return tuple(img)


def all_perms(d: int):
    return list(itertools.permutations(range(d)))


# ---------------------------------------------------------------------------


class ConfigRing:
    """k[x_i_j] for n coordinates and d points, with the S_d column action."""

    def __init__(self, n: int, d: int, domain: Domain = QQ):
        if n < 1 or d < 1:
            raise ValueError("need n >= 1 and d >= 1")
        self.n, self.d = n, d
        names = [f"x_{i}_{j}" for i in range(1, n + 1) for j in range(1, d + 1)]
        self.ring = PolyRing(names, domain=domain)
        self._perm_cache: dict[tuple, list[int]] = {}

    def __repr__(self):
        return f"ConfigRing(n={self.n}, d={self.d})"

    def x(self, i: int, j: int) -> Poly:
        """Coordinate ``i`` of point ``j`` (both 1-based)."""
        return self.ring.var(self.var_index(i, j))

    def var_index(self, i: int, j: int) -> int:
        return (i - 1) * self.d + (j - 1)

    def _var_images(self, sigma) -> list[int]:
        sigma = tuple(sigma)
        if sigma not in self._perm_cache:
            if sorted(sigma) != list(range(self.d)):
                raise ValueError(f"{sigma} is not a permutation of {self.d} points")
            self._perm_cache[sigma] = [
                (i - 1) * self.d + sigma[j - 1]
                for i in range(1, self.n + 1) for j in range(1, self.d + 1)
            ]
        return self._perm_cache[sigma]

    def act_monomial(self, sigma, m: int) -> int:
        images = self._var_images(sigma)
        out = 0
        for v in range(self.ring.nvars):
            e = (m >> (EXP_BITS * v)) & EXP_MASK
            if e:
                out |= e << (EXP_BITS * images[v])
        return out


def act(sigma, f: Poly, cfg: ConfigRing) -> Poly:
    """x_i_j -> x_i_sigma(j)."""
    if f.ring != cfg.ring:
        raise RingMismatch("polynomial not in the configuration ring")
    return Poly(cfg.ring, {cfg.act_monomial(sigma, m): c for m, c in f.terms.items()})


@dataclass(frozen=True)
class TwistedProjector:
    config: ConfigRing
    twist: int

    def __call__(self, f: Poly) -> Poly:
        return project(f, self)


def project(f: Poly, P: TwistedProjector) -> Poly:
    """(1/d!) * sum over sigma of eps(sigma)^twist * sigma(f)."""
    cfg = P.config
    if f.ring != cfg.ring:
        raise RingMismatch("polynomial not in the configuration ring")
    dom = cfg.ring.domain
    d = cfg.d
    if dom.p and dom.p <= d:
        raise ModeUnsupported(f"1/{d}! does not exist mod {dom.p}")
    odd = P.twist % 2 == 1
    acc: dict = {}
    for sigma in all_perms(d):
        s = sign(sigma) if odd else 1
        for m, c in f.terms.items():
            mm = cfg.act_monomial(sigma, m)
            acc[mm] = acc.get(mm, 0) + (c if s > 0 else -c)
    scale = dom.inv(dom.convert(math.factorial(d)))
    if dom.p:
        return cfg.ring.from_packed({m: c * scale % dom.p for m, c in acc.items()})
    return cfg.ring.from_packed({m: c * scale for m, c in acc.items()})


def _orbit_representatives(cfg: ConfigRing, degree: int) -> list[int]:
    """One monomial per S_d-orbit of degree-``degree`` monomials (the largest
    in the monomial order), listed in decreasing order."""
    ring = cfg.ring
    perms = all_perms(cfg.d)
    seen = set()
    reps = []
    for m in ring.monomials(degree):
        if m in seen:
            continue
        orbit = {cfg.act_monomial(s, m) for s in perms}
        seen |= orbit
        reps.append(m)
    return reps


def alternating_piece(cfg: ConfigRing, degree: int, twist: int = 1) -> EchelonBasis:
    """Echelon basis of the eps^twist-isotypic part of the degree piece.

    Spanned by the projections of all monomials; projections of monomials in
    one orbit agree up to sign, so one representative per orbit suffices.
    """
    ring = cfg.ring
    monos = ring.monomials(degree)
    col = {m: i for i, m in enumerate(monos)}
    P = TwistedProjector(cfg, twist)
    basis = EchelonBasis(ring.domain)
    for m in _orbit_representatives(cfg, degree):
        g = project(Poly(ring, {m: ring.domain.one}), P)
        if g.terms:
            basis.add({col[k]: c for k, c in g.terms.items()})
    return basis


@dataclass
class AlternatingFamily:
    config: ConfigRing
    max_degree: int
    members: list = field(default_factory=list)
    by_degree: dict = field(default_factory=dict)


def alternating_family(cfg: ConfigRing, D: int) -> AlternatingFamily:
    """Degreewise basis (reduced echelon form) of the alternating polynomials
    of degree at most ``D``."""
    if D < 0:
        raise ValueError("D must be nonnegative")
    fam = AlternatingFamily(cfg, D)
    ring = cfg.ring
    for e in range(D + 1):
        basis = alternating_piece(cfg, e, 1)
        monos = ring.monomials(e)
        polys = [Poly(ring, {monos[c]: v for c, v in row.items()}) for row in basis.rref()]
        fam.by_degree[e] = polys
        fam.members.extend(polys)
    return fam


def minimal_alternating_degree(cfg: ConfigRing, limit: int | None = None) -> int:
    """Smallest degree carrying a nonzero alternating polynomial."""
    limit = limit if limit is not None else cfg.d * (cfg.d - 1) // 2
    for e in range(limit + 1):
        if alternating_piece(cfg, e, 1).rank:
            return e
    raise ValueError("no alternating polynomial found below the Vandermonde degree")


def ideal_Jd(cfg: ConfigRing, D: int, family: AlternatingFamily | None = None) -> Ideal:
    """The ideal generated by all alternating polynomials of degree <= D."""
    fam = family if family is not None else alternating_family(cfg, D)
    return Ideal(cfg.ring, [g for e in range(D + 1) for g in fam.by_degree.get(e, [])])


class _JdTower:
    """J_d^(D) for growing D, keeping only generators not already in the
    ideal of lower degree ones; the Buchberger state is carried upward."""

    def __init__(self, cfg: ConfigRing):
        self.cfg = cfg
        self.D = -1
        self.ideal = Ideal(cfg.ring, [])
        self.new_by_degree: dict[int, int] = {}

    def raise_to(self, D: int) -> Ideal:
        while self.D < D:
            e = self.D + 1
            alts = alternating_family_piece(self.cfg, e)
            fresh = []
            if self.ideal.gens:
                self.ideal.truncated(e)
            for g in alts:
                if self.ideal.gens and ideal_member(g, self.ideal):
                    continue
                if fresh and _in_span(g, fresh):
                    continue
                fresh.append(g)
            self.new_by_degree[e] = len(fresh)
            if fresh:
                self.ideal = self.ideal.extended(fresh)
            self.D = e
        return self.ideal


def _in_span(g: Poly, polys) -> bool:
    basis = EchelonBasis(g.ring.domain)
    cols: dict = {}

    def row(f):
        return {cols.setdefault(m, len(cols)): c for m, c in f.terms.items()}

    for f in polys:
        basis.add(row(f))
    return basis.contains(row(g))


def alternating_family_piece(cfg: ConfigRing, e: int) -> list[Poly]:
    ring = cfg.ring
    basis = alternating_piece(cfg, e, 1)
    monos = ring.monomials(e)
    return [Poly(ring, {monos[c]: v for c, v in row.items()}) for row in basis.rref()]


def pair_diagonal_ideal(cfg: ConfigRing, a: int, b: int) -> Ideal:
    """Ideal of the locus where points ``a`` and ``b`` (1-based) coincide."""
    return Ideal(cfg.ring, [cfg.x(i, a) - cfg.x(i, b) for i in range(1, cfg.n + 1)])


def diagonal_ideal(cfg: ConfigRing, max_pairs=None) -> Ideal:
    """I(big diagonal) as the intersection of the pairwise diagonal ideals."""
    result = None
    for a, b in itertools.combinations(range(1, cfg.d + 1), 2):
        comp = pair_diagonal_ideal(cfg, a, b)
        result = comp if result is None else ideal_intersect(result, comp, max_pairs=max_pairs)
    if result is None:
        return Ideal(cfg.ring, [])
    # the intersection returns a reduced Groebner basis; keep it as generators
    return Ideal(cfg.ring, result.gens)


def diagonal_substitutions(cfg: ConfigRing):
    """Ring maps x_i_b -> x_i_a for every pair a < b."""
    ring = cfg.ring
    for a, b in itertools.combinations(range(1, cfg.d + 1), 2):
        images = ring.gens()
        for i in range(1, cfg.n + 1):
            images[cfg.var_index(i, b)] = cfg.x(i, a)
        yield (a, b), images


def default_dmax(cfg: ConfigRing) -> int:
    return cfg.n * cfg.d + 3


def _cert_params(cfg, **extra):
    out = {"n": cfg.n, "d": cfg.d, "mode": cfg.ring.domain.name()}
    out.update(extra)
    return out


def verify_Jd_equals_diagonal(cfg: ConfigRing, Dmax: int | None = None, max_pairs=None) -> Certificate:
    """Escalate D until J_d^(D) equals I(big diagonal), or give up at Dmax.

    Success at any D certifies J_d = I(big diagonal), because
    J_d^(D) ⊆ J_d ⊆ I(big diagonal).
    """
    Dmax = default_dmax(cfg) if Dmax is None else Dmax
    cert = Certificate("check-diagonal", _cert_params(cfg, dmax=Dmax))
    try:
        diag = diagonal_ideal(cfg, max_pairs=max_pairs)
    except BudgetExceeded as exc:
        cert.set("equal", INCONCLUSIVE, reason=f"diagonal ideal: {exc}")
        cert.set("contained", INCONCLUSIVE, reason=f"diagonal ideal: {exc}")
        return cert
    diag_hash = hash_polys(cfg.ring, diag.gens, "gb")
    cert.details["diagonal_generators"] = len(diag.gens)
    cert.details["diagonal_degrees"] = sorted({g.degree() for g in diag.gens})
    start = minimal_alternating_degree(cfg)
    cert.details["min_alternating_degree"] = start
    tower = _JdTower(cfg)
    contained_all = True
    witness = None
    checked = 0
    try:
        for D in range(start, Dmax + 1):
            J = tower.raise_to(D)
            # J^(D) ⊆ I(Delta), generator by generator
            if not all(ideal_member(g, diag, max_pairs=max_pairs) for g in J.gens[checked:]):
                contained_all = False
                break
            checked = len(J.gens)
            if ideal_contains(J, diag, max_pairs=max_pairs):
                witness = D
                break
    except BudgetExceeded as exc:
        cert.set("contained", INCONCLUSIVE if contained_all else False, reason=str(exc))
        cert.set("equal", INCONCLUSIVE, reason=f"budget exhausted at D={tower.D}: {exc}")
        return cert
    J = tower.ideal
    j_hash = hash_polys(cfg.ring, J.gens, "gens")
    cert.details["J_generators_by_degree"] = {str(k): v for k, v in sorted(tower.new_by_degree.items())}
    cert.work["J_truncated_gb"] = J.stats()
    cert.set("contained", contained_all, witness=f"{j_hash}<={diag_hash}")
    if witness is not None:
        cert.details["witness_D"] = witness
        cert.set("equal", True, witness=f"{j_hash}=={diag_hash}")
    elif contained_all:
        cert.set("equal", INCONCLUSIVE,
                 reason=f"J_d^(D) != I(Delta_d) for all D <= {Dmax}; only truncations were computed")
    else:
        cert.set("equal", False, witness=j_hash)
    cert.details["status"] = "SUCCESS" if witness is not None else f"INCONCLUSIVE({Dmax})"
    return cert


def triple_product(cfg: ConfigRing, a: int, b: int, c: int) -> Poly:
    """(x_a_1 - x_a_2)(x_b_1 - x_b_3)(x_c_2 - x_c_3)."""
    if cfg.d != 3:
        raise ValueError("triple products need d = 3")
    x = cfg.x
    return (x(a, 1) - x(a, 2)) * (x(b, 1) - x(b, 3)) * (x(c, 2) - x(c, 3))


def verify_product_triple(cfg: ConfigRing, Dmax: int | None = None, max_pairs=None) -> Certificate:
    """Membership of every product of pairwise-diagonal generators in a
    truncation of J_3; records the smallest witnessing D per triple."""
    if cfg.d != 3:
        raise ValueError("verify_product_triple needs d = 3")
    Dmax = default_dmax(cfg) if Dmax is None else Dmax
    cert = Certificate("product-triple", _cert_params(cfg, dmax=Dmax))
    tower = _JdTower(cfg)
    start = minimal_alternating_degree(cfg)
    witnesses = {}
    remaining = list(itertools.product(range(1, cfg.n + 1), repeat=3))
    try:
        for D in range(start, Dmax + 1):
            J = tower.raise_to(D)
            still = []
            for t in remaining:
                if ideal_member(triple_product(cfg, *t), J, max_pairs=max_pairs):
                    witnesses[t] = D
                else:
                    still.append(t)
            remaining = still
            if not remaining:
                break
    except BudgetExceeded as exc:
        cert.set("all_members", INCONCLUSIVE, reason=str(exc))
        return cert
    cert.details["witness_D"] = {"".join(map(str, t)): D for t, D in sorted(witnesses.items())}
    cert.details["triples"] = len(witnesses) + len(remaining)
    j_hash = hash_polys(cfg.ring, tower.ideal.gens, "gens")
    if remaining:
        cert.set("all_members", INCONCLUSIVE,
                 reason=f"{len(remaining)} triples not in J_3^(D) for D <= {Dmax}")
    else:
        cert.set("all_members", True, witness=j_hash)
    return cert


# ---------------------------------------------------------------------------
# image of the multiplication map, degree by degree


def _rows(polys, col):
    return [{col[m]: c for m, c in f.terms.items()} for f in polys]


def _products(factors_by_degree, count: int, degree: int, one: Poly):
    """All products of ``count`` factors (multisets) of total degree ``degree``."""
    items = [(e, f) for e in sorted(factors_by_degree) for f in factors_by_degree[e]]
    out = []
    for combo in itertools.combinations_with_replacement(range(len(items)), count):
        if sum(items[i][0] for i in combo) != degree:
            continue
        prod = one
        for i in combo:
            prod = prod * items[i][1]
        if prod.terms:
            out.append(prod)
    return out


def _power_piece(gens_by_degree, power: int, e: int, ring: PolyRing) -> list[Poly]:
    """Spanning set of (J^power)_e from generators of J of degree <= e."""
    if power == 0:
        return [Poly(ring, {m: ring.domain.one}) for m in ring.monomials(e)]
    prods = []
    for total in range(e + 1):
        prods.extend(_products(gens_by_degree, power, total, ring.one))
    if not prods:
        return []
    return graded_piece(Ideal(ring, prods), e).polys()


def verify_mappoly(cfg: ConfigRing, ell: int, eMax: int, D: int | None = None) -> Certificate:
    """Compare, for every degree e <= eMax, the image of the ell-fold
    multiplication of alternating polynomials with the eps^ell-projections of
    (J^ell)_e and (J^(ell-1))_e."""
    if ell < 1:
        raise ValueError("ell must be at least 1")
    D = eMax if D is None else D
    ring = cfg.ring
    if ring.domain.p and ring.domain.p <= cfg.d:
        raise ModeUnsupported("projector undefined in this characteristic")
    cert = Certificate("mappoly", _cert_params(cfg, ell=ell, emax=eMax, D=D))
    alt_by_degree = {e: alternating_family_piece(cfg, e) for e in range(eMax + 1)}
    gens_by_degree = {e: polys for e, polys in alt_by_degree.items() if polys and e <= D}
    P = TwistedProjector(cfg, ell)
    rows_out = []
    ok_12 = ok_13 = True
    hashes = []
    for e in range(eMax + 1):
        monos = ring.monomials(e)
        col = {m: i for i, m in enumerate(monos)}
        image = EchelonBasis(ring.domain)
        nonzero = {k: v for k, v in alt_by_degree.items() if v}
        for f in _products(nonzero, ell, e, ring.one):
            image.add(_rows([f], col)[0])
        spaces = []
        for power in (ell, ell - 1):
            # generators of degree <= min(D, e) suffice for the degree-e piece
            sub = {k: v for k, v in gens_by_degree.items() if k <= e}
            piece = _power_piece(sub, power, e, ring)
            proj = EchelonBasis(ring.domain)
            for f in piece:
                g = project(f, P)
                if g.terms:
                    proj.add(_rows([g], col)[0])
            spaces.append(proj)
        eq12 = image.same_span(spaces[0])
        eq13 = image.same_span(spaces[1])
        ok_12 &= eq12
        ok_13 &= eq13
        rows_out.append({"e": e, "dims": [image.rank, spaces[0].rank, spaces[1].rank],
                         "image_eq_Jl": eq12, "image_eq_Jl1": eq13})
        hashes.append(hash_polys(ring, [Poly(ring, {monos[c]: v for c, v in r.items()})
                                        for r in image.rref()], f"image{e}"))
    cert.details["degrees"] = rows_out
    cert.details["note"] = f"checked in degrees 0..{eMax} only"
    witness = ":".join(h[:8] for h in hashes)
    cert.set("image_eq_Jl", ok_12, witness=witness)
    cert.set("image_eq_Jl1", ok_13, witness=witness)
    return cert


__all__ = [
    "ConfigRing", "TwistedProjector", "AlternatingFamily", "act", "project",
    "sign", "compose", "from_cycles", "all_perms", "alternating_piece",
    "alternating_family", "minimal_alternating_degree", "ideal_Jd",
    "diagonal_ideal", "pair_diagonal_ideal", "diagonal_substitutions",
    "verify_Jd_equals_diagonal", "verify_product_triple", "triple_product",
    "verify_mappoly", "default_dmax",
]


"""Quadrics of rank three in ideals of embedded varieties.

Quadrics are stored as symmetric Gram matrices over QQ.  Rank-three families
come from three sources: the quadrics x0*x2 - x1^2 attached to a pencil of
sections (sigma0^2, sigma0*sigma1, sigma1^2), pullbacks along linear
sections of a Veronese embedding, and products alpha^2 * q pushed through a
multiplication table.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from gmpy2 import mpq

from secantcat.certificate import Certificate
from secantcat.errors import (
    CaseMismatch,
    DependentSections,
    NotHomogeneous,
    NotSumOfSquares,
    RankDeficientInclusion,
    RingMismatch,
)
from secantcat.exactpoly import Poly, PolyRing
from secantcat.groebner import Ideal, graded_piece, hash_polys, ideal_equal, ideal_member
from secantcat.linalg import EchelonBasis, matmul, rank, transpose
from secantcat.sections import (
    CatalecticantMatrix,
    SectionModel,
    build_catalecticant,
    model_p1,
    model_veronese,
    variety_ideal,
)


@dataclass(frozen=True)
class QuadForm:
    """The quadric z^T * matrix * z."""

    ring: PolyRing
    matrix: tuple

    def __post_init__(self):
        n = self.ring.nvars
        m = self.matrix
        if len(m) != n or any(len(r) != n for r in m):
            raise ValueError(f"Gram matrix must be {n}x{n}")
        if any(m[i][j] != m[j][i] for i in range(n) for j in range(i)):
            raise ValueError("Gram matrix must be symmetric")

    @classmethod
    def from_poly(cls, f: Poly) -> "QuadForm":
        ring = f.ring
        if ring.domain.p:
            raise ValueError("quadric ranks are computed over QQ")
        if f.terms and f.degrees() != {2}:
            raise NotHomogeneous("not a quadratic form")
        n = ring.nvars
        m = [[mpq(0)] * n for _ in range(n)]
        for exps, c in f.items():
            idx = [i for i, e in enumerate(exps) for _ in range(e)]
            i, j = idx
            if i == j:
                m[i][i] = mpq(c)
            else:
                m[i][j] = m[j][i] = mpq(c) / 2
        return cls(ring, tuple(tuple(r) for r in m))

    def to_poly(self) -> Poly:
        ring = self.ring
        n = ring.nvars
        terms = {}
        for i in range(n):
            for j in range(i, n):
                c = self.matrix[i][j] if i == j else 2 * self.matrix[i][j]
                if c:
                    e = [0] * n
                    e[i] += 1
                    e[j] += 1
                    terms[ring.pack(e)] = mpq(c)
        return Poly(ring, terms)

    def rank(self) -> int:
        return quad_rank(self)

    def congruent(self, A) -> "QuadForm":
        """A^T M A (A square, same ring)."""
        return QuadForm(self.ring, _tuple(matmul(transpose(A), matmul(self.matrix, A))))


def _tuple(m):
    return tuple(tuple(mpq(x) for x in r) for r in m)


def quad_rank(q: QuadForm) -> int:
    """Rank of the Gram matrix by fraction-free elimination."""
    return rank(q.matrix)


# ---------------------------------------------------------------------------
# sections and pencils


def section_product(model: SectionModel, alpha, beta, ring: PolyRing | None = None) -> Poly:
    """Linear form in z representing alpha * beta, with alpha, beta given by
    coefficient vectors on the A- and B-bases."""
    ring = ring if ring is not None else model.z_ring()
    acc: dict[int, mpq] = {}
    for i, a in enumerate(alpha):
        if not a:
            continue
        for j, b in enumerate(beta):
            if not b:
                continue
            for g, c in model.mult.get((i, j), {}).items():
                acc[g] = acc.get(g, mpq(0)) + mpq(a) * mpq(b) * c
    return ring.from_terms({tuple(1 if k == g else 0 for k in range(ring.nvars)): c
                            for g, c in acc.items() if c})


def grassmann_quadric(model: SectionModel, sigma0, sigma1, ring: PolyRing | None = None) -> QuadForm:
    """x0*x2 - x1^2 for x0 = sigma0^2, x1 = sigma0*sigma1, x2 = sigma1^2."""
    if not model.self_paired:
        raise ValueError("grassmann_quadric needs a model with A = B")
    sigma0 = [mpq(v) for v in sigma0]
    sigma1 = [mpq(v) for v in sigma1]
    if len(sigma0) != model.dimA or len(sigma1) != model.dimA:
        raise ValueError(f"sections need {model.dimA} coordinates")
    if rank([sigma0, sigma1]) < 2:
        raise DependentSections("sigma0 and sigma1 are proportional")
    ring = ring if ring is not None else model.z_ring()
    x0 = section_product(model, sigma0, sigma0, ring)
    x1 = section_product(model, sigma0, sigma1, ring)
    x2 = section_product(model, sigma1, sigma1, ring)
    return QuadForm.from_poly(x0 * x2 - x1 * x1)


# ---------------------------------------------------------------------------
# the identities for 2x2 minors of a symmetric catalecticant


def symmetric_minor_identity(C: CatalecticantMatrix, case: int, indices) -> list[tuple[QuadForm, mpq]]:
    """Rank <= 3 summands (with coefficients) adding up to a 2x2 minor.

    case 1, indices (i, k):    m_ii m_kk - m_ik^2 is itself the summand.
    case 2, indices (i, k, l): m_ii m_kl - m_il m_ki
        = 1/2 [(m_ii m_kk - m_ik^2) + (m_ii m_ll - m_il^2)
               + ((m_ik - m_il)^2 + m_ii (2 m_kl - m_kk - m_ll))].
    The identity is checked by expansion before returning.
    """
    if not C.is_symmetric():
        raise CaseMismatch("the identities need a symmetric catalecticant")
    m = C.entries
    size = len(m)
    if case == 1:
        i, k = indices
        if i == k or not (0 <= i < size and 0 <= k < size):
            raise CaseMismatch(f"case 1 needs two distinct indices, got {indices}")
        target = m[i][i] * m[k][k] - m[i][k] * m[k][i]
        summands = [(m[i][i] * m[k][k] - m[i][k] ** 2, mpq(1))]
    elif case == 2:
        i, k, l = indices
        if len({i, k, l}) != 3 or not all(0 <= v < size for v in indices):
            raise CaseMismatch(f"case 2 needs i, k, l pairwise distinct, got {indices}")
        target = m[i][i] * m[k][l] - m[i][l] * m[k][i]
        half = mpq(1, 2)
        summands = [
            (m[i][i] * m[k][k] - m[i][k] ** 2, half),
            (m[i][i] * m[l][l] - m[i][l] ** 2, half),
            ((m[i][k] - m[i][l]) ** 2 + m[i][i] * (2 * m[k][l] - m[k][k] - m[l][l]), half),
        ]
    else:
        raise CaseMismatch(f"only cases 1 and 2 have closed forms here, got {case}")
    total = C.ring.zero
    for f, c in summands:
        total = total + f.scale(c)
    if total != target:
        raise AssertionError("identity failed to expand to the target minor")
    return [(QuadForm.from_poly(f), c) for f, c in summands]


def identity_target(C: CatalecticantMatrix, case: int, indices) -> Poly:
    m = C.entries
    if case == 1:
        i, k = indices
        return m[i][i] * m[k][k] - m[i][k] * m[k][i]
    i, k, l = indices
    return m[i][i] * m[k][l] - m[i][l] * m[k][i]


# ---------------------------------------------------------------------------
# restriction and push-forward


def restrict_quadric(q: QuadForm, inclusion, target: PolyRing) -> QuadForm:
    """Pull back along the linear map big = inclusion * small: A^T M A."""
    A = [[mpq(v) for v in row] for row in inclusion]
    if len(A) != q.ring.nvars or any(len(r) != target.nvars for r in A):
        raise ValueError("inclusion matrix has the wrong shape")
    if rank(A) < target.nvars:
        raise RankDeficientInclusion("inclusion must have full column rank")
    return QuadForm(target, _tuple(matmul(transpose(A), matmul(q.matrix, A))))


def linear_section_inclusion(model: SectionModel) -> list[list[mpq]]:
    """Matrix of S^2 H^0(H) -> H^0(H^2) for a self-paired model: the row of
    the Veronese coordinate sigma_a*sigma_b is the expansion of that product
    in the L-basis."""
    if not model.self_paired:
        raise ValueError("linear sections need a model with A = B")
    h = model.dimA
    big = model_veronese(h - 1, 1, 1)
    # Veronese variable x_v is the A-basis section with exponent vector e_v
    section_of = {exps.index(1): a for a, exps in enumerate(big.expsA)}
    rows = []
    for exps in big.expsL:
        a, b = (section_of[v] for v, e in enumerate(exps) for _ in range(e))
        row = [mpq(0)] * model.dimL
        for g, c in model.mult[(a, b)].items():
            row[g] += c
        rows.append(row)
    return rows


def diagonalize(q: QuadForm):
    """Exact congruence diagonalization: returns [(c_t, beta_t)] with
    q = sum c_t * beta_t(z)^2 and beta_t coefficient vectors."""
    n = q.ring.nvars
    M = [list(r) for r in q.matrix]
    out = []
    # M is the Gram matrix of the remaining form in the original coordinates
    while True:
        piv = next((i for i in range(n) if M[i][i]), None)
        if piv is None:
            off = next(((i, j) for i in range(n) for j in range(i + 1, n) if M[i][j]), None)
            if off is None:
                break
            i, j = off
            # q(z) restricted: use the vector e_i + e_j which has value 2*M[i][j] != 0
            v = [mpq(0)] * n
            v[i] = v[j] = mpq(1)
        else:
            v = [mpq(0)] * n
            v[piv] = mpq(1)
        Mv = [sum(M[r][s] * v[s] for s in range(n)) for r in range(n)]
        c = sum(v[r] * Mv[r] for r in range(n))
        # q = (Mv . z)^2 / c + remainder
        beta = Mv
        out.append((1 / c, beta))
        M = [[M[r][s] - Mv[r] * Mv[s] / c for s in range(n)] for r in range(n)]
    return out


@dataclass
class Rank3Family:
    members: list = field(default_factory=list)
    provenance: list = field(default_factory=list)

    def add(self, q: QuadForm, origin: tuple):
        self.members.append(q)
        self.provenance.append(origin)

    def polys(self) -> list[Poly]:
        return [q.to_poly() for q in self.members]

    def __len__(self):
        return len(self.members)


def pushforward_family(model: SectionModel, base: Rank3Family, alphas=None) -> Rank3Family:
    """Images of alpha^2 (x) q under S^2 H^0(A) (x) S^2 H^0(B) -> S^2 H^0(L).

    Each base quadric is written q = sum c_t beta_t^2 (rational c_t of either
    sign); the image is sum c_t (alpha*beta_t)^2, of rank at most that of q.
    By default alpha runs over the basis and the pairwise sums, whose squares
    span S^2 H^0(A).
    """
    a = model.dimA
    if alphas is None:
        alphas = [[mpq(1) if t == i else mpq(0) for t in range(a)] for i in range(a)]
        alphas += [[mpq(1) if t in (i, j) else mpq(0) for t in range(a)]
                   for i, j in itertools.combinations(range(a), 2)]
    ring = model.z_ring()
    out = Rank3Family()
    for qi, q in enumerate(base.members):
        if q.ring.nvars != model.dimB:
            raise RingMismatch("base quadrics must live on P(H^0(B))")
        terms = diagonalize(q)
        if len(terms) > 3:
            raise NotSumOfSquares(f"base quadric {qi} has rank {len(terms)} > 3")
        for ai, alpha in enumerate(alphas):
            if not any(alpha):
                continue
            f = ring.zero
            for c, beta in terms:
                lin = section_product(model, alpha, beta, ring)
                f = f + (lin * lin).scale(c)
            if f.terms:
                out.add(QuadForm.from_poly(f), ("Pushforward", qi, ai))
    return out


# ---------------------------------------------------------------------------
# families


def veronese_family(model: SectionModel, seed: int = 0, extra: int | None = None,
                    target_dim: int | None = None) -> Rank3Family:
    """q_W over all coordinate planes plus seeded random planes W."""
    fam = Rank3Family()
    h = model.dimA
    ring = model.z_ring()
    for i, j in itertools.combinations(range(h), 2):
        s0 = [1 if t == i else 0 for t in range(h)]
        s1 = [1 if t == j else 0 for t in range(h)]
        fam.add(grassmann_quadric(model, s0, s1, ring), ("GrassmannPair", tuple(s0), tuple(s1)))
    rng = random.Random(seed)
    count = extra if extra is not None else 3 * (target_dim if target_dim is not None else len(fam))
    made = 0
    while made < count:
        s0 = [rng.randint(-3, 3) for _ in range(h)]
        s1 = [rng.randint(-3, 3) for _ in range(h)]
        if rank([s0, s1]) < 2:
            continue
        fam.add(grassmann_quadric(model, s0, s1, ring), ("GrassmannPair", tuple(s0), tuple(s1)))
        made += 1
    return fam


def veronese_quadric_dim(n: int) -> int:
    """dim S^2(S^2 V) - dim S^4 V for dim V = n + 1."""
    from math import comb

    m = comb(n + 2, 2)
    return comb(m + 1, 2) - comb(n + 4, 4)


def restricted_family(model: SectionModel, seed: int = 0) -> Rank3Family:
    """q_W on v_2(P(H^0(H))) pulled back to X in P(H^0(H^2))."""
    h = model.dimA
    big = model_veronese(h - 1, 1, 1)
    base = veronese_family(big, seed, target_dim=veronese_quadric_dim(h - 1))
    A = linear_section_inclusion(model)
    ring = model.z_ring()
    fam = Rank3Family()
    for idx, q in enumerate(base.members):
        r = restrict_quadric(q, A, ring)
        if any(any(row) for row in r.matrix):
            fam.add(r, ("Restriction", idx) + base.provenance[idx][1:])
    return fam


def p1_family(degA: int, degB: int, seed: int = 0) -> tuple[Rank3Family, list[str]]:
    """Rank-3 quadrics in I(P^1, O(degA + degB)) and the construction used."""
    steps = []
    if degA == degB:
        if degA == 0:
            return Rank3Family(), ["empty"]
        steps.append(f"restriction from v_2(P^{degA}) via P1({degA},{degA})")
        return restricted_family(model_p1(degA, degA), seed), steps
    small, large = sorted((degA, degB))
    if large < 2:
        return Rank3Family(), ["empty"]
    base, inner = p1_family(large // 2, large - large // 2, seed)
    steps.extend(inner)
    steps.append(f"pushforward along P1({small},{large})")
    return pushforward_family(model_p1(small, large), base), steps


def rank3_span_certificate(I: Ideal, family: Rank3Family, label: str = "rank3") -> Certificate:
    """spans2: the family spans I_2.  generates: the family generates I."""
    cert = Certificate(label, {"ring": list(I.ring.names)})
    piece = graded_piece(I, 2)
    ranks = [quad_rank(q) for q in family.members]
    members = family.polys()
    in_ideal = all(ideal_member(f, I) for f in members)
    span = EchelonBasis(I.ring.domain)
    for f in members:
        span.add(piece.poly_to_row(f))
    spans2 = span.same_span(piece.echelon)
    cert.details.update({
        "family_size": len(family),
        "max_rank": max(ranks, default=0),
        "dim_I2": piece.dim,
        "dim_span": span.rank,
        "members_in_ideal": in_ideal,
    })
    fam_hash = hash_polys(I.ring, members, "family")
    i_hash = hash_polys(I.ring, I.gens, "gens")
    cert.set("rank_le_3", all(r <= 3 for r in ranks), witness=fam_hash)
    cert.set("members_in_ideal", in_ideal, witness=f"{fam_hash}<={i_hash}")
    cert.set("spans2", spans2, witness=f"{fam_hash}:{piece.dim}")
    if spans2:
        # a spanning set of I_2 generates I exactly when I is generated in degree 2
        span_ideal = Ideal(I.ring, [piece.row_to_poly(r) for r in span.rref()])
        generates = ideal_equal(span_ideal, I)
    else:
        generates = ideal_equal(Ideal(I.ring, members), I) if members else not I.gens
    cert.set("generates", generates, witness=f"{fam_hash}=={i_hash}")
    return cert


def veronese_certificate(n: int, seed: int = 0, with_family: bool = False):
    """Rank-3 certificate for the ideal of v_2(P^n)."""
    model = model_veronese(n, 1, 1)
    I = variety_ideal(model).ideal
    expected = veronese_quadric_dim(n)
    fam = veronese_family(model, seed, target_dim=expected)
    cert = rank3_span_certificate(I, fam, "rank3-veronese")
    batch = 0
    while not cert.ok("spans2") and batch < 3:
        batch += 1
        fam = veronese_family(model, seed + batch, extra=3 * expected * (batch + 1))
        cert = rank3_span_certificate(I, fam, "rank3-veronese")
    cert.params = {"n": n, "seed": seed}
    cert.details["expected_dim"] = expected
    cert.details["exactly_rank3"] = all(quad_rank(q) == 3 for q in fam.members)
    return (cert, fam) if with_family else cert


def p1_certificate(degA: int, degB: int, seed: int = 0, with_family: bool = False):
    """Rank-3 certificate for I(P^1, O(degA + degB))."""
    model = model_p1(1, degA + degB - 1) if degA + degB >= 2 else model_p1(degA, degB)
    I = variety_ideal(model).ideal
    fam, steps = p1_family(degA, degB, seed)
    cert = rank3_span_certificate(I, fam, "rank3-ideal")
    cert.params = {"model": "p1", "dega": degA, "degb": degB, "seed": seed}
    cert.details["construction"] = steps
    return (cert, fam) if with_family else cert


def minor_identity_certificate(model: SectionModel) -> Certificate:
    """Check the case (1) and (2) identities for every admissible index
    choice of a symmetric catalecticant, with summand ranks."""
    C = build_catalecticant(model)
    size = C.shape[0]
    cert = Certificate("rank3-minor-identities", model.describe())
    count = {1: 0, 2: 0}
    max_rank = 0
    for i, k in itertools.combinations(range(size), 2):
        for q, _ in symmetric_minor_identity(C, 1, (i, k)):
            max_rank = max(max_rank, quad_rank(q))
        count[1] += 1
    for i in range(size):
        for k, l in itertools.combinations([t for t in range(size) if t != i], 2):
            for q, _ in symmetric_minor_identity(C, 2, (i, k, l)):
                max_rank = max(max_rank, quad_rank(q))
            count[2] += 1
    cert.details.update({"case1": count[1], "case2": count[2], "max_rank": max_rank})
    h = hash_polys(C.ring, [f for row in C.entries for f in row], "catalecticant")
    cert.set("identities_exact", True, witness=h)
    cert.set("rank_le_3", max_rank <= 3, witness=h)
    return cert


# names used by the operation list
remark_identity = symmetric_minor_identity
lemma_pushforward_family = pushforward_family

__all__ = [
    "QuadForm", "Rank3Family", "quad_rank", "grassmann_quadric", "section_product",
    "symmetric_minor_identity", "remark_identity", "identity_target", "restrict_quadric", "linear_section_inclusion",
    "diagonalize", "pushforward_family", "lemma_pushforward_family", "veronese_family", "veronese_quadric_dim",
    "restricted_family", "p1_family", "rank3_span_certificate", "veronese_certificate",
    "p1_certificate", "minor_identity_certificate",
]

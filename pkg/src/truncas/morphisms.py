"""Analysis of algebra morphisms k[x]/I -> k[y]/J.

The exact kernel comes from eliminating y out of the graph ideal.  The
truncated kernel candidate space is the set of low-degree x-polynomials f
for which the linear certificate system

    f(x) - sum_k q_k(y) h_k(x,y) - sum_i (x_i - phi_i(y)) k_i(x,y) = 0
                                                    modulo (x,y)^cprime

is solvable in the multipliers h, k.  Solvability is a span condition:
bounded multipliers lose nothing below the working order, so the feasible f
are exactly the members of the span of truncated generator multiples that
are supported on low-degree x-monomials.  Row reduction with those monomial
columns ranked last reads the space off directly, and the same reduction
delivers canonical preimage representatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    NonPolynomialImages,
    PrecisionTooLow,
    TruncasError,
)
from .groebner import (
    PolyIdeal,
    buchberger,
    ideal_low_degree_space,
    subspace_column_ranks,
    truncated_multiple_rows,
    truncation_span_rows,
)
from .linalg import RowReducer, spans_equal
from .orders import GREVLEX, BlockOrder
from .series import (
    Polynomial,
    Ring,
    TruncatedSeries,
    exp_add,
    iter_exponents,
    substitute,
    total_degree,
)


@dataclass
class AlgebraMorphism:
    """Variable images phi_i over the target, with optional ideals I and J."""

    source: Ring
    target: Ring
    images: list
    I: PolyIdeal = None
    J: PolyIdeal = None

    def __post_init__(self):
        if len(self.images) != self.source.nvars:
            raise TruncasError("one image per source variable is required")
        for g in self.images:
            if g.ring != self.target:
                raise TruncasError("images must live in the target ring")
        if self.source.field != self.target.field:
            raise TruncasError("source and target share one field")
        if self.I is not None and self.I.ring != self.source:
            raise TruncasError("I must be an ideal of the source ring")
        if self.J is not None and self.J.ring != self.target:
            raise TruncasError("J must be an ideal of the target ring")

    @property
    def field(self):
        return self.source.field

    def polynomial_images(self) -> bool:
        return all(isinstance(g, Polynomial) for g in self.images)

    def images_known_to(self, order: int) -> bool:
        return all(
            isinstance(g, Polynomial) or g.known_order >= order for g in self.images
        )

    def well_defined(self, order: int = None) -> bool:
        """Check g(phi) in J for every generator g of I."""
        if self.I is None or self.I.is_zero():
            return True
        j_gens = [] if self.J is None else self.J.gens
        if self.polynomial_images():
            gb = buchberger(j_gens, GREVLEX)
            return all(gb.contains(g.compose_poly(self.images)) for g in self.I.gens)
        if order is None:
            order = min(
                g.known_order for g in self.images if isinstance(g, TruncatedSeries)
            )
        series_images = [
            g.as_series(order) if isinstance(g, Polynomial) else g.truncate(order)
            for g in self.images
        ]
        red, rank_of = _membership_reducer(j_gens, self.target, order)
        for g in self.I.gens:
            value = substitute(g, series_images)
            row = {rank_of[e]: c for e, c in value.terms.items()}
            if not red.member(row):
                return False
        return True


def _membership_reducer(gens, ring: Ring, order: int):
    rank_of = {e: idx for idx, e in enumerate(iter_exponents(ring.nvars, order))}
    rows = truncated_multiple_rows(gens, ring, order, rank_of)
    red = RowReducer(ring.field)
    for row in rows:
        red.add(row)
    return red, rank_of


# ---------------------------------------------------------------------------
# combined-ring plumbing


def _combined_ring(phi: AlgebraMorphism) -> Ring:
    names = phi.source.names + phi.target.names
    return Ring(phi.field, names, nx=phi.source.nvars)


def _graph_generators(phi: AlgebraMorphism, big: Ring, order: int = None):
    """J generators and (x_i - phi_i) over the combined ring.

    Series images make the graph generators series known to ``order``.
    """
    n = phi.source.nvars
    y_map = list(range(n, big.nvars))
    gens = []
    if phi.J is not None:
        for q in phi.J.gens:
            gens.append(q.map_ring(big, y_map))
    for i, img in enumerate(phi.images):
        xi = big.variable(i)
        if isinstance(img, Polynomial):
            gens.append(xi - img.map_ring(big, y_map))
        else:
            if order is None:
                raise TruncasError("series images need a working order")
            if img.known_order < order:
                raise PrecisionTooLow(
                    f"image known to order {img.known_order} < required {order}"
                )
            lifted = TruncatedSeries(
                big,
                {_pad_exp(e, n): c for e, c in img.terms.items()},
                order,
            )
            gens.append(xi.as_series(order) - lifted)
    return gens


def _pad_exp(e, n):
    return (0,) * n + tuple(e)


# ---------------------------------------------------------------------------
# exact kernel


def kernel_exact(phi: AlgebraMorphism) -> PolyIdeal:
    """Generators of ker phi via elimination of the target variables."""
    if not phi.polynomial_images():
        raise NonPolynomialImages("exact kernels need polynomial images")
    big = _combined_ring(phi)
    n = phi.source.nvars
    gens = _graph_generators(phi, big)
    order = BlockOrder(range(n, big.nvars), big.nvars)
    gb = buchberger(gens, order)
    kept = [g.restrict_to(n) for g in gb if g.support_within(n)]
    if phi.I is not None and not phi.I.is_zero():
        gb_i = buchberger(phi.I.gens, GREVLEX)
        kept = [gb_i.normal_form(g) for g in kept]
    return PolyIdeal(phi.source, [g for g in kept if not g.is_zero()])


# ---------------------------------------------------------------------------
# truncated kernel candidates


@dataclass
class KernelReport:
    c: int
    cprimes: list
    candidate_basis: list  # canonical representatives modulo truncations of I
    stabilized: bool
    exact_kernel: PolyIdeal = None
    dimensions: list = field(default_factory=list)


def _candidate_space(phi: AlgebraMorphism, c: int, cprime: int):
    """Canonical basis of the feasible-f space modulo truncations of I."""
    big = _combined_ring(phi)
    n = phi.source.nvars

    def keep(e):
        return total_degree(e) < c and all(x == 0 for x in e[n:])

    rank_of, n_others, kept = subspace_column_ranks(big, cprime, keep)
    gens = _graph_generators(phi, big, order=cprime)
    rows = truncated_multiple_rows(gens, big, cprime, rank_of)
    red = RowReducer(phi.field)
    # truncations of I first, so candidate representatives are reduced mod I
    i_rows = []
    if phi.I is not None:
        pad = (0,) * (big.nvars - n)
        pad_rank = {e: rank_of[e + pad] for e in iter_exponents(n, c)}
        i_rows = truncation_span_rows(phi.I.gens, c, pad_rank)
        for row in i_rows:
            red.add(row)
    for row in rows:
        red.add(row)
    basis = []
    inv_rank = {rank_of[e]: e for e in kept}
    pivots_in_keep = [p for p in sorted(red.pivots) if p >= n_others]
    i_red = RowReducer(phi.field)
    for row in i_rows:
        i_red.add(row)
    for pcol in pivots_in_keep:
        row = red.pivots[pcol]
        if i_red.member(row):
            continue  # already a truncation of I
        terms = {inv_rank[col][:n]: v for col, v in row.items()}
        basis.append(Polynomial(phi.source, terms, clean=False))
    return basis, i_rows, kept, {e: rank_of[e] for e in kept}


def truncated_completion_kernel(
    phi: AlgebraMorphism, c: int, cprimes=None
) -> KernelReport:
    """Candidate spans of the completed kernel at a schedule of working orders.

    The space at each working order contains every truncation of the
    completed kernel and weakly shrinks as the order grows; ``stabilized``
    records whether the last two spans agree (modulo truncations of I).
    """
    if cprimes is None:
        cprimes = [c, c + 2, c + 4]
    cprimes = sorted(set(cprimes))
    if cprimes[0] < c:
        raise TruncasError("working orders must be at least the target order")
    if not phi.images_known_to(cprimes[-1]):
        raise PrecisionTooLow("images are not known to the largest working order")

    kept_rank = {e: i for i, e in enumerate(iter_exponents(phi.source.nvars, c))}
    spans = []
    bases = []
    dims = []
    for cp in cprimes:
        basis, i_rows, kept, _ = _candidate_space(phi, c, cp)
        rows = [
            {kept_rank[e]: coeff for e, coeff in b.terms.items()} for b in basis
        ]
        i_rows_local = []
        if phi.I is not None:
            i_rows_local = truncation_span_rows(phi.I.gens, c, kept_rank)
        spans.append(rows + i_rows_local)
        bases.append(basis)
        dims.append(len(basis))
    stabilized = len(spans) >= 2 and spans_equal(spans[-1], spans[-2], phi.field)
    exact = None
    if phi.polynomial_images():
        exact = kernel_exact(phi)
    return KernelReport(c, cprimes, bases[-1], stabilized, exact, dims)


def kernel_certificate(phi: AlgebraMorphism, f: Polynomial, cprime: int):
    """Multipliers (h_k, k_i) witnessing a candidate, or None.

    Returns series over the combined ring with known order cprime such that
    f - sum q_k h_k - sum (x_i - phi_i) k_i has no term below degree cprime.
    """
    big = _combined_ring(phi)
    n = phi.source.nvars
    gens = _graph_generators(phi, big, order=cprime)
    rank_of = {e: i for i, e in enumerate(iter_exponents(big.nvars, cprime))}
    red = RowReducer(phi.field, track_combinations=True)
    row_monomials = []  # insertion order: (generator index, multiplier monomial)
    for gi, g in enumerate(gens):
        val = g.valuation()
        if isinstance(g, TruncatedSeries) and g.is_zero():
            val = 0
        for m in iter_exponents(big.nvars, max(cprime - (val or 0), 0)):
            md = total_degree(m)
            row = {}
            for e, coeff in g.terms.items():
                if md + total_degree(e) < cprime:
                    row[rank_of[exp_add(m, e)]] = coeff
            row_monomials.append((gi, m))
            red.add(row)
    target = {
        rank_of[e + (0,) * (big.nvars - n)]: coeff for e, coeff in f.terms.items()
    }
    combo = red.express(target)
    if combo is None:
        return None
    multipliers = [dict() for _ in gens]
    for idx, coeff in combo.items():
        gi, m = row_monomials[idx]
        cur = multipliers[gi].get(m)
        multipliers[gi][m] = coeff if cur is None else cur + coeff
    return [TruncatedSeries(big, t, cprime) for t in multipliers]


# ---------------------------------------------------------------------------
# strong injectivity comparison and preimages


@dataclass
class InjectivityReport:
    c: int
    cprimes: list
    stabilized: bool
    equal: bool
    exact_kernel: PolyIdeal
    candidate_basis: list


def check_strong_injectivity(
    phi: AlgebraMorphism, c: int, cprimes=None
) -> InjectivityReport:
    """Compare stabilized truncated kernel spans with the exact kernel below c.

    The stabilized candidate space consists of low-degree polynomials that
    certify membership at every working order, which is the degree-below-c
    part of the exact kernel; that is the space the comparison uses.
    """
    report = truncated_completion_kernel(phi, c, cprimes)
    exact = report.exact_kernel
    if exact is None:
        exact = kernel_exact(phi)
    kept_rank = {e: i for i, e in enumerate(iter_exponents(phi.source.nvars, c))}
    exact_rows = [
        {kept_rank[e]: coeff for e, coeff in g.terms.items()}
        for g in ideal_low_degree_space(exact, c)
    ]
    cand_rows = [
        {kept_rank[e]: coeff for e, coeff in b.terms.items()}
        for b in report.candidate_basis
    ]
    i_rows = []
    if phi.I is not None:
        i_rows = truncation_span_rows(phi.I.gens, c, kept_rank)
    equal = spans_equal(cand_rows + i_rows, exact_rows + i_rows, phi.field)
    return InjectivityReport(
        c, report.cprimes, report.stabilized, equal, exact, report.candidate_basis
    )


def preimage(phi: AlgebraMorphism, b, c: int):
    """A source series f with phi(f) = b modulo J and (y)^c, or None.

    The certificate identity f = b + sum q_k l_k + sum (x_i - phi_i) k_i is
    solved modulo (x,y)^c; the returned f is the canonical normal form of b
    against the span of truncated generator multiples, so it is independent
    of everything but the input data.
    """
    big = _combined_ring(phi)
    n = phi.source.nvars
    if isinstance(b, TruncatedSeries):
        if b.known_order < c:
            raise PrecisionTooLow("preimage target not known to the working order")
        if b.ring != phi.target:
            raise TruncasError("preimage target must live in the target ring")
        b_big = TruncatedSeries(big, {_pad_exp(e, n): v for e, v in b.terms.items()}, c)
    else:
        if b.ring != phi.target:
            raise TruncasError("preimage target must live in the target ring")
        b_big = b.map_ring(big, list(range(n, big.nvars))).as_series(c)

    def keep(e):
        return all(x == 0 for x in e[n:])

    rank_of, n_others, kept = subspace_column_ranks(big, c, keep)
    gens = _graph_generators(phi, big, order=c)
    rows = truncated_multiple_rows(gens, big, c, rank_of)
    red = RowReducer(phi.field)
    for row in rows:
        red.add(row)
    target = {rank_of[e]: v for e, v in b_big.terms.items()}
    nf, _, _ = red.reduce(target)
    if any(col < n_others for col in nf):
        return None
    inv_rank = {rank_of[e]: e for e in kept}
    terms = {inv_rank[col][:n]: v for col, v in nf.items()}
    return TruncatedSeries(phi.source, terms, c)

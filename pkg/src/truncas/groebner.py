"""Buchberger engine, polynomial ideals, elimination, truncated comparisons.

The basis computation is plain Buchberger with the normal selection
strategy plus the coprime-lcm and chain criteria; bases are returned fully
inter-reduced and monic, sorted by leading term, so the output is a
canonical form depending only on the monomial order.

``truncated_completion_elimination`` deliberately avoids Groebner bases: it
works on the finite-dimensional space spanned by truncated multiples of the
generators and intersects it with the span of low-degree monomials in the
leading block, by exact row reduction alone.  Comparing its stabilization
against the exact elimination ideal is the point of keeping two routes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import TruncasError
from .linalg import RowReducer
from .orders import GREVLEX, BlockOrder
from .series import (
    Polynomial,
    Ring,
    TruncatedSeries,
    canonical_exp_key,
    exp_add,
    exp_divides,
    exp_lcm,
    exp_sub,
    iter_exponents,
    total_degree,
)


def leading_term(p: Polynomial, order):
    if p.is_zero():
        raise TruncasError("zero polynomial has no leading term")
    exp = max(p.terms, key=order.key)
    return exp, p.terms[exp]


def poly_sort_key(p: Polynomial):
    return sorted(
        ((canonical_exp_key(e), repr(c)) for e, c in p.terms.items()), reverse=True
    )


@dataclass
class PolyIdeal:
    """A polynomial ideal given by generators in canonical order."""

    ring: Ring
    gens: list

    def __post_init__(self):
        cleaned = [g for g in self.gens if not g.is_zero()]
        for g in cleaned:
            if g.ring != self.ring:
                raise TruncasError("ideal generators live in different rings")
        self.gens = sorted(cleaned, key=poly_sort_key)

    def is_zero(self) -> bool:
        return not self.gens


class GroebnerBasis:
    """A reduced Groebner basis with normal-form reduction."""

    def __init__(self, order, elements):
        self.order = order
        self.elements = list(elements)

    def normal_form(self, f: Polynomial) -> Polynomial:
        return _normal_form(f, self.elements, self.order)

    def contains(self, f: Polynomial) -> bool:
        return self.normal_form(f).is_zero()

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)


def _normal_form(f: Polynomial, basis, order) -> Polynomial:
    if not basis:
        return f
    lts = [leading_term(g, order) for g in basis]
    work = dict(f.terms)
    out = {}
    while work:
        exp = max(work, key=order.key)
        coeff = work.pop(exp)
        reduced = False
        for g, (lt_exp, lt_coeff) in zip(basis, lts):
            if exp_divides(lt_exp, exp):
                factor = coeff / lt_coeff
                shift = exp_sub(exp, lt_exp)
                for e2, c2 in g.terms.items():
                    e = exp_add(e2, shift)
                    if e == exp:
                        continue
                    cur = work.get(e)
                    nxt = -factor * c2 if cur is None else cur - factor * c2
                    if nxt:
                        work[e] = nxt
                    elif cur is not None:
                        del work[e]
                reduced = True
                break
        if not reduced:
            out[exp] = coeff
    return Polynomial(f.ring, out, clean=False)


def _spoly(f: Polynomial, g: Polynomial, order) -> Polynomial:
    (ef, cf) = leading_term(f, order)
    (eg, cg) = leading_term(g, order)
    lcm = exp_lcm(ef, eg)
    mf = exp_sub(lcm, ef)
    mg = exp_sub(lcm, eg)
    ring = f.ring
    one = ring.field.one
    tf = Polynomial(ring, {mf: one / cf}, clean=False)
    tg = Polynomial(ring, {mg: one / cg}, clean=False)
    return tf * f - tg * g


def buchberger(gens, order=None) -> GroebnerBasis:
    """Reduced Groebner basis by Buchberger's algorithm."""
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return GroebnerBasis(order or GREVLEX, [])
    ring = gens[0].ring
    if order is None:
        order = GREVLEX
    basis = list(gens)
    lts = [leading_term(g, order)[0] for g in basis]
    pending = set()
    for i in range(len(basis)):
        for j in range(i):
            pending.add((j, i))

    def lcm_of(i, j):
        return exp_lcm(lts[i], lts[j])

    while pending:
        # normal selection: smallest lcm in the monomial order
        i, j = min(pending, key=lambda ij: (order.key(lcm_of(*ij)), ij))
        pending.discard((i, j))
        lcm = lcm_of(i, j)
        if lcm == exp_add(lts[i], lts[j]):
            continue  # coprime leading terms
        chain = False
        for k in range(len(basis)):
            if k in (i, j):
                continue
            if not exp_divides(lts[k], lcm):
                continue
            a = (min(i, k), max(i, k))
            b = (min(j, k), max(j, k))
            if a not in pending and b not in pending:
                chain = True
                break
        if chain:
            continue
        s = _normal_form(_spoly(basis[i], basis[j], order), basis, order)
        if s.is_zero():
            continue
        basis.append(s)
        lts.append(leading_term(s, order)[0])
        new = len(basis) - 1
        for k in range(new):
            pending.add((k, new))

    return GroebnerBasis(order, _interreduce(basis, order))


def _interreduce(basis, order):
    basis = [g for g in basis if not g.is_zero()]
    changed = True
    while changed:
        changed = False
        for idx in range(len(basis)):
            others = basis[:idx] + basis[idx + 1 :]
            red = _normal_form(basis[idx], others, order)
            if red.is_zero():
                basis = others
                changed = True
                break
            if red.terms != basis[idx].terms:
                basis[idx] = red
                changed = True
    monic = []
    for g in basis:
        _, lc = leading_term(g, order)
        monic.append(g.scale(g.ring.field.one / lc))
    monic.sort(key=lambda g: order.key(leading_term(g, order)[0]))
    return monic


# ---------------------------------------------------------------------------
# elimination


def eliminate_ideal(ideal: PolyIdeal, n_keep: int = None) -> PolyIdeal:
    """Generators of the intersection with the subring of the first variables.

    Uses a block order with the trailing variables in front; the basis
    elements free of them generate the intersection.
    """
    ring = ideal.ring
    if n_keep is None:
        if ring.nx is None:
            raise TruncasError("ring has no block split; pass n_keep explicitly")
        n_keep = ring.nx
    order = BlockOrder(range(n_keep, ring.nvars), ring.nvars)
    gb = buchberger(ideal.gens, order)
    sub = ring.restrict(n_keep)
    kept = [g.restrict_to(n_keep) for g in gb if g.support_within(n_keep)]
    return PolyIdeal(sub, kept)


def ideal_contains(ideal: PolyIdeal, f: Polynomial) -> bool:
    return buchberger(ideal.gens, GREVLEX).contains(f)


def ideal_low_degree_space(ideal: PolyIdeal, c: int):
    """Field basis of { f : deg f < c, f in the ideal }.

    Normal forms against a degree-respecting basis are linear in f, so the
    space is the nullspace of the normal-form matrix on monomials below c.
    """
    ring = ideal.ring
    gb = buchberger(ideal.gens, GREVLEX)
    monos = list(iter_exponents(ring.nvars, c))
    col_of = {e: i for i, e in enumerate(monos)}
    rows = {}  # residual monomial -> {column: coeff}
    for e in monos:
        nf = gb.normal_form(Polynomial(ring, {e: ring.field.one}, clean=False))
        for mu, coeff in nf.terms.items():
            rows.setdefault(mu, {})[col_of[e]] = coeff
    red = RowReducer(ring.field)
    for mu in sorted(rows, key=canonical_exp_key):
        red.add(rows[mu])
    basis = []
    for vec in red.nullspace_basis(range(len(monos))):
        terms = {monos[col]: v for col, v in vec.items()}
        basis.append(Polynomial(ring, terms, clean=False))
    return basis


def ideals_equal(a: PolyIdeal, b: PolyIdeal) -> bool:
    gb_a = buchberger(a.gens, GREVLEX)
    gb_b = buchberger(b.gens, GREVLEX)
    return all(gb_a.contains(g) for g in b.gens) and all(
        gb_b.contains(g) for g in a.gens
    )


# ---------------------------------------------------------------------------
# truncated membership spaces (exact linear algebra, no Groebner)


def truncated_multiple_rows(gens, ring: Ring, cprime: int, rank_of):
    """Rows spanning the truncations below cprime of all generator multiples."""
    rows = []
    for g in gens:
        if isinstance(g, TruncatedSeries) and g.known_order < cprime:
            raise TruncasError("generator not known to the working order")
        val = g.valuation()
        if val is None:
            continue
        if isinstance(g, TruncatedSeries):
            val = 0 if g.is_zero() else val
        for m in iter_exponents(ring.nvars, max(cprime - val, 0)):
            md = total_degree(m)
            row = {}
            for e, coeff in g.terms.items():
                if md + total_degree(e) < cprime:
                    row[rank_of[exp_add(m, e)]] = coeff
            if row:
                rows.append(row)
    return rows


def subspace_column_ranks(ring: Ring, cprime: int, keep_pred):
    """Rank all monomials below cprime, the kept ones last in canonical order."""
    others, kept = [], []
    for e in iter_exponents(ring.nvars, cprime):
        (kept if keep_pred(e) else others).append(e)
    rank_of = {}
    for rank, e in enumerate(others + kept):
        rank_of[e] = rank
    return rank_of, len(others), kept


def truncated_completion_elimination(ideal: PolyIdeal, c: int, cprime: int):
    """Field basis of { f in k[x], deg f < c : f in I + (x,y)^cprime }.

    Pure coefficient linear algebra: row-reduce the truncated generator
    multiples with the x-only low-degree monomials ranked last; the reduced
    rows supported entirely on those monomials span the wanted space.
    """
    if cprime < c:
        raise TruncasError("working order must be at least the target order")
    ring = ideal.ring
    if ring.nx is None:
        raise TruncasError("ring has no block split")
    nx = ring.nx

    def keep(e):
        return total_degree(e) < c and all(x == 0 for x in e[nx:])

    rank_of, n_others, kept = subspace_column_ranks(ring, cprime, keep)
    rows = truncated_multiple_rows(ideal.gens, ring, cprime, rank_of)
    red = RowReducer(ring.field)
    for row in rows:
        red.add(row)
    sub = ring.restrict(nx)
    inv_rank = {rank_of[e]: e for e in kept}
    out = []
    for pcol in sorted(red.pivots):
        if pcol >= n_others:
            terms = {inv_rank[col][:nx]: v for col, v in red.pivots[pcol].items()}
            out.append(Polynomial(sub, terms, clean=False))
    return out


def truncation_span_rows(polys, c: int, rank_of):
    """Rows for the truncations below degree c of all multiples of polys."""
    rows = []
    for g in polys:
        val = g.valuation()
        if val is None:
            continue
        nvars = g.ring.nvars
        for m in iter_exponents(nvars, max(c - val, 0)):
            md = total_degree(m)
            row = {}
            for e, coeff in g.terms.items():
                if md + total_degree(e) < c:
                    row[rank_of[exp_add(m, e)]] = coeff
            if row:
                rows.append(row)
    return rows

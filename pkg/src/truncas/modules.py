"""Module Groebner machinery: zero-block intersections, idealization,
syzygies, and vanishing-order shift functions.

Free-module elements are sparse maps (component, exponent) -> coefficient.
The position-over-term order puts lower component indices above everything
else, so a reduced basis whose leading components sit past the first p
positions consists of elements supported there entirely; those generate the
intersection with the zero-block submodule.  Intersections of two modules
go through the usual tag-variable construction.

``chevalley_beta`` reports the least shift b such that module elements whose
front block vanishes to order b lie, modulo (x)^c, in the exact front-zero
submodule.  The shift 0 is reserved for the degenerate case where the module
already sits inside its front-zero part, so that a reported positive shift
is meaningful for every c; within that convention the reported value is
minimal and the inclusion fails one step lower.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import TruncasError
from .groebner import PolyIdeal, poly_sort_key
from .linalg import intersect_spans, span_reducer
from .orders import _grevlex_key
from .series import (
    Polynomial,
    Ring,
    exp_add,
    exp_divides,
    exp_lcm,
    exp_sub,
    exponents_of_degree,
    iter_exponents,
    total_degree,
)


@dataclass
class PolyModule:
    """A submodule of ring^rank given by generator vectors of polynomials."""

    ring: Ring
    rank: int
    gens: list

    def __post_init__(self):
        cleaned = []
        for vec in self.gens:
            if len(vec) != self.rank:
                raise TruncasError("generator vector length disagrees with the rank")
            for p in vec:
                if p.ring != self.ring:
                    raise TruncasError("module generators live in different rings")
            if any(not p.is_zero() for p in vec):
                cleaned.append(list(vec))
        self.gens = sorted(cleaned, key=lambda v: [poly_sort_key(p) for p in v])

    def is_zero(self) -> bool:
        return not self.gens


# ---------------------------------------------------------------------------
# module elements as sparse (component, exponent) maps


def vec_to_elem(vec) -> dict:
    elem = {}
    for comp, poly in enumerate(vec):
        for e, c in poly.terms.items():
            elem[(comp, e)] = c
    return elem


def elem_to_vec(elem: dict, ring: Ring, rank: int):
    terms = [dict() for _ in range(rank)]
    for (comp, e), c in elem.items():
        terms[comp][e] = c
    return [Polynomial(ring, t, clean=False) for t in terms]


def _elem_sub_scaled(a: dict, b: dict, factor, shift) -> dict:
    """a - factor * x^shift * b, in place on a copy of a."""
    out = dict(a)
    for (comp, e), c in b.items():
        key = (comp, exp_add(e, shift))
        val = factor * c
        cur = out.get(key)
        nxt = -val if cur is None else cur - val
        if nxt:
            out[key] = nxt
        elif cur is not None:
            del out[key]
    return out


class ModuleOrder:
    """Position-over-term: lower components dominate; grevlex on monomials.

    ``tag_index`` optionally names a variable whose presence dominates
    everything, which is what tag-variable intersections eliminate.
    """

    def __init__(self, tag_index=None):
        self.tag_index = tag_index

    def key(self, mono):
        comp, e = mono
        if self.tag_index is None:
            return (-comp, _grevlex_key(e))
        return (e[self.tag_index], -comp, _grevlex_key(e))


def mod_leading(elem: dict, order: ModuleOrder):
    if not elem:
        raise TruncasError("zero module element has no leading term")
    mono = max(elem, key=order.key)
    return mono, elem[mono]


def _mod_divides(a, b) -> bool:
    return a[0] == b[0] and exp_divides(a[1], b[1])


def mod_normal_form(elem: dict, basis, order: ModuleOrder) -> dict:
    if not basis:
        return dict(elem)
    lts = [mod_leading(g, order) for g in basis]
    work = dict(elem)
    out = {}
    while work:
        mono = max(work, key=order.key)
        coeff = work.pop(mono)
        reduced = False
        for g, (lt, lc) in zip(basis, lts):
            if _mod_divides(lt, mono):
                shift = exp_sub(mono[1], lt[1])
                work[mono] = coeff
                nxt = _elem_sub_scaled(work, g, coeff / lc, shift)
                nxt.pop(mono, None)
                work = nxt
                reduced = True
                break
        if not reduced:
            out[mono] = coeff
    return out


def module_buchberger(elements, order: ModuleOrder):
    """Reduced module Groebner basis; pairs only between equal components."""
    basis = [dict(e) for e in elements if e]
    if not basis:
        return []
    lts = [mod_leading(g, order)[0] for g in basis]
    pending = set()
    for i in range(len(basis)):
        for j in range(i):
            if lts[i][0] == lts[j][0]:
                pending.add((j, i))

    def lcm_exp(i, j):
        return exp_lcm(lts[i][1], lts[j][1])

    while pending:
        i, j = min(
            pending, key=lambda ij: (order.key((lts[ij[0]][0], lcm_exp(*ij))), ij)
        )
        pending.discard((i, j))
        lcm = lcm_exp(i, j)
        chain = False
        for k in range(len(basis)):
            if k in (i, j) or lts[k][0] != lts[i][0]:
                continue
            if not exp_divides(lts[k][1], lcm):
                continue
            a = (min(i, k), max(i, k))
            b = (min(j, k), max(j, k))
            if a not in pending and b not in pending:
                chain = True
                break
        if chain:
            continue
        gi, gj = basis[i], basis[j]
        (_, ei), lci = lts[i], gi[lts[i]]
        (_, ej), lcj = lts[j], gj[lts[j]]
        si = exp_sub(lcm, ei)
        sj = exp_sub(lcm, ej)
        # s-vector: x^si gi / lc_i - x^sj gj / lc_j
        s = {}
        for (comp, e), c in gi.items():
            s[(comp, exp_add(e, si))] = c / lci
        for (comp, e), c in gj.items():
            key = (comp, exp_add(e, sj))
            val = c / lcj
            cur = s.get(key)
            nxt = -val if cur is None else cur - val
            if nxt:
                s[key] = nxt
            elif cur is not None:
                del s[key]
        s = mod_normal_form(s, basis, order)
        if not s:
            continue
        basis.append(s)
        lts.append(mod_leading(s, order)[0])
        new = len(basis) - 1
        for k in range(new):
            if lts[k][0] == lts[new][0]:
                pending.add((k, new))

    return _mod_interreduce(basis, order)


def _mod_interreduce(basis, order: ModuleOrder):
    basis = [g for g in basis if g]
    changed = True
    while changed:
        changed = False
        for idx in range(len(basis)):
            others = basis[:idx] + basis[idx + 1 :]
            red = mod_normal_form(basis[idx], others, order)
            if not red:
                basis = others
                changed = True
                break
            if red != basis[idx]:
                basis[idx] = red
                changed = True
    out = []
    for g in basis:
        _, lc = mod_leading(g, order)
        inv = (lc / lc) / lc
        out.append({k: inv * c for k, c in g.items()})
    out.sort(key=lambda g: order.key(mod_leading(g, order)[0]))
    return out


def module_contains(basis, order: ModuleOrder, elem: dict) -> bool:
    return not mod_normal_form(elem, basis, order)


def modules_equal(a: PolyModule, b: PolyModule) -> bool:
    if a.ring != b.ring or a.rank != b.rank:
        return False
    order = ModuleOrder()
    gb_a = module_buchberger([vec_to_elem(v) for v in a.gens], order)
    gb_b = module_buchberger([vec_to_elem(v) for v in b.gens], order)
    return all(module_contains(gb_a, order, vec_to_elem(v)) for v in b.gens) and all(
        module_contains(gb_b, order, vec_to_elem(v)) for v in a.gens
    )


# ---------------------------------------------------------------------------
# zero-block intersection, tag intersection, syzygies


def module_intersect_zero_block(M: PolyModule, p: int) -> PolyModule:
    """Generators of {v in M : first p components zero}, projected onto the rest."""
    t = M.rank - p
    if p < 0 or t < 0:
        raise TruncasError("invalid block sizes")
    order = ModuleOrder()
    gb = module_buchberger([vec_to_elem(v) for v in M.gens], order)
    out = []
    for g in gb:
        if all(comp >= p for (comp, _) in g):
            shifted = {(comp - p, e): c for (comp, e), c in g.items()}
            out.append(elem_to_vec(shifted, M.ring, t))
    return PolyModule(M.ring, t, out)


def module_intersection(A: PolyModule, B: PolyModule) -> PolyModule:
    """A ∩ B by the tag construction: eliminate t from t·A + (1−t)·B."""
    if A.ring != B.ring or A.rank != B.rank:
        raise TruncasError("modules must share ring and rank")
    ring = A.ring
    tname = "_t"
    while tname in ring.names:
        tname += "_"
    ring_t = ring.extend((tname,))
    tidx = ring_t.nvars - 1
    elems = []
    for vec in A.gens:
        elem = {}
        for comp, poly in enumerate(vec):
            for e, c in poly.terms.items():
                elem[(comp, e + (1,))] = c
        elems.append(elem)
    for vec in B.gens:
        elem = {}
        for comp, poly in enumerate(vec):
            for e, c in poly.terms.items():
                elem[(comp, e + (0,))] = c
                key = (comp, e + (1,))
                cur = elem.get(key)
                nxt = -c if cur is None else cur - c
                if nxt:
                    elem[key] = nxt
                elif cur is not None:
                    del elem[key]
        elems.append(elem)
    order = ModuleOrder(tag_index=tidx)
    gb = module_buchberger(elems, order)
    out = []
    for g in gb:
        if all(e[tidx] == 0 for (_, e) in g):
            stripped = {(comp, e[:-1]): c for (comp, e), c in g.items()}
            out.append(elem_to_vec(stripped, ring, A.rank))
    return PolyModule(ring, A.rank, out)


def syzygies(T) -> PolyModule:
    """Generators of { s : T·s = 0 } for a matrix of polynomials."""
    if not T or not T[0]:
        raise TruncasError("empty matrix")
    ring = T[0][0].ring
    p = len(T)
    m = len(T[0])
    gens = []
    for j in range(m):
        vec = [T[r][j] for r in range(p)]
        tag = [Polynomial.zero(ring) for _ in range(m)]
        tag[j] = Polynomial.const(ring, 1)
        gens.append(vec + tag)
    stacked = PolyModule(ring, p + m, gens)
    result = module_intersect_zero_block(stacked, p)
    for vec in result.gens:
        for r in range(p):
            acc = Polynomial.zero(ring)
            for j in range(m):
                acc = acc + T[r][j] * vec[j]
            if not acc.is_zero():
                raise TruncasError("syzygy verification failed")
    return result


# ---------------------------------------------------------------------------
# Nagata idealization


def _fresh_names(ring: Ring, prefix: str, count: int):
    names = []
    k = 1
    while len(names) < count:
        cand = f"{prefix}{k}"
        if cand not in ring.names and cand not in names:
            names.append(cand)
        k += 1
    return names


def nagata_idealize(M: PolyModule, p: int) -> PolyIdeal:
    """Encode the module as an ideal with square-zero slack variables.

    Generator (b_1..b_p, c_1..c_t) becomes sum b_i z_i + sum c_j w_j, and
    all quadratic monomials in (z, w) are added, simulating the quotient by
    (z, w)^2 inside a plain polynomial ring.
    """
    t = M.rank - p
    if p < 0 or t < 0:
        raise TruncasError("invalid block sizes")
    ring = M.ring
    znames = _fresh_names(ring, "z", p)
    wnames = _fresh_names(ring.extend(tuple(znames)), "w", t)
    big = ring.extend(tuple(znames) + tuple(wnames))
    nbase = ring.nvars
    gens = []
    for vec in M.gens:
        acc = Polynomial.zero(big)
        for i, poly in enumerate(vec):
            slack = big.variable(nbase + i)
            lifted = poly.map_ring(big, list(range(nbase)))
            acc = acc + lifted * slack
        if not acc.is_zero():
            gens.append(acc)
    slack_count = p + t
    for i in range(slack_count):
        for j in range(i, slack_count):
            gens.append(big.variable(nbase + i) * big.variable(nbase + j))
    return PolyIdeal(big, gens)


def nagata_route_zero_block(M: PolyModule, p: int) -> PolyModule:
    """Zero-block intersection recomputed through the idealization.

    Eliminates the trailing block of the original ring (when present)
    together with the z slack variables, then reads off the w-linear parts.
    The result lives over the leading block of the original ring; it matches
    ``module_intersect_zero_block`` whenever the module's ring has a single
    block.
    """
    t = M.rank - p
    ideal = nagata_idealize(M, p)
    big = ideal.ring
    ring = M.ring
    nbase = ring.nvars
    nx = ring.nx if ring.nx is not None else nbase
    front = list(range(nx, nbase + p))  # trailing base block plus z variables
    from .orders import BlockOrder

    order = BlockOrder(front, big.nvars)
    from .groebner import buchberger as _buch

    gb = _buch(ideal.gens, order)
    sub = ring.restrict(nx)
    out = []
    for g in gb:
        if not all(all(g_e[i] == 0 for i in front) for g_e in g.terms):
            continue
        vec_terms = [dict() for _ in range(t)]
        ok = True
        for e, coeff in g.terms.items():
            wdeg = sum(e[nbase + p :])
            zwdeg = sum(e[nbase:])
            if zwdeg >= 2:
                continue  # modded out by (z, w)^2
            if wdeg != 1:
                ok = False  # a w-free part cannot occur inside (z, w)
                break
            j = next(i for i in range(t) if e[nbase + p + i] == 1)
            vec_terms[j][e[:nx]] = coeff
        if not ok:
            raise TruncasError("unexpected slack-free part in the idealization route")
        if any(vec_terms[j] for j in range(t)):
            out.append([Polynomial(sub, vt, clean=False) for vt in vec_terms])
    return PolyModule(sub, t, out)


# ---------------------------------------------------------------------------
# vanishing-order shift (exact and truncated)


@dataclass
class ChevalleyResult:
    c: int
    beta: int
    mode: str  # "exact" or "truncated"
    working_order: int = None


def _front_power_module(ring: Ring, p: int, t: int, beta: int) -> PolyModule:
    gens = []
    for i in range(p):
        for e in exponents_of_degree(ring.nvars, beta):
            vec = [Polynomial.zero(ring) for _ in range(p + t)]
            vec[i] = Polynomial(ring, {e: ring.field.one}, clean=False)
            gens.append(vec)
    for j in range(t):
        vec = [Polynomial.zero(ring) for _ in range(p + t)]
        vec[p + j] = Polynomial.const(ring, 1)
        gens.append(vec)
    return PolyModule(ring, p + t, gens)


def _embed_back_block(N: PolyModule, p: int) -> PolyModule:
    gens = []
    for vec in N.gens:
        gens.append([Polynomial.zero(N.ring)] * p + list(vec))
    return PolyModule(N.ring, p + N.rank, gens)


def chevalley_beta(
    M: PolyModule, p: int, c: int, mode: str = "exact", working_order: int = None
) -> ChevalleyResult:
    """Least shift beta with M ∩ ((x)^beta front ⊕ free back) inside N + (x)^c.

    N is the front-zero part of M, re-embedded.  Exact mode decides every
    membership with module Groebner bases; truncated mode replaces modules
    by their spans of truncated generator multiples below the working order
    and decides memberships there.
    """
    if c < 1:
        raise TruncasError("c must be positive")
    t = M.rank - p
    if mode == "exact":
        return _chevalley_exact(M, p, t, c)
    if mode == "truncated":
        D = working_order if working_order is not None else c + 4
        return _chevalley_truncated(M, p, t, c, D)
    raise TruncasError(f"unknown mode {mode!r}")


def _chevalley_exact(M: PolyModule, p: int, t: int, c: int) -> ChevalleyResult:
    ring = M.ring
    order = ModuleOrder()
    N = module_intersect_zero_block(M, p)
    N_emb = _embed_back_block(N, p)
    gb_n = module_buchberger([vec_to_elem(v) for v in N_emb.gens], order)
    if all(module_contains(gb_n, order, vec_to_elem(v)) for v in M.gens):
        return ChevalleyResult(c, 0, "exact")
    target_gens = [vec_to_elem(v) for v in N_emb.gens]
    for i in range(p + t):
        for e in exponents_of_degree(ring.nvars, c):
            target_gens.append({(i, e): ring.field.one})
    gb_target = module_buchberger(target_gens, order)
    beta = 1
    while True:
        W = _front_power_module(ring, p, t, beta)
        inter = module_intersection(M, W)
        if all(
            module_contains(gb_target, order, vec_to_elem(v)) for v in inter.gens
        ):
            return ChevalleyResult(c, beta, "exact")
        beta += 1
        if beta > 4 * c + 8:
            raise TruncasError("no shift found within the search bound")


def _chevalley_truncated(M: PolyModule, p: int, t: int, c: int, D: int) -> ChevalleyResult:
    ring = M.ring
    n = ring.nvars
    field = ring.field
    mono_rank = {}
    for i in range(p + t):
        for e in iter_exponents(n, D):
            mono_rank[(i, e)] = len(mono_rank)
    ncols = len(mono_rank)

    def vec_rows(vectors):
        rows = []
        for vec in vectors:
            for m in iter_exponents(n, D):
                md = total_degree(m)
                row = {}
                for comp, poly in enumerate(vec):
                    for e, coeff in poly.terms.items():
                        if md + total_degree(e) < D:
                            row[mono_rank[(comp, exp_add(m, e))]] = coeff
                if row:
                    rows.append(row)
        return rows

    m_rows = vec_rows(M.gens)
    back_only = span_reducer(
        [
            {mono_rank[(i, e)]: field.one}
            for i in range(p, p + t)
            for e in iter_exponents(n, D)
        ],
        field,
    )
    m_red = span_reducer(m_rows, field)
    # truncated front-zero part: members of the M-span supported on the back block
    n_rows = []
    for pcol in sorted(m_red.pivots):
        row = m_red.pivots[pcol]
        if back_only.member(row):
            n_rows.append(row)
    # reported 0 only when the whole truncated span sits in its front-zero part
    n_red = span_reducer(n_rows, field)
    if all(n_red.member(r) for r in m_rows):
        return ChevalleyResult(c, 0, "truncated", D)

    high_rows = [
        {mono_rank[(i, e)]: field.one}
        for i in range(p + t)
        for d in range(c, D)
        for e in exponents_of_degree(n, d)
    ]
    rhs_red = span_reducer(n_rows + high_rows, field)

    beta = 1
    while True:
        w_rows = [
            {mono_rank[(i, e)]: field.one}
            for i in range(p)
            for d in range(beta, D)
            for e in exponents_of_degree(n, d)
        ] + [
            {mono_rank[(i, e)]: field.one}
            for i in range(p, p + t)
            for e in iter_exponents(n, D)
        ]
        lhs = intersect_spans(m_rows, w_rows, ncols, field)
        if all(rhs_red.member(row) for row in lhs):
            return ChevalleyResult(c, beta, "truncated", D)
        beta += 1
        if beta > D:
            raise TruncasError("no truncated shift found below the working order")

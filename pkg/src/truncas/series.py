"""Multivariate polynomials and precision-tracked truncated power series.

Terms are sparse maps from exponent tuples to nonzero field elements.  A
``TruncatedSeries`` carries a ``known_order``: coefficients of total degree
strictly below it are exact, everything above is unknown.  Every operation
propagates the conservative order

    add:  min(order(f), order(g))
    mul:  min(order(f) + val(g), order(g) + val(f))

where ``val`` is the valuation lower bound (minimal stored total degree, or
the known order when no terms are stored).  The bookkeeping never claims
precision the inputs cannot certify.

Canonical term order for printing and iteration is graded, then by
declaration-order variable precedence inside each degree (x1 before x2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import CompositionIllDefined, NonUnit, RingMismatch, TruncasError

Exponent = tuple

# ---------------------------------------------------------------------------
# exponent vectors


def total_degree(exp: Exponent) -> int:
    return sum(exp)


def exp_add(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def exp_sub(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x - y for x, y in zip(a, b))


def exp_divides(a: Exponent, b: Exponent) -> bool:
    return all(x <= y for x, y in zip(a, b))


def exp_lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(max(x, y) for x, y in zip(a, b))


def iter_exponents(nvars: int, below: int):
    """Yield all exponent tuples of total degree < ``below``, canonically ordered."""
    for d in range(below):
        yield from exponents_of_degree(nvars, d)


def exponents_of_degree(nvars: int, d: int):
    if nvars == 0:
        if d == 0:
            yield ()
        return
    if nvars == 1:
        yield (d,)
        return
    for k in range(d, -1, -1):
        for rest in exponents_of_degree(nvars - 1, d - k):
            yield (k,) + rest


def canonical_exp_key(exp: Exponent):
    """Sort key realizing the canonical printing order."""
    return (total_degree(exp), tuple(-e for e in exp))


# ---------------------------------------------------------------------------
# rings


@dataclass(frozen=True)
class Ring:
    """A variable block descriptor over an exact field.

    ``nx`` marks the size of the leading block when the ring was declared
    with two blocks (x; y); it is ``None`` for single-block rings.
    """

    field: object
    names: tuple
    nx: int = None

    @property
    def nvars(self) -> int:
        return len(self.names)

    def zero_exp(self) -> Exponent:
        return (0,) * self.nvars

    def unit_exp(self, i: int) -> Exponent:
        e = [0] * self.nvars
        e[i] = 1
        return tuple(e)

    def variable(self, i: int) -> "Polynomial":
        return Polynomial(self, {self.unit_exp(i): self.field.one})

    def variable_series(self, i: int, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self, {self.unit_exp(i): self.field.one}, order)

    def restrict(self, k: int) -> "Ring":
        return Ring(self.field, self.names[:k])

    def extend(self, extra) -> "Ring":
        extra = tuple(extra)
        for name in extra:
            if name in self.names:
                raise TruncasError(f"variable name {name!r} already in ring")
        return Ring(self.field, self.names + extra, self.nx)

    def with_split(self, nx: int) -> "Ring":
        return Ring(self.field, self.names, nx)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise TruncasError(f"unknown variable {name!r}") from None

    def __repr__(self):
        return f"Ring({self.field!r}, {', '.join(self.names)})"


def _require_same_ring(a, b):
    if a.ring != b.ring:
        raise RingMismatch(f"ring mismatch: {a.ring!r} vs {b.ring!r}")


# ---------------------------------------------------------------------------
# polynomials


class Polynomial:
    """An exact sparse multivariate polynomial."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms=None, clean: bool = True):
        self.ring = ring
        if terms is None:
            self.terms = {}
        elif clean:
            self.terms = {e: c for e, c in terms.items() if c}
        else:
            self.terms = terms

    # construction helpers

    @classmethod
    def zero(cls, ring: Ring) -> "Polynomial":
        return cls(ring, {})

    @classmethod
    def const(cls, ring: Ring, value) -> "Polynomial":
        c = ring.field(value)
        if not c:
            return cls(ring, {})
        return cls(ring, {ring.zero_exp(): c}, clean=False)

    # queries

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exp: Exponent):
        return self.terms.get(tuple(exp), self.ring.field.zero)

    def constant_term(self):
        return self.terms.get(self.ring.zero_exp(), self.ring.field.zero)

    def total_deg(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(total_degree(e) for e in self.terms)

    def valuation(self):
        """Minimal total degree of a term, or None for zero."""
        if not self.terms:
            return None
        return min(total_degree(e) for e in self.terms)

    def support_within(self, bound: int) -> bool:
        return all(all(x == 0 for x in e[bound:]) for e in self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: canonical_exp_key(kv[0]))

    # arithmetic

    def __add__(self, other):
        _require_same_ring(self, other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            s = c if s is None else s + c
            if s:
                out[e] = s
            elif e in out:
                del out[e]
        return Polynomial(self.ring, out, clean=False)

    def __sub__(self, other):
        _require_same_ring(self, other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            s = -c if s is None else s - c
            if s:
                out[e] = s
            elif e in out:
                del out[e]
        return Polynomial(self.ring, out, clean=False)

    def __neg__(self):
        return Polynomial(self.ring, {e: -c for e, c in self.terms.items()}, clean=False)

    def __mul__(self, other):
        _require_same_ring(self, other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = exp_add(e1, e2)
                c = c1 * c2
                s = out.get(e)
                s = c if s is None else s + c
                if s:
                    out[e] = s
                elif e in out:
                    del out[e]
        return Polynomial(self.ring, out, clean=False)

    def scale(self, value) -> "Polynomial":
        c0 = self.ring.field(value)
        if not c0:
            return Polynomial.zero(self.ring)
        return Polynomial(self.ring, {e: c0 * c for e, c in self.terms.items()}, clean=False)

    def __pow__(self, n: int):
        if n < 0:
            raise TruncasError("negative polynomial power")
        result = Polynomial.const(self.ring, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def derivative(self, var: int) -> "Polynomial":
        out = {}
        field = self.ring.field
        for e, c in self.terms.items():
            k = e[var]
            if k == 0:
                continue
            d = list(e)
            d[var] = k - 1
            coeff = field(k) * c
            if coeff:
                out[tuple(d)] = coeff
        return Polynomial(self.ring, out, clean=False)

    # conversions

    def as_series(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.ring, dict(self.terms), order)

    def map_ring(self, ring: Ring, var_map) -> "Polynomial":
        """Re-express in ``ring`` sending variable i to ``var_map[i]`` of the new ring."""
        out = {}
        for e, c in self.terms.items():
            ne = [0] * ring.nvars
            for i, k in enumerate(e):
                if k:
                    ne[var_map[i]] = k
            out[tuple(ne)] = c
        return Polynomial(ring, out, clean=False)

    def restrict_to(self, k: int) -> "Polynomial":
        """Drop trailing variables; requires support within the first k."""
        if not self.support_within(k):
            raise TruncasError("polynomial uses variables outside the restricted block")
        sub = self.ring.restrict(k)
        return Polynomial(sub, {e[:k]: c for e, c in self.terms.items()}, clean=False)

    def compose_poly(self, images) -> "Polynomial":
        """Exact composition with polynomial images (one per variable)."""
        if len(images) != self.ring.nvars:
            raise TruncasError("one image per variable is required")
        if not images and not self.terms:
            raise TruncasError("cannot compose a constant with no images into no ring")
        target = images[0].ring if images else self.ring
        for g in images:
            if g.ring != target:
                raise RingMismatch("images live in different rings")
        out = Polynomial.zero(target)
        powers = [{} for _ in images]

        def power(i, k):
            cache = powers[i]
            if k not in cache:
                if k == 0:
                    cache[k] = Polynomial.const(target, 1)
                else:
                    cache[k] = power(i, k - 1) * images[i]
            return cache[k]

        for e, c in self.terms.items():
            term = Polynomial.const(target, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out

    def eval_at_point(self, values):
        """Exact evaluation at a point given by field elements."""
        field = self.ring.field
        total = field.zero
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    term = term * values[i] ** k
            total = total + term
        return total

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.ring == other.ring
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.ring, tuple(self.sorted_terms())))

    def __repr__(self):
        return format_terms(self)


# ---------------------------------------------------------------------------
# truncated series


class TruncatedSeries:
    """A power series known exactly below ``known_order`` total degree."""

    __slots__ = ("ring", "terms", "known_order")

    def __init__(self, ring: Ring, terms, known_order: int):
        if known_order < 1:
            raise TruncasError("known_order must be positive")
        self.ring = ring
        self.known_order = known_order
        self.terms = {
            e: c for e, c in terms.items() if c and total_degree(e) < known_order
        }

    @classmethod
    def zero(cls, ring: Ring, order: int) -> "TruncatedSeries":
        return cls(ring, {}, order)

    @classmethod
    def const(cls, ring: Ring, value, order: int) -> "TruncatedSeries":
        c = ring.field(value)
        terms = {ring.zero_exp(): c} if c else {}
        return cls(ring, terms, order)

    # queries

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exp: Exponent):
        return self.terms.get(tuple(exp), self.ring.field.zero)

    def constant_term(self):
        return self.terms.get(self.ring.zero_exp(), self.ring.field.zero)

    def valuation(self) -> int:
        """Valuation lower bound: min stored degree, or the known order."""
        if not self.terms:
            return self.known_order
        return min(total_degree(e) for e in self.terms)

    def nested_support_ok(self, bound: int) -> bool:
        """True iff every stored exponent uses only the first ``bound`` variables."""
        if bound < 0 or bound > self.ring.nvars:
            raise TruncasError(f"bound {bound} outside 0..{self.ring.nvars}")
        return all(all(x == 0 for x in e[bound:]) for e in self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: canonical_exp_key(kv[0]))

    def graded_slices(self):
        """Dense view: one term dict per total degree, 0 .. known_order-1."""
        slices = [dict() for _ in range(self.known_order)]
        for e, coeff in self.terms.items():
            slices[total_degree(e)][e] = coeff
        return slices

    # arithmetic

    def __add__(self, other):
        _require_same_ring(self, other)
        order = min(self.known_order, other.known_order)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            s = c if s is None else s + c
            if s:
                out[e] = s
            elif e in out:
                del out[e]
        return TruncatedSeries(self.ring, out, order)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return TruncatedSeries(
            self.ring, {e: -c for e, c in self.terms.items()}, self.known_order
        )

    def __mul__(self, other):
        _require_same_ring(self, other)
        order = min(
            self.known_order + other.valuation(), other.known_order + self.valuation()
        )
        out = {}
        for e1, c1 in self.terms.items():
            d1 = total_degree(e1)
            for e2, c2 in other.terms.items():
                if d1 + total_degree(e2) >= order:
                    continue
                e = exp_add(e1, e2)
                c = c1 * c2
                s = out.get(e)
                s = c if s is None else s + c
                if s:
                    out[e] = s
                elif e in out:
                    del out[e]
        return TruncatedSeries(self.ring, out, order)

    def scale(self, value) -> "TruncatedSeries":
        c0 = self.ring.field(value)
        if not c0:
            return TruncatedSeries.zero(self.ring, self.known_order)
        return TruncatedSeries(
            self.ring, {e: c0 * c for e, c in self.terms.items()}, self.known_order
        )

    def truncate(self, c: int) -> "TruncatedSeries":
        order = min(c, self.known_order)
        return TruncatedSeries(self.ring, self.terms, order)

    def invert(self) -> "TruncatedSeries":
        """Multiplicative inverse modulo (x)^known_order."""
        c0 = self.constant_term()
        if not c0:
            raise NonUnit("cannot invert a series with zero constant term")
        field = self.ring.field
        order = self.known_order
        inv0 = field.one / c0
        out = {self.ring.zero_exp(): inv0}
        # degree-by-degree recurrence: g_e = -1/f0 * sum_{0 < d <= e} f_d g_{e-d}
        nonconst = [(e, c) for e, c in self.terms.items() if total_degree(e) > 0]
        for d in range(1, order):
            for e in exponents_of_degree(self.ring.nvars, d):
                acc = None
                for fe, fc in nonconst:
                    if exp_divides(fe, e):
                        g = out.get(exp_sub(e, fe))
                        if g is not None:
                            term = fc * g
                            acc = term if acc is None else acc + term
                if acc is not None and acc:
                    out[e] = -inv0 * acc
        return TruncatedSeries(self.ring, out, order)

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedSeries)
            and self.ring == other.ring
            and self.known_order == other.known_order
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.ring, self.known_order, tuple(self.sorted_terms())))

    def __repr__(self):
        return format_terms(self, order=self.known_order)


# ---------------------------------------------------------------------------
# substitution


def substitute(f, images) -> TruncatedSeries:
    """Compose ``f`` (Polynomial or TruncatedSeries) with series images.

    One image per variable of f's ring; all images share one target ring.
    When f is a proper series every image must have valuation >= 1, and the
    result's order is additionally capped by known_order(f) * min valuation,
    the degree from which f's unknown tail could contribute.
    """
    images = list(images)
    if len(images) != f.ring.nvars:
        raise TruncasError("one image per variable is required")
    if not images:
        raise TruncasError("substitution needs at least one variable")
    target = images[0].ring
    for g in images:
        if not isinstance(g, TruncatedSeries):
            raise TruncasError("substitute expects TruncatedSeries images")
        if g.ring != target:
            raise RingMismatch("images live in different rings")
    if f.ring.field != target.field:
        raise RingMismatch("field mismatch between f and its images")

    cap = None
    if isinstance(f, TruncatedSeries):
        vals = [g.valuation() for g in images]
        if any(v == 0 for v in vals):
            raise CompositionIllDefined(
                "series substitution requires images without constant term"
            )
        cap = f.known_order * min(vals)

    big = max(g.known_order for g in images) + 1
    powers = [{} for _ in images]

    def power(i, k) -> TruncatedSeries:
        cache = powers[i]
        if k not in cache:
            if k == 0:
                cache[k] = TruncatedSeries.const(target, 1, big)
            else:
                cache[k] = power(i, k - 1) * images[i]
        return cache[k]

    result = None
    for e, c in f.terms.items():
        term = TruncatedSeries.const(target, c, big)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        result = term if result is None else result + term
    if result is None:
        result = TruncatedSeries.zero(target, big)
    order = result.known_order if cap is None else min(result.known_order, cap)
    # constant terms keep the zero-variable degree bound meaningless; order
    # stays what the arithmetic derived in that case
    return TruncatedSeries(target, result.terms, order)


# ---------------------------------------------------------------------------
# canonical text form


def _coeff_str(c) -> str:
    if isinstance(c, Fraction):
        return str(c)
    return str(c)  # FpElement prints its residue


def format_terms(obj, order: int = None) -> str:
    """Canonical textual form shared by Polynomial and TruncatedSeries."""
    names = obj.ring.names
    parts = []
    for e, c in obj.sorted_terms():
        factors = []
        for i, k in enumerate(e):
            if k == 1:
                factors.append(names[i])
            elif k > 1:
                factors.append(f"{names[i]}^{k}")
        cs = _coeff_str(c)
        if factors:
            if cs == "1":
                body = "*".join(factors)
            elif cs == "-1":
                body = "-" + "*".join(factors)
            else:
                body = cs + "*" + "*".join(factors)
        else:
            body = cs
        parts.append(body)
    if not parts:
        text = "0" if order is None else ""
    else:
        text = parts[0]
        for p in parts[1:]:
            if p.startswith("-"):
                text += " - " + p[1:]
            else:
                text += " + " + p
    if order is not None:
        marker = f"O(deg {order})"
        text = marker if not text else f"{text} + {marker}"
    return text

"""Sparse exact linear algebra over the coefficient fields.

Rows are dicts keyed by integer column ranks.  ``RowReducer`` maintains a
reduced row echelon form incrementally: each inserted row is reduced against
the current pivots, and a fresh pivot is back-eliminated from every stored
row, so a pivot column appears in exactly one row.  Pivot selection is the
lowest-ranked nonzero column, which keeps every result deterministic; the
caller controls elimination priorities entirely through its column ranking.
"""

from __future__ import annotations

from .errors import TruncasError


class RowReducer:
    """Incremental reduced row echelon form over an exact field."""

    def __init__(self, field, track_combinations: bool = False):
        self.field = field
        self.pivots = {}  # pivot col -> row dict, pivot coefficient 1
        self.rhs = {}  # pivot col -> right-hand side element
        self.col_usage = {}  # col -> set of pivot cols whose rows touch it
        self.track = track_combinations
        self.combos = {}  # pivot col -> {original row index: coeff}
        self.n_inserted = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def _use(self, pivot_col, row):
        for col in row:
            self.col_usage.setdefault(col, set()).add(pivot_col)

    def reduce(self, row, rhs=None, combo=None):
        """Reduce a row (and rhs/combo) against current pivots; returns new objects."""
        row = dict(row)
        if rhs is None:
            rhs = self.field.zero
        while True:
            hit = None
            for col in row:
                if col in self.pivots and (hit is None or col < hit):
                    hit = col
            if hit is None:
                return row, rhs, combo
            factor = row[hit]
            for col, val in self.pivots[hit].items():
                cur = row.get(col)
                nxt = -factor * val if cur is None else cur - factor * val
                if nxt:
                    row[col] = nxt
                elif cur is not None:
                    del row[col]
            rhs = rhs - factor * self.rhs[hit]
            if combo is not None:
                for idx, val in self.combos[hit].items():
                    cur = combo.get(idx)
                    nxt = -factor * val if cur is None else cur - factor * val
                    if nxt:
                        combo[idx] = nxt
                    elif cur is not None:
                        del combo[idx]

    def add(self, row, rhs=None) -> str:
        """Insert a row.  Returns 'pivot', 'dependent' or 'inconsistent'."""
        if rhs is None:
            rhs = self.field.zero
        combo = {self.n_inserted: self.field.one} if self.track else None
        self.n_inserted += 1
        row, rhs, combo = self.reduce(row, rhs, combo)
        if not row:
            return "dependent" if not rhs else "inconsistent"
        pivot = min(row)
        lead = row[pivot]
        if lead != self.field.one:
            inv = self.field.one / lead
            row = {c: inv * v for c, v in row.items()}
            rhs = inv * rhs
            if combo is not None:
                combo = {i: inv * v for i, v in combo.items()}
        users = sorted(self.col_usage.get(pivot, ()))
        for pcol in users:
            prow = self.pivots[pcol]
            factor = prow.get(pivot)
            if not factor:
                continue
            removed = []
            for col, val in row.items():
                cur = prow.get(col)
                nxt = -factor * val if cur is None else cur - factor * val
                if nxt:
                    prow[col] = nxt
                    if cur is None:
                        self.col_usage.setdefault(col, set()).add(pcol)
                elif cur is not None:
                    del prow[col]
                    removed.append(col)
            self.rhs[pcol] = self.rhs[pcol] - factor * rhs
            if combo is not None:
                pc = self.combos[pcol]
                for idx, val in combo.items():
                    cur = pc.get(idx)
                    nxt = -factor * val if cur is None else cur - factor * val
                    if nxt:
                        pc[idx] = nxt
                    elif cur is not None:
                        del pc[idx]
            for col in removed:
                use = self.col_usage.get(col)
                if use is not None:
                    use.discard(pcol)
                    if not use:
                        del self.col_usage[col]
        self.pivots[pivot] = row
        self.rhs[pivot] = rhs
        if combo is not None:
            self.combos[pivot] = combo
        self._use(pivot, row)
        return "pivot"

    def member(self, row) -> bool:
        reduced, _, _ = self.reduce(row)
        return not reduced

    def express(self, row):
        """Coefficients writing ``row`` as a combination of inserted rows, or None."""
        if not self.track:
            raise TruncasError("reducer was not tracking combinations")
        reduced, _, combo = self.reduce(row, None, {})
        if reduced:
            return None
        return {i: -v for i, v in combo.items()}

    def pivot_columns(self):
        return sorted(self.pivots)

    def particular_solution(self):
        """Free columns set to zero; pivot columns read off the rhs."""
        return {col: self.rhs[col] for col in self.pivots if self.rhs[col]}

    def nullspace_basis(self, all_columns):
        """One basis vector per free column, over the given column universe."""
        basis = []
        for free in all_columns:
            if free in self.pivots:
                continue
            vec = {free: self.field.one}
            for pcol in self.col_usage.get(free, ()):
                coeff = self.pivots[pcol].get(free)
                if coeff:
                    vec[pcol] = -coeff
            basis.append(vec)
        return basis

    def canonical_rows(self):
        """The stored rows, ordered by pivot column."""
        return [dict(self.pivots[c]) for c in sorted(self.pivots)]


def span_reducer(rows, field) -> RowReducer:
    red = RowReducer(field)
    for row in rows:
        red.add(row)
    return red


def spans_equal(rows_a, rows_b, field) -> bool:
    ra = span_reducer(rows_a, field)
    for row in rows_b:
        if not ra.member(row):
            return False
    rb = span_reducer(rows_b, field)
    return ra.rank == rb.rank


def intersect_spans(rows_a, rows_b, ncols: int, field):
    """Basis of span(A) ∩ span(B) by the doubled-column construction."""
    red = RowReducer(field)
    for row in rows_a:
        red.add({**{c: v for c, v in row.items()}, **{c + ncols: v for c, v in row.items()}})
    for row in rows_b:
        red.add(dict(row))
    out = []
    for pcol in sorted(red.pivots):
        if pcol >= ncols:
            out.append({c - ncols: v for c, v in red.pivots[pcol].items()})
    return out

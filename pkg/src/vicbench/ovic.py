"""The column-adapted morphism calculus.

Morphisms between free modules come in pairs (f', f'') with f'' o f' = id;
``f''`` surjections with pivot columns in normal form ("column-adapted")
form a subcategory whose members are pinned down by f'' plus the free rows
of the embedded f'.  This module provides pivot-set computation, the
column-adapted predicate, composition, canonical splittings, the
factorisation of an arbitrary pair through a column-adapted one, and
reconstruction from free rows.

Index conventions: pivot sets, distinguished positions (k, j) and row/column
indices exposed by this module are **1-based**, matching the usual way the
calculus is written; raw matrix access stays 0-based.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .errors import (
    BadShape,
    InvalidMorphism,
    NoSolution,
    NotColumnAdapted,
    NotSurjective,
    RankMismatch,
)
from .rings import FiniteRing, RMatrix, matrix_invertible
from .wedderburn import AWEmbedding, CornerField


class DistinguishedIndexer:
    """Bijection between distinguished labels (k, j) and standard indices.

    For ambient rank m the standard index space is {1, .., mu*m}; super-block
    t (0-based) holds, for each block k in order, the run of mu_k positions
    labelled (k, t*mu_k + 1 .. t*mu_k + mu_k).
    """

    def __init__(self, mu: Sequence[int], size: int):
        self.mu = tuple(mu)
        self.size = size
        self.mu_total = sum(self.mu)
        self.prefix = []
        acc = 0
        for m in self.mu:
            self.prefix.append(acc)
            acc += m

    def std(self, k: int, j: int) -> int:
        """Standard index (1-based) of v(k)_j; k is 1-based."""
        mk = self.mu[k - 1]
        t, r = divmod(j - 1, mk)
        return t * self.mu_total + self.prefix[k - 1] + r + 1

    def label(self, s: int) -> tuple[int, int]:
        """(k, j) label (both 1-based) of standard index s."""
        t, p = divmod(s - 1, self.mu_total)
        for k, (off, mk) in enumerate(zip(self.prefix, self.mu), start=1):
            if off <= p < off + mk:
                return k, t * mk + (p - off) + 1
        raise BadShape(f"standard index {s} out of range")

    def block_positions(self, k: int) -> list[int]:
        """All standard indices carrying block-k labels, in j order."""
        mk = self.mu[k - 1]
        return [self.std(k, j) for j in range(1, mk * self.size + 1)]


def _block_rows(emb: AWEmbedding, big: RMatrix, k: int,
                row_size: int, col_size: int) -> list[list[int]]:
    """Block k of a Phi-image matrix: rows/cols restricted to block-k labels."""
    ridx = DistinguishedIndexer(emb.mu, row_size)
    cidx = DistinguishedIndexer(emb.mu, col_size)
    rows = ridx.block_positions(k)
    cols = cidx.block_positions(k)
    return [[big.get(r - 1, c - 1) for c in cols] for r in rows]


def _greedy_pivots(rows: list[list[int]], field: CornerField) -> list[int]:
    """Left-to-right pivot columns (1-based) of a matrix over a corner field.

    Greedy selection returns the lexicographically smallest basis-indexing
    subset of the column set.
    """
    if not rows:
        return []
    work = [list(r) for r in rows]
    m = len(work)
    ncols = len(work[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        pr = next((i for i in range(r, m) if work[i][c] != field.zero), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        inv = field.inv(work[r][c])
        work[r] = [field.mul(inv, e) for e in work[r]]
        for i in range(m):
            if i != r and work[i][c] != field.zero:
                coef = work[i][c]
                work[i] = [field.sub(e, field.mul(coef, p))
                           for e, p in zip(work[i], work[r])]
        pivots.append(c + 1)
        r += 1
    return pivots


def s_function(h: RMatrix, emb: AWEmbedding) -> tuple[tuple[int, ...], ...]:
    """Per-block pivot column sets of the reduced matrix of h (1-based).

    ``h`` is d x n, i.e. a map R^n -> R^d; block k of the reduced embedded
    matrix is row-reduced over the corner field D_k and must have full row
    rank mu_k * d (else the map is not surjective).
    """
    d, n = h.rows, h.cols
    hbar = h.reduce(emb.qdata)
    big = emb.phi_bar_on_matrices(hbar)
    out = []
    for k in range(1, emb.aw.q + 1):
        rows = _block_rows(emb, big, k, d, n)
        field = emb.corner_fields[k - 1]
        pivots = _greedy_pivots(rows, field)
        need = emb.mu[k - 1] * d
        if len(pivots) != need:
            raise NotSurjective(
                f"block {k} has rank {len(pivots)}, needs {need}"
            )
        out.append(tuple(pivots))
    return tuple(out)


def is_column_adapted(h: RMatrix, emb: AWEmbedding) -> bool:
    """Surjective, and every pivot column of Phi(h) is exactly the matching
    block-identity indicator column (which forces the reduced map into
    column-adapted form as well)."""
    return column_adapted_s_sets(h, emb) is not None


def column_adapted_s_sets(h: RMatrix, emb: AWEmbedding
                          ) -> Optional[tuple[tuple[int, ...], ...]]:
    """Pivot sets when h is column-adapted, else None."""
    try:
        s_sets = s_function(h, emb)
    except NotSurjective:
        return None
    return s_sets if _pivot_columns_exact(h, emb, s_sets) else None


def _pivot_columns_exact(h: RMatrix, emb: AWEmbedding,
                         s_sets: Sequence[Sequence[int]]) -> bool:
    d, n = h.rows, h.cols
    big = emb.phi_on_matrices(h)
    ring = emb.ring
    ridx = DistinguishedIndexer(emb.mu, d)
    cidx = DistinguishedIndexer(emb.mu, n)
    rows_total = emb.mu_total * d
    for k, pivots in enumerate(s_sets, start=1):
        e1 = emb.aw.idempotents[k - 1][0]
        for i, j in enumerate(pivots, start=1):
            col = big.col(cidx.std(k, j) - 1)
            target_row = ridx.std(k, i) - 1
            for r in range(rows_total):
                want = e1 if r == target_row else ring.zero
                if col[r] != want:
                    return False
    return True


class VicMorphism:
    """A pair (f', f'') with f'' o f' = id: a split injection R^d -> R^n."""

    __slots__ = ("ring", "d", "n", "f_prime", "f_dprime", "_hash")

    def __init__(self, f_prime: RMatrix, f_dprime: RMatrix, check: bool = True):
        ring = f_prime.ring
        if f_dprime.ring is not ring:
            raise InvalidMorphism("component rings differ")
        d, n = f_prime.cols, f_prime.rows
        if (f_dprime.rows, f_dprime.cols) != (d, n):
            raise InvalidMorphism(
                f"shape mismatch: f' is {n}x{d}, f'' is {f_dprime.rows}x{f_dprime.cols}"
            )
        if check and f_dprime.mul(f_prime) != RMatrix.identity(ring, d):
            raise InvalidMorphism("f'' o f' is not the identity")
        self.ring = ring
        self.d = d
        self.n = n
        self.f_prime = f_prime
        self.f_dprime = f_dprime
        self._hash = hash((id(ring), d, n, f_prime.entries, f_dprime.entries))

    @classmethod
    def identity(cls, ring: FiniteRing, n: int) -> "VicMorphism":
        ident = RMatrix.identity(ring, n)
        return cls(ident, ident, check=False)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, VicMorphism)
            and self.ring is other.ring
            and self.d == other.d
            and self.n == other.n
            and self.f_prime.entries == other.f_prime.entries
            and self.f_dprime.entries == other.f_dprime.entries
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return (f"{type(self).__name__}({self.ring.name}, {self.d}->{self.n}, "
                f"f'={self.f_prime.to_lists()}, f''={self.f_dprime.to_lists()})")

    def to_payload(self) -> dict:
        return {
            "ring": self.ring.name,
            "d": self.d,
            "n": self.n,
            "f_prime": self.f_prime.to_lists(),
            "f_dprime": self.f_dprime.to_lists(),
        }


class OvicMorphism(VicMorphism):
    """A VicMorphism whose splitting component is column-adapted.

    Carries the embedding, the cached pivot sets of f'', and a cached sort
    key implementing the stratum-wise total order.
    """

    __slots__ = ("emb", "s_sets", "_order_key")

    def __init__(self, f_prime: RMatrix, f_dprime: RMatrix, emb: AWEmbedding,
                 s_sets=None, check: bool = True):
        super().__init__(f_prime, f_dprime, check=check)
        self.emb = emb
        if s_sets is None:
            s_sets = s_function(f_dprime, emb)
            if check and not _pivot_columns_exact(f_dprime, emb, s_sets):
                raise NotColumnAdapted("f'' is not column-adapted")
        self.s_sets = tuple(tuple(s) for s in s_sets)
        self._order_key = None

    @classmethod
    def from_vic(cls, f: VicMorphism, emb: AWEmbedding) -> "OvicMorphism":
        return cls(f.f_prime, f.f_dprime, emb)

    @classmethod
    def identity(cls, ring_or_emb, n: int) -> "OvicMorphism":
        emb = ring_or_emb
        ident = RMatrix.identity(emb.ring, n)
        mu = emb.mu
        s_sets = tuple(
            tuple(range(1, mu[k] * n + 1)) for k in range(emb.aw.q)
        )
        return cls(ident, ident, emb, s_sets=s_sets, check=False)

    @property
    def order_key(self) -> tuple:
        """(rank, pivot tuples, Phi(f'') columns, free rows of Phi(f'));
        lexicographic comparison of these keys is the stratum total order."""
        if self._order_key is None:
            big_dd = self.emb.phi_on_matrices(self.f_dprime)
            cols = tuple(big_dd.col(c) for c in range(big_dd.cols))
            big_p = self.emb.phi_on_matrices(self.f_prime)
            free, _ = free_rows(self)
            frees = tuple(big_p.row(r - 1) for r in free)
            self._order_key = (self.n, self.s_sets, cols, frees)
        return self._order_key


def free_rows(f: OvicMorphism) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(free, dependent) standard row indices (1-based) of Phi(f').

    A row is dependent when its distinguished label (k, i) has i in the
    pivot set of f'' for block k.
    """
    ridx = DistinguishedIndexer(f.emb.mu, f.n)
    dependent = sorted(
        ridx.std(k, i)
        for k, pivots in enumerate(f.s_sets, start=1)
        for i in pivots
    )
    dep_set = set(dependent)
    total = f.emb.mu_total * f.n
    free = tuple(s for s in range(1, total + 1) if s not in dep_set)
    return free, tuple(dependent)


def compose_vic(g: VicMorphism, f: VicMorphism) -> VicMorphism:
    """g o f: composite (g' f', f'' g'').

    When both factors are column-adapted the composite is too, and its pivot
    sets are those of g'' re-indexed through the pivots of f''.
    """
    if f.n != g.d:
        raise RankMismatch(f"cannot compose {g.d}->{g.n} after {f.d}->{f.n}")
    if f.ring is not g.ring:
        raise RankMismatch("morphisms over different rings")
    fp = g.f_prime.mul(f.f_prime)
    fdp = f.f_dprime.mul(g.f_dprime)
    if isinstance(g, OvicMorphism) and isinstance(f, OvicMorphism):
        s_sets = tuple(
            tuple(g_pivots[j - 1] for j in f_pivots)
            for g_pivots, f_pivots in zip(g.s_sets, f.s_sets)
        )
        return OvicMorphism(fp, fdp, g.emb, s_sets=s_sets, check=False)
    return VicMorphism(fp, fdp, check=False)


def canonical_splitting(s_sets: Sequence[Sequence[int]], emb: AWEmbedding,
                        m: int, n: int) -> RMatrix:
    """The m x n splitting determined by pivot data alone.

    For every column-adapted h: R^m -> R^n with pivot sets ``s_sets``,
    h o (this matrix) = id.
    """
    mu = emb.mu
    if len(s_sets) != emb.aw.q:
        raise BadShape(f"need {emb.aw.q} pivot sets")
    for k, pivots in enumerate(s_sets):
        if len(pivots) != mu[k] * n:
            raise BadShape(f"pivot set {k + 1} must have {mu[k] * n} entries")
        if any(not 1 <= j <= mu[k] * m for j in pivots):
            raise BadShape(f"pivot set {k + 1} out of range for ambient rank {m}")
    ring = emb.ring
    mu_total = emb.mu_total
    ridx = DistinguishedIndexer(mu, m)
    cidx = DistinguishedIndexer(mu, n)
    entries = [ring.zero] * (mu_total * m * mu_total * n)
    big_cols = mu_total * n
    for k, pivots in enumerate(s_sets, start=1):
        e1 = emb.aw.idempotents[k - 1][0]
        for i, j in enumerate(pivots, start=1):
            r = ridx.std(k, j) - 1
            c = cidx.std(k, i) - 1
            entries[r * big_cols + c] = e1
    big = RMatrix(ring, mu_total * m, big_cols, entries)
    return emb.recover(big)


def factor_vic(f: VicMorphism, emb: AWEmbedding) -> tuple[VicMorphism, "OvicMorphism"]:
    """Split f as f2 o f1 with f1 an automorphism pair and f2 column-adapted.

    The change of basis g collects the pivot columns of Phi(f''); its
    invertibility is certified through the quotient (reduction invertible
    implies invertible, with an explicit two-sided inverse)."""
    ring = f.ring
    d, n = f.d, f.n
    s_sets = s_function(f.f_dprime, emb)
    big = emb.phi_on_matrices(f.f_dprime)
    mu_total = emb.mu_total
    ridx = DistinguishedIndexer(emb.mu, d)
    cidx = DistinguishedIndexer(emb.mu, n)
    entries = [ring.zero] * (mu_total * d * mu_total * d)
    big_cols = mu_total * d
    for k, pivots in enumerate(s_sets, start=1):
        for i, j in enumerate(pivots, start=1):
            src_col = cidx.std(k, j) - 1
            dst_col = ridx.std(k, i) - 1
            for r in range(mu_total * d):
                entries[r * big_cols + dst_col] = big.get(r, src_col)
    g = emb.recover(RMatrix(ring, mu_total * d, big_cols, entries))
    ok, g_inv = matrix_invertible(g, emb.qdata)
    if not ok:
        raise InvalidMorphism("pivot-column matrix not invertible")  # bug guard
    f1 = VicMorphism(g_inv, g, check=False)
    f2 = OvicMorphism(f.f_prime.mul(g), g_inv.mul(f.f_dprime), emb,
                      s_sets=s_sets, check=False)
    if compose_vic(f2, f1) != VicMorphism(f.f_prime, f.f_dprime, check=False):
        raise InvalidMorphism("factorisation does not recompose")  # bug guard
    return f1, f2


def extract_free_fragment(f: OvicMorphism) -> list[tuple[int, ...]]:
    """Rows of Phi(f') at the free positions, in increasing standard index."""
    big = f.emb.phi_on_matrices(f.f_prime)
    free, _ = free_rows(f)
    return [big.row(r - 1) for r in free]


def reconstruct_from_free(f_dprime: RMatrix, fragment: Sequence[Sequence[int]],
                          emb: AWEmbedding) -> OvicMorphism:
    """The unique column-adapted morphism with the given f'' and free rows.

    Dependent rows fall out of Phi(f'') Phi(f') = Phi(id) by direct
    substitution: each pivot column of Phi(f'') carries a block identity, so
    the dependent row under it equals the identity-pattern row minus the
    free-row contributions.
    """
    try:
        s_sets = s_function(f_dprime, emb)
    except NotSurjective as exc:
        raise NotColumnAdapted(str(exc))
    if not _pivot_columns_exact(f_dprime, emb, s_sets):
        raise NotColumnAdapted("f'' is not column-adapted")
    ring = emb.ring
    d, n = f_dprime.rows, f_dprime.cols
    mu_total = emb.mu_total
    big_a = emb.phi_on_matrices(f_dprime)          # mu*d x mu*n
    ident = emb.identity_pattern(d)                # mu*d x mu*d
    ridx = DistinguishedIndexer(emb.mu, n)
    dep_rows = sorted(
        (ridx.std(k, pivots[i - 1]), k, i)
        for k, pivots in enumerate(s_sets, start=1)
        for i in range(1, len(pivots) + 1)
    )
    free = [s for s in range(1, mu_total * n + 1)
            if s not in {r for r, _, _ in dep_rows}]
    if len(fragment) != len(free):
        raise NoSolution(f"fragment has {len(fragment)} rows, need {len(free)}")
    width = mu_total * d
    rows: list[Optional[list[int]]] = [None] * (mu_total * n)
    for s, frag_row in zip(free, fragment):
        row = [int(v) for v in frag_row]
        if len(row) != width:
            raise NoSolution(f"fragment rows must have {width} entries")
        rows[s - 1] = row
    # dependent row at pivot (k, i): the identity-pattern row for the target
    # label (k, i) minus sum over free rows s of A[target, s] * X[s, :]
    didx = DistinguishedIndexer(emb.mu, d)
    for s_row, k, i in dep_rows:
        target = didx.std(k, i) - 1
        acc = list(ident.row(target))
        for s in free:
            coeff = big_a.get(target, s - 1)
            if coeff == ring.zero:
                continue
            frag_row = rows[s - 1]
            for c in range(width):
                acc[c] = ring.sub(acc[c], ring.mul(coeff, frag_row[c]))
        rows[s_row - 1] = acc
    big_x = RMatrix(ring, mu_total * n, width, [v for r in rows for v in r])
    f_prime = emb.recover(big_x)
    out = OvicMorphism(f_prime, f_dprime, emb, s_sets=s_sets, check=False)
    if f_dprime.mul(f_prime) != RMatrix.identity(ring, d):
        raise NoSolution("fragment inconsistent with the splitting identity")  # bug guard
    return out

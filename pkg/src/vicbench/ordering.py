"""Orders on the union of morphism strata P(d) = U_n Hom(R^d, R^n).

Four layers: a stratum-respecting total order (rank, then pivot sets, then
splitting columns, then free rows); a partial order generated by duplicating
a non-pivot column; an embedding of morphisms into words over a finite
alphabet (dependent rows masked out) ordered by a dominance-constrained
subsequence relation; and, for each covering move, an explicit morphism that
completes f to g and is monotone on everything below f.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Optional, Sequence

from .errors import (
    InvalidChain,
    InvalidMove,
    SearchBudgetExceeded,
    SourceMismatch,
)
from .ovic import (
    DistinguishedIndexer,
    OvicMorphism,
    canonical_splitting,
    compose_vic,
    free_rows,
    reconstruct_from_free,
    s_function,
)
from .rings import RMatrix, matvec

LT, EQ, GT = -1, 0, 1
_COMPARE_NAMES = {LT: "LT", EQ: "EQ", GT: "GT"}


def compare_name(value: int) -> str:
    return _COMPARE_NAMES[value]


def total_compare(f: OvicMorphism, g: OvicMorphism) -> int:
    """LT/EQ/GT under the cascade: rank, pivot-set tuple, columns of the
    embedded splitting, free rows of the embedded injection."""
    if f.ring is not g.ring or f.d != g.d:
        raise SourceMismatch(f"cannot compare source ranks {f.d} and {g.d}")
    a, b = f.order_key, g.order_key
    return LT if a < b else (GT if a > b else EQ)


@dataclass(frozen=True)
class InsertionMove:
    """Duplicate column ``a`` of the splitting, placing the copy after
    position ``b``; both 1-based with a <= b <= rank."""

    a: int
    b: int


def pivot_standard_columns(f: OvicMorphism) -> frozenset:
    cidx = DistinguishedIndexer(f.emb.mu, f.n)
    return frozenset(
        cidx.std(k, j)
        for k, pivots in enumerate(f.s_sets, start=1)
        for j in pivots
    )


def valid_moves(f: OvicMorphism) -> list[InsertionMove]:
    """All moves whose duplicated column is pivot-free."""
    mu = f.emb.mu_total
    pivot_std = pivot_standard_columns(f)
    out = []
    for a in range(1, f.n + 1):
        band = range((a - 1) * mu + 1, a * mu + 1)
        if any(s in pivot_std for s in band):
            continue
        out.extend(InsertionMove(a, b) for b in range(a, f.n + 1))
    return out


def insert_successor(h: OvicMorphism, move: InsertionMove) -> OvicMorphism:
    """Apply one column-duplication move; dependent rows are recomputed so
    the splitting identity survives."""
    a, b = move.a, move.b
    if not (1 <= a <= b <= h.n):
        raise InvalidMove(f"move ({a}, {b}) out of range for rank {h.n}")
    mu = h.emb.mu_total
    pivot_std = pivot_standard_columns(h)
    if any(s in pivot_std for s in range((a - 1) * mu + 1, a * mu + 1)):
        raise InvalidMove(f"column {a} is a pivot column")
    g_dprime = h.f_dprime.insert_col(b, h.f_dprime.col(a - 1))
    draft_prime = h.f_prime.insert_row(b, h.f_prime.row(a - 1))
    s_sets = s_function(g_dprime, h.emb)
    big = h.emb.phi_on_matrices(draft_prime)
    ridx = DistinguishedIndexer(h.emb.mu, h.n + 1)
    dep = {
        ridx.std(k, i)
        for k, pivots in enumerate(s_sets, start=1)
        for i in pivots
    }
    fragment = [big.row(r - 1) for r in range(1, mu * (h.n + 1) + 1) if r not in dep]
    return reconstruct_from_free(g_dprime, fragment, h.emb)


def _column_values(f: OvicMorphism) -> list[tuple[int, ...]]:
    return [f.f_dprime.col(c) for c in range(f.n)]


def _is_subsequence(short: Sequence, long: Sequence) -> bool:
    it = iter(long)
    return all(any(x == y for y in it) for x in short)


def partial_leq(f: OvicMorphism, g: OvicMorphism,
                node_cap: int = 10 ** 6) -> Optional[list[InsertionMove]]:
    """A witnessing move chain from f to g, or None.

    Backtracking over all valid moves, ordered by (a, b), memoised on
    intermediate morphisms.  Raises SearchBudgetExceeded past ``node_cap``
    expansions (an "unknown" signal, never a wrong answer).
    """
    if f.ring is not g.ring or f.d != g.d:
        raise SourceMismatch("different source data")
    if f == g:
        return []
    if f.n >= g.n:
        return None
    g_cols = _column_values(g)
    if not _is_subsequence(_column_values(f), g_cols):
        return None
    failed: set[OvicMorphism] = set()
    nodes = 0

    def dfs(h: OvicMorphism) -> Optional[list[InsertionMove]]:
        nonlocal nodes
        if h.n == g.n:
            return [] if h == g else None
        if h in failed:
            return None
        for move in valid_moves(h):
            nodes += 1
            if nodes > node_cap:
                raise SearchBudgetExceeded(f"gave up after {node_cap} nodes")
            h2 = insert_successor(h, move)
            if not _is_subsequence(_column_values(h2), g_cols):
                continue
            rest = dfs(h2)
            if rest is not None:
                return [move] + rest
        failed.add(h)
        return None

    return dfs(f)


# ---------------------------------------------------------------------------
# word embedding
# ---------------------------------------------------------------------------

CLUB = None  # sentinel for masked (dependent-row) entries


@dataclass(frozen=True)
class Word:
    """Image of a morphism: one letter per target-rank slot, each letter a
    (masked row band of the embedded injection, splitting column) pair."""

    letters: tuple

    def __len__(self) -> int:
        return len(self.letters)

    def to_payload(self) -> list:
        return [
            {
                "m1": [["club" if v is CLUB else v for v in row] for row in m1],
                "m2": list(m2),
            }
            for m1, m2 in self.letters
        ]


def iota(f: OvicMorphism) -> Word:
    """One letter per column: the mu-row band of Phi(f') with dependent rows
    masked, paired with the matching column of f''."""
    mu = f.emb.mu_total
    big = f.emb.phi_on_matrices(f.f_prime)
    _, dependent = free_rows(f)
    dep = set(dependent)
    letters = []
    for t in range(f.n):
        band = []
        for r in range(t * mu + 1, (t + 1) * mu + 1):
            if r in dep:
                band.append(tuple([CLUB] * big.cols))
            else:
                band.append(big.row(r - 1))
        letters.append((tuple(band), f.f_dprime.col(t)))
    return Word(tuple(letters))


def word_leq_letters(s: Sequence[Hashable], t: Sequence[Hashable]) -> bool:
    """Subsequence embedding with dominance: s embeds into t strictly
    increasingly, and every prefix letter of t is matched by an equal letter
    embedded at or before it."""
    n = len(s)
    prefix_sets: list[set] = [set()]
    for letter in s:
        prefix_sets.append(prefix_sets[-1] | {letter})
    reach = {0}
    for letter in t:
        nxt = set()
        for i in reach:
            if letter in prefix_sets[i]:
                nxt.add(i)                      # skip: already dominated
            if i < n and s[i] == letter:
                nxt.add(i + 1)                  # match here
        reach = nxt
        if not reach:
            return False
    return n in reach


def word_leq(s: Word, t: Word) -> bool:
    return word_leq_letters(s.letters, t.letters)


# ---------------------------------------------------------------------------
# the completion morphism
# ---------------------------------------------------------------------------

def elementary_phi(f: OvicMorphism, move: InsertionMove) -> OvicMorphism:
    """The rank-raising morphism attached to one move on f.

    Writing chat for the canonical-splitting image of the duplicated column:
    the splitting part is the identity with chat inserted after position b;
    the injection part is the identity with chat subtracted from column a and
    a unit row inserted after row b.
    """
    a, b = move.a, move.b
    if not (1 <= a <= b <= f.n):
        raise InvalidMove(f"move ({a}, {b}) out of range for rank {f.n}")
    ring = f.ring
    n = f.n
    psi = canonical_splitting(f.s_sets, f.emb, m=n, n=f.d)
    chat = matvec(ring, psi, f.f_dprime.col(a - 1))
    ident = RMatrix.identity(ring, n)
    phi_dprime = ident.insert_col(b, chat)
    rows = [list(ident.row(r)) for r in range(n)]
    for r in range(n):
        rows[r][a - 1] = ring.sub(rows[r][a - 1], chat[r])
    unit_row = [ring.one if c == a - 1 else ring.zero for c in range(n)]
    rows.insert(b, unit_row)
    phi_prime = RMatrix.from_rows(ring, rows, cols=n)
    return OvicMorphism(phi_prime, phi_dprime, f.emb)


def build_phi(f: OvicMorphism, chain: Sequence[InsertionMove],
              expect: Optional[OvicMorphism] = None) -> OvicMorphism:
    """Compose one elementary step per move; the result phi satisfies
    phi o f = (chain applied to f), and h < f implies phi o h < phi o f."""
    current = f
    phi = OvicMorphism.identity(f.emb, f.n)
    for move in chain:
        try:
            step = elementary_phi(current, move)
            nxt = insert_successor(current, move)
        except InvalidMove as exc:
            raise InvalidChain(str(exc))
        if compose_vic(step, current) != nxt:
            raise InvalidChain(f"step {move} does not reproduce the move")  # bug guard
        phi = compose_vic(step, phi)
        current = nxt
    if expect is not None and current != expect:
        raise InvalidChain("chain does not lead to the expected morphism")
    return phi


# ---------------------------------------------------------------------------
# strata
# ---------------------------------------------------------------------------

class GeneratorPool:
    """Lazily enumerated, order-sorted strata of Hom(R^d, R^n)."""

    def __init__(self, emb, d: int, budget: int = 10 ** 6):
        self.emb = emb
        self.d = d
        self.budget = budget
        self._strata: dict[int, tuple[OvicMorphism, ...]] = {}

    def stratum(self, n: int) -> tuple[OvicMorphism, ...]:
        if n not in self._strata:
            from .noether import enumerate_ovic

            self._strata[n] = tuple(enumerate_ovic(self.emb, self.d, n,
                                                   budget=self.budget))
        return self._strata[n]

    def up_to(self, n_max: int) -> list[OvicMorphism]:
        out = []
        for n in range(n_max + 1):
            out.extend(self.stratum(n))
        return out


def iota_reflection_counterexamples(pool: GeneratorPool, max_n: int,
                                    node_cap: int = 10 ** 5) -> list[tuple]:
    """Search for pairs where the word order holds but the insertion order
    does not.  Reflection is not asserted anywhere; this is a probe."""
    out = []
    for n in range(max_n + 1):
        for m in range(n, max_n + 1):
            for f in pool.stratum(n):
                for g in pool.stratum(m):
                    if f == g:
                        continue
                    if word_leq(iota(f), iota(g)):
                        try:
                            chain = partial_leq(f, g, node_cap=node_cap)
                        except SearchBudgetExceeded:
                            continue
                        if chain is None:
                            out.append((f, g))
    return out

"""Finite rings presented by explicit addition/multiplication tables.

Elements are integers ``0..size-1``; all structure (units, radical,
quotients, matrices) is derived from the two tables.  Tables are validated
exhaustively at construction time (vectorised with numpy, chunked so that
rings of a few hundred elements stay cheap).

Index conventions: ring elements, matrix entry coordinates and vector
coordinates are 0-based throughout this module.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import re
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import (
    BadShape,
    InvalidTables,
    NotSquare,
    SizeCapExceeded,
)

DEFAULT_SIZE_CAP = 65536

# chunk rows for the N^3 axiom checks so intermediates stay ~few MB
_CHUNK = 16


def _as_table(table, size: int, what: str) -> tuple[tuple[int, ...], ...]:
    rows = tuple(tuple(int(v) for v in row) for row in table)
    if len(rows) != size or any(len(r) != size for r in rows):
        raise InvalidTables(f"{what}_shape", detail=f"expected {size}x{size}")
    return rows


class FiniteRing:
    """A unital ring on ``{0, .., size-1}`` with table-defined operations.

    Instances are immutable after construction and hash/compare by identity;
    use :meth:`same_tables` for structural comparison.
    """

    def __init__(
        self,
        name: str,
        size: int,
        zero: int,
        one: int,
        add,
        mul,
        labels: Optional[Sequence[str]] = None,
        validate: bool = True,
        size_cap: int = DEFAULT_SIZE_CAP,
    ):
        if size <= 0:
            raise InvalidTables("size", detail="size must be positive")
        if size > size_cap:
            raise SizeCapExceeded(f"ring size {size} exceeds cap {size_cap}")
        self.name = name
        self.size = size
        self.zero = int(zero)
        self.one = int(one)
        self._add = _as_table(add, size, "add")
        self._mul = _as_table(mul, size, "mul")
        if labels is None:
            labels = tuple(str(i) for i in range(size))
        self.labels = tuple(str(s) for s in labels)
        if len(self.labels) != size:
            raise InvalidTables("labels_shape")
        if validate:
            _validate_tables(self)
        self._neg = tuple(self._add[a].index(self.zero) for a in range(size))
        self._unit_cache: Optional[tuple[Optional[int], ...]] = None
        # lazily built structure caches (radical / quotient / AW embedding)
        self._radical = None
        self._quotient = None
        self._aw = None

    # -- scalar operations ------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self._neg[b]]

    def elements(self) -> range:
        return range(self.size)

    @property
    def add_table(self) -> tuple[tuple[int, ...], ...]:
        return self._add

    @property
    def mul_table(self) -> tuple[tuple[int, ...], ...]:
        return self._mul

    # -- units ------------------------------------------------------------

    def _units(self) -> tuple[Optional[int], ...]:
        """Per element: a two-sided inverse, or None."""
        if self._unit_cache is None:
            mul = np.asarray(self._mul, dtype=np.int32)
            hit = mul == self.one
            two_sided = hit & hit.T
            found = two_sided.any(axis=1)
            witness = two_sided.argmax(axis=1)
            self._unit_cache = tuple(
                int(witness[x]) if found[x] else None for x in range(self.size)
            )
        return self._unit_cache

    def is_unit(self, x: int) -> bool:
        return self._units()[x] is not None

    def inv(self, x: int) -> Optional[int]:
        return self._units()[x]

    # -- presentation -----------------------------------------------------

    def label(self, x: int) -> str:
        return self.labels[x]

    def __repr__(self) -> str:
        return f"FiniteRing({self.name!r}, size={self.size})"

    def same_tables(self, other: "FiniteRing") -> bool:
        return (
            self.size == other.size
            and self.zero == other.zero
            and self.one == other.one
            and self._add == other._add
            and self._mul == other._mul
        )

    # -- serialization ----------------------------------------------------

    def to_payload(self) -> dict:
        return {
            "name": self.name,
            "size": self.size,
            "zero": self.zero,
            "one": self.one,
            "add": [list(r) for r in self._add],
            "mul": [list(r) for r in self._mul],
            "labels": list(self.labels),
        }

    def content_hash(self) -> str:
        core = {
            "size": self.size,
            "zero": self.zero,
            "one": self.one,
            "add": [list(r) for r in self._add],
            "mul": [list(r) for r in self._mul],
        }
        blob = json.dumps(core, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @classmethod
    def from_payload(cls, payload: dict, validate: bool = True) -> "FiniteRing":
        return cls(
            name=payload.get("name", "ring"),
            size=payload["size"],
            zero=payload["zero"],
            one=payload["one"],
            add=payload["add"],
            mul=payload["mul"],
            labels=payload.get("labels"),
            validate=validate,
        )


def _first_witness(bad: np.ndarray, offset: int = 0):
    idx = np.argwhere(bad)
    if idx.size == 0:
        return None
    w = idx[0].tolist()
    if offset:
        w[0] += offset
    return tuple(int(v) for v in w)


def _validate_tables(ring: FiniteRing) -> None:
    n = ring.size
    add = np.asarray(ring._add, dtype=np.int32)
    mul = np.asarray(ring._mul, dtype=np.int32)
    for what, tab in (("add", add), ("mul", mul)):
        if tab.min() < 0 or tab.max() >= n:
            raise InvalidTables(f"{what}_entry_range", _first_witness((tab < 0) | (tab >= n)))
    if not (0 <= ring.zero < n and 0 <= ring.one < n):
        raise InvalidTables("identity_index_range")
    if n > 1 and ring.zero == ring.one:
        raise InvalidTables("zero_equals_one")

    idx = np.arange(n, dtype=np.int32)
    if not np.array_equal(add[ring.zero], idx):
        raise InvalidTables("add_identity", _first_witness(add[ring.zero] != idx))
    if not np.array_equal(add, add.T):
        raise InvalidTables("add_commutative", _first_witness(add != add.T))
    if not (add == ring.zero).any(axis=1).all():
        missing = int(np.argmin((add == ring.zero).any(axis=1)))
        raise InvalidTables("add_inverse", (missing,))
    if not np.array_equal(mul[ring.one], idx):
        raise InvalidTables("mul_left_identity", _first_witness(mul[ring.one] != idx))
    if not np.array_equal(mul[:, ring.one], idx):
        raise InvalidTables("mul_right_identity", _first_witness(mul[:, ring.one] != idx))

    # chunked N^3 checks: associativity of both tables, distributivity
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        a = np.arange(lo, hi, dtype=np.int32)

        lhs = add[add[a, :], :]
        rhs = add[a[:, None, None], add[None, :, :]]
        if not np.array_equal(lhs, rhs):
            raise InvalidTables("add_associative", _first_witness(lhs != rhs, lo))

        lhs = mul[mul[a, :], :]
        rhs = mul[a[:, None, None], mul[None, :, :]]
        if not np.array_equal(lhs, rhs):
            raise InvalidTables("mul_associative", _first_witness(lhs != rhs, lo))

        p = mul[a, :]  # p[i, t] = a_i * t
        lhs = mul[a[:, None, None], add[None, :, :]]
        rhs = add[p[:, :, None], p[:, None, :]]
        if not np.array_equal(lhs, rhs):
            raise InvalidTables("left_distributive", _first_witness(lhs != rhs, lo))

        lhs = mul[add[a, :], :]
        rhs = add[p[:, None, :], mul[None, :, :]]
        if not np.array_equal(lhs, rhs):
            raise InvalidTables("right_distributive", _first_witness(lhs != rhs, lo))


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def zmod(n: int, name: Optional[str] = None) -> FiniteRing:
    """Z/nZ with elements 0..n-1."""
    if n <= 0:
        raise SizeCapExceeded("modulus must be positive")
    add = [[(a + b) % n for b in range(n)] for a in range(n)]
    mul = [[(a * b) % n for b in range(n)] for a in range(n)]
    return FiniteRing(name or f"Z{n}", n, 0, 1, add, mul)


def _encode_digits(digits: Sequence[int], base: int) -> int:
    # first digit most significant (row-major mixed radix)
    v = 0
    for d in digits:
        v = v * base + d
    return v


def _decode_digits(value: int, base: int, width: int) -> tuple[int, ...]:
    out = []
    for _ in range(width):
        value, d = divmod(value, base)
        out.append(d)
    return tuple(reversed(out))


def _check_cap(size: int, cap: int, what: str) -> None:
    if size > cap:
        raise SizeCapExceeded(f"{what} would have {size} elements (cap {cap})")


def matrix_ring(base: FiniteRing, k: int, name: Optional[str] = None,
                size_cap: int = DEFAULT_SIZE_CAP) -> FiniteRing:
    """Full k x k matrix ring over ``base``.

    Element index encodes the k*k entries in row-major mixed-radix order,
    entry (0,0) most significant.
    """
    if k <= 0:
        raise BadShape("matrix size must be positive")
    size = base.size ** (k * k)
    _check_cap(size, size_cap, "matrix ring")
    n2 = k * k
    all_mats = [_decode_digits(v, base.size, n2) for v in range(size)]
    badd, bmul, bs = base._add, base._mul, base.size

    def mat_add(x, y):
        return tuple(badd[a][b] for a, b in zip(x, y))

    def mat_mul(x, y):
        out = []
        for i in range(k):
            for j in range(k):
                acc = base.zero
                for t in range(k):
                    acc = badd[acc][bmul[x[i * k + t]][y[t * k + j]]]
                out.append(acc)
        return tuple(out)

    add = [[_encode_digits(mat_add(x, y), bs) for y in all_mats] for x in all_mats]
    mul = [[_encode_digits(mat_mul(x, y), bs) for y in all_mats] for x in all_mats]
    zero = 0
    one = _encode_digits(
        tuple(base.one if i == j else base.zero for i in range(k) for j in range(k)), bs
    )
    labels = ["[" + ";".join(",".join(base.label(m[i * k + j]) for j in range(k))
                             for i in range(k)) + "]" for m in all_mats]
    return FiniteRing(name or f"M{k}({base.name})", size, zero, one, add, mul, labels)


def upper_triangular(base: FiniteRing, k: int, name: Optional[str] = None,
                     size_cap: int = DEFAULT_SIZE_CAP) -> FiniteRing:
    """Upper-triangular k x k matrices over ``base``.

    Index encodes the k(k+1)/2 entries (i,j), i<=j, in row-major order,
    first position most significant.
    """
    if k <= 0:
        raise BadShape("matrix size must be positive")
    positions = [(i, j) for i in range(k) for j in range(i, k)]
    width = len(positions)
    size = base.size ** width
    _check_cap(size, size_cap, "upper triangular ring")
    pos_index = {p: t for t, p in enumerate(positions)}
    all_mats = [_decode_digits(v, base.size, width) for v in range(size)]
    badd, bmul, bs = base._add, base._mul, base.size

    def entry(x, i, j):
        return x[pos_index[(i, j)]] if i <= j else base.zero

    def mat_add(x, y):
        return tuple(badd[a][b] for a, b in zip(x, y))

    def mat_mul(x, y):
        out = []
        for i, j in positions:
            acc = base.zero
            for t in range(i, j + 1):
                acc = badd[acc][bmul[entry(x, i, t)][entry(y, t, j)]]
            out.append(acc)
        return tuple(out)

    add = [[_encode_digits(mat_add(x, y), bs) for y in all_mats] for x in all_mats]
    mul = [[_encode_digits(mat_mul(x, y), bs) for y in all_mats] for x in all_mats]
    one = _encode_digits(
        tuple(base.one if i == j else base.zero for (i, j) in positions), bs
    )
    labels = ["[" + ";".join(",".join(base.label(entry(m, i, j)) for j in range(k))
                             for i in range(k)) + "]" for m in all_mats]
    return FiniteRing(name or f"T{k}({base.name})", size, 0, one, add, mul, labels)


def product_ring(r1: FiniteRing, r2: FiniteRing, name: Optional[str] = None,
                 size_cap: int = DEFAULT_SIZE_CAP) -> FiniteRing:
    """Direct product; index (a, b) -> a * |r2| + b."""
    size = r1.size * r2.size
    _check_cap(size, size_cap, "product ring")
    n2 = r2.size

    def enc(a, b):
        return a * n2 + b

    add = [[enc(r1._add[a1][b1], r2._add[a2][b2])
            for b1 in range(r1.size) for b2 in range(r2.size)]
           for a1 in range(r1.size) for a2 in range(r2.size)]
    mul = [[enc(r1._mul[a1][b1], r2._mul[a2][b2])
            for b1 in range(r1.size) for b2 in range(r2.size)]
           for a1 in range(r1.size) for a2 in range(r2.size)]
    labels = [f"({r1.label(a)}|{r2.label(b)})"
              for a in range(r1.size) for b in range(r2.size)]
    return FiniteRing(name or f"{r1.name}x{r2.name}", size, enc(r1.zero, r2.zero),
                      enc(r1.one, r2.one), add, mul, labels)


def _validate_group_table(table: Sequence[Sequence[int]]) -> int:
    g = len(table)
    rows = [list(r) for r in table]
    if any(len(r) != g for r in rows):
        raise InvalidTables("group_table_shape")
    identity = None
    for e in range(g):
        if all(rows[e][x] == x == rows[x][e] for x in range(g)):
            identity = e
            break
    if identity is None:
        raise InvalidTables("group_identity")
    for a in range(g):
        for b in range(g):
            for c in range(g):
                if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
                    raise InvalidTables("group_associative", (a, b, c))
    for a in range(g):
        if identity not in rows[a]:
            raise InvalidTables("group_inverse", (a,))
    return identity


def group_ring(base: FiniteRing, group_table: Sequence[Sequence[int]],
               name: Optional[str] = None,
               elem_names: Optional[Sequence[str]] = None,
               size_cap: int = DEFAULT_SIZE_CAP) -> FiniteRing:
    """Group algebra ``base[G]`` for G given by a multiplication table.

    An element is a coefficient vector indexed by group elements; the ring
    index encodes it mixed-radix with the coefficient of group element 0
    most significant.
    """
    g = len(group_table)
    _validate_group_table(group_table)
    size = base.size ** g
    _check_cap(size, size_cap, "group ring")
    if elem_names is None:
        elem_names = [f"g{i}" for i in range(g)]
    all_vecs = [_decode_digits(v, base.size, g) for v in range(size)]
    badd, bmul, bs = base._add, base._mul, base.size
    gt = [list(r) for r in group_table]
    identity = _validate_group_table(group_table)

    def vec_add(x, y):
        return tuple(badd[a][b] for a, b in zip(x, y))

    def vec_mul(x, y):
        out = [base.zero] * g
        for a in range(g):
            xa = x[a]
            if xa == base.zero:
                continue
            for b in range(g):
                yb = y[b]
                if yb == base.zero:
                    continue
                t = gt[a][b]
                out[t] = badd[out[t]][bmul[xa][yb]]
        return tuple(out)

    add = [[_encode_digits(vec_add(x, y), bs) for y in all_vecs] for x in all_vecs]
    mul = [[_encode_digits(vec_mul(x, y), bs) for y in all_vecs] for x in all_vecs]
    one_vec = tuple(base.one if i == identity else base.zero for i in range(g))

    def vec_label(v):
        parts = [
            elem_names[i] if base.label(c) == "1" else f"{base.label(c)}*{elem_names[i]}"
            for i, c in enumerate(v) if c != base.zero
        ]
        return "+".join(parts) if parts else "0"

    labels = [vec_label(v) for v in all_vecs]
    return FiniteRing(name or f"{base.name}[G{g}]", size, 0,
                      _encode_digits(one_vec, bs), add, mul, labels)


def cyclic_group_table(n: int) -> list[list[int]]:
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def symmetric_group_table(n: int) -> tuple[list[list[int]], list[str]]:
    """Multiplication table of S_n; permutations sorted lexicographically,
    composition (p*q)(x) = p(q(x)).  Returns (table, cycle-notation names)."""
    perms = sorted(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(p[q[x]] for x in range(n))] for q in perms] for p in perms]

    def cycles(p):
        seen, out = set(), []
        for s in range(n):
            if s in seen or p[s] == s:
                continue
            cyc, x = [s], p[s]
            while x != s:
                cyc.append(x)
                seen.add(x)
                x = p[x]
            seen.add(s)
            out.append("(" + "".join(str(v + 1) for v in cyc) + ")")
        return "".join(out) if out else "e"

    return table, [cycles(p) for p in perms]


# ---------------------------------------------------------------------------
# built-in rings and the textual spec grammar
# ---------------------------------------------------------------------------

def _build_f2s3() -> FiniteRing:
    table, names = symmetric_group_table(3)
    return group_ring(zmod(2), table, name="F2S3", elem_names=names)


_BUILTIN_BUILDERS = {
    "F2": lambda: zmod(2, name="F2"),
    "F3": lambda: zmod(3, name="F3"),
    "Z4": lambda: zmod(4),
    "Z8": lambda: zmod(8),
    "F2C2": lambda: group_ring(zmod(2), cyclic_group_table(2), name="F2C2",
                               elem_names=["e", "g"]),
    "T2F2": lambda: upper_triangular(zmod(2), 2, name="T2F2"),
    "M2F2": lambda: matrix_ring(zmod(2), 2, name="M2F2"),
    "F2S3": _build_f2s3,
}

BUILTIN_NAMES = tuple(_BUILTIN_BUILDERS)

_builtin_cache: dict[str, FiniteRing] = {}


def builtin_ring(name: str) -> FiniteRing:
    if name not in _BUILTIN_BUILDERS:
        raise KeyError(f"unknown builtin ring {name!r}; known: {', '.join(BUILTIN_NAMES)}")
    if name not in _builtin_cache:
        _builtin_cache[name] = _BUILTIN_BUILDERS[name]()
    return _builtin_cache[name]


_SPEC_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9]*|\d+|[(),])")


def _tokenize_spec(text: str) -> list[str]:
    out, pos = [], 0
    while pos < len(text):
        m = _SPEC_TOKEN.match(text, pos)
        if not m:
            raise BadShape(f"cannot parse ring spec at {text[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def build_ring(spec, size_cap: int = DEFAULT_SIZE_CAP) -> FiniteRing:
    """Build a ring from explicit tables (dict payload) or an expression.

    Expression grammar: builtin name | ``zmod(n)`` | ``matrix_ring(S,k)`` |
    ``upper_triangular(S,k)`` | ``product(S1,S2)`` | ``group_ring(S,cN)`` |
    ``group_ring(S,sN)``.
    """
    if isinstance(spec, dict):
        ring = FiniteRing.from_payload(spec)
        if ring.size > size_cap:
            raise SizeCapExceeded(f"ring size {ring.size} exceeds cap {size_cap}")
        return ring
    tokens = _tokenize_spec(str(spec))

    def parse(i: int) -> tuple[FiniteRing, int]:
        tok = tokens[i]
        if tok in _BUILTIN_BUILDERS and (i + 1 == len(tokens) or tokens[i + 1] != "("):
            return builtin_ring(tok), i + 1
        if tok == "zmod":
            n, j = _expect_int_args(i + 1)
            return zmod(n), j
        if tok in ("matrix_ring", "upper_triangular"):
            if tokens[i + 1] != "(":
                raise BadShape(f"expected '(' after {tok}")
            inner, j = parse(i + 2)
            if tokens[j] != "," or not tokens[j + 1].isdigit() or tokens[j + 2] != ")":
                raise BadShape(f"expected ',k)' in {tok}(...)")
            k = int(tokens[j + 1])
            fn = matrix_ring if tok == "matrix_ring" else upper_triangular
            return fn(inner, k, size_cap=size_cap), j + 3
        if tok == "product":
            if tokens[i + 1] != "(":
                raise BadShape("expected '(' after product")
            left, j = parse(i + 2)
            if tokens[j] != ",":
                raise BadShape("expected ',' in product(...)")
            right, j = parse(j + 1)
            if tokens[j] != ")":
                raise BadShape("expected ')' in product(...)")
            return product_ring(left, right, size_cap=size_cap), j + 1
        if tok == "group_ring":
            if tokens[i + 1] != "(":
                raise BadShape("expected '(' after group_ring")
            inner, j = parse(i + 2)
            if tokens[j] != ",":
                raise BadShape("expected ',' in group_ring(...)")
            gname = tokens[j + 1].lower()
            if tokens[j + 2] != ")":
                raise BadShape("expected ')' in group_ring(...)")
            m = re.fullmatch(r"([cs])(\d+)", gname)
            if not m:
                raise BadShape(f"unknown group {gname!r} (use cN or sN)")
            order = int(m.group(2))
            if m.group(1) == "c":
                table, names = cyclic_group_table(order), None
            else:
                table, names = symmetric_group_table(order)
            return group_ring(inner, table, elem_names=names, size_cap=size_cap), j + 3
        raise BadShape(f"unknown ring spec token {tok!r}")

    def _expect_int_args(i: int) -> tuple[int, int]:
        if tokens[i] != "(" or not tokens[i + 1].isdigit() or tokens[i + 2] != ")":
            raise BadShape("expected (n)")
        return int(tokens[i + 1]), i + 3

    ring, end = parse(0)
    if end != len(tokens):
        raise BadShape(f"trailing tokens in ring spec: {tokens[end:]}")
    return ring


# ---------------------------------------------------------------------------
# ideals, the Jacobson radical, quotients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdealSet:
    """A two-sided ideal given by its member set."""

    ring: FiniteRing
    members: frozenset

    @property
    def sorted_members(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))

    def __contains__(self, x: int) -> bool:
        return x in self.members

    def __len__(self) -> int:
        return len(self.members)

    def verify(self) -> None:
        r = self.ring
        mem = self.members
        if r.zero not in mem:
            raise InvalidTables("ideal_zero")
        for a in mem:
            for b in mem:
                if r.add(a, b) not in mem:
                    raise InvalidTables("ideal_add_closed", (a, b))
        for a in mem:
            for x in r.elements():
                if r.mul(x, a) not in mem or r.mul(a, x) not in mem:
                    raise InvalidTables("ideal_mul_closed", (x, a))


def additive_closure(ring: FiniteRing, seed) -> frozenset:
    members = set(seed)
    members.add(ring.zero)
    frontier = list(members)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(members):
                s = ring.add(a, b)
                if s not in members:
                    members.add(s)
                    nxt.append(s)
        frontier = nxt
    return frozenset(members)


def ideal_closure(ring: FiniteRing, generators) -> IdealSet:
    """Two-sided ideal generated by ``generators``."""
    members = set(additive_closure(ring, generators))
    changed = True
    while changed:
        changed = False
        new = set()
        for a in members:
            for x in ring.elements():
                for v in (ring.mul(x, a), ring.mul(a, x)):
                    if v not in members:
                        new.add(v)
        if new:
            members = set(additive_closure(ring, members | new))
            changed = True
    return IdealSet(ring, frozenset(members))


def ideal_product(ring: FiniteRing, left: frozenset, right: frozenset) -> frozenset:
    prods = {ring.mul(a, b) for a in left for b in right}
    return additive_closure(ring, prods)


def nilpotency_index(ring: FiniteRing, ideal: IdealSet) -> Optional[int]:
    """Least k with I^k = 0, or None if I is not nilpotent."""
    zero_only = frozenset({ring.zero})
    power = frozenset(ideal.members)
    seen = []
    k = 1
    while True:
        if power == zero_only:
            return k
        if power in seen:
            return None
        seen.append(power)
        power = ideal_product(ring, power, ideal.members)
        k += 1


def jacobson_radical(ring: FiniteRing, spot_check: bool = True,
                     spot_check_limit: int = 16) -> IdealSet:
    """All y such that 1 - x*y*z is a unit for every x, z.

    Also verifies the Artinian characterisation: the result is a nilpotent
    ideal, and (spot check) adjoining any element outside it destroys
    nilpotency.
    """
    if ring._radical is not None:
        return ring._radical
    mul = np.asarray(ring._mul, dtype=np.int32)
    units = np.asarray([ring.is_unit(x) for x in ring.elements()], dtype=bool)
    neg = np.asarray(ring._neg, dtype=np.int32)
    one_minus = np.asarray(ring._add, dtype=np.int32)[ring.one][neg]
    members = []
    for y in ring.elements():
        xy = mul[:, y]
        xyz = mul[xy][:, :]
        if units[one_minus[xyz]].all():
            members.append(y)
    radical = IdealSet(ring, frozenset(members))
    radical.verify()
    k = nilpotency_index(ring, radical)
    if k is None or k > ring.size:
        raise InvalidTables("radical_nilpotent", detail=f"nilpotency index {k}")
    if spot_check:
        outside = [w for w in ring.elements() if w not in radical.members]
        if ring.size > 64:
            outside = outside[:spot_check_limit]
        for w in outside:
            bigger = ideal_closure(ring, set(radical.members) | {w})
            if nilpotency_index(ring, bigger) is not None:
                raise InvalidTables("radical_maximal", (w,))
    ring._radical = radical
    return radical


@dataclass(frozen=True)
class QuotientData:
    """Quotient of ``source`` by a two-sided ideal, with projection/section."""

    source: FiniteRing
    ideal: IdealSet
    quotient: FiniteRing
    projection: tuple[int, ...]
    section: tuple[int, ...]
    nilpotency: int

    def project(self, x: int) -> int:
        return self.projection[x]

    def lift(self, q: int) -> int:
        return self.section[q]


def quotient_by_radical(ring: FiniteRing) -> QuotientData:
    """R/J(R) with smallest-index coset representatives."""
    if ring._quotient is not None:
        return ring._quotient
    radical = jacobson_radical(ring)
    k = nilpotency_index(ring, radical)
    jset = radical.sorted_members
    coset_of = {}
    reps = []
    for x in ring.elements():
        if x in coset_of:
            continue
        coset = sorted(ring.add(x, j) for j in jset)
        rep = coset[0]
        for c in coset:
            coset_of[c] = rep
        reps.append(rep)
    reps.sort()
    q_index = {rep: i for i, rep in enumerate(reps)}
    projection = tuple(q_index[coset_of[x]] for x in ring.elements())
    section = tuple(reps)
    qsize = len(reps)
    if qsize * len(jset) != ring.size:
        raise InvalidTables("quotient_fibers")
    q_add = [[projection[ring.add(section[a], section[b])] for b in range(qsize)]
             for a in range(qsize)]
    q_mul = [[projection[ring.mul(section[a], section[b])] for b in range(qsize)]
             for a in range(qsize)]
    quotient = FiniteRing(
        name=f"{ring.name}/J",
        size=qsize,
        zero=projection[ring.zero],
        one=projection[ring.one],
        add=q_add,
        mul=q_mul,
        labels=[ring.label(r) for r in reps],
    )
    # well-definedness: operations must commute with the projection everywhere
    for a in ring.elements():
        pa = projection[a]
        for b in ring.elements():
            if projection[ring.add(a, b)] != q_add[pa][projection[b]]:
                raise InvalidTables("quotient_add_well_defined", (a, b))
            if projection[ring.mul(a, b)] != q_mul[pa][projection[b]]:
                raise InvalidTables("quotient_mul_well_defined", (a, b))
    qdata = QuotientData(ring, radical, quotient, projection, section, k)
    qrad = _definitional_radical(quotient)
    if qrad != {quotient.zero}:
        raise InvalidTables("quotient_radical_nonzero")
    ring._quotient = qdata
    return qdata


def _definitional_radical(ring: FiniteRing) -> set[int]:
    out = set()
    for y in ring.elements():
        if all(
            ring.is_unit(ring.sub(ring.one, ring.mul(ring.mul(x, y), z)))
            for x in ring.elements()
            for z in ring.elements()
        ):
            out.add(y)
    return out


# ---------------------------------------------------------------------------
# matrices over a table ring
# ---------------------------------------------------------------------------

class RMatrix:
    """Dense matrix over a FiniteRing; entries row-major, immutable."""

    __slots__ = ("ring", "rows", "cols", "entries", "_hash")

    def __init__(self, ring: FiniteRing, rows: int, cols: int, entries):
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self.entries = tuple(int(v) for v in entries)
        if len(self.entries) != rows * cols:
            raise BadShape(f"{rows}x{cols} matrix needs {rows*cols} entries")
        self._hash = hash((id(ring), rows, cols, self.entries))

    @classmethod
    def from_rows(cls, ring: FiniteRing, rows: Sequence[Sequence[int]],
                  cols: Optional[int] = None) -> "RMatrix":
        rows = [list(r) for r in rows]
        n = len(rows)
        m = len(rows[0]) if rows else (0 if cols is None else cols)
        return cls(ring, n, m, [v for r in rows for v in r])

    @classmethod
    def identity(cls, ring: FiniteRing, n: int) -> "RMatrix":
        return cls(ring, n, n,
                   [ring.one if i == j else ring.zero for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, ring: FiniteRing, rows: int, cols: int) -> "RMatrix":
        return cls(ring, rows, cols, [ring.zero] * (rows * cols))

    def get(self, r: int, c: int) -> int:
        return self.entries[r * self.cols + c]

    def row(self, r: int) -> tuple[int, ...]:
        return self.entries[r * self.cols:(r + 1) * self.cols]

    def col(self, c: int) -> tuple[int, ...]:
        return self.entries[c::self.cols]

    def row_list(self) -> list[tuple[int, ...]]:
        return [self.row(r) for r in range(self.rows)]

    def to_lists(self) -> list[list[int]]:
        return [list(self.row(r)) for r in range(self.rows)]

    def mul(self, other: "RMatrix") -> "RMatrix":
        if self.cols != other.rows or self.ring is not other.ring:
            raise BadShape(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        add, mul = self.ring._add, self.ring._mul
        zero = self.ring.zero
        n, k, m = self.rows, self.cols, other.cols
        se, oe = self.entries, other.entries
        out = []
        for i in range(n):
            base = i * k
            for j in range(m):
                acc = zero
                for t in range(k):
                    acc = add[acc][mul[se[base + t]][oe[t * m + j]]]
                out.append(acc)
        return RMatrix(self.ring, n, m, out)

    def add(self, other: "RMatrix") -> "RMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols) or self.ring is not other.ring:
            raise BadShape("shape mismatch in add")
        tab = self.ring._add
        return RMatrix(self.ring, self.rows, self.cols,
                       [tab[a][b] for a, b in zip(self.entries, other.entries)])

    def sub(self, other: "RMatrix") -> "RMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols) or self.ring is not other.ring:
            raise BadShape("shape mismatch in sub")
        r = self.ring
        return RMatrix(r, self.rows, self.cols,
                       [r.sub(a, b) for a, b in zip(self.entries, other.entries)])

    def scale_right(self, x: int) -> "RMatrix":
        mul = self.ring._mul
        return RMatrix(self.ring, self.rows, self.cols, [mul[e][x] for e in self.entries])

    def transpose(self) -> "RMatrix":
        return RMatrix(self.ring, self.cols, self.rows,
                       [self.get(r, c) for c in range(self.cols) for r in range(self.rows)])

    def reduce(self, q: QuotientData) -> "RMatrix":
        proj = q.projection
        return RMatrix(q.quotient, self.rows, self.cols, [proj[e] for e in self.entries])

    def lift(self, q: QuotientData) -> "RMatrix":
        sec = q.section
        return RMatrix(q.source, self.rows, self.cols, [sec[e] for e in self.entries])

    def insert_col(self, pos: int, values: Sequence[int]) -> "RMatrix":
        """New matrix with ``values`` inserted as column index ``pos`` (0-based)."""
        rows = [list(self.row(r)) for r in range(self.rows)]
        for r, v in zip(rows, values):
            r.insert(pos, int(v))
        return RMatrix.from_rows(self.ring, rows, cols=self.cols + 1)

    def insert_row(self, pos: int, values: Sequence[int]) -> "RMatrix":
        rows = [list(self.row(r)) for r in range(self.rows)]
        rows.insert(pos, [int(v) for v in values])
        return RMatrix.from_rows(self.ring, rows, cols=self.cols)

    def drop_col(self, pos: int) -> "RMatrix":
        rows = [list(self.row(r)) for r in range(self.rows)]
        for r in rows:
            del r[pos]
        return RMatrix.from_rows(self.ring, rows, cols=self.cols - 1)

    def drop_row(self, pos: int) -> "RMatrix":
        rows = [list(self.row(r)) for r in range(self.rows)]
        del rows[pos]
        return RMatrix.from_rows(self.ring, rows, cols=self.cols)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RMatrix)
            and self.ring is other.ring
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"RMatrix({self.ring.name}, {self.rows}x{self.cols}, {self.to_lists()})"


def iter_vectors(ring: FiniteRing, n: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(ring.elements(), repeat=n)


def matvec(ring: FiniteRing, m: RMatrix, vec: Sequence[int]) -> tuple[int, ...]:
    add, mul = ring._add, ring._mul
    zero = ring.zero
    out = []
    e = m.entries
    for i in range(m.rows):
        base = i * m.cols
        acc = zero
        for t in range(m.cols):
            acc = add[acc][mul[e[base + t]][vec[t]]]
        out.append(acc)
    return tuple(out)


def matrix_invertible(m: RMatrix, q: QuotientData) -> tuple[bool, Optional[RMatrix]]:
    """Two-sided invertibility over the source ring.

    Decides via invertibility of the reduction over the semisimple quotient
    (exhaustive preimage scan), then lifts an actual inverse by Newton
    iteration X <- X(2I - MX) and verifies both products.
    """
    if m.rows != m.cols:
        raise NotSquare(f"{m.rows}x{m.cols} matrix")
    ring = m.ring
    if ring is not q.source:
        raise BadShape("matrix ring does not match quotient source")
    n = m.rows
    if n == 0:
        return True, RMatrix(ring, 0, 0, [])
    qr = q.quotient
    mbar = m.reduce(q)
    # scan the quotient vector space once: kernel triviality decides
    # invertibility, and the preimages of the standard basis assemble
    # an inverse of the reduction
    target_cols: dict[tuple[int, ...], tuple[int, ...]] = {}
    basis = [tuple(qr.one if i == j else qr.zero for i in range(n)) for j in range(n)]
    kernel_nontrivial = False
    zero_vec = tuple([qr.zero] * n)
    for vec in iter_vectors(qr, n):
        image = matvec(qr, mbar, vec)
        if image == zero_vec and vec != zero_vec:
            kernel_nontrivial = True
            break
        if image not in target_cols:
            target_cols[image] = vec
    if kernel_nontrivial or any(b not in target_cols for b in basis):
        return False, None
    inv_bar = RMatrix(qr, n, n,
                      [target_cols[basis[j]][i] for i in range(n) for j in range(n)])
    ident_bar = RMatrix.identity(qr, n)
    if mbar.mul(inv_bar) != ident_bar or inv_bar.mul(mbar) != ident_bar:
        raise RuntimeError("quotient inverse failed verification")  # bug guard
    # Newton lifting: error lives in Mat(J) and squares each step
    x = inv_bar.lift(q)
    ident = RMatrix.identity(ring, n)
    two_ident = ident.add(ident)
    steps = 0
    max_steps = max(1, q.nilpotency).bit_length() + 2
    while m.mul(x) != ident:
        x = x.mul(two_ident.sub(m.mul(x)))
        steps += 1
        if steps > max_steps:
            raise RuntimeError("inverse lifting did not converge")  # bug guard
    if x.mul(m) != ident:
        raise RuntimeError("one-sided inverse over a finite ring")  # bug guard
    return True, x

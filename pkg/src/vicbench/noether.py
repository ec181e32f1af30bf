"""Degree-truncated engine over representable modules.

P(d) in degree n is the free module on Hom(R^d, R^n); a submodule is grown
from generators by applying every morphism into each degree up to a horizon,
and stored as fully reduced echelon bases with pivots on the order-largest
basis morphism.  Coefficients are exact: prime fields or rationals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    BudgetExceeded,
    CounterexampleFound,
    DegreeMismatch,
    HorizonExceeded,
    ZeroElement,
)
from .ovic import (
    OvicMorphism,
    VicMorphism,
    canonical_splitting,
    column_adapted_s_sets,
    compose_vic,
    factor_vic,
    is_column_adapted,
)
from .rings import RMatrix, iter_vectors, matvec
from .wedderburn import AWEmbedding

MAX_PRIME = 97


# ---------------------------------------------------------------------------
# coefficient fields
# ---------------------------------------------------------------------------

class PrimeField:
    """F_p for p prime (p <= 97); elements are ints 0..p-1."""

    def __init__(self, p: int):
        if p < 2 or p > MAX_PRIME or any(p % q == 0 for q in range(2, p)):
            raise ValueError(f"need a prime <= {MAX_PRIME}, got {p}")
        self.p = p
        self.name = f"F{p}"
        self.zero = 0
        self.one = 1

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        return pow(a, self.p - 2, self.p)

    def from_int(self, n: int):
        return n % self.p

    def parse(self, text) -> int:
        return int(text) % self.p

    def format(self, a) -> str:
        return str(a)


class RationalField:
    """Exact rationals via fractions.Fraction."""

    name = "Q"
    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return 1 / a

    def from_int(self, n: int):
        return Fraction(n)

    def parse(self, text) -> Fraction:
        return Fraction(str(text))

    def format(self, a) -> str:
        return str(a)


def parse_field(spec: str):
    spec = spec.strip()
    if spec in ("Q", "QQ"):
        return RationalField()
    if spec.startswith("F") and spec[1:].isdigit():
        return PrimeField(int(spec[1:]))
    raise ValueError(f"unknown coefficient field {spec!r} (use Fp or Q)")


# ---------------------------------------------------------------------------
# morphism enumeration
# ---------------------------------------------------------------------------

_hom_cache: dict = {}


def enumerate_ovic(emb: AWEmbedding, d: int, n: int,
                   budget: int = 10 ** 6) -> list[OvicMorphism]:
    """All column-adapted morphisms d -> n, sorted by the total order.

    Candidate splittings are filtered by the column-adapted predicate; the
    injections attached to each are the canonical splitting shifted by
    kernel columns.
    """
    ring = emb.ring
    if d < 0 or n < 0:
        raise BudgetExceeded("negative rank")
    if d > 0 and n >= d and (ring.size ** (d * n) > budget or ring.size ** n > budget):
        raise BudgetExceeded(
            f"{ring.size}^{d * n} candidate splittings exceed budget {budget}"
        )
    key = (id(emb), d, n, "ovic")
    if key in _hom_cache:
        return _hom_cache[key]
    if d == 0:
        out = [OvicMorphism(RMatrix(ring, n, 0, []), RMatrix(ring, 0, n, []),
                            emb, s_sets=tuple(() for _ in range(emb.aw.q)),
                            check=False)]
        _hom_cache[key] = out
        return out
    if n < d:
        _hom_cache[key] = []
        return []
    zero_vec = tuple([ring.zero] * d)
    out = []
    for entries in itertools.product(ring.elements(), repeat=d * n):
        f_dprime = RMatrix(ring, d, n, entries)
        s_sets = column_adapted_s_sets(f_dprime, emb)
        if s_sets is None:
            continue
        kernel = [v for v in iter_vectors(ring, n)
                  if matvec(ring, f_dprime, v) == zero_vec]
        psi = canonical_splitting(s_sets, emb, m=n, n=d)
        for combo in itertools.product(kernel, repeat=d):
            f_prime = RMatrix(
                ring, n, d,
                [ring.add(psi.get(r, j), combo[j][r])
                 for r in range(n) for j in range(d)],
            )
            out.append(OvicMorphism(f_prime, f_dprime, emb,
                                    s_sets=s_sets, check=False))
    out.sort(key=lambda f: f.order_key)
    _hom_cache[key] = out
    return out


def enumerate_vic(emb: AWEmbedding, d: int, n: int,
                  budget: int = 10 ** 6) -> list[VicMorphism]:
    """All split-injection pairs d -> n, deterministically sorted."""
    ring = emb.ring
    if d == 0:
        return [VicMorphism(RMatrix(ring, n, 0, []), RMatrix(ring, 0, n, []),
                            check=False)]
    if n < d:
        return []
    if ring.size ** (d * n) > budget or ring.size ** n > budget:
        raise BudgetExceeded(f"budget {budget} too small for {d}->{n}")
    ident_cols = [
        tuple(ring.one if i == j else ring.zero for i in range(d))
        for j in range(d)
    ]
    out = []
    for entries in itertools.product(ring.elements(), repeat=d * n):
        f_dprime = RMatrix(ring, d, n, entries)
        per_col = [[] for _ in range(d)]
        for v in iter_vectors(ring, n):
            img = matvec(ring, f_dprime, v)
            for j in range(d):
                if img == ident_cols[j]:
                    per_col[j].append(v)
        if any(not pc for pc in per_col):
            continue
        for combo in itertools.product(*per_col):
            f_prime = RMatrix(ring, n, d,
                              [combo[j][r] for r in range(n) for j in range(d)])
            out.append(VicMorphism(f_prime, f_dprime, check=False))
    out.sort(key=lambda f: (f.f_dprime.entries, f.f_prime.entries))
    return out


# ---------------------------------------------------------------------------
# module elements and the action
# ---------------------------------------------------------------------------

class ModuleElement:
    """A finite combination of degree-n basis morphisms with exact
    coefficients; zero coefficients are never stored."""

    __slots__ = ("d", "degree", "field", "terms")

    def __init__(self, d: int, degree: int, field, terms: dict):
        self.d = d
        self.degree = degree
        self.field = field
        self.terms = {f: c for f, c in terms.items() if c != field.zero}
        for f in self.terms:
            if f.d != d or f.n != degree:
                raise DegreeMismatch(
                    f"term {f.d}->{f.n} inside element of type {d}->{degree}"
                )

    @classmethod
    def monomial(cls, f: OvicMorphism, field, coeff=None) -> "ModuleElement":
        return cls(f.d, f.n, field, {f: field.one if coeff is None else coeff})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def add(self, other: "ModuleElement") -> "ModuleElement":
        if (self.d, self.degree) != (other.d, other.degree):
            raise DegreeMismatch("cannot add across degrees")
        terms = dict(self.terms)
        for f, c in other.terms.items():
            terms[f] = self.field.add(terms.get(f, self.field.zero), c)
        return ModuleElement(self.d, self.degree, self.field, terms)

    def scale(self, c) -> "ModuleElement":
        return ModuleElement(self.d, self.degree, self.field,
                             {f: self.field.mul(c, v) for f, v in self.terms.items()})

    def sub(self, other: "ModuleElement") -> "ModuleElement":
        return self.add(other.scale(self.field.neg(self.field.one)))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ModuleElement)
            and (self.d, self.degree) == (other.d, other.degree)
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.d, self.degree, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        parts = [f"{self.field.format(c)}*({f.f_dprime.to_lists()})"
                 for f, c in sorted(self.terms.items(), key=lambda t: t[0].order_key)]
        return " + ".join(parts) if parts else "0"


def act(phi: OvicMorphism, x: ModuleElement) -> ModuleElement:
    """Post-composition action, extended linearly."""
    if phi.d != x.degree:
        raise DegreeMismatch(f"morphism {phi.d}->{phi.n} cannot act on degree {x.degree}")
    field = x.field
    terms: dict = {}
    for f, c in x.terms.items():
        g = compose_vic(phi, f)
        terms[g] = field.add(terms.get(g, field.zero), c)
    return ModuleElement(x.d, phi.n, field, terms)


def init_term(x: ModuleElement) -> tuple:
    """(coefficient, order-largest morphism) of a nonzero element."""
    if x.is_zero:
        raise ZeroElement("zero element has no initial term")
    lead = max(x.terms, key=lambda f: f.order_key)
    return x.terms[lead], lead


# ---------------------------------------------------------------------------
# echelon bases and spans
# ---------------------------------------------------------------------------

class EchelonBasis:
    """Fully reduced echelon basis keyed by leading morphism.

    Rows are monic; no row's tail contains another row's pivot, so the stored
    form is the canonical reduced basis of the span regardless of insertion
    order.
    """

    def __init__(self, field):
        self.field = field
        self.rows: dict[OvicMorphism, dict] = {}

    @property
    def dim(self) -> int:
        return len(self.rows)

    def leading(self) -> tuple[OvicMorphism, ...]:
        return tuple(sorted(self.rows, key=lambda f: f.order_key))

    def reduce(self, terms: dict) -> tuple[dict, list]:
        """Remainder of ``terms`` against the basis plus the certificate
        [(pivot, coefficient), ...] that was subtracted."""
        field = self.field
        vec = {f: c for f, c in terms.items() if c != field.zero}
        cert = []
        for m in sorted(vec, key=lambda f: f.order_key, reverse=True):
            c = vec.get(m, field.zero)
            if c == field.zero or m not in self.rows:
                continue
            cert.append((m, c))
            for g, rc in self.rows[m].items():
                nv = field.sub(vec.get(g, field.zero), field.mul(c, rc))
                if nv == field.zero:
                    vec.pop(g, None)
                else:
                    vec[g] = nv
        return vec, cert

    def insert(self, terms: dict) -> bool:
        """Reduce and, if a remainder survives, adjoin it (monic) and keep
        every other row reduced against the new pivot."""
        field = self.field
        rem, _ = self.reduce(terms)
        if not rem:
            return False
        lead = max(rem, key=lambda f: f.order_key)
        inv = field.inv(rem[lead])
        new_row = {g: field.mul(inv, c) for g, c in rem.items()}
        self.rows[lead] = new_row
        for pivot, row in list(self.rows.items()):
            if pivot is lead:
                continue
            c = row.get(lead, field.zero)
            if c == field.zero:
                continue
            updated = dict(row)
            for g, rc in new_row.items():
                nv = field.sub(updated.get(g, field.zero), field.mul(c, rc))
                if nv == field.zero:
                    updated.pop(g, None)
                else:
                    updated[g] = nv
            self.rows[pivot] = updated
        return True

    def canonical_rows(self) -> dict:
        return {lead: dict(row) for lead, row in self.rows.items()}


@dataclass
class SubmoduleState:
    """Echelonised spans of a generator set, degree by degree up to a horizon."""

    d: int
    field: object
    emb: AWEmbedding
    generators: tuple
    horizon: int
    bases: dict = dataclass_field(default_factory=dict)

    def dims(self) -> dict[int, int]:
        return {n: self.bases[n].dim for n in sorted(self.bases)}

    def basis_at(self, n: int) -> EchelonBasis:
        if n not in self.bases:
            raise HorizonExceeded(f"degree {n} beyond horizon {self.horizon}")
        return self.bases[n]


def span_to_degree(gens: Sequence[ModuleElement], horizon: int,
                   emb: AWEmbedding, field, d: Optional[int] = None,
                   budget: int = 10 ** 6) -> SubmoduleState:
    """Smallest submodule containing the generators, truncated at ``horizon``.

    Because the action is functorial, single applications of morphisms from
    each generator degree span everything: M_n is generated by act(phi, g)
    over generators g and morphisms phi into degree n.
    """
    gens = tuple(gens)
    if d is None:
        if not gens:
            raise DegreeMismatch("need generators or an explicit source rank")
        d = gens[0].d
    if any(g.d != d for g in gens):
        raise DegreeMismatch("generators disagree on source rank")
    enumerated = 0
    state = SubmoduleState(d, field, emb, gens, horizon)
    for n in range(horizon + 1):
        basis = EchelonBasis(field)
        for g in gens:
            if g.degree > n or g.is_zero:
                continue
            homs = enumerate_ovic(emb, g.degree, n, budget=budget)
            enumerated += len(homs)
            if enumerated > budget:
                raise BudgetExceeded(
                    f"enumerated {enumerated} morphisms, budget {budget}"
                )
            for phi in homs:
                basis.insert(act(phi, g).terms)
        state.bases[n] = basis
    return state


def initial_module_to_degree(state: SubmoduleState, horizon: int) -> dict:
    """Per degree, the sorted leading morphisms of the echelon basis; over a
    field these monic leading terms describe the initial module."""
    if horizon > state.horizon:
        raise HorizonExceeded(f"asked {horizon}, computed {state.horizon}")
    return {n: state.bases[n].leading() for n in range(horizon + 1)}


def membership(state: SubmoduleState, x: ModuleElement) -> tuple[bool, list]:
    """Reduce against the echelon basis at x's degree; the certificate lists
    the (pivot, coefficient) reductions applied."""
    if x.degree > state.horizon:
        raise HorizonExceeded(f"degree {x.degree} beyond horizon {state.horizon}")
    rem, cert = state.bases[x.degree].reduce(x.terms)
    return not rem, cert


def check_endo_generation(emb: AWEmbedding, d: int, horizon: int,
                          budget: int = 10 ** 6) -> dict:
    """Factor every split pair d -> n (n <= horizon) through a column-adapted
    one; each success witnesses that the pair lies in the span of the
    degree-d endomorphisms under the ordered action."""
    per_degree = {}
    for n in range(d, horizon + 1):
        count = 0
        for f in enumerate_vic(emb, d, n, budget=budget):
            f1, f2 = factor_vic(f, emb)
            if f1.d != d or f1.n != d:
                raise CounterexampleFound(f"factor has wrong endomorphism rank at {f}")
            if not is_column_adapted(f2.f_dprime, emb):
                raise CounterexampleFound(f"ordered factor not column-adapted at {f}")
            if compose_vic(f2, f1) != f:
                raise CounterexampleFound(f"factorisation does not recompose at {f}")
            count += 1
        per_degree[n] = count
    return {"d": d, "per_degree": per_degree, "counterexamples": 0}


def count_identity_report(emb: AWEmbedding, d: int, n: int,
                          budget: int = 10 ** 6) -> dict:
    """|Hom_VIC(d,n)| against |GL_d| * |Hom_OVIC(d,n)|: recorded data, not an
    asserted invariant."""
    vic = len(enumerate_vic(emb, d, n, budget=budget))
    ovic = len(enumerate_ovic(emb, d, n, budget=budget))
    gl = len(enumerate_vic(emb, d, d, budget=budget))
    return {
        "d": d,
        "n": n,
        "vic": vic,
        "ovic": ovic,
        "gl": gl,
        "gl_times_ovic": gl * ovic,
        "matches": vic == gl * ovic,
    }

"""JSON file formats: rings, morphisms, generator sets, reports.

Everything is plain JSON; payloads are dumped with sorted keys so identical
inputs always produce byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Optional, Sequence

from .errors import InvalidMorphism, UsageError
from .noether import ModuleElement
from .ovic import OvicMorphism, VicMorphism
from .rings import FiniteRing, RMatrix
from .wedderburn import AWEmbedding


def dump_payload(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_payload(path, payload: dict) -> None:
    Path(path).write_text(dump_payload(payload))


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_ring(path, validate: bool = True) -> FiniteRing:
    payload = json.loads(Path(path).read_text())
    return FiniteRing.from_payload(payload, validate=validate)


def save_ring(path, ring: FiniteRing) -> None:
    write_payload(path, ring.to_payload())


def _check_ring_reference(ref, ring: FiniteRing) -> None:
    if ref is None:
        return
    if ref != ring.name and ref != ring.content_hash():
        raise InvalidMorphism(
            f"morphism file references ring {ref!r}, got {ring.name!r}"
        )


def load_vic_morphism(path, ring: FiniteRing) -> VicMorphism:
    payload = json.loads(Path(path).read_text())
    return vic_from_payload(payload, ring)


def vic_from_payload(payload: dict, ring: FiniteRing) -> VicMorphism:
    _check_ring_reference(payload.get("ring"), ring)
    d, n = int(payload["d"]), int(payload["n"])
    f_prime = RMatrix(ring, n, d, [v for row in payload["f_prime"] for v in row])
    f_dprime = RMatrix(ring, d, n, [v for row in payload["f_dprime"] for v in row])
    return VicMorphism(f_prime, f_dprime)


def ovic_from_payload(payload: dict, emb: AWEmbedding) -> OvicMorphism:
    vic = vic_from_payload(payload, emb.ring)
    return OvicMorphism.from_vic(vic, emb)


def morphism_payload(f: VicMorphism) -> dict:
    return f.to_payload()


def load_generators(path, emb: AWEmbedding, field, d: Optional[int] = None
                    ) -> list[ModuleElement]:
    """Generator file: [{"degree": n, "terms": [{"coeff": c, "morphism": {...}}]}]."""
    payload = json.loads(Path(path).read_text())
    if not isinstance(payload, list):
        raise UsageError("generator file must be a JSON list")
    out = []
    for item in payload:
        degree = int(item["degree"])
        terms = {}
        for term in item["terms"]:
            morph_payload = dict(term["morphism"])
            morph_payload.setdefault("d", d)
            morph_payload.setdefault("n", degree)
            f = ovic_from_payload(morph_payload, emb)
            if f.n != degree:
                raise InvalidMorphism(
                    f"term of rank {f.n} inside degree-{degree} generator"
                )
            coeff = field.parse(term.get("coeff", 1))
            if coeff != field.zero:
                terms[f] = field.add(terms.get(f, field.zero), coeff)
        src_d = next(iter(terms)).d if terms else (d if d is not None else 0)
        out.append(ModuleElement(src_d, degree, field, terms))
    return out


def generators_payload(gens: Sequence[ModuleElement]) -> list:
    out = []
    for g in gens:
        out.append({
            "degree": g.degree,
            "terms": [
                {"coeff": g.field.format(c), "morphism": morphism_payload(f)}
                for f, c in sorted(g.terms.items(), key=lambda t: t[0].order_key)
            ],
        })
    return out

"""JSON documents: parameter files in, model and record reports out.

Integers whose magnitude exceeds 2**53 - 1 are written as decimal strings so
that no reader ever rounds them; readers accept either form.
"""
from __future__ import annotations

import json
from typing import Any

from .analysis import pairing_determinants, special_generic_obstruction
from .construction import (
    CharacteristicRecord,
    ConstructionParams,
    ManifoldModel,
    Provenance,
    verify_model,
)
from .errors import FoldcohError, ParameterError
from .linalg import IntegerMatrix
from .ring import GradedRing, ring_from_constants
from .surgery import PLAIN, Crossing, InvariantRecord, NormalSystem, SphereEntry

MODEL_FORMAT = "foldcoh.model/1"
RECORD_FORMAT = "foldcoh.record/1"
SAFE_INT = 2**53 - 1


class DocumentError(FoldcohError, ValueError):
    """A document is malformed; the message names the offending key."""


def enc(x: int) -> int | str:
    return x if abs(x) <= SAFE_INT else str(x)


def dec(x: Any, key: str) -> int:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise DocumentError(f"key {key!r}: expected an integer, got {x!r}")
    try:
        return int(x)
    except ValueError:
        raise DocumentError(f"key {key!r}: expected an integer, got {x!r}") from None


def _ints(xs: Any, key: str) -> list[int]:
    if not isinstance(xs, list):
        raise DocumentError(f"key {key!r}: expected a list of integers")
    return [dec(x, key) for x in xs]


def _matrix(rows: Any, key: str) -> list[list[int]]:
    if not isinstance(rows, list):
        raise DocumentError(f"key {key!r}: expected a list of rows")
    return [_ints(r, key) for r in rows]


def _enc_matrix(m: IntegerMatrix) -> list[list[int | str]]:
    return [[enc(x) for x in row] for row in m.tolist()]


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"malformed JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    return doc


def _require(doc: dict, key: str, kinds=(object,)):
    if key not in doc:
        raise DocumentError(f"missing key {key!r}")
    value = doc[key]
    if not isinstance(value, kinds):
        raise DocumentError(f"key {key!r} has the wrong type")
    return value


# parameters

def params_from_doc(doc: dict) -> ConstructionParams:
    known = {"a", "b", "bprime", "A", "H", "p", "partition", "pipeline"}
    for key in doc:
        if key not in known:
            raise DocumentError(f"unknown key {key!r}")
    values = {}
    for key in ("a", "b", "bprime"):
        values[key] = dec(doc.get(key, 0), key)
    if "A" in doc:
        values["A_matrix"] = _matrix(doc["A"], "A")
    if "H" in doc:
        values["H"] = _matrix(doc["H"], "H")
    if doc.get("p") is not None:
        values["p"] = tuple(_ints(doc["p"], "p"))
    if doc.get("partition") is not None:
        part = doc["partition"]
        if not isinstance(part, list):
            raise DocumentError("key 'partition': expected a list of blocks")
        values["partition"] = tuple(tuple(_ints(b, "partition")) for b in part)
    return ConstructionParams(**values)


def params_to_doc(params: ConstructionParams) -> dict:
    doc = {
        "a": params.a,
        "b": params.b,
        "bprime": params.bprime,
        "A": _enc_matrix(params.A_matrix),
        "H": _enc_matrix(params.H),
        "p": [enc(x) for x in params.p],
    }
    if params.partition is not None:
        doc["partition"] = [list(b) for b in params.partition]
    return doc


# models

def _ring_doc(ring: GradedRing) -> dict:
    return {
        "basis": [[str(lab) for lab in b] for b in ring.basis],
        "structure_constants": [[*t[:-1], enc(t[-1])] for t in ring.structure_constants()],
    }


def _ring_from_doc(doc: dict, key: str) -> GradedRing:
    basis = _require(doc, "basis", list)
    if not all(isinstance(b, list) and all(isinstance(s, str) for s in b) for b in basis):
        raise DocumentError(f"key '{key}.basis': expected lists of label strings")
    consts = _require(doc, "structure_constants", list)
    rows = []
    for t in consts:
        if not isinstance(t, list) or len(t) != 7:
            raise DocumentError(f"key '{key}.structure_constants': entries are 7-element lists")
        rows.append([dec(x, "structure_constants") for x in t])
    try:
        return ring_from_constants(basis, rows, top=len(basis) - 1)
    except ValueError as exc:
        raise DocumentError(f"key '{key}': {exc}") from None


def _char_doc(c: CharacteristicRecord) -> dict:
    return {"w1": c.w1, "w2": c.w2, "w3": c.w3, "w4": c.w4, "w5": c.w5, "p1": [enc(x) for x in c.p1]}


def _char_from_doc(doc: Any) -> CharacteristicRecord:
    if not isinstance(doc, dict):
        raise DocumentError("key 'characteristic': expected an object")
    flags = {}
    for k in ("w1", "w2", "w3", "w4", "w5"):
        v = doc.get(k, True)
        if not isinstance(v, bool):
            raise DocumentError(f"key 'characteristic.{k}': expected a boolean")
        flags[k] = v
    return CharacteristicRecord(p1=tuple(_ints(doc.get("p1", []), "characteristic.p1")), **flags)


def model_to_doc(model: ManifoldModel) -> dict:
    doc = {
        "format": MODEL_FORMAT,
        "homology": list(model.homology_rank),
        **_ring_doc(model.ring),
        "characteristic": _char_doc(model.char_classes),
        "findings": verify_model(model),
    }
    try:
        dets = pairing_determinants(model)
    except ValueError:
        dets = {}
    doc["pairing_determinants"] = {str(d): (None if v is None else enc(v)) for d, v in dets.items()}
    prov = model.provenance
    if prov is not None:
        doc["provenance"] = {"theorem": prov.theorem, "params": params_to_doc(prov.params), "notes": list(prov.notes)}
        verdict = special_generic_obstruction(prov.params, prov.theorem)
        doc["verdicts"] = {"special_generic_obstruction": {"obstructed": verdict.obstructed,
                                                           "reasons": list(verdict.reasons)}}
    return doc


def model_from_doc(doc: dict) -> ManifoldModel:
    if doc.get("format") != MODEL_FORMAT:
        raise DocumentError(f"key 'format': expected {MODEL_FORMAT!r}")
    homology = tuple(_ints(_require(doc, "homology", list), "homology"))
    ring = _ring_from_doc(doc, "model")
    char = _char_from_doc(_require(doc, "characteristic"))
    prov = None
    if doc.get("provenance") is not None:
        pdoc = doc["provenance"]
        if not isinstance(pdoc, dict):
            raise DocumentError("key 'provenance': expected an object")
        theorem = dec(_require(pdoc, "theorem"), "provenance.theorem")
        try:
            params = params_from_doc(_require(pdoc, "params", dict))
        except ParameterError as exc:
            raise DocumentError(f"key 'provenance.params': {exc}") from None
        notes = _require(pdoc, "notes", list) if "notes" in pdoc else []
        prov = Provenance(theorem, params, tuple(str(n) for n in notes))
    return ManifoldModel(ring, homology, char, prov)


# pipelines and records

def system_from_doc(pipe: dict, params: ConstructionParams | None) -> NormalSystem:
    kind = pipe.get("kind", PLAIN)
    spheres = []
    for k, s in enumerate(pipe.get("spheres", [])):
        key = f"pipeline.spheres[{k}]"
        if not isinstance(s, dict) or "id" not in s:
            raise DocumentError(f"key {key!r}: expected an object with an 'id'")
        if "base_classes" in s:
            classes = tuple(tuple(c) for c in _matrix(s["base_classes"], key + ".base_classes"))
        else:
            one = tuple(_ints(_require(s, "base_class"), key + ".base_class"))
            # a single base class is shared by every sub-sphere
            count = dec(s.get("sub_sphere_count", 1), key + ".sub_sphere_count")
            if count < 1:
                raise DocumentError(f"key '{key}.sub_sphere_count': must be positive")
            classes = (one,) * count
        if "sub_sphere_count" in s and dec(s["sub_sphere_count"], key) != len(classes):
            raise DocumentError(f"key '{key}.sub_sphere_count' disagrees with the number of base classes")
        sub_ids = tuple(_ints(s["sub_ids"], key + ".sub_ids")) if "sub_ids" in s else None
        if sub_ids is None and len(classes) == 1 and kind == PLAIN:
            sub_ids = (dec(s["id"], key),)
        dim = dec(s["dim"], key + ".dim") if "dim" in s else None
        spheres.append(SphereEntry(dec(s["id"], key), classes, dim, sub_ids))
    crossings = []
    for k, c in enumerate(pipe.get("crossings", [])):
        key = f"pipeline.crossings[{k}]"
        if not isinstance(c, dict):
            raise DocumentError(f"key {key!r}: expected an object")
        pair = _ints(_require(c, "pair"), key + ".pair")
        if len(pair) != 2:
            raise DocumentError(f"key '{key}.pair': expected two sphere ids")
        crossings.append(Crossing(tuple(pair), dec(c.get("sign", 1), key + ".sign")))
    if "target_H" in pipe:
        H = IntegerMatrix.from_rows(_matrix(pipe["target_H"], "pipeline.target_H"))
        return NormalSystem(tuple(spheres), tuple(crossings), H, kind)
    n_sub = sum(len(s.base_classes) for s in spheres)
    if params is not None and params.b == n_sub:
        return NormalSystem(tuple(spheres), tuple(crossings), params.H, kind)
    return NormalSystem.from_crossings(spheres, crossings, kind)


def record_to_doc(record: InvariantRecord) -> dict:
    return {
        "format": RECORD_FORMAT,
        "m": record.m,
        "n": record.n,
        "manifold_rank": list(record.manifold_rank),
        "reeb_rank": list(record.reeb_rank),
        "manifold_basis": [[str(x) for x in b] for b in record.manifold_basis],
        "reeb_basis": [[str(x) for x in b] for b in record.reeb_basis],
        "q_map": [_enc_matrix(q) for q in record.q_map],
        "ring": None if record.ring is None else _ring_doc(record.ring),
        "characteristic": _char_doc(record.char),
        "history": list(record.history),
    }

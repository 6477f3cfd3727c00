"""Versioned JSON documents for quivers, representations, barcodes and reports.

Every document is ``{"kind": ..., "version": 1, "payload": ...}``.  Coordinates
are ``{"num": n, "den": d}`` objects, fields are ``{"p": prime}`` or ``"Q"``,
and matrix entries are integers (prime fields) or coordinates (rationals).
Serialization is canonical: sorted keys, reduced fractions, sorted barcodes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from .barcode import Barcode
from .errors import SchemaError
from .exact_linalg import FieldSpec, Matrix
from .quiver import ASC, DESC, OrientedQuiver
from .representation import Bar, Rep, cell_count

VERSION = 1
KINDS = ("quiver", "rep", "barcode", "report")


@dataclass(frozen=True)
class Document:
    kind: str
    payload: Any
    version: int = VERSION


# text layer ---------------------------------------------------------------------------


def parse(text: str) -> Document:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", path=f"line {exc.lineno}, column {exc.colno}") from exc
    if not isinstance(raw, dict):
        raise SchemaError("document must be an object", path="$")
    for key in ("kind", "version", "payload"):
        if key not in raw:
            raise SchemaError(f"missing {key!r}", path=f"$.{key}")
    kind, version = raw["kind"], raw["version"]
    if kind not in KINDS:
        raise SchemaError(f"unknown kind {kind!r}", path="$.kind")
    if version != VERSION:
        raise SchemaError(f"unsupported version {version!r}", path="$.version")
    doc = Document(kind, raw["payload"], version)
    # decoding validates the payload and canonicalizes it
    return Document(kind, encode(decode(doc)), version)


def serialize(doc: Document) -> str:
    body = {"kind": doc.kind, "version": doc.version, "payload": doc.payload}
    return _render(body, 0) + "\n"


def _scalar(obj) -> bool:
    return not isinstance(obj, (dict, list)) or (isinstance(obj, dict) and all(_scalar(v) for v in obj.values()))


def _flat(obj) -> bool:
    """Scalars, coordinates, rows of them, and short matrices stay on one line."""
    if _scalar(obj):
        return True
    if isinstance(obj, list):
        if all(_scalar(v) for v in obj):
            return True
        return all(isinstance(v, list) and all(_scalar(x) for x in v) for v in obj) and len(json.dumps(obj)) <= 100
    return False


def _render(obj, level: int) -> str:
    """Indented JSON that keeps coordinates, matrix rows and other leaves on one line."""
    if _flat(obj):
        return json.dumps(obj, sort_keys=True, ensure_ascii=False)
    pad, inner = "  " * level, "  " * (level + 1)
    if isinstance(obj, dict):
        items = [f"{inner}{json.dumps(k)}: {_render(obj[k], level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    items = [inner + _render(v, level + 1) for v in obj]
    return "[\n" + ",\n".join(items) + "\n" + pad + "]"


# scalars ---------------------------------------------------------------------------------


def _fail(msg: str, path: str):
    raise SchemaError(msg, path=path)


def coord_out(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


def coord_in(obj, path: str) -> Fraction:
    if isinstance(obj, bool):
        _fail("expected a coordinate", path)
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, str):
        try:
            return Fraction(obj)
        except ValueError:
            _fail(f"cannot read {obj!r} as a rational", path)
    if not isinstance(obj, dict) or set(obj) != {"num", "den"}:
        _fail("expected {num, den}", path)
    num, den = obj["num"], obj["den"]
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (num, den)):
        _fail("num and den must be integers", path)
    if den == 0:
        _fail("zero denominator", path)
    return Fraction(num, den)


def field_out(field: FieldSpec):
    return "Q" if field.p is None else {"p": field.p}


def field_in(obj, path: str) -> FieldSpec:
    if obj == "Q":
        return FieldSpec(None)
    if isinstance(obj, dict) and set(obj) == {"p"} and isinstance(obj["p"], int):
        try:
            return FieldSpec(obj["p"])
        except ValueError as exc:
            _fail(str(exc), path + ".p")
    _fail('field must be "Q" or {"p": prime}', path)


def _entry_out(field: FieldSpec, x):
    return int(x) if field.p is not None else coord_out(Fraction(x))


def _entry_in(field: FieldSpec, obj, path: str):
    if field.p is not None:
        if isinstance(obj, int) and not isinstance(obj, bool):
            return obj % field.p
        return field.elem(coord_in(obj, path))
    return coord_in(obj, path)


def _obj(raw, keys: tuple[str, ...], path: str, optional: tuple[str, ...] = ()) -> dict:
    if not isinstance(raw, dict):
        _fail("expected an object", path)
    missing = [k for k in keys if k not in raw]
    if missing:
        _fail(f"missing {missing[0]!r}", f"{path}.{missing[0]}")
    extra = set(raw) - set(keys) - set(optional)
    if extra:
        _fail(f"unexpected field {sorted(extra)[0]!r}", f"{path}.{sorted(extra)[0]}")
    return raw


def _list(raw, path: str) -> list:
    if not isinstance(raw, list):
        _fail("expected a list", path)
    return raw


# domain objects ---------------------------------------------------------------------------


def quiver_out(q: OrientedQuiver) -> dict:
    return {"breakpoints": [coord_out(b) for b in q.breakpoints], "segments": list(q.segment_dirs)}


def quiver_in(raw, path: str = "$.payload") -> OrientedQuiver:
    raw = _obj(raw, ("breakpoints", "segments"), path)
    bps = [coord_in(b, f"{path}.breakpoints[{i}]") for i, b in enumerate(_list(raw["breakpoints"], path + ".breakpoints"))]
    dirs = _list(raw["segments"], path + ".segments")
    for i, d in enumerate(dirs):
        if d not in (ASC, DESC):
            _fail(f"segment direction must be {ASC!r} or {DESC!r}", f"{path}.segments[{i}]")
    try:
        return OrientedQuiver(bps, dirs)
    except ValueError as exc:
        _fail(str(exc), path)


def matrix_out(m: Matrix) -> list:
    return [[_entry_out(m.field, x) for x in row] for row in m.array.tolist()]


def rep_out(v: Rep) -> dict:
    return {
        "quiver": quiver_out(v.quiver),
        "field": field_out(v.field),
        "cuts": [coord_out(c) for c in v.cuts],
        "dims": list(v.dims),
        "maps": [matrix_out(m) for m in v.maps],
    }


def rep_in(raw, path: str = "$.payload") -> Rep:
    raw = _obj(raw, ("quiver", "field", "cuts", "dims", "maps"), path)
    q = quiver_in(raw["quiver"], path + ".quiver")
    field = field_in(raw["field"], path + ".field")
    cuts = [coord_in(c, f"{path}.cuts[{i}]") for i, c in enumerate(_list(raw["cuts"], path + ".cuts"))]
    if any(a >= b for a, b in zip(cuts, cuts[1:])):
        _fail("cuts must be strictly increasing", path + ".cuts")
    missing = [b for b in q.breakpoints if b not in set(cuts)]
    if missing:
        _fail(f"breakpoint {missing[0]} is not a cut", path + ".cuts")
    dims = _list(raw["dims"], path + ".dims")
    if len(dims) != cell_count(cuts):
        _fail(f"expected {cell_count(cuts)} dims, got {len(dims)}", path + ".dims")
    for i, d in enumerate(dims):
        if not isinstance(d, int) or isinstance(d, bool) or d < 0:
            _fail("dimension must be a nonnegative integer", f"{path}.dims[{i}]")
    maps_raw = _list(raw["maps"], path + ".maps")
    if len(maps_raw) != len(dims) - 1:
        _fail(f"expected {len(dims) - 1} maps, got {len(maps_raw)}", path + ".maps")
    shell = Rep(q, field, cuts, dims, [Matrix.zeros(field, 0, 0)] * (len(dims) - 1))
    maps = []
    for i, m in enumerate(maps_raw):
        s, t = shell.pair_ends(i)
        mp = f"{path}.maps[{i}]"
        rows = _list(m, mp)
        if len(rows) != dims[t]:
            _fail(f"map {i} needs {dims[t]} rows, got {len(rows)}", mp)
        arr = field.zeros(dims[t], dims[s])
        for r, row in enumerate(rows):
            row = _list(row, f"{mp}[{r}]")
            if len(row) != dims[s]:
                _fail(f"map {i} row {r} needs {dims[s]} entries, got {len(row)}", f"{mp}[{r}]")
            for c, x in enumerate(row):
                arr[r, c] = _entry_in(field, x, f"{mp}[{r}][{c}]")
        maps.append(Matrix._wrap(field, arr))
    return Rep(q, field, cuts, dims, maps)


def bar_out(b: Bar, mult: int = 1) -> dict:
    return {
        "lo": None if b.lo is None else coord_out(b.lo),
        "hi": None if b.hi is None else coord_out(b.hi),
        "lo_closed": b.lo_closed,
        "hi_closed": b.hi_closed,
        "mult": mult,
    }


def bar_in(raw, path: str) -> tuple[Bar, int]:
    raw = _obj(raw, ("lo", "hi", "lo_closed", "hi_closed"), path, optional=("mult",))
    lo = None if raw["lo"] is None else coord_in(raw["lo"], path + ".lo")
    hi = None if raw["hi"] is None else coord_in(raw["hi"], path + ".hi")
    flags = (raw["lo_closed"], raw["hi_closed"])
    if not all(isinstance(f, bool) for f in flags):
        _fail("closedness flags must be booleans", path)
    mult = raw.get("mult", 1)
    if not isinstance(mult, int) or isinstance(mult, bool) or mult < 1:
        _fail("multiplicity must be a positive integer", path + ".mult")
    try:
        return Bar(lo, hi, *flags), mult
    except ValueError as exc:
        _fail(str(exc), path)


def barcode_out(bc: Barcode, q: OrientedQuiver | None = None) -> dict:
    out: dict = {"bars": [bar_out(b, m) for b, m in bc.entries]}
    if q is not None:
        out["quiver"] = quiver_out(q)
    return out


def barcode_in(raw, path: str = "$.payload") -> tuple[Barcode, OrientedQuiver | None]:
    raw = _obj(raw, ("bars",), path, optional=("quiver",))
    entries = [bar_in(b, f"{path}.bars[{i}]") for i, b in enumerate(_list(raw["bars"], path + ".bars"))]
    q = quiver_in(raw["quiver"], path + ".quiver") if "quiver" in raw else None
    return Barcode(tuple(entries)), q


# documents <-> objects ---------------------------------------------------------------------


def decode(doc: Document):
    """The domain object a document carries (barcodes come with their optional quiver)."""
    if doc.kind == "quiver":
        return quiver_in(doc.payload)
    if doc.kind == "rep":
        return rep_in(doc.payload)
    if doc.kind == "barcode":
        return barcode_in(doc.payload)
    if not isinstance(doc.payload, dict):
        _fail("report payload must be an object", "$.payload")
    return doc.payload


def encode(obj) -> Any:
    if isinstance(obj, OrientedQuiver):
        return quiver_out(obj)
    if isinstance(obj, Rep):
        return rep_out(obj)
    if isinstance(obj, Barcode):
        return barcode_out(obj)
    if isinstance(obj, tuple) and len(obj) == 2 and isinstance(obj[0], Barcode):
        return barcode_out(*obj)
    if isinstance(obj, dict):
        return json.loads(json.dumps(obj, sort_keys=True, default=_jsonable))
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _jsonable(x):
    if isinstance(x, Fraction):
        return coord_out(x)
    if isinstance(x, np.integer):
        return int(x)
    raise TypeError(f"not serializable: {type(x).__name__}")


def document(obj, kind: str | None = None) -> Document:
    if kind is None:
        kind = (
            "quiver" if isinstance(obj, OrientedQuiver)
            else "rep" if isinstance(obj, Rep)
            else "barcode" if isinstance(obj, (Barcode, tuple))
            else "report"
        )
    return Document(kind, encode(obj))


def dumps(obj, kind: str | None = None) -> str:
    return serialize(document(obj, kind))


def loads(text: str, kind: str | None = None):
    doc = parse(text)
    if kind is not None and doc.kind != kind:
        raise SchemaError(f"expected a {kind} document, got {doc.kind}", path="$.kind")
    return decode(doc)

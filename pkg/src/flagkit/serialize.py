"""JSON codecs for the core value types and the report wrapper.

Field elements are stored as ints mod p, or "num/den" strings over Q.
Every encoder produces plain JSON values; ``dumps`` fixes key order so
identical inputs give byte-identical output.
"""

from __future__ import annotations

import json
from typing import Any

from .analysis import AdmissibilityReport, Classification, PointMapEmbedding
from .field import Field
from .flags import Flag, FlagVariety
from .forms import BilinearSpace, labeled_form
from .linalg import LinearMap, Matrix, Subspace, span
from .stdext import StdExtSpec, make_strict

SCHEMA_VERSION = 1


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# -- basic values -------------------------------------------------------------


def field_to_json(f: Field):
    return f.to_json()


def field_from_json(obj) -> Field:
    if isinstance(obj, int):
        return Field(obj)
    return Field.from_json(obj)


def _row(f: Field, r) -> list:
    return [f.format(x) for x in r]


def matrix_to_json(m: Matrix) -> dict:
    return {"nrows": m.nrows, "ncols": m.ncols, "rows": [_row(m.field, r) for r in m.rows]}


def matrix_from_json(obj, f: Field) -> Matrix:
    if isinstance(obj, list):
        return Matrix.from_rows(f, obj)
    return Matrix.from_rows(f, obj["rows"], obj["ncols"])


def subspace_to_json(s: Subspace) -> list:
    return [_row(s.field, r) for r in s.basis]


def subspace_from_json(obj, n: int, f: Field) -> Subspace:
    return span(n, f, obj)


def flag_to_json(fl: Flag) -> list:
    return [subspace_to_json(s) for s in fl.spaces]


def flag_from_json(obj, n: int, f: Field) -> Flag:
    return Flag(n, f, tuple(subspace_from_json(s, n, f) for s in obj))


# -- varieties and specs ------------------------------------------------------


def form_from_json(obj: dict, f: Field) -> BilinearSpace:
    """Either an explicit Gram matrix or a labelled hyperbolic form."""
    if "gram" in obj:
        return BilinearSpace.from_json(obj, f)
    return labeled_form(obj["kind"], f, obj["labels"])


def variety_to_json(v: FlagVariety) -> dict:
    out = {"dims": list(v.dims), "ambient": v.ambient, "field": field_to_json(v.field)}
    if v.form is not None:
        out["form"] = v.form.to_json()
    if v.component_ref is not None:
        out["component_ref"] = subspace_to_json(v.component_ref)
    return out


def variety_from_json(obj: dict, f: Field | None = None) -> FlagVariety:
    if "field" in obj:
        f = field_from_json(obj["field"])
    if f is None:
        raise ValueError("variety descriptor needs a field")
    n = obj["ambient"]
    form = form_from_json(obj["form"], f) if obj.get("form") else None
    ref = subspace_from_json(obj["component_ref"], n, f) if obj.get("component_ref") else None
    return FlagVariety(tuple(obj["dims"]), n, f, form, ref)


def spec_to_json(spec: StdExtSpec) -> dict:
    out = {"variant": spec.variant, "source": variety_to_json(spec.source),
           "target": variety_to_json(spec.target)}
    if spec.core is not None:
        out["core"] = spec_to_json(spec.core)
    else:
        out["u_chain"] = [subspace_to_json(u) for u in spec.u_chain]
        out["eps"] = [matrix_to_json(e.matrix) for e in spec.eps]
        out["pbar"] = list(spec.pbar)
    return out


def spec_from_json(obj: dict, f: Field | None = None, check: bool = True) -> StdExtSpec:
    """Full form (u_chain, eps, pbar), modified form (core), or splitting form.

    The splitting form gives ``iota`` (rows of the n2 x n matrix), ``w_hat``
    and ``w_chain`` and is built with make_strict.
    """
    if "corpus" in obj:
        from .corpus import get_spec

        try:
            return get_spec(obj["corpus"])
        except KeyError:
            raise ValueError(f"unknown corpus spec {obj['corpus']!r}") from None
    source = variety_from_json(obj["source"], f)
    target = variety_from_json(obj["target"], source.field)
    fld, n2 = source.field, target.ambient
    if "iota" in obj:
        iota = LinearMap(Matrix.from_rows(fld, obj["iota"], source.ambient))
        w_hat = subspace_from_json(obj["w_hat"], n2, fld)
        chain = [subspace_from_json(w, n2, fld) for w in obj["w_chain"]]
        return make_strict(source, target, iota, w_hat, chain, tuple(obj["pbar"]), check=check)
    variant = obj.get("variant", "strict")
    if variant == "modified":
        return StdExtSpec("modified", source, target, core=spec_from_json(obj["core"], fld, check))
    u = tuple(subspace_from_json(x, n2, fld) for x in obj["u_chain"])
    eps = tuple(LinearMap(matrix_from_json(m, fld)) for m in obj["eps"])
    return StdExtSpec(variant, source, target, u, eps, tuple(obj["pbar"]))


# -- tables and reports -------------------------------------------------------


def table_to_json(e: PointMapEmbedding) -> dict:
    return {"source": variety_to_json(e.source), "target": variety_to_json(e.target),
            "pairs": [[flag_to_json(a), flag_to_json(b)] for a, b in e.table]}


def table_from_json(obj: dict, f: Field | None = None, budget: int | None = None) -> PointMapEmbedding:
    if "corpus" in obj:
        from .corpus import NEGATIVE_TABLES

        name = obj["corpus"]
        if name in NEGATIVE_TABLES:
            return NEGATIVE_TABLES[name]()
        return PointMapEmbedding.from_spec(spec_from_json(obj), budget)
    if "spec" in obj:
        return PointMapEmbedding.from_spec(spec_from_json(obj["spec"], f), budget)
    source = variety_from_json(obj["source"], f)
    target = variety_from_json(obj["target"], source.field)
    fld = source.field
    pairs = tuple((flag_from_json(a, source.ambient, fld), flag_from_json(b, target.ambient, fld))
                  for a, b in obj["pairs"])
    return PointMapEmbedding(source, target, pairs)


def system_from_json(obj: dict, f: Field | None = None):
    from .genflag import DirectSystem

    if "corpus" in obj:
        from .corpus import SYSTEMS, direct_system

        if obj["corpus"] not in SYSTEMS:
            raise ValueError(f"unknown corpus system {obj['corpus']!r}")
        return direct_system(obj["corpus"])
    stages = [spec_from_json(s, f) for s in obj["stages"]]
    src = stages[0].source
    initial = flag_from_json(obj["initial"], src.ambient, src.field)
    labels = tuple(tuple(x) for x in obj.get("labels", ()))
    return DirectSystem(tuple(stages), initial, labels)


def system_to_json(sys) -> dict:
    return {"stages": [spec_to_json(s) for s in sys.stages],
            "initial": flag_to_json(sys.initial),
            "labels": [list(x) for x in sys.labels]}


def classification_to_json(c: Classification) -> dict:
    return {"kind": c.kind, "reason": c.reason,
            "p": list(c.p) if c.p is not None else None,
            "spec": spec_to_json(c.spec) if c.spec is not None else None,
            "evidence": _plain(c.evidence)}


def admissibility_to_json(r: AdmissibilityReport) -> dict:
    return r.to_json()


def _plain(obj):
    """Coerce evidence dicts (int keys, tuples, subspaces) into JSON values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if isinstance(obj, Subspace):
        return subspace_to_json(obj)
    if isinstance(obj, Flag):
        return flag_to_json(obj)
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return str(obj)


def report(command: str, status: str, result=None, errors=None) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "status": status,
            "result": result, "errors": list(errors or [])}

"""JSON formats for domains, flats and generator sets.

Numbers in files are integers or ``"p/q"`` strings.  Floats are rejected
at parse time so that everything read from disk is exact.
"""
from __future__ import annotations

import json
import os
import re
import sys
from fractions import Fraction

import numpy as np

from .domain import ConvexDomain, Ellipsoid, Polytope
from .errors import DomainFormatError
from .projective import ProjMap

_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*[+-]?\d+)?\s*$")


def parse_rational(value) -> Fraction:
    if isinstance(value, bool):
        raise DomainFormatError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise DomainFormatError(f"floats are not allowed, write a rational string instead of {value!r}")
    if isinstance(value, str) and _RATIONAL.match(value):
        try:
            return Fraction(value.replace(" ", ""))
        except ZeroDivisionError:
            raise DomainFormatError(f"zero denominator in {value!r}") from None
    raise DomainFormatError(f"expected an integer or 'p/q' string, got {value!r}")


def parse_vector(values) -> np.ndarray:
    if not isinstance(values, list) or not values:
        raise DomainFormatError("expected a nonempty list of numbers")
    return np.array([parse_rational(v) for v in values], dtype=object)


def parse_matrix(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise DomainFormatError("expected a nonempty list of rows")
    m = [parse_vector(r) for r in rows]
    if any(len(r) != len(m[0]) for r in m):
        raise DomainFormatError("ragged matrix")
    return np.array(m, dtype=object)


def format_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_vector(v) -> list:
    return [format_rational(x) for x in v]


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DomainFormatError(f"cannot read {path}: {exc}") from None


def write_json(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _sheet_normalized(v) -> list:
    """Scale by a positive factor so the largest entry has magnitude 1.

    Positive scaling keeps the vector on its cone sheet, which matters for
    polytope vertices: flipping a sign would change the domain.
    """
    big = max(abs(x) for x in v)
    return format_vector([x / big for x in v])


def domain_from_dict(obj) -> ConvexDomain:
    if not isinstance(obj, dict):
        raise DomainFormatError("domain must be a JSON object")
    kind = obj.get("type")
    dim = obj.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise DomainFormatError("'dim' must be a positive integer")
    if kind == "polytope":
        verts = parse_matrix(obj.get("vertices"))
        if verts.shape[1] == dim:
            verts = np.concatenate([verts, np.full((len(verts), 1), Fraction(1), dtype=object)], axis=1)
        if verts.shape[1] != dim + 1:
            raise DomainFormatError(f"vertices need {dim} affine or {dim + 1} homogeneous coordinates")
        return Polytope(list(verts))
    if kind == "ellipsoid":
        form = parse_matrix(obj.get("form"))
        if form.shape != (dim + 1, dim + 1):
            raise DomainFormatError(f"form must be {dim + 1}x{dim + 1}")
        return Ellipsoid(form)
    raise DomainFormatError(f"unknown domain type {kind!r}")


def domain_to_dict(domain: ConvexDomain) -> dict:
    if isinstance(domain, Polytope):
        return {
            "type": "polytope",
            "dim": domain.dim,
            "vertices": [_sheet_normalized(v) for v in domain.vertex_array],
        }
    if not domain.exact:
        raise DomainFormatError("only exact forms can be written")
    return {
        "type": "ellipsoid",
        "dim": domain.dim,
        "form": [format_vector(r) for r in domain.form],
    }


def load_domain(source) -> ConvexDomain:
    """Domain from a dict, a JSON path, or ``stock:NAME``."""
    if isinstance(source, dict):
        return domain_from_dict(source)
    if isinstance(source, str) and source.startswith("stock:"):
        from .stock import STOCK

        name = source[6:]
        if name not in STOCK:
            raise DomainFormatError(f"unknown stock domain {name!r}; choose from {sorted(STOCK)}")
        return STOCK[name]()
    return domain_from_dict(read_json(source))


def save_domain(domain: ConvexDomain, path=None):
    write_json(domain_to_dict(domain), path)


def load_flat(source, base_dir=None):
    """Return (vertex list, domain reference or None) from a flat file or dict."""
    obj = read_json(source) if isinstance(source, str) else source
    if not isinstance(obj, dict) or "vertices" not in obj:
        raise DomainFormatError("flat must be an object with 'vertices'")
    verts = [parse_vector(v) for v in obj["vertices"]]
    ref = obj.get("domain")
    if isinstance(ref, str) and not ref.startswith("stock:"):
        if base_dir is None and isinstance(source, str):
            base_dir = os.path.dirname(os.path.abspath(source))
        if base_dir is not None and not os.path.isabs(ref):
            ref = os.path.join(base_dir, ref)
    return verts, ref


def flat_to_dict(flat, domain_ref=None) -> dict:
    out = {"vertices": [_sheet_normalized(v.coords) for v in flat.vertices]}
    if domain_ref is not None:
        out["domain"] = domain_ref
    return out


def load_generators(source):
    """Return (list of ProjMap, labels)."""
    obj = read_json(source) if isinstance(source, str) else source
    if not isinstance(obj, dict) or "generators" not in obj:
        raise DomainFormatError("generator file needs a 'generators' list")
    maps = [ProjMap(parse_matrix(m)) for m in obj["generators"]]
    labels = obj.get("labels") or [chr(ord("a") + i) for i in range(len(maps))]
    if len(labels) != len(maps):
        raise DomainFormatError("one label per generator")
    return maps, list(labels)


def parse_point(text: str, dim: int) -> np.ndarray:
    """Command-line point: comma-separated rationals, affine (d) or homogeneous (d+1)."""
    parts = [p for p in text.split(",") if p.strip()]
    v = np.array([parse_rational(p.strip()) for p in parts], dtype=object)
    if len(v) == dim:
        v = np.append(v, Fraction(1))
    if len(v) != dim + 1:
        raise DomainFormatError(f"point needs {dim} or {dim + 1} coordinates")
    return v

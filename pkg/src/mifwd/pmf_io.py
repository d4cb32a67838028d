"""PMF documents (JSON lines) and CSV ingestion.

A PMF document is a header object followed by one object per outcome::

    {"schema_version": 1, "variables": [{"name": "X", "support": [0, 1]}], "normalize": false}
    {"outcome": [0], "p": 0.5}
    {"outcome": [1], "p": 0.5}

Outcomes that are not listed get probability 0.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Sequence

from .errors import (DuplicateOutcome, EmptyDataset, InvalidPmf, MalformedDocument,
                     MissingColumn, SumMismatch)
from .info_theory import SUM_TOLERANCE, JointPmf

SCHEMA_VERSION = 1


def _freeze(value):
    # JSON arrays become tuples so they can serve as support values
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value


def _thaw(value):
    if isinstance(value, tuple):
        return [_thaw(v) for v in value]
    return value


def parse_pmf_file(text: str) -> JointPmf:
    lines = [(n, ln) for n, ln in enumerate(text.splitlines(), 1) if ln.strip()]
    if not lines:
        raise MalformedDocument("empty document")
    objs = []
    for n, ln in lines:
        try:
            obj = json.loads(ln)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"line {n}: {exc.msg}", line=n) from None
        if not isinstance(obj, dict):
            raise MalformedDocument(f"line {n}: expected a JSON object", line=n)
        objs.append((n, obj))

    _, header = objs[0]
    if header.get("schema_version") != SCHEMA_VERSION:
        raise MalformedDocument("unsupported or missing schema_version",
                                schema_version=header.get("schema_version"))
    variables = header.get("variables")
    if not isinstance(variables, list) or not variables:
        raise MalformedDocument("header needs a non-empty 'variables' list")
    names, supports = [], []
    for var in variables:
        if not (isinstance(var, dict) and isinstance(var.get("name"), str)
                and isinstance(var.get("support"), list) and var["support"]):
            raise MalformedDocument("each variable needs a name and a non-empty support",
                                    variable=var)
        names.append(var["name"])
        supports.append(tuple(_freeze(v) for v in var["support"]))
    if len(set(names)) != len(names):
        raise MalformedDocument("variable names must be unique", variables=names)
    normalize = header.get("normalize", False)
    if not isinstance(normalize, bool):
        raise MalformedDocument("'normalize' must be a boolean")

    probs: dict[tuple, float] = {}
    for n, obj in objs[1:]:
        outcome, p = obj.get("outcome"), obj.get("p")
        if not isinstance(outcome, list) or len(outcome) != len(names):
            raise MalformedDocument(f"line {n}: outcome must list one value per variable", line=n)
        if isinstance(p, bool) or not isinstance(p, (int, float)) or not math.isfinite(p):
            raise MalformedDocument(f"line {n}: 'p' must be a finite number", line=n)
        if p < 0:
            raise InvalidPmf(f"line {n}: negative probability", line=n, p=p)
        key = tuple(_freeze(v) for v in outcome)
        if key in probs:
            raise DuplicateOutcome(f"line {n}: outcome {outcome} listed twice", line=n,
                                   outcome=outcome)
        for name, sup, v in zip(names, supports, key):
            if v not in sup:
                raise InvalidPmf(f"line {n}: value {v!r} not in the support of {name!r}",
                                 line=n, variable=name)
        probs[key] = float(p)

    total = math.fsum(probs.values())
    if normalize:
        if not total > 0:
            raise SumMismatch("cannot normalize a document with zero total mass", total=total)
        probs = {key: p / total for key, p in probs.items()}
    elif abs(total - 1.0) > SUM_TOLERANCE:
        raise SumMismatch(f"probabilities sum to {total!r}", total=total)
    return JointPmf.from_mapping(names, supports, probs)


def serialize_pmf(pmf: JointPmf, include_zeros: bool = False) -> str:
    header = {
        "schema_version": SCHEMA_VERSION,
        "variables": [{"name": n, "support": [_thaw(v) for v in s]}
                      for n, s in zip(pmf.variables, pmf.supports)],
        "normalize": False,
    }
    out = [json.dumps(header)]
    for outcome, p in pmf.items():
        if p > 0 or include_zeros:
            out.append(json.dumps({"outcome": [_thaw(v) for v in outcome], "p": p}))
    return "\n".join(out) + "\n"


def ingest_csv(source: str | Iterable[Sequence[str]], class_column: str,
               columns: Sequence[str] | None = None) -> JointPmf:
    """Empirical PMF (count / total) of categorical CSV data.

    ``source`` is CSV text or an iterable of rows whose first row is the header.
    Supports keep first-appearance order. ``columns`` restricts the features;
    the class column is always kept.
    """
    rows = csv.reader(io.StringIO(source)) if isinstance(source, str) else iter(source)
    try:
        header = [h.strip() for h in next(rows)]
    except StopIteration:
        raise EmptyDataset("no header row") from None
    if class_column not in header:
        raise MissingColumn(f"class column {class_column!r} not found", column=class_column,
                            header=header)
    wanted = list(header) if columns is None else list(dict.fromkeys([*columns, class_column]))
    for name in wanted:
        if name not in header:
            raise MissingColumn(f"column {name!r} not found", column=name, header=header)
    if len(set(header)) != len(header):
        raise MalformedDocument("duplicate column names", header=header)
    pos = [header.index(n) for n in wanted]
    data = []
    for n, row in enumerate(rows, 2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise MalformedDocument(f"row {n} has {len(row)} cells, expected {len(header)}",
                                    row=n)
        cells = [row[i].strip() for i in pos]
        if any(c == "" for c in cells):
            raise MalformedDocument(f"row {n} has an empty cell", row=n)
        data.append(cells)
    if not data:
        raise EmptyDataset("the dataset has no data rows")
    return JointPmf.from_samples(wanted, data)

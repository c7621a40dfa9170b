"""Line-based text format and its JSON mirror for instances and graphs.

Text format, UTF-8, one record per line, comments start with `c`:

    p ksp <num_sets> <k> <universe_size>
    s <weight_num>/<weight_den> <elem> <elem> ...

    p mwis <n> <m>
    v <id> <weight_num>/<weight_den>
    e <u> <v>

The JSON mirror uses the field names kind, k, universe, sets[], weights[],
edges[]; weights are "num/den" strings so round-trips stay exact.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Union

from .instances import ConflictGraph, InputError, PackingInstance

Parsed = Union[PackingInstance, ConflictGraph]


def _parse_weight(token: str) -> Fraction:
    try:
        w = Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad weight {token!r}") from exc
    if w <= 0:
        raise InputError(f"weight must be positive, got {token}")
    return w


def _fmt_weight(w: Fraction) -> str:
    return f"{w.numerator}/{w.denominator}"


def parse_text(text: str) -> Parsed:
    """Parse either a `p ksp` or `p mwis` document."""
    header = None
    sets: list[list[int]] = []
    set_weights: list[Fraction] = []
    vert_weights: dict[int, Fraction] = {}
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tok = line.split()
        try:
            if tok[0] == "p":
                if header is not None:
                    raise InputError("duplicate header line")
                if tok[1] == "ksp" and len(tok) == 5:
                    header = ("ksp", int(tok[2]), int(tok[3]), int(tok[4]))
                elif tok[1] == "mwis" and len(tok) == 4:
                    header = ("mwis", int(tok[2]), int(tok[3]))
                else:
                    raise InputError(f"bad header {line!r}")
            elif tok[0] == "s":
                set_weights.append(_parse_weight(tok[1]))
                sets.append([int(t) for t in tok[2:]])
            elif tok[0] == "v":
                vert_weights[int(tok[1])] = _parse_weight(tok[2])
            elif tok[0] == "e":
                edges.append((int(tok[1]), int(tok[2])))
            else:
                raise InputError(f"unknown record {tok[0]!r}")
        except (IndexError, ValueError) as exc:
            raise InputError(f"line {lineno}: cannot parse {line!r}") from exc
    if header is None:
        raise InputError("missing `p` header line")
    if header[0] == "ksp":
        _, n, k, universe = header
        if len(sets) != n:
            raise InputError(f"header promises {n} sets, found {len(sets)}")
        return PackingInstance.build(universe, sets, set_weights, k)
    _, n, m = header
    if sorted(vert_weights) != list(range(n)):
        raise InputError("vertex records must cover ids 0..n-1 exactly")
    if len(edges) != m:
        raise InputError(f"header promises {m} edges, found {len(edges)}")
    weights = [vert_weights[i] for i in range(n)]
    return ConflictGraph.from_edges(n, edges, weights)


def to_text(obj: Parsed) -> str:
    lines = []
    if isinstance(obj, PackingInstance):
        lines.append(f"p ksp {obj.n} {obj.k} {obj.universe_size}")
        for s, w in zip(obj.sets, obj.weights):
            elems = " ".join(str(e) for e in sorted(s))
            lines.append(f"s {_fmt_weight(w)} {elems}")
    else:
        edges = obj.edges()
        lines.append(f"p mwis {obj.n} {len(edges)}")
        for i, w in enumerate(obj.weights):
            lines.append(f"v {i} {_fmt_weight(w)}")
        for u, v in edges:
            lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


def to_json_obj(obj: Parsed) -> dict:
    if isinstance(obj, PackingInstance):
        return {
            "kind": "ksp",
            "k": obj.k,
            "universe": obj.universe_size,
            "sets": [sorted(s) for s in obj.sets],
            "weights": [_fmt_weight(w) for w in obj.weights],
            "edges": None,
        }
    return {
        "kind": "mwis",
        "k": None,
        "universe": obj.n,
        "sets": None,
        "weights": [_fmt_weight(w) for w in obj.weights],
        "edges": [[u, v] for u, v in obj.edges()],
    }


def from_json_obj(doc: dict) -> Parsed:
    kind = doc.get("kind")
    if kind == "ksp":
        return PackingInstance.build(
            doc["universe"],
            doc["sets"],
            [_parse_weight(str(w)) for w in doc["weights"]],
            doc["k"],
        )
    if kind == "mwis":
        weights = [_parse_weight(str(w)) for w in doc["weights"]]
        return ConflictGraph.from_edges(len(weights), [tuple(e) for e in doc["edges"]], weights)
    raise InputError(f"unknown kind {kind!r}")


def to_json(obj: Parsed) -> str:
    return json.dumps(to_json_obj(obj), indent=None, separators=(",", ":"), sort_keys=True) + "\n"


def load(path: str) -> Parsed:
    """Load an instance file; `.json` selects the JSON mirror."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json"):
        return from_json_obj(json.loads(text))
    return parse_text(text)


def dump(obj: Parsed, path: str) -> None:
    data = to_json(obj) if path.endswith(".json") else to_text(obj)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(data)

"""JSON inputs and deterministic JSON output.

Files use 1-based labels. A triangulation is ``{"d", "n", "trees"}`` with
every tree a list of ``[row, column]`` pairs; heights are ``{"H": rows}``
with integer or ``"p/q"`` entries; signs are ``{"A": rows}`` of ``"+"`` and
``"-"`` strings.
"""

from __future__ import annotations

import json
from pathlib import Path

from .cayley import Triangulation
from .exact import as_fraction
from .signcore import matrix


class InputError(ValueError):
    """Unreadable or malformed input file."""


def load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    return data


def parse_triangulation(data: dict, where: str = "input") -> Triangulation:
    try:
        d, n = int(data["d"]), int(data["n"])
        trees = []
        for t, tree in enumerate(data["trees"]):
            edges = []
            for e in tree:
                i, j = e
                if not (1 <= int(i) <= d and 1 <= int(j) <= n):
                    raise InputError(f"{where}: tree {t + 1} has edge {e} outside a {d}x{n} graph")
                edges.append((int(i) - 1, int(j) - 1))
            trees.append(frozenset(edges))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"{where}: not a triangulation ({exc})") from exc
    return Triangulation(d, n, tuple(trees))


def parse_heights(data: dict, where: str = "input") -> tuple:
    try:
        rows = data["H"]
        H = tuple(tuple(as_fraction(v) for v in row) for row in rows)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{where}: not a height matrix ({exc})") from exc
    if not H or len({len(r) for r in H}) != 1 or not H[0]:
        raise InputError(f"{where}: height matrix must be a nonempty rectangle")
    return H


def parse_signs(data: dict, where: str = "input") -> tuple:
    try:
        A = matrix(data["A"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{where}: not a sign matrix ({exc})") from exc
    if not A or len({len(r) for r in A}) != 1 or not A[0]:
        raise InputError(f"{where}: sign matrix must be a nonempty rectangle")
    if any(v == 0 for r in A for v in r):
        raise InputError(f"{where}: sign matrix entries must be + or -")
    return A


def read_signs(path) -> tuple:
    return parse_signs(load_json(path), str(path))


def read_input(path) -> tuple:
    """``("heights", H)`` or ``("triangulation", T)`` depending on the file's keys."""
    data = load_json(path)
    if "H" in data:
        return "heights", parse_heights(data, str(path))
    return "triangulation", parse_triangulation(data, str(path))


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=str) + "\n"

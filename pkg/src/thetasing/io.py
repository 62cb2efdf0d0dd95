"""File formats and deterministic JSON output.

Floats are written with 17 significant digits and exact rationals as "p/q"
strings; no timestamps, so identical inputs give byte-identical output.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import InvalidInput

TOOL = "thetasing"


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([obj.real, obj.imag], indent, _level)
    if isinstance(obj, Fraction):
        return json.dumps(f"{obj.numerator}/{obj.denominator}")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number, Fraction, str, bool)) or v is None for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def header(version: str, tol: float, seed: int, **extra) -> dict:
    out = {"tool": TOOL, "version": version, "tolerances": {"tol": tol}, "seed": seed}
    for k, v in extra.items():
        if k == "tolerances":
            out["tolerances"].update(v)
        else:
            out[k] = v
    return out


# ---------------------------------------------------------------------------
# parsing


def parse_complex(text) -> complex:
    if isinstance(text, (list, tuple)):
        if len(text) != 2:
            raise InvalidInput(f"complex number must be [re, im], got {text!r}")
        return complex(float(text[0]), float(text[1]))
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "").replace("I", "j").replace("i", "j")
    try:
        return complex(s)
    except ValueError as e:
        raise InvalidInput(f"cannot parse complex number {text!r}") from e


def parse_complex_vector(text) -> np.ndarray:
    """'0.5+0.5i,0.2' or a JSON list of [re, im] pairs / numbers."""
    if isinstance(text, str):
        s = text.strip()
        if s.startswith("["):
            try:
                text = json.loads(s)
            except json.JSONDecodeError as e:
                raise InvalidInput(f"bad JSON vector: {e}") from e
        else:
            return np.array([parse_complex(p) for p in s.split(",") if p.strip()], dtype=complex)
    return np.array([parse_complex(p) for p in text], dtype=complex)


def parse_pair(text: str) -> complex:
    """'re,im' -> complex."""
    parts = [p for p in str(text).split(",") if p.strip()]
    if len(parts) == 1:
        return parse_complex(parts[0])
    if len(parts) != 2:
        raise InvalidInput(f"expected 're,im', got {text!r}")
    return complex(float(parts[0]), float(parts[1]))


def complex_vector_json(v) -> list:
    return [[float(c.real), float(c.imag)] for c in np.asarray(v, dtype=complex).reshape(-1)]


def tau_from_json(data: dict) -> np.ndarray:
    try:
        g = int(data["g"])
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidInput(f"period matrix JSON needs g, re, im: {e}") from e
    if re.shape != (g, g) or im.shape != (g, g):
        raise InvalidInput(f"period matrix blocks must be {g}x{g}")
    return re + 1j * im


def tau_to_json(tau) -> dict:
    tau = np.asarray(tau, dtype=complex)
    return {"g": tau.shape[0], "re": tau.real.tolist(), "im": tau.imag.tolist()}


def load_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInput(f"cannot read {path}: {e}") from e


def load_tau(path) -> np.ndarray:
    return tau_from_json(load_json(path))

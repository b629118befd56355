"""Matrix file format: {"n": int, "re": [[...]], "im": [[...]]}, row-major.

Writers emit 17 significant digits so every double round-trips exactly.
"""

import json

import numpy as np

from .core import MAX_DIM, as_operator


def matrix_to_dict(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {
        "n": int(m.shape[0]),
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


def matrix_from_dict(obj: dict) -> np.ndarray:
    try:
        n = int(obj["n"])
        re = np.asarray(obj["re"], dtype=np.float64)
        im = np.asarray(obj["im"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from exc
    if not 1 <= n <= MAX_DIM:
        raise ValueError(f"dimension must be in [1, {MAX_DIM}], got {n}")
    if re.shape != (n, n) or im.shape != (n, n):
        raise ValueError(
            f"re/im must both be {n}x{n}, got {re.shape} and {im.shape}"
        )
    return as_operator(re + 1j * im)


def _fmt(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError("matrix entries must be finite")
    return format(float(x), ".17g")


def _rows(rows) -> str:
    return "[" + ", ".join("[" + ", ".join(_fmt(x) for x in row) + "]" for row in rows) + "]"


def dumps_matrix(m: np.ndarray) -> str:
    """Serialize a matrix at full (17 significant digit) precision."""
    d = matrix_to_dict(m)
    return '{"n": %d, "re": %s, "im": %s}' % (d["n"], _rows(d["re"]), _rows(d["im"]))


def write_matrix(path, m: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_matrix(m) + "\n")


def read_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: malformed JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return matrix_from_dict(obj)

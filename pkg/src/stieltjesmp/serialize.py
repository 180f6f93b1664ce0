"""JSON encoding shared by the library and the command line tool.

Matrices travel as {"rows": r, "cols": c, "data": [...]} with the data
row-major; every entry is a [re, im] pair.  Floats are rounded to 15
significant digits on output so repeated runs produce identical files.
"""

from __future__ import annotations

import json

import numpy as np

__all__ = [
    "sig",
    "matrix_to_json",
    "matrix_from_json",
    "sequence_to_json",
    "sequence_from_json",
    "measure_to_json",
    "measure_from_json",
    "rational_to_json",
    "rational_from_json",
    "pair_to_json",
    "pair_from_json",
    "dumps",
]


def sig(x: float, digits: int = 15) -> float:
    """Round to ``digits`` significant digits (0.0 stays 0.0)."""
    x = float(x)
    if x == 0.0 or not np.isfinite(x):
        return x
    return float(f"{x:.{digits}g}")


def _entry(v: complex) -> list:
    v = complex(v)
    return [sig(v.real), sig(v.imag)]


def matrix_to_json(a) -> dict:
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    r, c = a.shape
    return {
        "rows": int(r),
        "cols": int(c),
        "data": [_entry(v) for v in a.reshape(-1)],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    r, c = int(obj["rows"]), int(obj["cols"])
    data = obj["data"]
    if len(data) != r * c:
        raise ValueError("matrix data length does not match rows*cols")
    flat = np.array([complex(p[0], p[1]) for p in data], dtype=complex)
    return flat.reshape(r, c)


def sequence_to_json(alpha: float, mats) -> dict:
    mats = list(mats)
    q = np.atleast_2d(np.asarray(mats[0])).shape[0] if mats else 0
    return {
        "alpha": sig(alpha),
        "q": int(q),
        "s": [matrix_to_json(m) for m in mats],
    }


def sequence_from_json(obj: dict):
    alpha = float(obj["alpha"])
    mats = [matrix_from_json(m) for m in obj["s"]]
    return alpha, mats


def measure_to_json(alpha: float, nodes, weights) -> dict:
    return {
        "alpha": sig(alpha),
        "atoms": [
            {"x": sig(float(x)), "w": matrix_to_json(w)}
            for x, w in zip(nodes, weights)
        ],
    }


def measure_from_json(obj: dict):
    alpha = float(obj["alpha"])
    nodes = [float(atom["x"]) for atom in obj["atoms"]]
    weights = [matrix_from_json(atom["w"]) for atom in obj["atoms"]]
    return alpha, nodes, weights


def rational_to_json(fun) -> dict:
    """Encode a rational matrix function as numerator coefficient matrices
    over a scalar denominator coefficient list (degree-ascending)."""
    return {
        "num": [matrix_to_json(c) for c in fun.num.coeffs],
        "den": [_entry(c) for c in fun.den],
    }


def rational_from_json(obj: dict):
    from .pairs import RationalMatFun
    from .respoly import MatrixPolynomial

    num = MatrixPolynomial(tuple(matrix_from_json(c) for c in obj["num"]))
    den = tuple(complex(p[0], p[1]) for p in obj["den"])
    return RationalMatFun(num, den)


def pair_to_json(pair) -> dict:
    return {
        "alpha": sig(pair.alpha),
        "phi": rational_to_json(pair.phi),
        "psi": rational_to_json(pair.psi),
    }


def pair_from_json(obj: dict):
    from .pairs import StieltjesPair

    alpha = float(obj["alpha"])
    return StieltjesPair(alpha, rational_from_json(obj["phi"]),
                         rational_from_json(obj["psi"]))


def dumps(obj) -> str:
    """Deterministic JSON text: sorted keys, stable float formatting."""
    return json.dumps(obj, sort_keys=True, indent=2)

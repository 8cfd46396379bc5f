"""Built-in operator documents.

Every entry is generated as an operator-description document and parsed
back, so the gallery exercises the same code path as user files.

Names may carry parameters, e.g. ``transport:c=-2`` or ``schrodinger:n=2``.
"""

from __future__ import annotations

import json

from .operator import CompanionFamily, PolyMatrixOperator, load_document

__all__ = ["GALLERY", "gallery_document", "gallery_operator", "gallery_names"]


def _unit(n, j, power):
    alpha = [0] * n
    alpha[j] = power
    return alpha


def _laplacian_terms(n, coeff):
    return [{"coeff": [coeff.real, coeff.imag], "alpha": _unit(n, j, 2)} for j in range(n)]


def _scalar(n, terms):
    return {"m": 1, "n": n, "entries": [{"row": 0, "col": 0, "terms": terms}]}


def heat(n=1):
    return _scalar(n, _laplacian_terms(n, 1 + 0j))


def backward_heat(n=1):
    return _scalar(n, _laplacian_terms(n, -1 + 0j))


def schrodinger(n=1):
    return _scalar(n, _laplacian_terms(n, 1j))


def transport(c=1.0):
    return _scalar(1, [{"coeff": [float(c), 0.0], "alpha": [1]}])


def wave(n=1):
    """``u_tt = Laplacian u`` in the variables ``(u, u_t)``."""
    return {
        "m": 2,
        "n": n,
        "entries": [
            {"row": 0, "col": 1, "terms": [{"coeff": [1.0, 0.0], "alpha": [0] * n}]},
            {"row": 1, "col": 0, "terms": _laplacian_terms(n, 1 + 0j)},
        ],
    }


def wave_energy(n=1):
    """``u_tt = Laplacian u`` in the variables ``(u_t, d_1 u, ..., d_n u)``; skew-adjoint symbol."""
    entries = []
    for j in range(n):
        d = [{"coeff": [1.0, 0.0], "alpha": _unit(n, j, 1)}]
        entries.append({"row": 0, "col": j + 1, "terms": d})
        entries.append({"row": j + 1, "col": 0, "terms": d})
    return {"m": n + 1, "n": n, "entries": entries}


def wave_companion(n=1):
    """``u_tt - Laplacian u = 0`` as ``Q_2 = 1, Q_1 = 0, Q_0 = -Laplacian``."""
    return {
        "m": 2,
        "n": n,
        "Q": [
            {"terms": _laplacian_terms(n, -1 + 0j)},
            {"terms": []},
            {"terms": [{"coeff": [1.0, 0.0], "alpha": [0] * n}]},
        ],
    }


GALLERY = {
    "heat": (heat, "u_t = Laplacian u"),
    "backward-heat": (backward_heat, "u_t = -Laplacian u (ill-posed forward in time)"),
    "schrodinger": (schrodinger, "u_t = i Laplacian u"),
    "transport": (transport, "u_t = c u_x (parameter c, default 1)"),
    "wave": (wave, "(u, u_t)' = [[0, 1], [Laplacian, 0]] (u, u_t)"),
    "wave-energy": (wave_energy, "(u_t, grad u)' first-order system with skew-adjoint symbol"),
    "wave-companion": (wave_companion, "u_tt - Laplacian u = 0 in Q-form (companion reduction)"),
}


def gallery_names() -> list[str]:
    return list(GALLERY)


def _parse_name(spec: str):
    name, _, params = spec.partition(":")
    if name not in GALLERY:
        raise KeyError(f"unknown gallery operator {name!r}; available: {', '.join(GALLERY)}")
    kwargs = {}
    if params:
        for item in params.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise ValueError(f"gallery parameter {item!r} must look like key=value")
            kwargs[key.strip()] = int(value) if key.strip() == "n" else float(value)
    return name, kwargs


def gallery_document(spec: str) -> dict:
    """Operator-description document for a gallery name such as ``"wave:n=2"``."""
    name, kwargs = _parse_name(spec)
    factory = GALLERY[name][0]
    try:
        return factory(**kwargs)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {name!r}: {kwargs}") from exc


def gallery_operator(spec: str) -> PolyMatrixOperator | CompanionFamily:
    return load_document(json.dumps(gallery_document(spec)))

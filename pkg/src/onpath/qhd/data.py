"""Price-quantity datasets: ``{"observations": [{"x": [x1, x2, x3], "p": [p1, p2, 1.0]}]}``."""

from __future__ import annotations

import json
from dataclasses import dataclass


class QhdDataError(ValueError):
    pass


@dataclass(frozen=True)
class PriceObservation:
    x: tuple[float, float, float]
    p: tuple[float, float, float]

    @property
    def income(self) -> float:
        return sum(a * b for a, b in zip(self.x, self.p))

    def to_json(self) -> dict:
        return {"x": list(self.x), "p": list(self.p)}


def _triple(v, what: str, k: int) -> tuple[float, float, float]:
    if not isinstance(v, list) or len(v) != 3:
        raise QhdDataError(f"observation {k}: {what} must be a list of three numbers")
    try:
        out = tuple(float(a) for a in v)
    except (TypeError, ValueError):
        raise QhdDataError(f"observation {k}: {what} has a non-numeric entry") from None
    return out


def qhd_from_json(obj) -> list[PriceObservation]:
    if not isinstance(obj, dict) or not isinstance(obj.get("observations"), list):
        raise QhdDataError('expected an object with an "observations" list')
    out = []
    for k, o in enumerate(obj["observations"]):
        if not isinstance(o, dict):
            raise QhdDataError(f"observation {k}: not an object")
        x = _triple(o.get("x"), "x", k)
        p = _triple(o.get("p"), "p", k)
        if min(x) < 0:
            raise QhdDataError(f"observation {k}: negative quantity")
        if min(p) <= 0:
            raise QhdDataError(f"observation {k}: prices must be positive")
        if p[2] != 1.0:
            p = (p[0] / p[2], p[1] / p[2], 1.0)
        out.append(PriceObservation(x, p))
    return out


def loads_qhd(text: str) -> list[PriceObservation]:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise QhdDataError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    return qhd_from_json(obj)

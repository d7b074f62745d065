"""Read-only table of published reference numbers.

Theoretical optima are recomputable by the optimizer; the laboratory values
are not (they fold in apparatus noise the simulator does not model) and are
shipped strictly for side-by-side display.  Every block carries a source
anchor describing what kind of reported value it holds.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources


def _key(*parts: int) -> str:
    return ",".join(str(p) for p in parts)


class ReferenceTable:
    """Dictionary-backed lookup over the shipped reference data."""

    def __init__(self, doc: dict):
        self._doc = doc

    @property
    def anchors(self) -> dict[str, str]:
        return dict(self._doc["anchors"])

    @property
    def notes(self) -> str:
        return self._doc["notes"]

    def cabello_fraction(self, k: int, d: int, j: int = 1) -> float | None:
        return self._doc["theory_cabello_fraction"].get(_key(k, d, j))

    def hardy_fraction(self, k: int, d: int) -> float | None:
        return self._doc["theory_hardy_fraction"].get(_key(k, d))

    def increase(self, k: int, d: int) -> float | None:
        return self._doc["theory_increase"].get(_key(k, d))

    def j_scan(self, k: int, d: int) -> list[float] | None:
        values = self._doc["j_scan"].get(_key(k, d))
        return list(values) if values is not None else None

    def schmidt_diagonal(self, k: int, d: int, j: int = 1) -> list[float] | None:
        values = self._doc["schmidt_diagonals"].get(_key(k, d, j))
        return list(values) if values is not None else None

    def experimental_fraction(self, k: int, d: int, j: int = 1) -> tuple[float, float] | None:
        pair = self._doc["experiment_fraction"].get(_key(k, d, j))
        return (pair[0], pair[1]) if pair is not None else None

    def experimental_bell_s(self, k: int, d: int, j: int = 1) -> tuple[float, float] | None:
        pair = self._doc["experiment_bell_s"].get(_key(k, d, j))
        return (pair[0], pair[1]) if pair is not None else None

    def table1_columns(self) -> list[int]:
        """Settings covered by the k-scan at d=2 (excluding the base k=2)."""
        return [3, 4, 5, 6]

    def table2_columns(self) -> list[int]:
        """Dimensions covered by the d-scan at k=2."""
        return [2, 3, 4]


@lru_cache(maxsize=1)
def load_reference() -> ReferenceTable:
    path = resources.files("cna.data").joinpath("reference.json")
    with path.open("r", encoding="utf-8") as f:
        return ReferenceTable(json.load(f))

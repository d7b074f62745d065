"""Golden fixtures: optimal states H_k_d_j and the published Schmidt-frame
measurement sets, shipped as data files.

State matrices are stored in the canonical row-is-Alice convention used by
the chain engine (the published raw matrices are gauge-ambiguous; the
shipped versions are anchored so the (2,2,1) fixture reproduces the golden
fraction 0.125000, and the same anchoring is applied uniformly).
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import numpy as np

from .chains import Scenario, StateMatrix


@lru_cache(maxsize=None)
def _load(name: str) -> dict:
    path = resources.files("cna.data").joinpath(name)
    with path.open("r", encoding="utf-8") as f:
        return json.load(f)


def fixture_names() -> list[str]:
    return sorted(_load("fixtures.json").keys())


def _fixture_doc(name: str) -> dict:
    table = _load("fixtures.json")
    if name not in table:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(sorted(table))}")
    return table[name]


def load_fixture(name: str) -> tuple[Scenario, StateMatrix]:
    """Return (scenario, state) for a fixture name like ``H_2_2_1``."""
    doc = _fixture_doc(name)
    matrix = np.array(doc["matrix"], dtype=np.complex128)
    state = StateMatrix.from_unnormalized(matrix)
    return Scenario(k=doc["k"], d=doc["d"], j=doc["j"]), state


def golden_frame(name: str) -> dict:
    """Published Schmidt-frame data for a fixture: ``lambdas`` plus the
    ``alice``/``bob`` measurement sets as lists of d x d row matrices."""
    table = _load("frames.json")
    if name not in table:
        raise KeyError(f"no golden frame for {name!r}")
    doc = table[name]
    return {
        "k": doc["k"],
        "d": doc["d"],
        "j": doc["j"],
        "lambdas": np.array(doc["lambdas"], dtype=np.float64),
        "alice": [np.array(m, dtype=np.complex128) for m in doc["alice"]],
        "bob": [np.array(m, dtype=np.complex128) for m in doc["bob"]],
    }

"""Pass/fail thresholds shared by the acceptance tests and the scenario runner."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=1)
def load() -> dict:
    text = resources.files("qarrival").joinpath("tolerances.json").read_text()
    return json.loads(text)


def get(section: str) -> dict:
    return dict(load()[section])

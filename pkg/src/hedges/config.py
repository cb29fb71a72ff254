"""Runtime configuration shared by the CLI and the HTTP service."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields

from hedges.inference import CLAIM_LEMMAS, CONFLICT_LEMMAS

STORE_ENV_VAR = "SHG_STORE"


@dataclass
class Config:
    store: str | None = None
    forest: str | None = None
    rules: list = field(default_factory=list)
    features: str = "F5"
    claim_lemmas: frozenset = CLAIM_LEMMAS
    conflict_lemmas: frozenset = CONFLICT_LEMMAS
    theta: float = 0.7
    theta_prime: float = 0.05
    port: int = 8607
    bind: str = "127.0.0.1"
    seed: int | None = None

    def validate_paths(self):
        for path in [self.store, self.forest, *self.rules]:
            if path is not None and not os.path.exists(path):
                raise FileNotFoundError(f"configured path does not exist: "
                                        f"{path}")


def load_config(path: str | None = None, overrides: dict | None = None
                ) -> Config:
    """Config from an optional JSON file, explicit overrides and the
    SHG_STORE environment variable, in increasing precedence."""
    values: dict = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            loaded = json.load(fh)
        known = {f.name for f in fields(Config)}
        unknown = set(loaded) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        values.update(loaded)
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    env_store = os.environ.get(STORE_ENV_VAR)
    if env_store:
        values["store"] = env_store
    for key in ("claim_lemmas", "conflict_lemmas"):
        if key in values:
            values[key] = frozenset(values[key])
    return Config(**values)

"""Self-describing JSON model dumps; round-trips reproduce predictions.

Floats serialize through json's repr-based formatting, which is exact for
float64, so a loaded model predicts identically to the saved one.
"""

from __future__ import annotations

import json
from pathlib import Path


def save_model(model, path: str | Path, scaler=None) -> None:
    payload = {"kind": model.kind, "state": model.to_state()}
    if scaler is not None:
        payload["scaler"] = scaler.to_state()
    Path(path).write_text(json.dumps(payload, sort_keys=True))


def load_model(path: str | Path):
    from . import _REGISTRY
    from .scaling import StandardScaler

    payload = json.loads(Path(path).read_text())
    cls = _REGISTRY[payload["kind"]]
    model = cls.from_state(payload["state"])
    scaler = None
    if "scaler" in payload:
        scaler = StandardScaler.from_state(payload["scaler"])
    return model, scaler

from __future__ import annotations

import numpy as np

BLOCK = 512


class Recorder:
    """Preallocated storage that drops the first ``burn_in`` iterations."""

    def __init__(self, iters: int, burn_in: int, shapes: dict[str, tuple]):
        if iters < 1:
            raise ValueError("iters must be >= 1")
        if burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        self.iters = iters
        self.burn_in = burn_in
        self.data = {k: np.empty((iters, *shape)) for k, shape in shapes.items()}

    @property
    def total(self) -> int:
        return self.iters + self.burn_in

    def put(self, k: int, **values):
        i = k - self.burn_in
        if i >= 0:
            for name, v in values.items():
                self.data[name][i] = v


def as_init(init, defaults: dict) -> dict:
    """Merge a user init (None, scalar sigma2, or dict) over model defaults."""
    out = dict(defaults)
    if init is None:
        return out
    if isinstance(init, str):
        out["mode"] = init
        return out
    if isinstance(init, dict):
        out.update(init)
        return out
    out["sigma2"] = float(init)
    return out


def check_positive_init(**values):
    for name, v in values.items():
        if v is not None and not (np.isfinite(v) and v > 0):
            raise ValueError(f"initial {name} must be > 0, got {v!r}")

"""Run configuration: JSON schema, validation, defaults, and the resolved
echo written next to run outputs."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from .errors import ParseError, ValidationError
from .manifold import make_target

REQUIRED_KEYS = ("n", "s", "p", "target", "cells_per_axis", "h", "steps")

DEFAULTS = {
    "box": None,              # unit box for the given n
    "collar_width": 0.0,
    "inner_tol": 1e-8,
    "inner_max_iters": 5000,
    "boundary_mode": "free",
    "init": "constant",
    "seed": 0,
    "out_dir": "gflow_out",
}

KNOWN_KEYS = set(REQUIRED_KEYS) | set(DEFAULTS)

BOUNDARY_MODES = ("free", "pinned_collar")
INIT_PRESETS = ("constant", "half_equator", "random_uniform")


@dataclass
class RunConfig:
    n: int
    s: float
    p: float
    target: str
    cells_per_axis: tuple
    h: float
    steps: int
    box: tuple
    collar_width: float
    inner_tol: float
    inner_max_iters: int
    boundary_mode: str
    init: str
    seed: int
    out_dir: str

    def resolved(self) -> dict:
        d = asdict(self)
        d["cells_per_axis"] = list(self.cells_per_axis)
        d["box"] = [list(self.box[0]), list(self.box[1])]
        return d


def _need_int(raw, key, minimum=None):
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ValidationError(key, f"{key} must be an integer, got {raw!r}")
    if minimum is not None and raw < minimum:
        raise ValidationError(key, f"{key} must be >= {minimum}, got {raw}")
    return raw


def _need_real(raw, key):
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ValidationError(key, f"{key} must be a number, got {raw!r}")
    return float(raw)


def validate_config(raw: dict) -> RunConfig:
    """Check types/ranges, fill defaults, and normalize shapes."""
    if not isinstance(raw, dict):
        raise ValidationError("<root>", "config must be a JSON object")
    for key in raw:
        if key not in KNOWN_KEYS:
            raise ValidationError(key, f"unknown config key: {key}")
    for key in REQUIRED_KEYS:
        if key not in raw:
            raise ValidationError(key, f"missing required config key: {key}")
    merged = {**DEFAULTS, **raw}

    n = _need_int(merged["n"], "n")
    if n not in (1, 2):
        raise ValidationError("n", f"n must be 1 or 2, got {n}")

    s = _need_real(merged["s"], "s")
    if not 0.0 < s < 1.0:
        raise ValidationError("s", f"s must lie in (0,1), got {s}")

    p = _need_real(merged["p"], "p")
    if not p > 1.0:
        raise ValidationError("p", f"p must lie in (1,inf), got {p}")

    target = merged["target"]
    if not isinstance(target, str):
        raise ValidationError("target", "target must be a string")
    try:
        make_target(target)
    except ValueError as e:
        raise ValidationError("target", str(e)) from None

    cells = merged["cells_per_axis"]
    if isinstance(cells, int) and not isinstance(cells, bool):
        cells = [cells] * n
    if (not isinstance(cells, list) or len(cells) != n
            or any(isinstance(c, bool) or not isinstance(c, int) for c in cells)):
        raise ValidationError(
            "cells_per_axis", f"cells_per_axis must be an int or {n} ints"
        )
    if any(c < 2 for c in cells):
        raise ValidationError("cells_per_axis", "need at least 2 cells per axis")

    box = merged["box"]
    if box is None:
        box = [[0.0] * n, [1.0] * n]
    if n == 1 and isinstance(box, list) and len(box) == 2 and all(
        isinstance(b, (int, float)) and not isinstance(b, bool) for b in box
    ):
        box = [[float(box[0])], [float(box[1])]]
    try:
        lo = [float(v) for v in box[0]]
        hi = [float(v) for v in box[1]]
    except (TypeError, ValueError, IndexError):
        raise ValidationError("box", "box must be [lower_corner, upper_corner]")
    if len(lo) != n or len(hi) != n:
        raise ValidationError("box", f"box corners must have {n} coordinates")
    if any(u <= l for l, u in zip(lo, hi)):
        raise ValidationError("box", "upper corner must exceed lower corner")

    h = _need_real(merged["h"], "h")
    if not h > 0:
        raise ValidationError("h", f"h must be positive, got {h}")

    steps = _need_int(merged["steps"], "steps", minimum=1)
    collar = _need_real(merged["collar_width"], "collar_width")
    if collar < 0:
        raise ValidationError("collar_width", "collar_width must be >= 0")

    inner_tol = _need_real(merged["inner_tol"], "inner_tol")
    if not inner_tol > 0:
        raise ValidationError("inner_tol", "inner_tol must be positive")
    inner_max = _need_int(merged["inner_max_iters"], "inner_max_iters", minimum=1)

    mode = merged["boundary_mode"]
    if mode not in BOUNDARY_MODES:
        raise ValidationError(
            "boundary_mode", f"boundary_mode must be one of {BOUNDARY_MODES}"
        )

    init = merged["init"]
    if not isinstance(init, str) or not (
        init in INIT_PRESETS or init.startswith("snapshot:")
    ):
        raise ValidationError(
            "init",
            f"init must be one of {INIT_PRESETS} or 'snapshot:<path>'",
        )

    seed = _need_int(merged["seed"], "seed", minimum=0)
    out_dir = merged["out_dir"]
    if not isinstance(out_dir, str) or not out_dir:
        raise ValidationError("out_dir", "out_dir must be a nonempty string")

    return RunConfig(
        n=n, s=s, p=p, target=target,
        cells_per_axis=tuple(cells), h=h, steps=steps,
        box=(tuple(lo), tuple(hi)),
        collar_width=collar, inner_tol=inner_tol, inner_max_iters=inner_max,
        boundary_mode=mode, init=init, seed=seed, out_dir=out_dir,
    )


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(f"cannot read config {path}: {e}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(
            f"{path}: line {e.lineno}, column {e.colno}: {e.msg}"
        ) from None
    return validate_config(raw)

"""CSV matrix and flat key = value metadata serialization.

Matrices are written with %.17g so doubles round-trip exactly; rows are
space, columns are time throughout.
"""

from pathlib import Path

import numpy as np


def save_matrix(path: str | Path, matrix: np.ndarray) -> None:
    np.savetxt(path, np.atleast_2d(matrix), delimiter=",", fmt="%.17g")


def load_matrix(path: str | Path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, delimiter=","))


def save_meta(path: str | Path, meta: dict) -> None:
    lines = []
    for key, value in meta.items():
        if isinstance(value, (list, tuple, np.ndarray)):
            value = " ".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in value)
        elif isinstance(value, float):
            value = f"{value:.17g}"
        lines.append(f"{key} = {value}\n")
    Path(path).write_text("".join(lines))


def load_meta(path: str | Path) -> dict[str, str]:
    meta: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        meta[key.strip()] = value.strip()
    return meta

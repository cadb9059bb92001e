"""Model config parsing and CSV emission."""
from __future__ import annotations

import csv
import json
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .measure import DiscreteMeasure
from .phase_space import PiecewiseLinearMap
from .symbolic import IfsModel


class ConfigError(ValueError):
    pass


def _field(obj, key, where, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise ConfigError(f"{where}: missing field '{key}'")
    val = obj[key]
    if kind is not None and (not isinstance(val, kind) or isinstance(val, bool)):
        raise ConfigError(f"{where}.{key}: expected {getattr(kind, '__name__', kind)}, got {val!r}")
    return val


def model_from_dict(cfg: Mapping, name: str = "config") -> IfsModel:
    """Build a model from ``{phase_space: {lo, hi}, maps: [...], weights: [...]}``.

    Maps are ``{"type": "affine", "a": .., "b": ..}`` (clipped into the phase
    space) or ``{"type": "pwl", "vertices": [[x, y], ...]}``.
    """
    num = (int, float)
    ps = _field(cfg, "phase_space", "config", dict)
    bounds = (float(_field(ps, "lo", "phase_space", num)), float(_field(ps, "hi", "phase_space", num)))
    maps_cfg = _field(cfg, "maps", "config", list)
    weights = _field(cfg, "weights", "config", list)
    maps = []
    for i, mc in enumerate(maps_cfg):
        where = f"maps[{i}]"
        kind = _field(mc, "type", where, str)
        try:
            if kind == "affine":
                a = _field(mc, "a", where, num)
                b = _field(mc, "b", where, num)
                maps.append(PiecewiseLinearMap.affine(float(a), float(b), bounds))
            elif kind == "pwl":
                verts = _field(mc, "vertices", where, list)
                maps.append(PiecewiseLinearMap(verts, bounds=bounds))
            else:
                raise ConfigError(f"{where}.type: unknown map type {kind!r} (use 'affine' or 'pwl')")
        except ConfigError:
            raise
        except (ValueError, TypeError) as e:
            raise ConfigError(f"{where}: {e}") from None
    for j, w in enumerate(weights):
        if not isinstance(w, num) or isinstance(w, bool):
            raise ConfigError(f"weights[{j}]: expected a number, got {w!r}")
    try:
        return IfsModel(tuple(maps), tuple(float(w) for w in weights), name=name)
    except ValueError as e:
        raise ConfigError(f"config: {e}") from None


def load_model(path: str | Path) -> IfsModel:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"{path}: {e.strerror}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    return model_from_dict(cfg, name=str(path))


def fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


@contextmanager
def _open_out(path):
    if path is None or str(path) == "-":
        yield sys.stdout
    else:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        with p.open("w", newline="") as fh:
            yield fh


def write_csv(path, meta: Mapping[str, object], columns: Sequence[str], rows: Iterable[Sequence]):
    """Write ``#``-prefixed ``key=value`` metadata lines, a header row, then ``rows``."""
    with _open_out(path) as fh:
        for k, v in meta.items():
            fh.write(f"# {k}={fmt(v)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([fmt(v) for v in r])


def read_csv(path) -> tuple[dict[str, str], list[str], list[list[str]]]:
    """Inverse of :func:`write_csv`; values are returned as strings."""
    meta: dict[str, str] = {}
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for ln in lines:
        if ln.startswith("#"):
            k, _, v = ln[1:].strip().partition("=")
            meta[k] = v
        else:
            body.append(ln)
    rows = list(csv.reader(body))
    return meta, rows[0], rows[1:]


def write_measure(path, mu: DiscreteMeasure, meta: Mapping[str, object]):
    write_csv(path, meta, ["position", "weight"], zip(mu.positions.tolist(), mu.weights.tolist()))


def read_measure(path) -> DiscreteMeasure:
    _, _, rows = read_csv(path)
    return DiscreteMeasure([float(r[0]) for r in rows], [float(r[1]) for r in rows])

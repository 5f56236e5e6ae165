"""
CSV / JSON persistence. Every table goes through pandas; indices are 1-based.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Iterable
from pathlib import Path

import numpy as np
import pandas as pd

from rank2sim.cadlag import GridPath, JumpDriftPath, Path as CadlagPath
from rank2sim.graphgen import ComponentMassList, Rank2Graph
from rank2sim.params import ModelSpec

log = logging.getLogger(__name__)


def _ensure_parent(path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_json(path: str | Path, obj) -> Path:
    path = _ensure_parent(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + '\n')
    return path


def write_text(path: str | Path, text: str) -> Path:
    path = _ensure_parent(path)
    path.write_text(text if text.endswith('\n') else text + '\n')
    return path


def write_csv(path: str | Path, frame: pd.DataFrame) -> Path:
    path = _ensure_parent(path)
    frame.to_csv(path, index=False, float_format='%.17g')
    log.debug(f'[io] wrote {len(frame)} rows to {path}')
    return path


# ── model specs ─────────────────────────────────────────────

def write_spec(path: str | Path, spec: ModelSpec) -> Path:
    return write_json(path, spec.to_document())


def read_spec(path: str | Path) -> ModelSpec:
    return ModelSpec.from_document(Path(path).read_text())


# ── graphs and components ───────────────────────────────────

def edges_frame(g: Rank2Graph) -> pd.DataFrame:
    return pd.DataFrame({
        'type_a': g.type_a.astype(int),
        'index_a': g.index_a + 1,
        'type_b': g.type_b.astype(int),
        'index_b': g.index_b + 1,
    })


def components_frame(masses: ComponentMassList) -> pd.DataFrame:
    counts = masses.counts if masses.counts is not None else np.zeros((len(masses), 2), dtype=int)
    return pd.DataFrame({
        'component_id': np.arange(1, len(masses) + 1),
        'mass1': masses.masses[:, 0],
        'mass2': masses.masses[:, 1],
        'num_type1': counts[:, 0],
        'num_type2': counts[:, 1],
    })


def masses_frame(rows: Iterable[tuple[int, int, np.ndarray]]) -> pd.DataFrame:
    """rows of (rung, replica, k x 2 mass array) -> rung,replica,rank,mass1,mass2."""
    records = []
    for rung, replica, top in rows:
        for rank, (m1, m2) in enumerate(np.asarray(top).reshape(-1, 2), start=1):
            records.append((rung, replica, rank, float(m1), float(m2)))
    return pd.DataFrame.from_records(records, columns=['rung', 'replica', 'rank', 'mass1', 'mass2'])


def zeta_frame(rows: Iterable[tuple[int, np.ndarray]], rung: int | None = None) -> pd.DataFrame:
    """rows of (replica, lengths) -> [rung,]replica,rank,length."""
    records = []
    for replica, lengths in rows:
        for rank, length in enumerate(np.asarray(lengths).ravel(), start=1):
            records.append((replica, rank, float(length)))
    frame = pd.DataFrame.from_records(records, columns=['replica', 'rank', 'length'])
    if rung is not None:
        frame.insert(0, 'rung', rung)
    return frame


# ── paths ───────────────────────────────────────────────────

def path_frame(path: CadlagPath) -> pd.DataFrame:
    """time,value,is_jump at event times (JumpDriftPath) or grid and jump times (GridPath)."""
    if isinstance(path, GridPath):
        times, values = path.events()
        is_jump = np.isin(times, path.jump_times)
    else:
        times = np.union1d([0.0, path.horizon], path.times)
        values = path._value(times)
        is_jump = np.isin(times, path.times)
    return pd.DataFrame({'time': times, 'value': values, 'is_jump': is_jump})


def write_path(path_out: str | Path, path: JumpDriftPath | GridPath) -> Path:
    return write_csv(path_out, path_frame(path))

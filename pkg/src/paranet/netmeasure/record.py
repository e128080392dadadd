"""The 33-feature network signature and its CSV form."""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from ..netbuild import Network
from . import measures as M
from .community import detect_communities, modularity

# per-node measures, in signature order
NODE_MEASURES = (
    "k", "B", "cc", "N", "Ecc", "EC", "C",
    "Sb2", "Sm2", "Sb3", "Sm3", "Sb4", "Sm4",
    "alpha_inf", "alpha2", "alpha3",
)
FEATURE_NAMES = tuple(f"{stat}_{m}" for m in NODE_MEASURES for stat in ("mean", "std")) + ("Q",)
CSV_HEADER = ("doc_id", "kind", "sample_index") + FEATURE_NAMES


@dataclass(frozen=True)
class MeasurementRecord:
    doc_id: str
    kind: str
    sample_index: int | None
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(FEATURE_NAMES):
            raise ValueError(f"expected {len(FEATURE_NAMES)} features, got {len(self.values)}")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(FEATURE_NAMES, self.values))

    def __getitem__(self, name: str) -> float:
        return self.values[FEATURE_NAMES.index(name)]


def node_measures(net: Network, community_seed: int = 0, restarts: int = 10
                  ) -> tuple[dict[str, np.ndarray], float]:
    """All per-node measures plus the modularity of the detected partition."""
    dist = M.distances(net)
    t = M.transition_matrix(net)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", M.ConvergenceWarning)
        ec = M.eigenvector_centrality(net)
    values = {
        "k": M.degree(net),
        "B": M.betweenness(net),
        "cc": M.clustering(net),
        "N": M.neighborhood(net, 3, dist=dist),
        "Ecc": M.eccentricity(net, dist=dist),
        "EC": ec,
        "C": M.closeness(net, dist=dist),
        "alpha_inf": M.generalized_accessibility(net, transition=t),
        "alpha2": M.accessibility(net, 2, transition=t),
        "alpha3": M.accessibility(net, 3, transition=t),
    }
    backbone = M.symmetry_levels(net, 4, merged=False)
    merged = M.symmetry_levels(net, 4, merged=True)
    for h in (2, 3, 4):
        values[f"Sb{h}"] = backbone[:, h]
        values[f"Sm{h}"] = merged[:, h]
    q = modularity(net, detect_communities(net, seed=community_seed, restarts=restarts))
    return values, q


def summarize(per_node: Mapping[str, np.ndarray], q: float, doc_id: str = "",
              kind: str = "RT", sample_index: int | None = None) -> MeasurementRecord:
    """Mean and population standard deviation of each measure, then Q."""
    out = []
    for name in NODE_MEASURES:
        x = np.asarray(per_node[name], dtype=float)
        out.append(float(x.mean()))
        out.append(float(x.std()))
    out.append(float(q))
    return MeasurementRecord(doc_id, kind, sample_index, tuple(out))


def measure_network(net: Network, doc_id: str = "", kind: str = "RT",
                    sample_index: int | None = None, community_seed: int = 0
                    ) -> MeasurementRecord:
    per_node, q = node_measures(net, community_seed=community_seed)
    return summarize(per_node, q, doc_id, kind, sample_index)


def write_csv(records: Iterable[MeasurementRecord], path: str | Path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow([r.doc_id, r.kind, "" if r.sample_index is None else r.sample_index,
                        *(repr(v) for v in r.values)])


def read_csv(path: str | Path) -> list[MeasurementRecord]:
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected measurement header")
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise ValueError(f"{path}:{lineno}: expected {len(CSV_HEADER)} columns")
            values = tuple(float(v) for v in row[3:])
            if not all(math.isfinite(v) for v in values):
                raise ValueError(f"{path}:{lineno}: non-finite feature value")
            records.append(MeasurementRecord(row[0], row[1], int(row[2]) if row[2] else None,
                                             values))
    return records

"""Real-vs-shuffled ensembles, standardization, informativeness and CV analyses."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .corpus import RT, SS, SW, Document, shuffle_sentences, shuffle_words, truncate_paragraphs
from .netbuild import Network, build_weighted, threshold_density
from .netmeasure.record import FEATURE_NAMES, MeasurementRecord, measure_network


class ZeroVarianceError(ValueError):
    def __init__(self, feature: str):
        self.feature = feature
        super().__init__(f"zero-variance feature: {feature}")


@dataclass
class Ensemble:
    doc_id: str
    rt: MeasurementRecord
    sw: list[MeasurementRecord]
    ss: list[MeasurementRecord] | None = None

    @property
    def records(self) -> list[MeasurementRecord]:
        return [self.rt, *self.sw, *(self.ss or [])]

    def variant(self, kind: str) -> list[MeasurementRecord]:
        if kind == SW:
            return self.sw
        if kind == SS:
            if self.ss is None:
                raise ValueError(f"{self.doc_id}: ensemble has no SS replicates")
            return self.ss
        raise ValueError(f"unknown shuffled variant {kind!r}")


def replicate_documents(doc: Document, samples: int, base_seed: int, enable_ss: bool = True
                        ) -> Iterator[Document]:
    """RT first, then SW replicates, then SS replicates; replicate ``i`` uses ``base_seed + i``."""
    yield doc
    for i in range(samples):
        yield shuffle_words(doc, base_seed + i, sample_index=i)
    if enable_ss:
        for i in range(samples):
            yield shuffle_sentences(doc, base_seed + i, sample_index=i)


def study_dataset(records: Sequence[MeasurementRecord], replicates: int = 1
                  ) -> list[MeasurementRecord]:
    """Balanced per-document dataset: RT plus the first ``replicates`` SW and SS replicates.

    Standardization, criterion A and classification work on this dataset so
    that every kind carries the same weight; criterion B keeps the full
    ensembles.
    """
    return [r for r in records
            if r.kind == RT or (r.sample_index is not None and r.sample_index < replicates)]


def document_network(doc: Document, density: float = 0.05) -> Network:
    return threshold_density(build_weighted(doc.paragraphs), density)


def _measure_doc(args) -> MeasurementRecord:
    doc, density, community_seed = args
    net = document_network(doc, density)
    return measure_network(net, doc.id, doc.kind, doc.sample_index, community_seed=community_seed)


def build_ensemble(doc: Document, nodes: int, samples: int = 30, base_seed: int = 0,
                   density: float = 0.05, enable_ss: bool = True, workers: int = 1
                   ) -> Ensemble:
    """Truncate, shuffle, build, threshold and measure one document's ensemble."""
    doc = truncate_paragraphs(doc, nodes)
    jobs = [(d, density, base_seed) for d in replicate_documents(doc, samples, base_seed, enable_ss)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            records = list(pool.map(_measure_doc, jobs))
    else:
        records = [_measure_doc(j) for j in jobs]
    sw = records[1:1 + samples]
    ss = records[1 + samples:] if enable_ss else None
    return Ensemble(doc.id, records[0], sw, ss)


def ensembles_from_records(records: Sequence[MeasurementRecord]) -> list[Ensemble]:
    """Regroup flat records (e.g. read from CSV) into per-document ensembles."""
    by_doc: dict[str, dict] = {}
    for r in records:
        slot = by_doc.setdefault(r.doc_id, {RT: None, SW: [], SS: []})
        if r.kind == RT:
            slot[RT] = r
        else:
            slot[r.kind].append(r)
    out = []
    for doc_id, slot in by_doc.items():
        if slot[RT] is None:
            raise ValueError(f"{doc_id}: no RT record")
        key = lambda r: (r.sample_index is None, r.sample_index)
        out.append(Ensemble(doc_id, slot[RT], sorted(slot[SW], key=key),
                            sorted(slot[SS], key=key) or None))
    return out


@dataclass
class FeatureMatrix:
    values: np.ndarray
    kinds: tuple[str, ...]
    doc_ids: tuple[str, ...]
    sample_indices: tuple[int | None, ...]
    names: tuple[str, ...] = FEATURE_NAMES
    standardized: bool = False
    means: np.ndarray | None = None
    stds: np.ndarray | None = None
    zero_variance: tuple[str, ...] = field(default_factory=tuple)

    @classmethod
    def from_records(cls, records: Sequence[MeasurementRecord]) -> "FeatureMatrix":
        return cls(np.array([r.values for r in records], dtype=float),
                   tuple(r.kind for r in records), tuple(r.doc_id for r in records),
                   tuple(r.sample_index for r in records))

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.names.index(name)]

    def rows_of(self, kind: str) -> np.ndarray:
        return self.values[np.array([k == kind for k in self.kinds], dtype=bool)]

    def subset(self, mask) -> "FeatureMatrix":
        mask = np.asarray(mask, dtype=bool)
        pick = lambda seq: tuple(x for x, keep in zip(seq, mask) if keep)
        return FeatureMatrix(self.values[mask], pick(self.kinds), pick(self.doc_ids),
                             pick(self.sample_indices), self.names, self.standardized,
                             self.means, self.stds, self.zero_variance)


def _is_constant(col: np.ndarray) -> bool:
    return float(col.std()) <= 1e-12 * max(1.0, float(np.abs(col).max()))


def standardize(matrix: FeatureMatrix, on_constant: str = "error",
                reference: FeatureMatrix | None = None) -> FeatureMatrix:
    """Per-column z-score (population standard deviation).

    Means and stds come from ``reference`` when given (for instance the
    balanced study dataset) and from ``matrix`` itself otherwise.
    ``on_constant="zero"`` maps columns that are constant in the reference
    to 0 and lists them in ``zero_variance`` instead of raising.
    """
    ref = (matrix if reference is None else reference).values
    if ref.shape[0] < 2:
        raise ValueError("standardization needs at least two rows")
    if ref.shape[1] != matrix.values.shape[1]:
        raise ValueError("reference and matrix have different feature counts")
    means = ref.mean(axis=0)
    stds = ref.std(axis=0)
    constant = [j for j in range(ref.shape[1]) if _is_constant(ref[:, j])]
    if constant and on_constant == "error":
        raise ZeroVarianceError(matrix.names[constant[0]])
    safe = stds.copy()
    safe[constant] = 1.0
    z = (matrix.values - means) / safe
    z[:, constant] = 0.0
    stds = stds.copy()
    stds[constant] = 0.0
    return FeatureMatrix(z, matrix.kinds, matrix.doc_ids, matrix.sample_indices, matrix.names,
                         True, means, stds, tuple(matrix.names[j] for j in constant))


def criterion_a(matrix: FeatureMatrix) -> dict:
    """Mean and std of each standardized feature per kind, with RT gaps to SW and SS."""
    if not matrix.standardized:
        raise ValueError("criterion A expects a standardized matrix")
    missing = [k for k in (RT, SW, SS) if k not in matrix.kinds]
    if missing:
        raise ValueError(f"criterion A needs RT, SW and SS rows; missing {missing}")
    groups = {k: matrix.rows_of(k) for k in (RT, SW, SS)}
    report = {}
    for j, name in enumerate(matrix.names):
        entry = {k: {"mean": float(g[:, j].mean()), "std": float(g[:, j].std())}
                 for k, g in groups.items()}
        entry["gap_rt_sw"] = entry[RT]["mean"] - entry[SW]["mean"]
        entry["gap_rt_ss"] = entry[RT]["mean"] - entry[SS]["mean"]
        entry["zero_variance"] = name in matrix.zero_variance
        report[name] = entry
    return report


def zscore(x: float, reference: np.ndarray) -> float:
    """Standard score of ``x`` against ``reference``; infinite when the reference is constant."""
    mu = float(np.mean(reference))
    sigma = float(np.std(reference))
    scale = 1e-12 * max(1.0, abs(mu))
    if sigma <= scale:
        if abs(x - mu) <= scale:
            return 0.0
        return math.copysign(math.inf, x - mu)
    return (x - mu) / sigma


def criterion_b(ensemble: Ensemble, variant: str, z_threshold: float = 2.0) -> dict:
    """z-score of the real text against its own shuffled replicates, per feature."""
    shuffled = ensemble.variant(variant)
    if len(shuffled) < 2:
        raise ValueError("criterion B needs at least two shuffled replicates")
    ref = np.array([r.values for r in shuffled])
    out = {}
    for j, name in enumerate(FEATURE_NAMES):
        z = zscore(ensemble.rt.values[j], ref[:, j])
        out[name] = {"z": z, "informative": bool(abs(z) >= z_threshold)}
    return out


def criterion_b_table(ensembles: Sequence[Ensemble], z_threshold: float = 2.0,
                      variants: Sequence[str] = (SW, SS)) -> dict:
    """Per feature and variant: share of documents flagged informative plus the z list."""
    table = {name: {} for name in FEATURE_NAMES}
    for variant in variants:
        usable = [e for e in ensembles if variant == SW or e.ss is not None]
        per_doc = [(e.doc_id, criterion_b(e, variant, z_threshold)) for e in usable]
        for name in FEATURE_NAMES:
            flags = [res[name]["informative"] for _, res in per_doc]
            table[name][variant] = {
                "percent_informative": 100.0 * sum(flags) / len(flags) if flags else float("nan"),
                "z": {doc: res[name]["z"] for doc, res in per_doc},
            }
    return table


def coefficient_of_variation(x: np.ndarray) -> float:
    mean = float(np.mean(x))
    if mean == 0:
        return float("nan")
    return float(np.std(x)) / mean


def bootstrap_cv(x: np.ndarray, boot: int, rng: np.random.Generator, level: float = 0.95
                 ) -> tuple[float, float]:
    idx = rng.integers(0, len(x), size=(boot, len(x)))
    samples = x[idx]
    means = samples.mean(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        cvs = samples.std(axis=1) / means
    cvs = cvs[np.isfinite(cvs)]
    if len(cvs) == 0:
        return float("nan"), float("nan")
    lo, hi = np.percentile(cvs, [100 * (1 - level) / 2, 100 * (1 + level) / 2])
    return float(lo), float(hi)


def cv_analysis(syntax: np.ndarray, semantics: np.ndarray, boot: int = 1000, seed: int = 0,
                names: Sequence[str] = FEATURE_NAMES) -> dict:
    """Compare feature variability across languages (syntax) and across texts (semantics).

    ``syntax`` rows are one text in many languages, ``semantics`` rows are
    many texts in one language. A feature is "semantics" when its semantics
    CI lies strictly above the syntax CI, "syntax" when strictly below,
    otherwise "both"; features with a zero mean are "undefined".
    """
    syntax = np.asarray(syntax, dtype=float)
    semantics = np.asarray(semantics, dtype=float)
    for label, x in (("syntax", syntax), ("semantics", semantics)):
        if x.shape[0] < 3:
            raise ValueError(f"CV analysis needs at least 3 documents in the {label} set")
    rng = np.random.default_rng(seed)
    report = {}
    for j, name in enumerate(names):
        cv_syn = coefficient_of_variation(syntax[:, j])
        cv_sem = coefficient_of_variation(semantics[:, j])
        ci_syn = bootstrap_cv(syntax[:, j], boot, rng)
        ci_sem = bootstrap_cv(semantics[:, j], boot, rng)
        if not (math.isfinite(cv_syn) and math.isfinite(cv_sem)):
            cls = "undefined"
        elif ci_sem[0] > ci_syn[1]:
            cls = "semantics"
        elif ci_sem[1] < ci_syn[0]:
            cls = "syntax"
        else:
            cls = "both"
        report[name] = {"cv_syntax": cv_syn, "cv_semantics": cv_sem,
                        "ci_syntax": list(ci_syn), "ci_semantics": list(ci_sem), "class": cls}
    return report

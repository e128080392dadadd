"""Command-line pipeline: build networks, measure them, run experiments and classifiers."""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import classify as clf
from .corpus import (RT, SS, SW, CorpusError, load_manifest, parse_document, read_transcription,
                     truncate_paragraphs, vote_transcription)
from .experiment import (FeatureMatrix, criterion_a, criterion_b_table, cv_analysis,
                         document_network, ensembles_from_records, replicate_documents,
                         standardize, study_dataset)
from .netio import NetworkFormatError, read_graphml, write_edgelist, write_graphml
from .netmeasure.record import FEATURE_NAMES, MeasurementRecord, measure_network, read_csv, write_csv

log = logging.getLogger("paranet")

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    nodes_per_network: int = 0
    density: float = 0.05
    samples: int = 30
    base_seed: int = 0
    z_threshold: float = 2.0
    svm_c: float | str = 1.0
    enable_ss: bool = True
    output: str = "paranet-out"
    workers: int = 1
    dataset_replicates: int = 1
    bootstrap: int = 1000

    def validate(self) -> "RunConfig":
        if not isinstance(self.nodes_per_network, int) or self.nodes_per_network < 10:
            raise ConfigError("nodes_per_network must be an integer >= 10")
        if not 0 < self.density <= 1:
            raise ConfigError("density must lie in (0, 1]")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if self.svm_c != "grid":
            try:
                self.svm_c = float(self.svm_c)
            except (TypeError, ValueError):
                raise ConfigError("svm_c must be a positive number or 'grid'") from None
            if not self.svm_c > 0:
                raise ConfigError("svm_c must be positive")
        if self.workers < 1 or self.dataset_replicates < 1 or self.bootstrap < 1:
            raise ConfigError("workers, dataset_replicates and bootstrap must be >= 1")
        return self

    @classmethod
    def load(cls, path: str | Path | None, overrides: dict) -> "RunConfig":
        data = {}
        if path:
            try:
                data = json.loads(Path(path).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config {path}: {exc}") from exc
            if not isinstance(data, dict):
                raise ConfigError(f"config {path} must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data).validate()


def _dump_json(obj, path: Path):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n",
                    encoding="utf-8")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o)}")


def _finite(obj):
    """Replace infinities/NaN by strings so reports stay strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def network_stem(doc_id: str, kind: str, sample_index: int | None) -> str:
    return f"{doc_id}.{kind}.{0 if sample_index is None else sample_index}"


# -- build -----------------------------------------------------------------

def _build_one(args):
    doc, density, out_dir = args
    net = document_network(doc, density)
    stem = network_stem(doc.id, doc.kind, doc.sample_index)
    attrs = {"doc_id": doc.id, "kind": doc.kind}
    if doc.sample_index is not None:
        attrs["sample_index"] = doc.sample_index
    write_graphml(net, out_dir / f"{stem}.graphml", **attrs)
    write_edgelist(net, out_dir / f"{stem}.edges")
    return stem


def cmd_build(manifest: str | Path, cfg: RunConfig) -> int:
    out = Path(cfg.output)
    net_dir = out / "networks"
    net_dir.mkdir(parents=True, exist_ok=True)
    # the output path is left out so that relocated runs stay byte-identical
    settings = {k: v for k, v in dataclasses.asdict(cfg).items() if k != "output"}
    _dump_json(settings, out / "run_config.json")
    errors = []
    built = 0
    try:
        entries = load_manifest(manifest)
    except (OSError, CorpusError, json.JSONDecodeError) as exc:
        errors.append({"document": None, "stage": "manifest", "error": str(exc)})
        entries = []
    for entry in entries:
        try:
            doc = truncate_paragraphs(parse_document(entry.load()), cfg.nodes_per_network)
            jobs = [(d, cfg.density, net_dir) for d in
                    replicate_documents(doc, cfg.samples, cfg.base_seed, cfg.enable_ss)]
            if cfg.workers > 1:
                with ProcessPoolExecutor(cfg.workers) as pool:
                    built += len(list(pool.map(_build_one, jobs)))
            else:
                built += len([_build_one(j) for j in jobs])
            log.info("built %s", entry.id)
        except (OSError, UnicodeDecodeError, ValueError) as exc:
            log.error("%s: %s", entry.id, exc)
            errors.append({"document": entry.id, "stage": "build", "error": str(exc)})
    _dump_json({"errors": errors}, out / "errors.json")
    log.info("%d networks written to %s", built, net_dir)
    return EXIT_PARTIAL if errors else EXIT_OK


# -- measure ---------------------------------------------------------------

_STEM = re.compile(r"^(?P<doc>[\w\-]+)\.(?P<kind>RT|SW|SS)\.(?P<sample>\d+)$")


def _measure_file(args) -> MeasurementRecord:
    path, seed = args
    net, attrs = read_graphml(path)
    m = _STEM.match(path.name[: -len(".graphml")])
    doc_id = attrs.get("doc_id") or (m and m["doc"])
    kind = attrs.get("kind") or (m and m["kind"])
    if not doc_id or kind not in (RT, SW, SS):
        raise NetworkFormatError(f"malformed network file {path}: cannot tell document and kind")
    sample = None
    if kind != RT:
        sample = int(attrs.get("sample_index", m["sample"] if m else 0))
    return measure_network(net, doc_id, kind, sample, community_seed=seed)


def _sort_key(r: MeasurementRecord):
    return (r.doc_id, (RT, SW, SS).index(r.kind), -1 if r.sample_index is None else r.sample_index)


def cmd_measure(networks: str | Path, out_csv: str | Path, seed: int = 0, workers: int = 1) -> int:
    files = sorted(Path(networks).glob("*.graphml"))
    if not files:
        raise ConfigError(f"no .graphml files in {networks}")
    jobs = [(f, seed) for f in files]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            records = list(pool.map(_measure_file, jobs))
    else:
        records = [_measure_file(j) for j in jobs]
    records.sort(key=_sort_key)
    Path(out_csv).parent.mkdir(parents=True, exist_ok=True)
    write_csv(records, out_csv)
    log.info("%d networks measured into %s", len(records), out_csv)
    return EXIT_OK


# -- experiment ------------------------------------------------------------

def _dataset_labels(manifest: str | Path | None) -> dict[str, str]:
    if not manifest:
        return {}
    return {e.id: e.dataset_label for e in load_manifest(manifest)}


def cmd_experiment(measurements: str | Path, cfg: RunConfig, manifest: str | Path | None = None,
                   syntax_dataset: str | None = None, semantics_dataset: str | None = None) -> int:
    out = Path(cfg.output) / "reports"
    out.mkdir(parents=True, exist_ok=True)
    records = read_csv(measurements)
    labels = _dataset_labels(manifest)
    datasets: dict[str, list[MeasurementRecord]] = {}
    for r in records:
        datasets.setdefault(labels.get(r.doc_id, "all"), []).append(r)

    table_a, table_b = {}, {}
    for name in sorted(datasets):
        recs = datasets[name]
        kinds = {r.kind for r in recs}
        if {RT, SW, SS} <= kinds:
            # RT against every replicate, on the scale of the balanced study dataset
            balanced = FeatureMatrix.from_records(study_dataset(recs, cfg.dataset_replicates))
            table_a[name] = criterion_a(standardize(FeatureMatrix.from_records(recs),
                                                    on_constant="zero", reference=balanced))
        variants = [v for v in (SW, SS) if v in kinds]
        table_b[name] = criterion_b_table(ensembles_from_records(recs), cfg.z_threshold, variants)
    _dump_json(_finite(table_a), out / "criterion_a.json")
    _dump_json(_finite(table_b), out / "criterion_b.json")

    if syntax_dataset and semantics_dataset:
        rows = lambda label: np.array([r.values for r in datasets.get(label, []) if r.kind == RT])
        report = cv_analysis(rows(syntax_dataset), rows(semantics_dataset),
                             boot=cfg.bootstrap, seed=cfg.base_seed)
        _dump_json(_finite(report), out / "cv.json")
    return EXIT_OK


# -- classify --------------------------------------------------------------

def cmd_classify(measurements: str | Path, cfg: RunConfig, unknown: str | None = None) -> int:
    out = Path(cfg.output) / "classify"
    out.mkdir(parents=True, exist_ok=True)
    records = read_csv(measurements)
    held_out = []
    if unknown is not None:
        held_out = sorted((r for r in records if r.doc_id == unknown), key=_sort_key)
        if not held_out:
            raise ConfigError(f"unknown document {unknown!r} not found in {measurements}")
        records = [r for r in records if r.doc_id != unknown]
    study = clf.run_study(sorted(records, key=_sort_key), C=cfg.svm_c,
                          replicates=cfg.dataset_replicates)

    summary = {name: rep.to_dict() for name, rep in study.reports.items()}
    summary["selected_features"] = study.features
    summary["samples"] = len(study.records)
    summary["excluded_document"] = unknown
    _dump_json(_finite(summary), out / "evaluation.json")

    with open(out / "lda_projection.csv", "w", encoding="utf-8") as fh:
        fh.write("doc_id,kind,sample_index,label,projection\n")
        for r, p in zip(study.records, study.projection):
            label = clf.REAL if r.kind == RT else clf.SHUFFLED
            fh.write(f"{r.doc_id},{r.kind},{'' if r.sample_index is None else r.sample_index},"
                     f"{label},{p!r}\n")
    study.classifier.save(out / "model.json")

    if held_out:
        verdicts = clf.classify_unknown(study.classifier, np.array([r.values for r in held_out]),
                                        FEATURE_NAMES)
        entries = [{"doc_id": r.doc_id, "kind": r.kind, "sample_index": r.sample_index, **v}
                   for r, v in zip(held_out, verdicts)]
        sw = [e for e in entries if e["kind"] == SW]
        ss = [e for e in entries if e["kind"] == SS]
        _dump_json(_finite({
            "document": unknown,
            "training_samples": study.classifier.training_samples,
            "rt_label": next((e["label"] for e in entries if e["kind"] == RT), None),
            "sw_classified_shuffled": sum(e["label"] == clf.SHUFFLED for e in sw),
            "sw_total": len(sw),
            "ss_classified_shuffled": sum(e["label"] == clf.SHUFFLED for e in ss),
            "ss_total": len(ss),
            "verdicts": entries,
        }), out / "verdict.json")
    return EXIT_OK


def cmd_vote(path: str | Path, out: str | Path | None, delimiter: str = "\t") -> int:
    text = vote_transcription(read_transcription(path, delimiter))
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")
    return EXIT_OK


# -- entry point -----------------------------------------------------------

def _config_args(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--nodes", type=int, dest="nodes_per_network")
    p.add_argument("--density", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, dest="base_seed")
    p.add_argument("--z-threshold", type=float, dest="z_threshold")
    p.add_argument("--svm-c", dest="svm_c", help="regularization constant or 'grid'")
    p.add_argument("--no-ss", action="store_const", const=False, dest="enable_ss")
    p.add_argument("--workers", type=int)
    p.add_argument("--out", dest="output")


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paranet", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="paragraph networks for RT and shuffled replicates")
    p.add_argument("manifest")
    _config_args(p)

    p = sub.add_parser("measure", help="33-feature signature of every network in a directory")
    p.add_argument("networks")
    _config_args(p)
    p.add_argument("--csv", help="output CSV (default: OUT/measurements.csv)")

    p = sub.add_parser("experiment", help="criterion A/B and CV reports")
    p.add_argument("measurements")
    p.add_argument("--manifest", help="manifest supplying dataset labels")
    p.add_argument("--syntax-dataset", help="dataset label: one text, many languages")
    p.add_argument("--semantics-dataset", help="dataset label: many texts, one language")
    _config_args(p)

    p = sub.add_parser("classify", help="LOO evaluation, model and optional unknown verdict")
    p.add_argument("measurements")
    p.add_argument("--unknown", help="document id to hold out and classify")
    _config_args(p)

    p = sub.add_parser("run", help="build, measure, experiment and classify in one go")
    p.add_argument("manifest")
    p.add_argument("--unknown")
    _config_args(p)

    p = sub.add_parser("vote", help="merge transcriber variants by per-character voting")
    p.add_argument("transcription")
    p.add_argument("--delimiter", default="\t")
    p.add_argument("--output", dest="vote_out")
    return parser


_CFG_KEYS = ("nodes_per_network", "density", "samples", "base_seed", "z_threshold", "svm_c",
             "enable_ss", "output", "workers")


def main(argv: Sequence[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "vote":
        return cmd_vote(args.transcription, args.vote_out, args.delimiter)

    overrides = {k: getattr(args, k, None) for k in _CFG_KEYS}
    out = None
    try:
        if args.command in ("measure", "experiment", "classify"):
            # node count is fixed by the files already on disk
            overrides["nodes_per_network"] = overrides["nodes_per_network"] or 10
        cfg = RunConfig.load(args.config, overrides)
        out = Path(cfg.output)
        if args.command == "build":
            return cmd_build(args.manifest, cfg)
        if args.command == "measure":
            return cmd_measure(args.networks, args.csv or out / "measurements.csv",
                               seed=cfg.base_seed, workers=cfg.workers)
        if args.command == "experiment":
            return cmd_experiment(args.measurements, cfg, args.manifest, args.syntax_dataset,
                                  args.semantics_dataset)
        if args.command == "classify":
            return cmd_classify(args.measurements, cfg, args.unknown)
        if args.command == "run":
            code = cmd_build(args.manifest, cfg)
            csv_path = out / "measurements.csv"
            cmd_measure(out / "networks", csv_path, seed=cfg.base_seed, workers=cfg.workers)
            cmd_experiment(csv_path, cfg, args.manifest)
            cmd_classify(csv_path, cfg, args.unknown)
            return code
    except ConfigError as exc:
        _record_failure(out, args.command, exc)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        _record_failure(out, args.command, exc)
        return EXIT_PARTIAL
    return EXIT_OK


def _record_failure(out: Path | None, command: str, exc: Exception):
    """Failure record on stderr (one JSON line) and, when possible, in the output directory."""
    record = {"command": command, "error": str(exc), "type": type(exc).__name__}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    if out is None:
        return
    try:
        out.mkdir(parents=True, exist_ok=True)
        _dump_json(record, out / f"{command}_failure.json")
    except OSError:
        pass


if __name__ == "__main__":
    sys.exit(main())

"""End-to-end acceptance checks on a 20-book English corpus.

Each test prints one ``PASS``/``FAIL`` line for its criterion. The corpus
pipeline (about 1200 networks of 144 nodes) runs twice, so this module takes
a few minutes.
"""
import hashlib
import json
import math
import random
import time
from collections import Counter
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import binom

from paranet.cli import main
from paranet.corpus import (
    RT, SS, Paragraph, Sentence, SW, load_manifest, parse_document, sentence_multiset,
    token_multiset, truncate_paragraphs,
)
from paranet.experiment import replicate_documents
from paranet.netbuild import build_weighted, target_edge_count, tfidf_vectors
from paranet.netio import read_edgelist
from paranet.netmeasure import (
    accessibility, betweenness, closeness, detect_communities, eccentricity,
    generalized_accessibility, modularity, neighborhood, transition_matrix,
)

import oracles
from conftest import random_graph

pytestmark = pytest.mark.slow

MANIFEST = Path(__file__).parent / "data" / "web" / "manifest.json"
NODES, SAMPLES, DENSITY, SEED = 144, 30, 0.05, 0
HELD_OUT = "genesis"
CONFIG = ["--nodes", str(NODES), "--samples", str(SAMPLES), "--density", str(DENSITY),
          "--seed", str(SEED)]


def verdict(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} | {detail}")
    assert ok, detail


def tree_hashes(root):
    return {str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(Path(root).rglob("*")) if p.is_file()}


def load(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    base = tmp_path_factory.mktemp("acceptance")
    out = base / "a"
    csv_path = out / "measurements.csv"
    flags = [*CONFIG, "--out", str(out)]
    t0 = time.perf_counter()
    assert main(["build", str(MANIFEST), *flags]) == 0
    assert main(["measure", str(out / "networks"), *flags]) == 0
    build_measure = time.perf_counter() - t0
    assert main(["experiment", str(csv_path), "--manifest", str(MANIFEST), *flags]) == 0
    assert main(["classify", str(csv_path), "--unknown", HELD_OUT, *flags]) == 0
    full = base / "full"
    assert main(["classify", str(csv_path), *CONFIG, "--out", str(full)]) == 0
    return {"out": out, "full": full, "base": base, "seconds": build_measure,
            "label": load(MANIFEST)["documents"][0]["dataset_label"]}


def test_criterion_1_modularity_separation(pipeline, capsys):
    q = load(pipeline["out"] / "reports" / "criterion_a.json")[pipeline["label"]]["Q"]
    rt, sw, ss = q[RT]["mean"], q[SW]["mean"], q[SS]["mean"]
    ok = rt > 0 and sw < 0 and ss < 0 and q["gap_rt_sw"] >= 1.0 and q["gap_rt_ss"] >= 1.0
    detail = (f"standardized mean Q RT {rt:+.2f}, SW {sw:+.2f}, SS {ss:+.2f}; gaps "
              f"{q['gap_rt_sw']:.2f}/{q['gap_rt_ss']:.2f} (need >= 1.0; published RT +1.24, "
              f"gaps 1.84-2.24); build+measure {pipeline['seconds'] / 60:.1f} min at N={NODES}")
    verdict(capsys, 1, "modularity separation", ok, detail)


def test_criterion_2_q_informative(pipeline, capsys):
    q = load(pipeline["out"] / "reports" / "criterion_b.json")[pipeline["label"]]["Q"]
    sw, ss = q[SW]["percent_informative"], q[SS]["percent_informative"]
    ok = sw >= 90 and ss >= 90
    detail = f"Q informative in {sw:.1f}% (SW) and {ss:.1f}% (SS) of books (need >= 90%)"
    verdict(capsys, 2, "criterion B on Q", ok, detail)


def test_criterion_3_binary_classification(pipeline, capsys):
    ev = load(pipeline["full"] / "classify" / "evaluation.json")
    acc, q_only = ev["binary"]["accuracy"], ev["binary_q_only"]["accuracy"]
    ok = acc >= 0.90 and q_only >= 0.85
    detail = (f"LOO accuracy {acc:.4f} on {ev['binary']['samples']} samples with "
              f"{ev['selected_features']} (need >= 0.90; published 0.9872); Q only {q_only:.4f} "
              f"(need >= 0.85; published 0.9679)")
    verdict(capsys, 3, "binary classification", ok, detail)


def test_criterion_4_three_class(pipeline, capsys):
    rep = load(pipeline["full"] / "classify" / "evaluation.json")["three_class"]
    n = rep["samples"]
    correct = round(rep["accuracy"] * n)
    tpr = rep["true_positive_rate"][RT]
    # smallest count that chance (1/3) reaches with probability below 1%
    bound = int(binom.ppf(0.99, n, 1 / 3)) + 1
    ok = tpr >= 0.9 and correct >= bound
    detail = (f"RT TPR {tpr:.3f} (need >= 0.9; published 0.98); accuracy {rep['accuracy']:.4f} "
              f"= {correct}/{n}, chance 99% bound {bound}/{n} (published 0.7608)")
    verdict(capsys, 4, "three-class LOO", ok, detail)


def test_criterion_5_oracle_equivalence(capsys):
    rng = random.Random(2024)
    worst = {"distance": 0.0, "walk": 0.0, "taylor": 0.0, "modularity": 0.0, "exhaustive": 0.0}
    exact = True
    for _ in range(200):
        net = random_graph(rng, 50)
        bc = oracles.betweenness(net)
        close, ecc, ring = oracles.distance_measures(net)
        worst["distance"] = max(worst["distance"],
                                float(np.max(np.abs(betweenness(net) - np.array(bc, float)),
                                             initial=0)),
                                float(np.max(np.abs(closeness(net) - np.array(close, float)),
                                             initial=0)))
        exact &= eccentricity(net).tolist() == ecc and neighborhood(net, 3).tolist() == ring
        if net.edge_count:
            part = [rng.randrange(5) for _ in range(net.node_count)]
            worst["modularity"] = max(worst["modularity"], abs(
                modularity(net, part) - oracles.modularity(net, part)))

        small = random_graph(rng, 12)
        for h in (2, 3):
            want = [oracles.exp_entropy(oracles.walk_distribution(small, i, h).values())
                    for i in range(small.node_count)]
            worst["walk"] = max(worst["walk"], float(np.max(np.abs(accessibility(small, h) - want))))
        t = transition_matrix(small)
        taylor = [oracles.exp_entropy(row) if t[i].sum() else 0.0
                  for i, row in enumerate(oracles.taylor_walk_kernel(t))]
        worst["taylor"] = max(worst["taylor"],
                              float(np.max(np.abs(generalized_accessibility(small) - taylor))))

        tiny = random_graph(rng, 8)
        if tiny.edge_count:
            q = modularity(tiny, detect_communities(tiny))
            worst["exhaustive"] = max(worst["exhaustive"], oracles.best_modularity(tiny) - q)
    ok = (exact and worst["distance"] <= 1e-9 and worst["walk"] <= 1e-9
          and worst["taylor"] <= 1e-9 and worst["modularity"] <= 1e-12
          and worst["exhaustive"] <= 0.05)
    detail = ", ".join(f"{k} {v:.2e}" for k, v in worst.items()) + \
        f", eccentricity/neighborhood exact: {exact} (200 graphs per family)"
    verdict(capsys, 5, "oracle equivalence", ok, detail)


def test_criterion_6_construction(pipeline, capsys):
    m = target_edge_count(NODES, DENSITY)
    counts = Counter(read_edgelist(p).edge_count
                     for p in (pipeline["out"] / "networks").glob("*.edges"))
    ok_edges = counts == Counter({m: sum(counts.values())}) and m == max(
        1, math.floor(DENSITY * NODES * (NODES - 1) / 2 + 0.5))

    paras = [Paragraph(i, (Sentence(tuple(t.split())),)) for i, t in enumerate(["a a b", "b c"])]
    v0, v1 = tfidf_vectors(paras)
    ok_hand = (abs(v0.weights["a"] - 0.4 * math.log(2)) < 1e-12
               and abs(v1.weights["c"] - 0.2 * math.log(2)) < 1e-12 and "b" not in v0.weights)

    entry = load_manifest(MANIFEST)[0]
    doc = truncate_paragraphs(parse_document(entry.load()), NODES)
    ref = build_weighted(doc.paragraphs).weights
    drift = max(float(np.max(np.abs(build_weighted(doc.paragraphs, log=f).weights - ref)))
                for f in (math.log2, math.log10))
    ok = ok_edges and ok_hand and drift <= 1e-12
    detail = (f"{sum(counts.values())} networks, edge counts {dict(counts)} (target {m}); "
              f"hand tf-idf example {'ok' if ok_hand else 'wrong'}; log-base drift {drift:.1e}")
    verdict(capsys, 6, "construction invariants", ok, detail)


def test_criterion_7_shuffle_invariants(capsys):
    checked, bad = 0, []
    for entry in load_manifest(MANIFEST):
        doc = truncate_paragraphs(parse_document(entry.load()), NODES)
        tokens = token_multiset(doc)
        sentences = sentence_multiset(doc.sentences)
        word_shape = [len(p) for p in doc.paragraphs]
        sentence_shape = [len(p.sentences) for p in doc.paragraphs]
        for rep in replicate_documents(doc, SAMPLES, SEED):
            if rep.kind == RT:
                continue
            checked += 1
            ok = token_multiset(rep) == tokens
            if rep.kind == SW:
                ok &= [len(p) for p in rep.paragraphs] == word_shape
            else:
                # sentences move between paragraphs, so only sentence counts stay put
                ok &= (sentence_multiset(rep.sentences) == sentences
                       and [len(p.sentences) for p in rep.paragraphs] == sentence_shape)
            if not ok:
                bad.append(f"{rep.id}.{rep.kind}.{rep.sample_index}")
    detail = f"{checked} replicates checked, {len(bad)} violations {bad[:5]}"
    verdict(capsys, 7, "shuffle invariants", not bad and checked == 20 * 2 * SAMPLES, detail)


def test_criterion_8_determinism(pipeline, capsys):
    again = pipeline["base"] / "b"
    assert main(["run", str(MANIFEST), "--unknown", HELD_OUT, *CONFIG, "--out", str(again)]) == 0
    first, second = tree_hashes(pipeline["out"]), tree_hashes(again)
    differing = sorted(k for k in first.keys() | second.keys() if first.get(k) != second.get(k))
    detail = f"{len(first)} files compared, differing: {differing or 'none'}"
    verdict(capsys, 8, "pipeline determinism", not differing and len(first) > 2000, detail)


def test_criterion_9_unknown_document(pipeline, capsys):
    v = load(pipeline["out"] / "classify" / "verdict.json")
    ev = load(pipeline["out"] / "classify" / "evaluation.json")
    ok = (v["rt_label"] == "REAL" and v["sw_total"] == SAMPLES
          and v["sw_classified_shuffled"] >= 27 and ev["excluded_document"] == HELD_OUT
          and ev["samples"] == 19 * 3)
    detail = (f"held-out {HELD_OUT!r}: RT -> {v['rt_label']}; SW replicates classified SHUFFLED "
              f"{v['sw_classified_shuffled']}/{v['sw_total']} (need >= 27); SS "
              f"{v['ss_classified_shuffled']}/{v['ss_total']}; trained on {ev['samples']} samples")
    verdict(capsys, 9, "unknown-document path", ok, detail)

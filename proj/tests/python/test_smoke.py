import json

import numpy as np
import pytest

import eclipse_ir as ei


@pytest.fixture(scope="module")
def synth():
    return ei.synth_generate(dim=32, planted=4, queries=4, relevant=5, irrelevant=45,
                             sigma=0.1, seed=3)


def write_dataset(tmp_path, g):
    ei.save_matrix(g["queries"], str(tmp_path / "queries.emb"))
    ei.save_matrix(g["corpus"], str(tmp_path / "corpus.emb"))
    with open(tmp_path / "qrels.txt", "w") as f:
        for qid, docs in sorted(g["qrels"].items()):
            for doc, grade in sorted(docs.items()):
                f.write(f"{qid} 0 {doc} {grade}\n")
    config = {
        "queries": "queries.emb",
        "corpus": "corpus.emb",
        "qrels": "qrels.txt",
        "output_dir": "out",
        "pool_size": [50],
        "depth": 100,
        "k_plus": [2],
        "k_minus": [2],
        "alpha": [1.0],
        "beta": [0.5, 1.0],
        "retained_fraction": [0.25, 1.0],
        "sampling": {"window": [10], "trials": 3, "seed": 1},
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    return path


def test_matrix_roundtrip(tmp_path):
    values = np.arange(6, dtype=np.float32).reshape(2, 3)
    m = ei.EmbeddingMatrix(["a", "b"], values)
    assert len(m) == 2 and m.dim == 3
    for name in ("m.emb", "m.jsonl"):
        ei.save_matrix(m, str(tmp_path / name))
        back = ei.load_matrix(str(tmp_path / name))
        assert back == m
        np.testing.assert_array_equal(back.values, values)


def test_bad_input_maps_to_python_errors(tmp_path):
    with pytest.raises(ValueError):
        ei.EmbeddingMatrix(["a", "a"], np.zeros((2, 2), dtype=np.float32))
    with pytest.raises(OSError):
        ei.load_matrix(str(tmp_path / "missing.emb"))
    (tmp_path / "q.txt").write_text("q1 0 d1 1\nq1 0 d1\n")
    with pytest.raises(ei.ParseError) as info:
        ei.parse_qrels(str(tmp_path / "q.txt"))
    assert info.value.line == 2
    with pytest.raises(ei.DegenerateInputError):
        ei.wilcoxon_signed_rank(np.zeros(3))


def test_top_k_and_masks():
    corpus = ei.EmbeddingMatrix(["x", "y", "z"],
                                np.array([[1, 0], [0, 1], [1, 1]], dtype=np.float32))
    pool = ei.top_k(np.array([1.0, 0.0]), corpus, 2)
    assert pool.doc_ids == ["x", "z"]  # tie at 1.0 broken by doc id
    u = ei.eclipse_score(np.array([1, 2, 3]), np.array([1, 1, 1]), np.array([0, 0, 5]),
                         alpha=1.0, beta=1.0)
    np.testing.assert_allclose(u, [1, 2, -12])
    mask = ei.select_dimensions(u, 2 / 3)
    assert mask.selected == [0, 1]
    assert ei.retained_count(0.5, 3) == 2
    np.testing.assert_array_equal(
        ei.dime_score_standard(np.array([1, 2, 3]), np.array([1, 1, 1])),
        ei.eclipse_score(np.array([1, 2, 3]), np.array([1, 1, 1]), np.array([9, 9, 9]),
                         alpha=1.0, beta=0.0))


def test_stats():
    t = ei.paired_t_test([1, 2, 4], [0, 1, 2])
    assert t.statistic == pytest.approx(4.0)
    assert t.p_value == pytest.approx(0.0286, abs=1e-4)
    assert ei.wilcoxon_signed_rank(np.array([1.0, 2.0, 3.0])).p_value == pytest.approx(0.125)
    assert ei.holm_bonferroni([0.01, 0.04, 0.2]) == [True, False, False]
    w, p = ei.shapiro_wilk(np.arange(1.0, 11.0))
    assert p > 0.05


def test_experiment_end_to_end(tmp_path, synth):
    config = write_dataset(tmp_path, synth)
    assert ei.load_config(str(config))["pool_size"] == [50]
    exp = ei.Experiment(str(config), output_dir=str(tmp_path / "out"))
    base = exp.run_baseline()
    full = exp.run_dime("prf_eclipse", 50, 2, 2, 1.0, 1.0, 1.0)
    assert open(full["run_file"]).read() == open(base["run_file"]).read()

    reeval = ei.evaluate_run(full["run_file"], str(tmp_path / "qrels.txt"))
    assert reeval["map"] == pytest.approx(full["map"])

    sweep = exp.sweep("prf_eclipse")
    assert len(sweep["rows"]) == 4
    best = sweep["rows"][sweep["best_map"]]
    assert best["map"] == max(r["map"] for r in sweep["rows"])

    sampling = exp.sample_bottom()
    windows = {r["window"] for r in sampling["rows"]}
    assert windows == {0, 10}


def test_run_io(tmp_path):
    rows = [("q1", "a", 1, 2.5, "t"), ("q1", "b", 2, 1.0, "t")]
    ei.write_run(rows, str(tmp_path / "r.run"))
    assert ei.parse_run(str(tmp_path / "r.run")) == rows
    with pytest.raises(ValueError):
        ei.write_run([("q1", "a", 1, 1.0, "t"), ("q1", "b", 2, 2.0, "t")],
                     str(tmp_path / "bad.run"))

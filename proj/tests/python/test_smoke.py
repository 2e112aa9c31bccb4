import json
import math
import os

import pytest

import heda

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "..", "data")


def test_dataset_construction_and_shape():
    d = heda.Dataset([[0.1, 0.9], [0.4, 0.2]], [0, 1], names=["a", "b"])
    assert len(d) == 2
    assert d.dim == 2
    assert d.names == ["a", "b"]
    assert d.records[1][0] == pytest.approx(0.4)

    with pytest.raises(heda.HedaError):
        heda.Dataset([[0.1], [0.2, 0.3]], [0, 1])
    with pytest.raises(heda.HedaError):
        heda.Dataset([[0.1]], [0, 1])


def test_synthesis_is_deterministic():
    a = heda.synthesize_logistic(50, 3, 9)
    b = heda.synthesize_logistic(50, 3, 9)
    assert a.records == b.records
    assert a.labels == b.labels
    assert set(a.labels) <= {0, 1}


def test_load_csv_fixture():
    d = heda.load_csv(os.path.join(DATA_DIR, "demo_a.csv"))
    assert len(d) == 60
    assert d.dim == 4
    assert d.names == ["x0", "x1", "x2", "x3"]


def test_plain_training_beats_majority():
    d = heda.synthesize_logistic(400, 4, 11)
    result = heda.train([d], mode="plain")
    assert len(result["beta"]) == 5
    share = sum(d.labels) / len(d)
    majority = max(share, 1.0 - share)
    assert heda.accuracy(result["beta"], d) > majority


def test_encrypted_training_matches_round_trip_budget():
    providers = [heda.synthesize_logistic(20, 2, 1),
                 heda.synthesize_logistic(16, 2, 2)]
    result = heda.train(providers, mode="heda", iota=1, key_bits=512,
                        cycles=2, seed=7)
    assert result["iterations"] == 2
    assert result["round_trips"] == 2 * 3 * 2
    assert result["bytes"] > 0
    assert len(result["beta"]) == 3

    again = heda.train(providers, mode="heda", iota=1, key_bits=512,
                       cycles=2, seed=7)
    assert again["beta"] == result["beta"]


def test_secure_equals_full_split():
    providers = [heda.synthesize_logistic(18, 2, 3)]
    secure = heda.train(providers, mode="secure", key_bits=512, cycles=2,
                        seed=5)
    full = heda.train(providers, mode="heda", iota=2, key_bits=512, cycles=2,
                      seed=5)
    assert secure["beta"] == full["beta"]


def test_score_features_ranks_all_attributes():
    d = heda.synthesize_logistic(300, 4, 13)
    scores = heda.score_features(d, method="kw")
    assert scores["method"] == "kw"
    assert sorted(scores["ranking"]) == [0, 1, 2, 3]
    assert len(scores["scores"]) == 4


def test_publish_report_budgets_in_bounds():
    d = heda.load_csv(os.path.join(DATA_DIR, "demo_a.csv"))
    report = heda.publish_report(d, runs=2, seed=3)
    assert report["cluster_size"] == 5
    assert len(report["attributes"]) == 4
    for row in report["attributes"]:
        assert 0.01 <= row["epsilon"] <= 10.0
        assert row["delta_f_prime"] > 0
    assert report["sse"]["ima"] > 0
    assert 0.0 <= report["record_linkage"]["ima"] <= 1.0


def test_block_bench_shape():
    bench = heda.block_bench(key_bits=512, payload=2, repetitions=1, seed=1)
    names = [row["name"] for row in bench["blocks"]]
    assert names == ["add", "subtract", "dot", "multiply", "power",
                     "convert", "rekey"]
    assert [row["round_trips"] for row in bench["blocks"]] == [0, 0, 0, 0, 0,
                                                               1, 1]


def test_iota_sweep_reports_fit():
    providers = [heda.synthesize_logistic(16, 2, 21)]
    sweep = heda.iota_sweep(providers, [1, 2], key_bits=512, cycles=1, seed=2)
    assert [p["iota"] for p in sweep["points"]] == [1, 2]
    assert sweep["points"][0]["bytes"] < sweep["points"][1]["bytes"]
    assert sweep["fit"]["r_squared"] <= 1.0


def test_normalization_helpers():
    ref = heda.Dataset([[0.0, 2.0], [10.0, 4.0]], [0, 1])
    other = heda.Dataset([[5.0, 3.0]], [1])
    mapped = heda.normalize_like(other, ref)
    assert mapped.records[0] == pytest.approx([0.5, 0.5])

    norm = heda.min_max_normalize(ref)
    assert norm.records[0] == pytest.approx([0.0, 0.0])
    assert norm.records[1] == pytest.approx([1.0, 1.0])


def test_keygen_json_round_trip():
    secret, public = heda.paillier_keygen_json(512, 42)
    secret2, _ = heda.paillier_keygen_json(512, 42)
    assert secret == secret2
    parsed = json.loads(public)
    assert parsed["scheme"] == "paillier"
    rsa_secret, rsa_public = heda.rsa_keygen_json(512, 42)
    assert json.loads(rsa_public)["scheme"] == "rsa"
    assert rsa_secret != rsa_public


def test_sigmoid_and_prediction():
    assert heda.sigmoid(0.0) == pytest.approx(0.5)
    assert heda.sigmoid(100.0) == pytest.approx(1.0)
    assert not math.isnan(heda.sigmoid(-1000.0))
    assert heda.predict_label([1.0, 0.0], [5.0]) == 1
    assert heda.predict_label([-1.0, 0.0], [5.0]) == 0

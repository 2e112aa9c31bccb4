"""Logistic regression over distributed private data.

Sensitive attributes contribute to the gradient through additively and
multiplicatively homomorphic ciphertexts; the remaining attributes are
published once with centroid-plus-Laplace noise. This package wraps the
C++ core; report helpers return plain dicts parsed from the core's JSON.
"""

import json as _json

try:
    from . import _heda as _core
except ImportError:  # running against a build tree via PYTHONPATH
    import _heda as _core

Dataset = _core.Dataset
HedaError = _core.HedaError

load_csv = _core.load_csv
save_csv = _core.save_csv
synthesize_logistic = _core.synthesize_logistic
min_max_normalize = _core.min_max_normalize
normalize_like = _core.normalize_like
split_train_test = _core.split_train_test
pool_records = _core.pool_records

score_features = _core.score_features
train = _core.train
accuracy = _core.accuracy
predict_label = _core.predict_label
sigmoid = _core.sigmoid

paillier_keygen_json = _core.paillier_keygen_json
rsa_keygen_json = _core.rsa_keygen_json


def publish_report(data, cluster_size=0, runs=1, seed=0):
    """Noise `data` with both mechanisms under one budget; dict report."""
    return _json.loads(
        _core.publish_report_json(data, cluster_size, runs, seed))


def dp_sweep(data, cluster_sizes, runs=1, seed=0):
    """publish_report across several cluster sizes; dict report."""
    return _json.loads(_core.dp_sweep_json(data, cluster_sizes, runs, seed))


def block_bench(key_bits=512, payload=8, repetitions=3, seed=0):
    """Time the seven two-party blocks; dict report."""
    return _json.loads(
        _core.block_bench_json(key_bits, payload, repetitions, seed))


def iota_sweep(providers, iotas, **kwargs):
    """Training cost against the encrypted attribute count; dict report."""
    return _json.loads(_core.iota_sweep_json(providers, iotas, **kwargs))


__all__ = [
    "Dataset",
    "HedaError",
    "load_csv",
    "save_csv",
    "synthesize_logistic",
    "min_max_normalize",
    "normalize_like",
    "split_train_test",
    "pool_records",
    "score_features",
    "train",
    "accuracy",
    "predict_label",
    "sigmoid",
    "paillier_keygen_json",
    "rsa_keygen_json",
    "publish_report",
    "dp_sweep",
    "block_bench",
    "iota_sweep",
]

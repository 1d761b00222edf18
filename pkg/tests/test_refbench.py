"""Reference benchmark: determinism, published pipeline vs. standalone oracle."""

import statistics
import subprocess
import sys
from pathlib import Path

import pytest

from fedeval.refbench import SiteConfig, build_benchmark_bundle, generate_site, render_site
from fedeval.refbench import constants
from fedeval.runtime import (
    CubeAssets,
    ProcessBackend,
    SandboxPolicy,
    TaskStatus,
    load_restricted_yaml,
    pinned_hashes_of_assets,
    run_task,
    verify_cube,
)

import oracle_refbench as oracle

POLICY = SandboxPolicy(wall_clock_limit_s=60)
BACKEND = ProcessBackend()


def test_oracle_constants_match_published_values():
    # The oracle restates the published constants; drift would quietly
    # turn the independent check into a mirror of the implementation.
    assert oracle.ORACLE_PREP_CENTER == constants.PREP_CENTER
    assert oracle.ORACLE_PREP_SCALE == constants.PREP_SCALE
    assert oracle.ORACLE_LINEAR_WEIGHTS == constants.LINEAR_WEIGHTS
    assert oracle.ORACLE_LINEAR_BIAS == constants.LINEAR_BIAS


def test_generation_is_deterministic():
    cfg = SiteConfig(seed=1, n=100, shift=0.0, label_noise=0.0)
    assert render_site(cfg) == render_site(cfg)


def test_single_row_site():
    tree = render_site(SiteConfig(seed=9, n=1))
    assert tree["features.csv"].decode().count("\n") == 2  # header + one row
    assert tree["labels.csv"].decode().count("\n") == 2


def test_feature_mean_difference_grows_with_shift():
    # Standalone means: parse the CSVs and average column f1 directly.
    def mean_f1(shift):
        tree = render_site(SiteConfig(seed=4, n=400, shift=shift))
        rows = tree["features.csv"].decode().splitlines()[1:]
        return statistics.fmean(float(r.split(",")[0]) for r in rows)

    base = mean_f1(0.0)
    gaps = [abs(mean_f1(s) - base) for s in (0.3, 0.6, 0.9)]
    assert gaps == sorted(gaps)
    assert gaps[-1] > gaps[0] > 0


def test_label_noise_flips_labels_only():
    clean = render_site(SiteConfig(seed=2, n=300, label_noise=0.0))
    noisy = render_site(SiteConfig(seed=2, n=300, label_noise=0.4))
    assert clean["features.csv"] == noisy["features.csv"]
    flips = sum(
        a != b
        for a, b in zip(
            clean["labels.csv"].decode().splitlines()[1:],
            noisy["labels.csv"].decode().splitlines()[1:],
        )
    )
    assert 60 <= flips <= 180  # ~0.4 * 300, generous bounds


@pytest.fixture(scope="module")
def bundle(tmp_path_factory):
    return build_benchmark_bundle(tmp_path_factory.mktemp("bundle"))


def verified(bundle, which):
    assets = CubeAssets(bundle / which)
    return verify_cube(assets, pinned_hashes_of_assets(assets)).require()


def run(cube, task, inputs, ws):
    return run_task(cube, task, inputs, ws, POLICY, BACKEND, insecure_allow_network=True)


@pytest.fixture(scope="module")
def prepared_site(bundle, tmp_path_factory):
    root = tmp_path_factory.mktemp("site")
    raw = generate_site(SiteConfig(seed=1, n=100), root / "raw")
    prep = verified(bundle, "prep")
    outcome = run(prep, "prepare", {"raw": raw}, root / "ws-prepare")
    assert outcome.status is TaskStatus.OK
    return raw, root / "ws-prepare/outputs/prepared"


def test_prepare_digest_stable_and_matches_direct_script_run(bundle, prepared_site, tmp_path):
    raw, prepared = prepared_site
    prep = verified(bundle, "prep")
    again = run(prep, "prepare", {"raw": raw}, tmp_path / "ws2")
    assert again.status is TaskStatus.OK
    # Oracle: invoke the published script directly, outside the runner.
    direct_out = tmp_path / "direct"
    direct_out.mkdir()
    subprocess.run(
        [sys.executable, str(bundle / "prep/run.py"), "prepare",
         f"--raw={raw}", f"--prepared={direct_out}"],
        check=True,
    )
    for name in ("features.csv", "labels.csv"):
        assert (direct_out / name).read_bytes() == (prepared / name).read_bytes()
    assert (tmp_path / "ws2/outputs/prepared/features.csv").read_bytes() == (
        prepared / "features.csv"
    ).read_bytes()


def test_prepare_matches_normalization_oracle(prepared_site):
    raw, prepared = prepared_site
    expected = oracle.prepare_features(raw)
    got = [
        [float(cell) for cell in line.split(",")]
        for line in (prepared / "features.csv").read_text().splitlines()[1:]
    ]
    assert got == expected


def test_sanity_check_passes_on_valid_site(bundle, prepared_site, tmp_path):
    _, prepared = prepared_site
    prep = verified(bundle, "prep")
    outcome = run(prep, "sanity_check", {"prepared": prepared}, tmp_path / "ws")
    assert outcome.status is TaskStatus.OK


def test_sanity_check_exit_2_on_missing_labels(bundle, prepared_site, tmp_path):
    _, prepared = prepared_site
    broken = tmp_path / "broken"
    broken.mkdir()
    (broken / "features.csv").write_bytes((prepared / "features.csv").read_bytes())
    prep = verified(bundle, "prep")
    outcome = run(prep, "sanity_check", {"prepared": broken}, tmp_path / "ws")
    assert outcome.status is TaskStatus.FAILED
    assert outcome.exit_code == 2


def test_sanity_check_exit_2_on_nan_and_row_mismatch(bundle, prepared_site, tmp_path):
    _, prepared = prepared_site
    prep = verified(bundle, "prep")

    nan_dir = tmp_path / "nan"
    nan_dir.mkdir()
    lines = (prepared / "features.csv").read_text().splitlines()
    lines[1] = lines[1].replace(lines[1].split(",")[0], "nan", 1)
    (nan_dir / "features.csv").write_text("\n".join(lines) + "\n")
    (nan_dir / "labels.csv").write_bytes((prepared / "labels.csv").read_bytes())
    outcome = run(prep, "sanity_check", {"prepared": nan_dir}, tmp_path / "ws-nan")
    assert (outcome.status, outcome.exit_code) == (TaskStatus.FAILED, 2)

    short = tmp_path / "short"
    short.mkdir()
    (short / "features.csv").write_bytes((prepared / "features.csv").read_bytes())
    label_lines = (prepared / "labels.csv").read_text().splitlines()
    (short / "labels.csv").write_text("\n".join(label_lines[:-5]) + "\n")
    outcome = run(prep, "sanity_check", {"prepared": short}, tmp_path / "ws-short")
    assert (outcome.status, outcome.exit_code) == (TaskStatus.FAILED, 2)


def test_statistics_match_independent_label_count(bundle, prepared_site, tmp_path):
    raw, prepared = prepared_site
    prep = verified(bundle, "prep")
    outcome = run(prep, "statistics", {"prepared": prepared}, tmp_path / "ws")
    assert outcome.status is TaskStatus.OK
    stats = load_restricted_yaml((tmp_path / "ws/outputs/statistics").read_text())
    labels = oracle.read_labels(raw / "labels.csv")
    assert stats["n"] == len(labels) == 100
    # Frozen from the independent count for seed=1, n=100, shift=0, noise=0.
    assert stats["positive_fraction"] == sum(labels) / len(labels) == 0.5


def test_majority_model_outputs_all_zeros(bundle, prepared_site, tmp_path):
    _, prepared = prepared_site
    majority = verified(bundle, "models/majority")
    outcome = run(majority, "infer", {"data": prepared}, tmp_path / "ws")
    assert outcome.status is TaskStatus.OK
    lines = (tmp_path / "ws/outputs/predictions").read_text().splitlines()
    assert lines[0] == "prediction"
    assert set(lines[1:]) == {"0"} and len(lines) == 101


def test_linear_on_all_zero_features_is_constant_sign_of_bias(bundle, tmp_path):
    data = tmp_path / "zeros"
    data.mkdir()
    (data / "features.csv").write_text("f1,f2,f3,f4\n" + "0.0,0.0,0.0,0.0\n" * 5)
    linear = verified(bundle, "models/linear")
    outcome = run(linear, "infer", {"data": data}, tmp_path / "ws")
    assert outcome.status is TaskStatus.OK
    lines = (tmp_path / "ws/outputs/predictions").read_text().splitlines()[1:]
    expected = "1" if constants.LINEAR_BIAS > 0 else "0"
    assert set(lines) == {expected}


def test_linear_accuracy_matches_weight_oracle(bundle, prepared_site, tmp_path):
    raw, prepared = prepared_site
    linear = verified(bundle, "models/linear")
    infer = run(linear, "infer", {"data": prepared}, tmp_path / "ws-infer")
    assert infer.status is TaskStatus.OK
    metrics_cube = verified(bundle, "metrics")
    evaluate = run(
        metrics_cube,
        "evaluate",
        {"predictions": tmp_path / "ws-infer/outputs/predictions", "data": prepared},
        tmp_path / "ws-eval",
    )
    assert evaluate.status is TaskStatus.OK
    results = load_restricted_yaml((tmp_path / "ws-eval/outputs/results").read_text())
    expected = oracle.site_metrics(raw, "linear")
    assert results["accuracy"] == expected["accuracy"]
    assert results["sensitivity"] == expected["sensitivity"]
    assert results["specificity"] == expected["specificity"]
    assert results["n"] == expected["n"]


def _write_pred_label_pair(root, predictions, labels):
    root.mkdir(parents=True, exist_ok=True)
    (root / "predictions.csv").write_text("prediction\n" + "".join(f"{p}\n" for p in predictions))
    data = root / "data"
    data.mkdir()
    (data / "labels.csv").write_text("label\n" + "".join(f"{y}\n" for y in labels))
    return root / "predictions.csv", data


def test_metrics_formulas_on_fixed_confusion_counts(bundle, tmp_path):
    # TP=8, FP=1, FN=2, TN=9 -> accuracy 0.85, sensitivity 0.8, specificity 0.9
    predictions = [1] * 8 + [1] * 1 + [0] * 2 + [0] * 9
    labels = [1] * 8 + [0] * 1 + [1] * 2 + [0] * 9
    preds_file, data = _write_pred_label_pair(tmp_path / "fixed", predictions, labels)
    metrics_cube = verified(bundle, "metrics")
    outcome = run(metrics_cube, "evaluate", {"predictions": preds_file, "data": data}, tmp_path / "ws")
    results = load_restricted_yaml((tmp_path / "ws/outputs/results").read_text())
    assert results == {"n": 20, "accuracy": 0.85, "sensitivity": 0.8, "specificity": 0.9}


def test_metrics_all_negative_labels_reports_null_sensitivity(bundle, tmp_path):
    preds_file, data = _write_pred_label_pair(tmp_path / "neg", [0, 1, 0], [0, 0, 0])
    metrics_cube = verified(bundle, "metrics")
    outcome = run(metrics_cube, "evaluate", {"predictions": preds_file, "data": data}, tmp_path / "ws")
    assert outcome.status is TaskStatus.OK
    results = load_restricted_yaml((tmp_path / "ws/outputs/results").read_text())
    assert results["sensitivity"] is None
    assert results["sensitivity_reason"] == "no positive labels"


def test_metrics_perfect_predictions(bundle, tmp_path):
    preds_file, data = _write_pred_label_pair(tmp_path / "perfect", [0, 1, 1, 0], [0, 1, 1, 0])
    metrics_cube = verified(bundle, "metrics")
    run(metrics_cube, "evaluate", {"predictions": preds_file, "data": data}, tmp_path / "ws")
    results = load_restricted_yaml((tmp_path / "ws/outputs/results").read_text())
    assert results["accuracy"] == 1.0


def test_metrics_length_mismatch_exits_3(bundle, tmp_path):
    preds_file, data = _write_pred_label_pair(tmp_path / "mismatch", [0, 1], [0, 1, 1])
    metrics_cube = verified(bundle, "metrics")
    outcome = run(metrics_cube, "evaluate", {"predictions": preds_file, "data": data}, tmp_path / "ws")
    assert (outcome.status, outcome.exit_code) == (TaskStatus.FAILED, 3)


def test_bundle_bytes_are_deterministic(tmp_path):
    from fedeval.registry import hash_tree_path

    a = build_benchmark_bundle(tmp_path / "a")
    b = build_benchmark_bundle(tmp_path / "b")
    assert hash_tree_path(a) == hash_tree_path(b)


def test_end_to_end_conservation_full_pipeline_equals_oracle(bundle, tmp_path):
    # For several sites, metrics through the full cube pipeline must equal
    # the standalone oracle on the same generated data, exactly.
    for model in ("models/linear", "models/majority"):
        model_cube = verified(bundle, model)
        metrics_cube = verified(bundle, "metrics")
        prep = verified(bundle, "prep")
        for seed, shift in ((1, 0.0), (2, 0.3), (3, 0.6)):
            site_dir = tmp_path / f"{model.replace('/', '-')}-s{seed}"
            raw = generate_site(SiteConfig(seed=seed, n=60, shift=shift), site_dir / "raw")
            assert run(prep, "prepare", {"raw": raw}, site_dir / "wp").status is TaskStatus.OK
            prepared = site_dir / "wp/outputs/prepared"
            assert run(model_cube, "infer", {"data": prepared}, site_dir / "wi").status is TaskStatus.OK
            preds = site_dir / "wi/outputs/predictions"
            assert (
                run(metrics_cube, "evaluate", {"predictions": preds, "data": prepared}, site_dir / "we").status
                is TaskStatus.OK
            )
            results = load_restricted_yaml((site_dir / "we/outputs/results").read_text())
            expected = oracle.site_metrics(raw, "linear" if "linear" in model else "majority")
            for key in ("accuracy", "sensitivity", "specificity", "n"):
                assert results[key] == expected[key], (model, seed, key)

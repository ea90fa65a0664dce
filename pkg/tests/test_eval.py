"""Metric and report tests: macro F1, confusion matrices, EvalReport."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import oracle_macro_f1
from textattrib.errors import DataError
from textattrib.evaluation import EvalReport, confusion_matrix, evaluate, macro_f1


class TestMacroF1:
    def test_perfect(self):
        for c in (2, 3, 7):
            classes = [f"c{i}" for i in range(c)]
            gold = classes * 3
            assert macro_f1(gold, gold, classes) == 1.0

    def test_hand_worked_half(self):
        # per-class F1 = 0.5 each, macro = 0.5
        assert macro_f1(["a", "a", "b", "b"], ["a", "b", "a", "b"], ["a", "b"]) == 0.5

    def test_total_miss(self):
        assert macro_f1(["a", "a"], ["b", "b"], ["a", "b"]) == 0.0

    def test_absent_class_contributes_zero(self):
        # class c never appears in gold or pred: F1 = 0 by convention
        gold = ["a", "b"]
        pred = ["a", "b"]
        assert macro_f1(gold, pred, ["a", "b", "c"]) == pytest.approx(2.0 / 3.0)

    def test_zero_division_cases(self):
        # predicted never, present in gold -> recall 0; and vice versa
        assert macro_f1(["a", "a", "b"], ["a", "a", "a"], ["a", "b"]) == pytest.approx(
            (0.8 + 0.0) / 2.0
        )

    def test_length_mismatch(self):
        with pytest.raises(DataError, match="length mismatch"):
            macro_f1(["a"], ["a", "b"], ["a", "b"])

    def test_empty(self):
        with pytest.raises(DataError, match="empty"):
            macro_f1([], [], ["a"])

    def test_unknown_gold_label(self):
        with pytest.raises(DataError, match="unknown label 'x' in gold"):
            macro_f1(["x"], ["a"], ["a", "b"])

    def test_unknown_pred_label(self):
        with pytest.raises(DataError, match="unknown label 'x' in predictions"):
            macro_f1(["a"], ["x"], ["a", "b"])

    def test_duplicate_class(self):
        with pytest.raises(DataError, match="duplicate class"):
            macro_f1(["a"], ["a"], ["a", "a"])

    def test_oracle_agreement(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            c = int(rng.integers(2, 6))
            n = int(rng.integers(1, 60))
            classes = [f"c{i}" for i in range(c)]
            gold = [classes[i] for i in rng.integers(0, c, n)]
            pred = [classes[i] for i in rng.integers(0, c, n)]
            got = macro_f1(gold, pred, classes)
            assert got == pytest.approx(oracle_macro_f1(gold, pred, classes), abs=1e-12)
            assert 0.0 <= got <= 1.0

    def test_relabeling_invariance(self):
        rng = np.random.default_rng(1)
        classes = ["a", "b", "c"]
        gold = [classes[i] for i in rng.integers(0, 3, 50)]
        pred = [classes[i] for i in rng.integers(0, 3, 50)]
        base = macro_f1(gold, pred, classes)
        mapping = {"a": "z", "b": "x", "c": "y"}
        relabeled = macro_f1(
            [mapping[g] for g in gold],
            [mapping[p] for p in pred],
            [mapping[c] for c in classes],
        )
        assert relabeled == pytest.approx(base, abs=1e-15)

    def test_uniform_random_approx_1_over_c(self):
        # balanced gold, uniform predictions: E[macro F1] ~ 1/C
        rng = np.random.default_rng(2)
        for c in (2, 4):
            classes = [f"c{i}" for i in range(c)]
            n = 400
            gold = classes * (n // c)
            scores = []
            for _ in range(300):
                pred = [classes[i] for i in rng.integers(0, c, n)]
                scores.append(macro_f1(gold, pred, classes))
            assert abs(float(np.mean(scores)) - 1.0 / c) < 0.02

    @given(
        n=st.integers(min_value=1, max_value=40),
        c=st.integers(min_value=2, max_value=5),
        seed=st.integers(min_value=0, max_value=10_000),
    )
    @settings(max_examples=80, deadline=None)
    def test_bounds_property(self, n, c, seed):
        rng = np.random.default_rng(seed)
        classes = [f"c{i}" for i in range(c)]
        gold = [classes[i] for i in rng.integers(0, c, n)]
        pred = [classes[i] for i in rng.integers(0, c, n)]
        assert 0.0 <= macro_f1(gold, pred, classes) <= 1.0


class TestConfusion:
    def test_rows_are_gold(self):
        confusion = confusion_matrix(["a", "a", "b"], ["a", "b", "b"], ["a", "b"])
        np.testing.assert_array_equal(confusion, [[1, 1], [0, 1]])

    def test_row_sums_are_supports(self):
        rng = np.random.default_rng(3)
        classes = ["a", "b", "c"]
        gold = [classes[i] for i in rng.integers(0, 3, 100)]
        pred = [classes[i] for i in rng.integers(0, 3, 100)]
        confusion = confusion_matrix(gold, pred, classes)
        for i, c in enumerate(classes):
            assert confusion[i].sum() == gold.count(c)

    def test_trace_is_accuracy(self):
        rng = np.random.default_rng(4)
        classes = ["a", "b", "c", "d"]
        gold = [classes[i] for i in rng.integers(0, 4, 200)]
        pred = [classes[i] for i in rng.integers(0, 4, 200)]
        report = evaluate(gold, pred, classes)
        direct = sum(1 for g, p in zip(gold, pred) if g == p) / len(gold)
        assert report.accuracy == pytest.approx(direct, abs=1e-15)
        assert np.trace(report.confusion) / report.confusion.sum() == pytest.approx(
            direct
        )


class TestEvalReport:
    def make(self):
        gold = ["a", "a", "a", "b", "b", "c"]
        pred = ["a", "a", "b", "b", "b", "a"]
        return evaluate(gold, pred, ["a", "b", "c"], metadata={"seed": 10})

    def test_macro_is_mean_of_per_class(self):
        report = self.make()
        f1s = [report.per_class[c]["f1"] for c in report.classes]
        assert report.macro_f1 == pytest.approx(sum(f1s) / len(f1s), abs=1e-15)

    def test_supports(self):
        report = self.make()
        assert report.per_class["a"]["support"] == 3
        assert report.per_class["b"]["support"] == 2
        assert report.per_class["c"]["support"] == 1

    def test_to_json_round_trip(self):
        report = self.make()
        doc = json.loads(report.to_json())
        assert doc["classes"] == ["a", "b", "c"]
        assert doc["macro_f1"] == report.macro_f1
        assert doc["metadata"] == {"seed": 10}
        assert doc["confusion"][0][0] == 2

    def test_to_json_deterministic(self):
        assert self.make().to_json() == self.make().to_json()

    def test_format_text(self):
        text = self.make().format_text()
        assert "macro F1:" in text
        assert "accuracy:" in text
        assert "confusion (rows gold, columns predicted):" in text
        for c in ("a", "b", "c"):
            assert c in text

    def test_accuracy_value(self):
        assert self.make().accuracy == pytest.approx(4.0 / 6.0)

    def test_evaluate_metadata_default(self):
        report = evaluate(["a", "b"], ["a", "b"], ["a", "b"])
        assert report.metadata == {}


class TestKnownF1Values:
    def test_three_class_worked_example(self):
        # gold a,a,b,c  pred a,b,b,b
        # a: tp=1 fp=0 fn=1 -> P=1, R=.5, F1=2/3
        # b: tp=1 fp=2 fn=0 -> P=1/3, R=1, F1=.5
        # c: tp=0 -> F1=0
        gold = ["a", "a", "b", "c"]
        pred = ["a", "b", "b", "b"]
        report = evaluate(gold, pred, ["a", "b", "c"])
        assert report.per_class["a"]["f1"] == pytest.approx(2.0 / 3.0)
        assert report.per_class["b"]["f1"] == pytest.approx(0.5)
        assert report.per_class["c"]["f1"] == 0.0
        assert report.macro_f1 == pytest.approx((2.0 / 3.0 + 0.5) / 3.0)

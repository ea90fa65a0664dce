"""Corpus loading, validation, splitting, and matrix CSV round-trips."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from textattrib.corpus import (
    Corpus,
    Document,
    corpus_from_documents,
    load_corpus,
    split_train_validation,
    write_corpus,
)
from textattrib.errors import DataError
from textattrib.matrix import (
    FeatureMatrix,
    read_feature_matrix,
    read_feature_matrix_text,
    write_feature_matrix,
    write_feature_matrix_stream,
)


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record) + "\n")


class TestLoadJsonl:
    def test_two_documents(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(
            path,
            [
                {"id": "d1", "text": "Hello there.", "label": "human"},
                {"id": "d2", "text": "General benchmark.", "label": "A", "lang": "es"},
            ],
        )
        corpus = load_corpus(path)
        assert len(corpus) == 2
        assert corpus.documents[0] == Document("d1", "Hello there.", "en", "human")
        assert corpus.documents[1].lang == "es"
        # classes sorted lexicographically, independent of first appearance
        assert corpus.classes == ("A", "human")
        assert corpus.labeled

    def test_duplicate_id_names_line(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(
            path,
            [{"id": "d1", "text": "a."}, {"id": "d1", "text": "b."}],
        )
        with pytest.raises(DataError, match="duplicate id d1 at line 2"):
            load_corpus(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text("")
        with pytest.raises(DataError, match="empty corpus"):
            load_corpus(path)

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": "d1", "text": "x."}\n\n\n{"id": "d2", "text": "y."}\n')
        assert len(load_corpus(path)) == 2

    def test_malformed_json_names_line(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": "d1", "text": "x."}\n{oops\n')
        with pytest.raises(DataError, match="line 2"):
            load_corpus(path)

    def test_missing_text(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [{"id": "d1"}])
        with pytest.raises(DataError, match="missing or empty text at line 1"):
            load_corpus(path)

    def test_whitespace_only_text_rejected(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [{"id": "d1", "text": "   "}])
        with pytest.raises(DataError, match="missing or empty text"):
            load_corpus(path)

    def test_missing_id(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [{"text": "x."}])
        with pytest.raises(DataError, match="missing or empty id at line 1"):
            load_corpus(path)

    def test_unsupported_lang(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [{"id": "d1", "text": "x.", "lang": "fr"}])
        with pytest.raises(DataError, match="unsupported lang 'fr' at line 1"):
            load_corpus(path)

    def test_default_lang_override(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [{"id": "d1", "text": "hola."}])
        corpus = load_corpus(path, default_lang="es")
        assert corpus.documents[0].lang == "es"

    def test_non_string_label(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [{"id": "d1", "text": "x.", "label": 3}])
        with pytest.raises(DataError, match="non-string label at line 1"):
            load_corpus(path)

    def test_unknown_format(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [{"id": "d1", "text": "x."}])
        with pytest.raises(DataError, match="unknown corpus format"):
            load_corpus(path, format="parquet")

    def test_unlabeled_mix_not_labeled(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(
            path,
            [{"id": "d1", "text": "x.", "label": "A"}, {"id": "d2", "text": "y."}],
        )
        corpus = load_corpus(path)
        assert not corpus.labeled
        assert corpus.classes == ("A",)


class TestLoadTsv:
    def test_basic(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text(
            "id\ttext\tlabel\nd1\tHello there.\thuman\nd2\tMore text.\tA\n",
            encoding="utf-8",
        )
        corpus = load_corpus(path, format="tsv")
        assert corpus.doc_ids() == ["d1", "d2"]
        assert corpus.labels() == ["human", "A"]

    def test_header_required(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("d1\tHello.\n", encoding="utf-8")
        with pytest.raises(DataError, match="header"):
            load_corpus(path, format="tsv")

    def test_empty_file(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("")
        with pytest.raises(DataError, match="empty corpus"):
            load_corpus(path, format="tsv")

    def test_field_count_mismatch(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("id\ttext\nd1\tHello.\textra\n", encoding="utf-8")
        with pytest.raises(DataError, match="line 2 has 3 fields, expected 2"):
            load_corpus(path, format="tsv")

    def test_no_quoting(self, tmp_path):
        # quotes are literal characters in TSV, not delimiters
        path = tmp_path / "c.tsv"
        path.write_text('id\ttext\nd1\t"quoted" text.\n', encoding="utf-8")
        corpus = load_corpus(path, format="tsv")
        assert corpus.documents[0].text == '"quoted" text.'

    def test_empty_label_is_none(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("id\ttext\tlabel\nd1\tHello.\t\n", encoding="utf-8")
        corpus = load_corpus(path, format="tsv")
        assert corpus.documents[0].label is None

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("id\ttext\nd1\ta.\nd1\tb.\n", encoding="utf-8")
        with pytest.raises(DataError, match="duplicate id d1 at line 3"):
            load_corpus(path, format="tsv")


class TestWriteCorpus:
    def test_round_trip(self, tmp_path):
        docs = [
            Document("d1", "Hello there.", "en", "human"),
            Document("d2", "Hola señor.", "es", "A"),
            Document("d3", "No label here.", "en", None),
        ]
        corpus = corpus_from_documents(docs)
        path = tmp_path / "out.jsonl"
        write_corpus(corpus, path)
        again = load_corpus(path)
        assert again.documents == corpus.documents
        assert again.classes == corpus.classes

    def test_unicode_preserved(self, tmp_path):
        corpus = corpus_from_documents([Document("d1", "café… ¡sí!", "es", "x")])
        path = tmp_path / "out.jsonl"
        write_corpus(corpus, path)
        raw = path.read_text(encoding="utf-8")
        assert "café" in raw  # not escaped to é
        assert load_corpus(path).documents[0].text == "café… ¡sí!"


class TestCorpusFromDocuments:
    def test_duplicate_rejected(self):
        docs = [Document("d1", "a."), Document("d1", "b.")]
        with pytest.raises(DataError, match="duplicate id d1"):
            corpus_from_documents(docs)

    def test_empty_rejected(self):
        with pytest.raises(DataError, match="empty corpus"):
            corpus_from_documents([])


class TestSplit:
    def make(self, n):
        return corpus_from_documents(
            [Document(f"d{i}", f"text number {i}.", "en", "A") for i in range(n)]
        )

    def test_sizes_round(self):
        # round(fraction * N) with round = floor(x + 0.5)
        corpus = self.make(10)
        train, val = split_train_validation(corpus, 0.2, seed=10)
        assert len(val) == 2 and len(train) == 8

    def test_round_half_up(self):
        corpus = self.make(10)
        train, val = split_train_validation(corpus, 0.25, seed=10)
        assert len(val) == int(0.25 * 10 + 0.5) == 3

    def test_partition(self):
        corpus = self.make(23)
        train, val = split_train_validation(corpus, 0.3, seed=7)
        train_ids = set(train.doc_ids())
        val_ids = set(val.doc_ids())
        assert train_ids | val_ids == set(corpus.doc_ids())
        assert not (train_ids & val_ids)

    def test_deterministic(self):
        corpus = self.make(40)
        a = split_train_validation(corpus, 0.25, seed=10)
        b = split_train_validation(corpus, 0.25, seed=10)
        assert a[0].doc_ids() == b[0].doc_ids()
        assert a[1].doc_ids() == b[1].doc_ids()

    def test_seed_changes_split(self):
        corpus = self.make(40)
        a = split_train_validation(corpus, 0.25, seed=10)
        b = split_train_validation(corpus, 0.25, seed=11)
        assert a[1].doc_ids() != b[1].doc_ids()

    def test_order_preserved_within_sides(self):
        corpus = self.make(30)
        train, val = split_train_validation(corpus, 0.4, seed=3)
        pos = {doc_id: i for i, doc_id in enumerate(corpus.doc_ids())}
        assert train.doc_ids() == sorted(train.doc_ids(), key=pos.__getitem__)
        assert val.doc_ids() == sorted(val.doc_ids(), key=pos.__getitem__)

    @pytest.mark.parametrize("fraction", [0.0, 1.0, -0.1, 1.5])
    def test_fraction_bounds(self, fraction):
        corpus = self.make(10)
        with pytest.raises(DataError, match="validation_fraction"):
            split_train_validation(corpus, fraction, seed=10)

    def test_unlabeled_rejected(self):
        corpus = corpus_from_documents([Document("d1", "x."), Document("d2", "y.")])
        with pytest.raises(DataError, match="unlabeled"):
            split_train_validation(corpus, 0.5, seed=10)

    @given(
        n=st.integers(min_value=2, max_value=60),
        frac_pct=st.integers(min_value=1, max_value=99),
        seed=st.integers(min_value=0, max_value=2**31),
    )
    @settings(max_examples=60, deadline=None)
    def test_split_properties(self, n, frac_pct, seed):
        corpus = self.make(n)
        frac = frac_pct / 100.0
        train, val = split_train_validation(corpus, frac, seed)
        assert len(val) == int(frac * n + 0.5)
        assert len(train) + len(val) == n
        assert set(train.doc_ids()) | set(val.doc_ids()) == set(corpus.doc_ids())


class TestFeatureMatrix:
    def test_shape_mismatch(self):
        with pytest.raises(DataError, match="does not match"):
            FeatureMatrix(["a", "b"], ["d1"], np.zeros((2, 2)))

    def test_duplicate_feature_name(self):
        with pytest.raises(DataError, match="duplicate feature name"):
            FeatureMatrix(["a", "a"], ["d1"], np.zeros((1, 2)))

    def test_non_finite_rejected(self):
        with pytest.raises(DataError, match="non-finite"):
            FeatureMatrix(["a"], ["d1"], np.array([[math.inf]]))

    def test_round_trip_bit_exact(self, tmp_path):
        # 17 significant digits round-trip IEEE doubles exactly
        rng = np.random.default_rng(0)
        rows = rng.standard_normal((5, 3)) * 10.0 ** rng.integers(-12, 12, (5, 3))
        m = FeatureMatrix(["f1", "f2", "f3"], [f"d{i}" for i in range(5)], rows)
        path = tmp_path / "m.csv"
        write_feature_matrix(m, path)
        again = read_feature_matrix(path)
        assert again == m
        assert again.rows.tolist() == m.rows.tolist()

    def test_round_trip_awkward_values(self, tmp_path):
        vals = [[0.1 + 0.2, 1e-300, -1e300], [math.pi, 2.0 / 3.0, 5e-324]]
        m = FeatureMatrix(["x", "y", "z"], ["a", "b"], np.array(vals))
        path = tmp_path / "m.csv"
        write_feature_matrix(m, path)
        assert read_feature_matrix(path) == m

    def test_header(self, tmp_path):
        m = FeatureMatrix(["ttr"], ["d1"], np.array([[0.5]]))
        path = tmp_path / "m.csv"
        write_feature_matrix(m, path)
        first = path.read_text(encoding="utf-8").splitlines()[0]
        assert first == "doc_id,ttr"

    def test_stream_writer_matches_file_writer(self, tmp_path):
        import io

        m = FeatureMatrix(["a", "b"], ["d1"], np.array([[1.0, 2.5]]))
        buf = io.StringIO()
        write_feature_matrix_stream(m, buf)
        path = tmp_path / "m.csv"
        write_feature_matrix(m, path)
        assert buf.getvalue() == path.read_text(encoding="utf-8")

    def test_read_missing_doc_id_header(self):
        with pytest.raises(DataError, match="first column must be doc_id"):
            read_feature_matrix_text("id,a\nd1,1.0\n")

    def test_read_empty_file(self):
        with pytest.raises(DataError, match="empty feature matrix file"):
            read_feature_matrix_text("")

    def test_read_arity_error_names_line(self):
        with pytest.raises(DataError, match="line 3 has 2 fields, expected 3"):
            read_feature_matrix_text("doc_id,a,b\nd1,1.0,2.0\nd2,1.0\n")

    def test_read_non_numeric_names_line(self):
        with pytest.raises(DataError, match="line 2"):
            read_feature_matrix_text("doc_id,a\nd1,zebra\n")

    def test_read_non_finite(self):
        with pytest.raises(DataError, match="non-finite value"):
            read_feature_matrix_text("doc_id,a\nd1,inf\n")
        with pytest.raises(DataError, match="non-finite value"):
            read_feature_matrix_text("doc_id,a\nd1,nan\n")

    def test_read_zero_rows(self):
        m = read_feature_matrix_text("doc_id,a,b\n")
        assert len(m) == 0 and m.n_features == 2

    @given(
        st.lists(
            st.floats(allow_nan=False, allow_infinity=False, width=64),
            min_size=1,
            max_size=30,
        )
    )
    @settings(max_examples=80, deadline=None)
    def test_round_trip_property(self, values):
        m = FeatureMatrix(
            [f"f{i}" for i in range(len(values))], ["d0"], np.array([values])
        )
        import io

        buf = io.StringIO()
        write_feature_matrix_stream(m, buf)
        again = read_feature_matrix_text(buf.getvalue())
        assert again.rows.tobytes() == m.rows.tobytes()

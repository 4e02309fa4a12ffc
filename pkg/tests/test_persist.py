"""File formats: CSV parsing, archive round-trips, corruption detection."""

import numpy as np
import pytest

from tsworkbench import (
    LearnerSpec,
    load_featureset,
    load_model,
    model_from_featureset,
    read_time_series_csv,
    save_featureset,
    save_model,
)
from tsworkbench.persist import (
    ArchiveError,
    ChecksumMismatchError,
    CsvFormatError,
    DimensionMismatchError,
    SchemaVersionError,
    TruncatedArchiveError,
    load_predictions,
    save_predictions,
    write_time_series_csv,
)
from tsworkbench.learn.model import predictions_for_featureset

from conftest import blob_featureset, random_featureset


class TestCsvReader:
    def test_time_value(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("time,value\n0,1\n1,2\n")
        ts = read_time_series_csv(p)
        assert ts.name == "a"
        assert list(ts.channels[0].times) == [0.0, 1.0]
        assert list(ts.channels[0].values) == [1.0, 2.0]

    def test_value_only_implicit_grid(self, tmp_path):
        p = tmp_path / "b.csv"
        p.write_text("value\n5\n5\n")
        ts = read_time_series_csv(p)
        assert ts.channels[0].times is None
        assert list(ts.channels[0].time_axis()) == [0.0, 1.0]

    def test_non_increasing_times_line_number(self, tmp_path):
        p = tmp_path / "c.csv"
        p.write_text("time,value\n1,1\n0,2\n")
        with pytest.raises(CsvFormatError, match="line 3.*strictly increasing"):
            read_time_series_csv(p)

    def test_ragged_row_line_number(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("time,value\n0,1\n1\n")
        with pytest.raises(CsvFormatError, match="line 3"):
            read_time_series_csv(p)

    def test_non_numeric_cell(self, tmp_path):
        p = tmp_path / "e.csv"
        p.write_text("time,value\n0,one\n")
        with pytest.raises(CsvFormatError, match="line 2.*'one'"):
            read_time_series_csv(p)

    def test_metadata_and_target_comments(self, tmp_path):
        p = tmp_path / "f.csv"
        p.write_text("# target=Ictal\n# site=ward7\n# gain=1.5\nvalue\n1\n2\n")
        ts = read_time_series_csv(p)
        assert ts.target == "Ictal"
        assert ts.metadata == {"site": "ward7", "gain": 1.5}

    def test_multichannel_with_errors(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text(
            "time,value_0,value_1,error_0,error_1\n0,1,10,0.1,0.2\n1,2,20,0.1,0.2\n"
        )
        ts = read_time_series_csv(p)
        assert ts.n_channels == 2
        assert list(ts.channels[1].values) == [10.0, 20.0]
        assert list(ts.channels[1].errors) == [0.2, 0.2]

    def test_crlf_accepted(self, tmp_path):
        p = tmp_path / "h.csv"
        p.write_bytes(b"time,value\r\n0,1\r\n1,2\r\n")
        ts = read_time_series_csv(p)
        assert list(ts.channels[0].values) == [1.0, 2.0]

    def test_writer_roundtrip(self, tmp_path, rng):
        from conftest import random_series

        ts = random_series(rng, "rt", n=25)
        p = tmp_path / "rt.csv"
        write_time_series_csv(ts, p)
        back = read_time_series_csv(p)
        assert np.array_equal(back.channels[0].values, ts.channels[0].values)
        if ts.channels[0].times is not None:
            assert np.array_equal(back.channels[0].times, ts.channels[0].times)

    def test_reader_output_always_validates(self, tmp_path, rng):
        from conftest import random_series
        from tsworkbench import validate_time_series

        for i in range(10):
            ts = random_series(rng, f"v{i}", n=int(rng.integers(1, 40)))
            p = tmp_path / f"v{i}.csv"
            write_time_series_csv(ts, p)
            assert validate_time_series(read_time_series_csv(p)) == []


class TestFeatureSetArchive:
    def test_roundtrip_bitwise(self, tmp_path, rng):
        for i in range(10):
            fs = random_featureset(rng)
            p = tmp_path / f"r{i}.fset"
            save_featureset(fs, p)
            back = load_featureset(p)
            assert back == fs
            assert back.values.tobytes() == fs.values.tobytes()
            p2 = tmp_path / f"r{i}b.fset"
            save_featureset(back, p2)
            assert p.read_bytes() == p2.read_bytes()

    def test_flipped_payload_byte_detected(self, tmp_path, rng):
        fs = random_featureset(rng)
        p = tmp_path / "x.fset"
        save_featureset(fs, p)
        raw = bytearray(p.read_bytes())
        header_len = int(raw.split(b"\n", 1)[0])
        payload_start = raw.find(b"\n") + 1 + header_len
        flip = payload_start + 11
        raw[flip] ^= 0xFF
        p.write_bytes(bytes(raw))
        with pytest.raises(ChecksumMismatchError, match="checksum mismatch"):
            load_featureset(p)

    def test_dimension_mismatch_distinct(self, tmp_path, rng):
        fs = random_featureset(rng, n_features=2)
        p = tmp_path / "dims.fset"
        save_featureset(fs, p)
        raw = p.read_bytes()
        newline = raw.find(b"\n")
        header_len = int(raw[:newline])
        header = raw[newline + 1 : newline + 1 + header_len].decode()
        # Declare a third feature without adding payload.
        tampered = header.replace('"feature_names":["f0","f1"]',
                                  '"feature_names":["f0","f1","f2"]')
        assert tampered != header
        blob = tampered.encode()
        p.write_bytes(
            str(len(blob)).encode() + b"\n" + blob + raw[newline + 1 + header_len :]
        )
        with pytest.raises(DimensionMismatchError, match="dimension mismatch"):
            load_featureset(p)

    def test_truncated_payload_distinct(self, tmp_path, rng):
        fs = random_featureset(rng)
        p = tmp_path / "trunc.fset"
        save_featureset(fs, p)
        raw = p.read_bytes()
        p.write_bytes(raw[:-7])
        with pytest.raises(TruncatedArchiveError, match="truncated"):
            load_featureset(p)

    def test_unknown_schema_version(self, tmp_path, rng):
        fs = random_featureset(rng)
        p = tmp_path / "v.fset"
        save_featureset(fs, p)
        raw = p.read_bytes()
        newline = raw.find(b"\n")
        header_len = int(raw[:newline])
        header = raw[newline + 1 : newline + 1 + header_len].decode()
        blob = header.replace('"schema_version":"1"', '"schema_version":"9"').encode()
        p.write_bytes(str(len(blob)).encode() + b"\n" + blob + raw[newline + 1 + header_len :])
        with pytest.raises(SchemaVersionError, match="schema_version"):
            load_featureset(p)

    def test_wrong_kind_rejected(self, tmp_path, rng):
        fs = blob_featureset(rng, n_per_class=5)
        model = model_from_featureset(
            fs, LearnerSpec(kind="knn", params={"n_neighbors": 1}, seed=0)
        )
        p = tmp_path / "m.model"
        save_model(model, p)
        with pytest.raises(ArchiveError, match="not a feature set"):
            load_featureset(p)


class TestModelArchive:
    @pytest.mark.parametrize("kind,params", [
        ("knn", {"n_neighbors": 2}),
        ("random_forest", {"n_estimators": 8}),
    ])
    def test_roundtrip_bitwise(self, tmp_path, rng, kind, params):
        fs = blob_featureset(rng, n_per_class=8)
        model = model_from_featureset(
            fs, LearnerSpec(kind=kind, params=params, seed=42)
        )
        p = tmp_path / "model.bin"
        save_model(model, p)
        back = load_model(p)
        assert back.kind == model.kind
        assert back.params == model.params
        assert back.classes == model.classes
        assert back.layout == model.layout
        assert back.cv_accuracy == model.cv_accuracy
        p2 = tmp_path / "model2.bin"
        save_model(back, p2)
        assert p.read_bytes() == p2.read_bytes()

    def test_loaded_model_predicts_identically(self, tmp_path, rng):
        fs = blob_featureset(rng, n_per_class=8)
        from tsworkbench import model_predictions

        model = model_from_featureset(
            fs, LearnerSpec(kind="random_forest", params={"n_estimators": 4}, seed=9)
        )
        p = tmp_path / "m.bin"
        save_model(model, p)
        back = load_model(p)
        assert np.array_equal(
            model_predictions(fs, model, return_probs=True),
            model_predictions(fs, back, return_probs=True),
        )

    def test_knn_payload_corruption_detected(self, tmp_path, rng):
        fs = blob_featureset(rng, n_per_class=6)
        model = model_from_featureset(
            fs, LearnerSpec(kind="knn", params={"n_neighbors": 1}, seed=0)
        )
        p = tmp_path / "knn.bin"
        save_model(model, p)
        raw = bytearray(p.read_bytes())
        raw[-3] ^= 0x10
        p.write_bytes(bytes(raw))
        with pytest.raises(ChecksumMismatchError):
            load_model(p)


class TestPredictionsFile:
    def test_roundtrip(self, tmp_path, rng):
        fs = blob_featureset(rng, n_per_class=5)
        model = model_from_featureset(
            fs, LearnerSpec(kind="knn", params={"n_neighbors": 1}, seed=0)
        )
        pred = predictions_for_featureset(fs, model, return_probs=True)
        p = tmp_path / "pred.json"
        save_predictions(pred, p)
        back = load_predictions(p)
        assert back.names == pred.names
        assert back.labels == pred.labels
        assert np.allclose(back.probs, pred.probs, equal_nan=True)

    def test_deterministic_bytes(self, tmp_path, rng):
        fs = blob_featureset(rng, n_per_class=5)
        model = model_from_featureset(
            fs, LearnerSpec(kind="knn", params={"n_neighbors": 1}, seed=0)
        )
        pred = predictions_for_featureset(fs, model)
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save_predictions(pred, p1)
        save_predictions(pred, p2)
        assert p1.read_bytes() == p2.read_bytes()

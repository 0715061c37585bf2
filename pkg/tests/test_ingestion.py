import io

import pytest

from src.ingestion.load_data import (
    CSVRecordSource,
    JSONLRecordSource,
    ObservationIngestion,
    RecordSourceFactory,
    parse_columns,
)
from src.utils.errors import ConfigError


def read(source, text):
    return list(source.records(io.StringIO(text)))


class TestCSV:
    def test_headerless_rows(self):
        records = read(CSVRecordSource(), "1,2\n3,4\n")
        assert [r.values.tolist() for r in records] == [[1.0, 2.0], [3.0, 4.0]]
        assert [r.line for r in records] == [1, 2]

    def test_header_is_detected(self):
        records = read(CSVRecordSource(), "a,b\n1,2\n")
        assert len(records) == 1
        assert records[0].line == 2 and records[0].values.tolist() == [1.0, 2.0]

    def test_columns_by_name(self):
        records = read(CSVRecordSource(["c", "a"]), "a,b,c\n1,2,3\n4,5,6\n")
        assert [r.values.tolist() for r in records] == [[3.0, 1.0], [6.0, 4.0]]

    def test_columns_by_position_without_header(self):
        records = read(CSVRecordSource(["1"]), "1,2\n3,4\n")
        assert [r.values.tolist() for r in records] == [[2.0], [4.0]]

    def test_missing_named_column(self):
        with pytest.raises(ConfigError):
            read(CSVRecordSource(["z"]), "a,b\n1,2\n")

    def test_position_out_of_range(self):
        with pytest.raises(ConfigError):
            read(CSVRecordSource(["5"]), "1,2\n")

    def test_malformed_rows_become_error_records(self):
        records = read(CSVRecordSource(), "1,2\n3,oops\n5\n7,8\n")
        assert [r.ok for r in records] == [True, False, False, True]
        assert records[1].line == 2 and "non-numeric" in records[1].error
        assert records[2].line == 3

    def test_blank_lines_are_skipped_but_counted(self):
        records = read(CSVRecordSource(), "1\n\n2\n")
        assert [r.line for r in records] == [1, 3]

    def test_empty_input(self):
        assert read(CSVRecordSource(), "") == []


class TestJSONL:
    def test_scalar_and_vector(self):
        records = read(JSONLRecordSource(), '{"x": 1.5}\n{"x": [1, 2]}\n')
        assert [r.values.tolist() for r in records] == [[1.5], [1.0, 2.0]]

    def test_column_positions(self):
        records = read(JSONLRecordSource(["2", "0"]), '{"x": [1, 2, 3]}\n')
        assert records[0].values.tolist() == [3.0, 1.0]

    def test_column_names_are_rejected(self):
        with pytest.raises(ConfigError):
            read(JSONLRecordSource(["a"]), '{"x": [1]}\n')

    @pytest.mark.parametrize("line", ['{"x": [1, "a"]}', '{"y": 1}', "not json", '{"x": true}', "[1, 2]"])
    def test_malformed_records(self, line):
        (record,) = read(JSONLRecordSource(), line + "\n")
        assert not record.ok and record.line == 1


class TestFactory:
    @pytest.mark.parametrize("fmt, expected", [("csv", CSVRecordSource), ("JSONL", JSONLRecordSource), ("ndjson", JSONLRecordSource)])
    def test_create(self, fmt, expected):
        assert isinstance(RecordSourceFactory.create(fmt), expected)

    @pytest.mark.parametrize("path, expected", [
        ("data/stream.jsonl", "jsonl"), ("s.NDJSON", "jsonl"), ("x.csv", "csv"), ("x.txt", None), ("-", None), (None, None),
    ])
    def test_format_for_path(self, path, expected):
        assert RecordSourceFactory.format_for_path(path) == expected

    def test_unsupported(self):
        with pytest.raises(ConfigError):
            RecordSourceFactory.create("parquet")


def test_parse_columns():
    assert parse_columns(" a, b ,,c ") == ["a", "b", "c"]
    assert parse_columns(None) is None
    assert parse_columns("  ") is None


class TestObservationIngestion:
    def test_streams_file(self, logger, config_manager, write_lines):
        ingestion = ObservationIngestion(logger, config_manager)
        with ingestion.open_input(str(write_lines(["x", "1", "2"]))) as handle:
            assert [r.values.tolist() for r in ingestion.execute(handle)] == [[1.0], [2.0]]

    def test_missing_file(self, logger, config_manager, tmp_path):
        with pytest.raises(FileNotFoundError):
            ObservationIngestion(logger, config_manager).open_input(str(tmp_path / "absent.csv"))

    def test_requires_dependencies(self, config_manager):
        with pytest.raises(ValueError):
            ObservationIngestion(None, config_manager)

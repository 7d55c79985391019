import pytest

from procmine.errors import SchemaError, StorageError
from procmine.storage import (
    ColumnEngine,
    EngineConfig,
    KeyRange,
    RowEngine,
    TableSchema,
    eventlog_schema,
    make_engine,
)


class TestSchema:
    def test_duplicate_columns_rejected(self):
        with pytest.raises(SchemaError):
            TableSchema("t", (("a", "string"), ("a", "string")), ("a",))

    def test_key_must_exist(self):
        with pytest.raises(SchemaError):
            TableSchema("t", (("a", "string"),), ("b",))
        with pytest.raises(SchemaError):
            TableSchema("t", (("a", "string"),), ())

    def test_value_columns_exclude_key(self):
        schema = eventlog_schema()
        assert schema.primary_key == ("CaseID", "Timestamp", "Status")
        assert schema.value_columns == ("Activity", "Actor")

    def test_json_round_trip(self):
        schema = eventlog_schema()
        assert TableSchema.from_json(schema.to_json()) == schema

    def test_validate_record(self):
        schema = TableSchema("t", (("k", "string"), ("v", "string")), ("k",))
        with pytest.raises(SchemaError):
            schema.validate_record({"k": "a"})
        with pytest.raises(SchemaError):
            schema.validate_record({"k": "", "v": "x"})


class TestKeyRange:
    def test_prefix_bounds_are_inclusive(self):
        kr = KeyRange(low=("b",), high=("c",))
        assert kr.admits(("b", "0"))
        assert kr.admits(("c", "9"))
        assert not kr.admits(("a", "5"))
        assert not kr.admits(("d",))

    def test_equals(self):
        kr = KeyRange.equals(("c1",))
        assert kr.admits(("c1", "anything"))
        assert not kr.admits(("c2",))

    def test_unbounded_admits_everything(self):
        assert KeyRange().admits(("whatever",))


class TestEngineConfig:
    def test_defaults(self):
        cfg = EngineConfig()
        assert cfg.flush_threshold_bytes == 1 << 20
        assert cfg.durability == "async"
        assert cfg.compression == "none"
        assert cfg.compressed_page_target == 8192

    def test_validation(self):
        with pytest.raises(ValueError):
            EngineConfig(durability="maybe")
        with pytest.raises(ValueError):
            EngineConfig(compression="lz4")
        with pytest.raises(ValueError):
            EngineConfig(compressed_page_target=3000)

    def test_from_file(self, tmp_path):
        p = tmp_path / "engine.conf"
        p.write_text(
            "# comment line\n"
            "\n"
            "flush_threshold_bytes = 4096\n"
            "durability=fsync\n"
            "compression = zlib\n"
        )
        cfg = EngineConfig.from_file(p)
        assert cfg.flush_threshold_bytes == 4096
        assert cfg.durability == "fsync"
        assert cfg.compression == "zlib"

    def test_from_file_rejects_unknown_key(self, tmp_path):
        p = tmp_path / "engine.conf"
        p.write_text("cache_size=12\n")
        with pytest.raises(ValueError):
            EngineConfig.from_file(p)

    def test_from_file_rejects_bad_line(self, tmp_path):
        p = tmp_path / "engine.conf"
        p.write_text("durability fsync\n")
        with pytest.raises(ValueError):
            EngineConfig.from_file(p)


class TestEngineDiscovery:
    def test_make_engine_kinds(self, tmp_path):
        assert isinstance(make_engine("row", tmp_path / "r"), RowEngine)
        assert isinstance(make_engine("column", tmp_path / "c"), ColumnEngine)
        with pytest.raises(ValueError):
            make_engine("graph", tmp_path / "g")

    def test_wrong_kind_refuses_foreign_tables(self, tmp_path):
        engine = RowEngine(tmp_path)
        engine.create_table(
            TableSchema("t", (("k", "string"), ("v", "string")), ("k",))
        )
        engine.close()
        with pytest.raises(StorageError):
            ColumnEngine(tmp_path)

    def test_metrics_accumulate_with_injected_clock(self, tmp_path):
        ticks = iter(range(1000))
        cfg = EngineConfig(clock=lambda: float(next(ticks)))
        engine = RowEngine(tmp_path, cfg)
        t = engine.create_table(
            TableSchema("t", (("k", "string"), ("v", "string")), ("k",))
        )
        t.insert({"k": "a", "v": "1"})
        assert engine.metrics.write_seconds > 0
        list(t.scan())
        assert engine.metrics.read_seconds > 0
        engine.metrics.reset()
        assert engine.metrics.snapshot() == (0.0, 0.0)
        engine.close()

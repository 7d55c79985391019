import pytest

from procmine.storage import ColumnEngine, RowEngine

from helpers import l_par_log, l_xor_log


@pytest.fixture
def xor_log():
    return l_xor_log()


@pytest.fixture
def par_log():
    return l_par_log()


@pytest.fixture
def row_engine(tmp_path):
    engine = RowEngine(tmp_path / "row")
    yield engine
    engine.close()


@pytest.fixture
def column_engine(tmp_path):
    engine = ColumnEngine(tmp_path / "column")
    yield engine
    engine.close()


@pytest.fixture(params=["row", "column"])
def engine(request, row_engine, column_engine):
    return row_engine if request.param == "row" else column_engine

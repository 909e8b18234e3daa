import math

import pytest

from ustlab_plots.io import distance_column, json_metric, read_json, read_table


def write(path, text):
    path.write_text(text)
    return str(path)


def test_read_table_parses_meta_columns_and_infinities(tmp_path):
    path = write(
        tmp_path / "t.csv",
        "# seed=3\n# graph=ring:n=12\ntask,d_0_1,components\n0,4.0,1\n0,,2\n",
    )
    table = read_table(path)
    assert table.meta == {"seed": "3", "graph": "ring:n=12"}
    assert table.columns == ["task", "d_0_1", "components"]
    assert table.column("d_0_1") == [4.0, math.inf]
    with pytest.raises(ValueError, match="no column"):
        table.column("missing")


def test_read_table_rejects_malformed_rows_by_line(tmp_path):
    path = write(tmp_path / "bad.csv", "a,b\n1.0\n")
    with pytest.raises(ValueError, match=r"bad\.csv:2"):
        read_table(path)
    path = write(tmp_path / "nan.csv", "a,b\n1.0,zebra\n")
    with pytest.raises(ValueError, match=r"nan\.csv:2.*'zebra'"):
        read_table(path)


def test_read_table_rejects_empty_but_valid_files(tmp_path):
    path = write(tmp_path / "empty.csv", "# seed=1\na,b\n")
    with pytest.raises(ValueError, match="no data rows"):
        read_table(path)
    path = write(tmp_path / "blank.csv", "# seed=1\n")
    with pytest.raises(ValueError, match="no column header"):
        read_table(path)


def test_distance_column_selection(tmp_path):
    path = write(tmp_path / "t.csv", "task,T,le_length\n0,5,3\n")
    table = read_table(path)
    assert distance_column(table) == "T"
    assert distance_column(table, "le_length") == "le_length"
    with pytest.raises(ValueError, match="no column 'd_9_9'"):
        distance_column(table, "d_9_9")
    bare = read_table(write(tmp_path / "b.csv", "task,components\n0,1\n"))
    with pytest.raises(ValueError, match="no distance column"):
        distance_column(bare)


def test_read_json_and_metric(tmp_path):
    path = write(tmp_path / "r.json", '{"value": 0.25, "gamma": {"value": 0.5}}')
    payload = read_json(path)
    assert json_metric(payload, "value", path) == 0.25
    assert json_metric(payload, "gamma.value", path) == 0.5
    with pytest.raises(ValueError, match="no field 'beta.value'"):
        json_metric(payload, "beta.value", path)
    bad = write(tmp_path / "bad.json", "{not json")
    with pytest.raises(ValueError, match="invalid JSON"):
        read_json(bad)
    arr = write(tmp_path / "arr.json", "[1, 2]")
    with pytest.raises(ValueError, match="JSON object"):
        read_json(arr)

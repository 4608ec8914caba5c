import io

import pytest
from hypothesis import given, strategies as st

from rainshape.ingest import (DuplicateCellError, ParseError, PassRecord, group_by_pass,
                              parse_records, read_snapshots, serialize_records)

HEADER = "pass_id,grid_i,grid_j,lat,lon,rain_rate\n"


def test_header_only_is_empty():
    assert parse_records(HEADER) == []


def test_blank_file_is_empty():
    assert parse_records(b"") == []


def test_three_rows_two_passes():
    text = HEADER + "P1,0,0,10,80,1.5\nP1,0,1,10,80.05,0\nP2,3,4,11,81,2\n"
    recs = parse_records(text)
    assert len(recs) == 3
    assert [r.pass_id for r in recs] == ["P1", "P1", "P2"]
    assert recs[0] == PassRecord("P1", 0, 0, 10.0, 80.0, 1.5)


def test_negative_rain_reports_its_line():
    text = HEADER + "P1,0,0,10,80,1.5\nP1,0,1,10,80.05,-1\n"
    with pytest.raises(ParseError) as exc:
        parse_records(text)
    assert exc.value.line == 3
    assert "line 3" in str(exc.value)


@pytest.mark.parametrize("row, fragment", [
    ("P1,0,0,10,80", "fields"),
    ("P1,x,0,10,80,1", "grid_i"),
    ("P1,0,0,95,80,1", "lat"),
    ("P1,0,0,10,200,1", "lon"),
    ("P1,0,0,10,80,nan", "finite"),
    (",0,0,10,80,1", "pass_id"),
])
def test_malformed_rows(row, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_records(HEADER + row + "\n")


def test_bad_header():
    with pytest.raises(ParseError) as exc:
        parse_records("a,b,c\n1,2,3\n")
    assert exc.value.line == 1


def test_duplicate_cell():
    with pytest.raises(DuplicateCellError, match="line 2"):
        parse_records(HEADER + "P,1,1,10,80,0\nP,1,1,10,80,2\n")


def test_group_column_round_trip():
    text = HEADER.strip() + ",group\nP1,0,0,10,80,1,1998\nP2,0,0,10,80,0,1999\n"
    recs = parse_records(text)
    assert [r.group for r in recs] == ["1998", "1999"]
    assert parse_records(serialize_records(recs)) == recs
    snaps = group_by_pass(recs)
    assert [s.group for s in snaps] == ["1998", "1999"]


def test_binary_stream_input():
    recs = parse_records(io.BytesIO((HEADER + "P,0,0,1,2,3\n").encode()))
    assert recs[0].rain_rate == 3.0


def test_two_passes_two_snapshots():
    recs = [PassRecord("B", 0, 0, 1, 1, 0), PassRecord("A", 0, 0, 1, 1, 1)]
    snaps = group_by_pass(recs)
    assert [s.pass_id for s in snaps] == ["A", "B"]


def test_single_record_snapshot():
    (snap,) = group_by_pass([PassRecord("A", 2, 3, 1, 1, 0.5)])
    assert snap.swath == {(2, 3)}


def test_four_records_two_dry():
    recs = [PassRecord("A", i, j, 1, 1, r) for (i, j), r in zip([(0, 0), (0, 1), (1, 0), (1, 1)], [0, 2, 0, 1])]
    (snap,) = group_by_pass(recs)
    assert len(snap.swath) == 4
    assert snap.positive_cells() == {(0, 1), (1, 1)}


def test_read_snapshots(tmp_path):
    p = tmp_path / "in.csv"
    p.write_text(HEADER + "P,0,0,1,2,3\n")
    (snap,) = read_snapshots(p, cell_size_km=4.0)
    assert snap.cell_size_km == 4.0 and snap.rain((0, 0)) == 3.0


finite = st.floats(allow_nan=False, allow_infinity=False)
record = st.builds(
    PassRecord,
    pass_id=st.sampled_from(["P1", "P2", "orbit-07"]),
    grid_i=st.integers(-1000, 1000), grid_j=st.integers(-1000, 1000),
    lat=st.floats(-90, 90), lon=st.floats(-180, 180), rain_rate=st.floats(0, 1e6),
)


@given(st.lists(record, max_size=30, unique_by=lambda r: (r.pass_id, r.grid_i, r.grid_j)))
def test_serialize_round_trip(recs):
    assert parse_records(serialize_records(recs)) == recs

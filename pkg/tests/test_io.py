import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from evtbr.encoder import EncodedFrame, encode_tbr
from evtbr.events import EventStream, SensorGeometry
from evtbr.io import (
    BINARY_HEADER_LEN,
    BINARY_MAGIC,
    BINARY_RECORD_LEN,
    CSV_HEADER,
    EventFileError,
    EventFileFormat,
    FrameFormatError,
    read_events,
    read_frame,
    stream_info,
    write_events,
    write_frame,
)

from helpers import make_stream, random_stack, random_stream

G = SensorGeometry(4, 4)


def binary_record(t, x, y, p):
    return struct.pack("<QHHb", t, x, y, p)


def binary_header(w=4, h=4):
    return BINARY_MAGIC + struct.pack("<II", w, h)


class TestCsvRead:
    def test_small_file(self, tmp_path):
        f = tmp_path / "ev.csv"
        f.write_text("t_us,x,y,p\n0,1,2,1\n2500,3,0,-1\n")
        stream = read_events(f, EventFileFormat.TEXT_CSV, geometry=G)
        assert len(stream) == 2
        assert stream.t.tolist() == [0, 2500]
        assert stream.x.tolist() == [1, 3]
        assert stream.y.tolist() == [2, 0]
        assert stream.p.tolist() == [1, -1]

    def test_geometry_required(self, tmp_path):
        f = tmp_path / "ev.csv"
        f.write_text("t_us,x,y,p\n")
        with pytest.raises(ValueError, match="geometry"):
            read_events(f, EventFileFormat.TEXT_CSV)

    def test_header_only_is_empty_stream(self, tmp_path):
        f = tmp_path / "ev.csv"
        f.write_text("t_us,x,y,p\n")
        assert len(read_events(f, EventFileFormat.TEXT_CSV, geometry=G)) == 0

    def test_bad_header(self, tmp_path):
        f = tmp_path / "ev.csv"
        f.write_text("time,x,y,p\n0,0,0,1\n")
        with pytest.raises(EventFileError, match="line 1"):
            read_events(f, EventFileFormat.TEXT_CSV, geometry=G)

    def test_bad_polarity_names_line(self, tmp_path):
        f = tmp_path / "ev.csv"
        f.write_text("t_us,x,y,p\n0,0,0,2\n")
        with pytest.raises(EventFileError, match="line 2.*polarity"):
            read_events(f, EventFileFormat.TEXT_CSV, geometry=G)

    def test_field_count_error(self, tmp_path):
        f = tmp_path / "ev.csv"
        f.write_text("t_us,x,y,p\n0,0,0,1\n1,2,3\n")
        with pytest.raises(EventFileError, match="line 3.*fields"):
            read_events(f, EventFileFormat.TEXT_CSV, geometry=G)

    def test_non_integer_field(self, tmp_path):
        f = tmp_path / "ev.csv"
        f.write_text("t_us,x,y,p\n0,a,0,1\n")
        with pytest.raises(EventFileError, match="line 2.*non-integer"):
            read_events(f, EventFileFormat.TEXT_CSV, geometry=G)

    def test_out_of_bounds_coordinate(self, tmp_path):
        f = tmp_path / "ev.csv"
        f.write_text("t_us,x,y,p\n0,4,0,1\n")
        with pytest.raises(EventFileError, match="line 2.*outside"):
            read_events(f, EventFileFormat.TEXT_CSV, geometry=G)

    def test_negative_timestamp(self, tmp_path):
        f = tmp_path / "ev.csv"
        f.write_text("t_us,x,y,p\n-5,0,0,1\n")
        with pytest.raises(EventFileError, match="line 2.*negative"):
            read_events(f, EventFileFormat.TEXT_CSV, geometry=G)


class TestCsvWrite:
    def test_exact_bytes(self, tmp_path):
        stream = make_stream(G, [(0, 1, 2, 1), (2500, 3, 0, -1)])
        f = tmp_path / "ev.csv"
        write_events(stream, f, EventFileFormat.TEXT_CSV)
        assert f.read_bytes() == b"t_us,x,y,p\n0,1,2,1\n2500,3,0,-1\n"

    def test_empty_stream(self, tmp_path):
        f = tmp_path / "ev.csv"
        write_events(EventStream.empty(G), f, EventFileFormat.TEXT_CSV)
        assert f.read_bytes() == b"t_us,x,y,p\n"

    @pytest.mark.parametrize("seed", range(3))
    def test_round_trip(self, tmp_path, seed):
        stream = random_stream(G, n_events=200, duration=50_000, seed=seed)
        f = tmp_path / "ev.csv"
        write_events(stream, f, EventFileFormat.TEXT_CSV)
        assert read_events(f, EventFileFormat.TEXT_CSV, geometry=G) == stream


class TestBinaryRead:
    def test_empty_file_is_header_only(self, tmp_path):
        f = tmp_path / "ev.bin"
        f.write_bytes(binary_header())
        stream = read_events(f, EventFileFormat.BINARY_V1)
        assert len(stream) == 0
        assert stream.geometry == G
        assert f.stat().st_size == BINARY_HEADER_LEN == 12

    def test_single_record_layout(self, tmp_path):
        f = tmp_path / "ev.bin"
        f.write_bytes(binary_header() + binary_record(2500, 1, 2, -1))
        assert f.stat().st_size == BINARY_HEADER_LEN + BINARY_RECORD_LEN == 25
        stream = read_events(f, EventFileFormat.BINARY_V1)
        assert stream.t.tolist() == [2500]
        assert stream.x.tolist() == [1]
        assert stream.y.tolist() == [2]
        assert stream.p.tolist() == [-1]

    def test_geometry_comes_from_header(self, tmp_path):
        f = tmp_path / "ev.bin"
        f.write_bytes(binary_header(640, 480))
        stream = read_events(f, EventFileFormat.BINARY_V1)
        assert stream.geometry == SensorGeometry(640, 480)

    def test_bad_magic(self, tmp_path):
        f = tmp_path / "ev.bin"
        f.write_bytes(b"XXXX" + struct.pack("<II", 4, 4))
        with pytest.raises(EventFileError, match="byte 0.*magic"):
            read_events(f, EventFileFormat.BINARY_V1)

    def test_truncated_header(self, tmp_path):
        f = tmp_path / "ev.bin"
        f.write_bytes(b"EVS1\x04")
        with pytest.raises(EventFileError, match="byte 0.*truncated header"):
            read_events(f, EventFileFormat.BINARY_V1)

    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_truncated_record_names_offset(self, tmp_path, k):
        f = tmp_path / "ev.bin"
        body = b"".join(binary_record(i, 0, 0, 1) for i in range(k))
        f.write_bytes(binary_header() + body + b"\x00\x01\x02")
        expected = BINARY_HEADER_LEN + k * BINARY_RECORD_LEN
        with pytest.raises(EventFileError, match=f"byte {expected}.*truncated record"):
            read_events(f, EventFileFormat.BINARY_V1)

    def test_bad_polarity_names_record_offset(self, tmp_path):
        f = tmp_path / "ev.bin"
        f.write_bytes(
            binary_header()
            + binary_record(0, 0, 0, 1)
            + binary_record(10, 1, 1, 0)
        )
        with pytest.raises(EventFileError, match=f"byte {12 + 13}.*polarity"):
            read_events(f, EventFileFormat.BINARY_V1)

    def test_out_of_bounds_coordinate(self, tmp_path):
        f = tmp_path / "ev.bin"
        f.write_bytes(binary_header() + binary_record(0, 4, 0, 1))
        with pytest.raises(EventFileError, match="byte 12.*outside"):
            read_events(f, EventFileFormat.BINARY_V1)

    def test_zero_width_rejected(self, tmp_path):
        f = tmp_path / "ev.bin"
        f.write_bytes(BINARY_MAGIC + struct.pack("<II", 0, 4))
        with pytest.raises(EventFileError, match="byte 4.*geometry"):
            read_events(f, EventFileFormat.BINARY_V1)

    def test_timestamp_above_int64_rejected(self, tmp_path):
        f = tmp_path / "ev.bin"
        f.write_bytes(binary_header() + binary_record(2**63, 0, 0, 1))
        with pytest.raises(EventFileError, match="byte 12.*2\\^63"):
            read_events(f, EventFileFormat.BINARY_V1)


class TestBinaryWrite:
    def test_round_trip_large(self, tmp_path):
        geometry = SensorGeometry(128, 96)
        stream = random_stream(geometry, n_events=10_000, duration=1_000_000, seed=5)
        f = tmp_path / "ev.bin"
        write_events(stream, f, EventFileFormat.BINARY_V1)
        assert f.stat().st_size == BINARY_HEADER_LEN + 10_000 * BINARY_RECORD_LEN
        back = read_events(f, EventFileFormat.BINARY_V1)
        assert back == stream
        assert back.geometry == geometry

    def test_coordinates_above_u16_rejected(self, tmp_path):
        geometry = SensorGeometry(70_000, 4)
        arr = np.array([(0, 66_000, 0, 1)], dtype=EventStream.empty(geometry).events.dtype)
        stream = EventStream(geometry, arr)
        with pytest.raises(EventFileError, match="u16"):
            write_events(stream, tmp_path / "ev.bin", EventFileFormat.BINARY_V1)

    @given(st.integers(min_value=0, max_value=2**31))
    def test_round_trip_property(self, seed):
        import tempfile

        stream = random_stream(G, n_events=50, duration=10_000, seed=seed)
        with tempfile.TemporaryDirectory() as d:
            p = f"{d}/ev.bin"
            write_events(stream, p, EventFileFormat.BINARY_V1)
            assert read_events(p, EventFileFormat.BINARY_V1) == stream


class TestFrameWrite:
    def test_exact_pgm_bytes(self, tmp_path):
        geometry = SensorGeometry(2, 2)
        codes = np.array([[0, 255], [128, 5]], dtype=np.uint32)
        frame = EncodedFrame(geometry, 8, codes)
        f = tmp_path / "frame.pgm"
        write_frame(frame, f)
        assert f.read_bytes() == b"P5\n2 2\n255\n\x00\xff\x80\x05"

    def test_sixteen_bit_payload_big_endian(self, tmp_path):
        geometry = SensorGeometry(1, 1)
        frame = EncodedFrame(geometry, 16, np.array([[256]], dtype=np.uint32))
        f = tmp_path / "frame.pgm"
        write_frame(frame, f)
        assert f.read_bytes() == b"P5\n1 1\n65535\n\x01\x00"

    def test_rejects_frames_above_sixteen_bits(self, tmp_path):
        frame = EncodedFrame(G, 17, np.zeros(G.shape, dtype=np.uint32))
        with pytest.raises(FrameFormatError, match="16"):
            write_frame(frame, tmp_path / "frame.pgm")

    def test_rejects_codes_above_maxval(self, tmp_path):
        frame = EncodedFrame(G, 4, np.full(G.shape, 99, dtype=np.uint32))
        with pytest.raises(FrameFormatError, match="maxval"):
            write_frame(frame, tmp_path / "frame.pgm")


class TestFrameRead:
    @pytest.mark.parametrize("n_bits", [1, 2, 4, 8, 9, 12, 16])
    def test_round_trip(self, tmp_path, n_bits):
        frame = encode_tbr(random_stack(G, n_bits, seed=n_bits))
        f = tmp_path / "frame.pgm"
        write_frame(frame, f)
        back = read_frame(f)
        assert back.n_bits == n_bits
        assert np.array_equal(back.codes, frame.codes)
        assert back.geometry == frame.geometry

    def test_window_start_not_persisted(self, tmp_path):
        frame = EncodedFrame(G, 8, np.zeros(G.shape, dtype=np.uint32), window_start=40_000)
        f = tmp_path / "frame.pgm"
        write_frame(frame, f)
        assert read_frame(f).window_start == 0

    def test_n_bits_recovered_from_maxval(self, tmp_path):
        f = tmp_path / "frame.pgm"
        f.write_bytes(b"P5\n1 1\n255\n\x07")
        frame = read_frame(f)
        assert frame.n_bits == 8
        assert frame.codes[0, 0] == 7

    def test_maxval_not_all_ones_rejected(self, tmp_path):
        f = tmp_path / "frame.pgm"
        f.write_bytes(b"P5\n1 1\n100\n\x00")
        with pytest.raises(FrameFormatError, match="2\\^N - 1"):
            read_frame(f)

    def test_comments_tolerated(self, tmp_path):
        f = tmp_path / "frame.pgm"
        f.write_bytes(b"P5\n# made by hand\n2 1\n# another\n1\n\x01\x00")
        frame = read_frame(f)
        assert frame.n_bits == 1
        assert frame.codes.tolist() == [[1, 0]]

    def test_truncated_raster(self, tmp_path):
        f = tmp_path / "frame.pgm"
        f.write_bytes(b"P5\n2 2\n255\n\x00\x01")
        with pytest.raises(FrameFormatError, match="raster"):
            read_frame(f)

    def test_oversized_raster(self, tmp_path):
        f = tmp_path / "frame.pgm"
        f.write_bytes(b"P5\n1 1\n255\n\x00\x01")
        with pytest.raises(FrameFormatError, match="raster"):
            read_frame(f)

    def test_wrong_magic(self, tmp_path):
        f = tmp_path / "frame.pgm"
        f.write_bytes(b"P2\n1 1\n255\n0\n")
        with pytest.raises(FrameFormatError, match="P5"):
            read_frame(f)

    def test_maxval_above_sixteen_bits_rejected(self, tmp_path):
        f = tmp_path / "frame.pgm"
        f.write_bytes(b"P5\n1 1\n131071\n\x00\x00\x00")
        with pytest.raises(FrameFormatError, match="16-bit"):
            read_frame(f)


class TestStreamInfo:
    def test_rate_example(self):
        # 1000 events over exactly half a second is 2000 events/s.
        rows = [(i * 500, i % 4, (i // 4) % 4, 1) for i in range(999)]
        rows.append((500_000, 3, 3, 1))
        info = stream_info(make_stream(G, rows))
        assert info.event_count == 1000
        assert info.duration_us == 500_000
        assert info.events_per_second == pytest.approx(2000.0)

    def test_polarity_split(self):
        rows = [(i, 0, 0, 1) for i in range(600)] + [(600 + i, 1, 1, -1) for i in range(400)]
        info = stream_info(make_stream(G, rows))
        assert info.positive_count == 600
        assert info.negative_count == 400

    def test_zero_duration_zero_rate(self):
        info = stream_info(make_stream(G, [(100, 0, 0, 1), (100, 1, 1, 1)]))
        assert info.duration_us == 0
        assert info.events_per_second == 0.0

    def test_active_pixels_deduplicated(self):
        rows = [(0, 0, 0, 1), (1, 0, 0, 1), (2, 1, 0, 1), (3, 0, 1, -1)]
        assert stream_info(make_stream(G, rows)).active_pixel_count == 3

    def test_empty_stream(self):
        info = stream_info(EventStream.empty(G))
        assert info.event_count == 0
        assert info.summary().startswith("events=0 ")

    def test_summary_fields_present(self):
        s = stream_info(make_stream(G, [(0, 0, 0, 1)])).summary()
        for key in ("events=", "duration_us=", "rate_eps=", "pos=", "neg=", "active_pixels="):
            assert key in s

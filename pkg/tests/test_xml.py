import io
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from heprep.errors import SchemaError, SinkIOError, VersionError, XmlSyntaxError
from heprep.model import AttValue, validate_document
from heprep.xmlio import (
    XmlWriterConfig,
    format_real,
    parse_document,
    write_document,
    xml_builder,
)
from heprep.builder import memory_builder

from gen import emit_document, make_document


class TestFormatReal:
    @pytest.mark.parametrize(
        "value,expected",
        [
            (0.1, "0.1"),
            (0.0, "0"),
            (-0.0, "-0"),
            (1e21, "1e21"),
            (5.0, "5"),
            (123456789.0, "123456789"),
            (1.5e-7, "1.5e-7"),
            (1e16, "1e16"),
            (-2.25, "-2.25"),
        ],
    )
    def test_examples(self, value, expected):
        text = format_real(value)
        assert text == expected
        parsed = float(text)
        assert parsed == value and math.copysign(1, parsed) == math.copysign(1, value)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            format_real(float("nan"))

    @settings(max_examples=500)
    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_round_trip_bit_exact(self, value):
        text = format_real(value)
        assert float(text) == value
        assert "E" not in text and "+" not in text.split("e")[-1]


def small_doc():
    b = memory_builder()
    b.open_type_tree("t", "1")
    b.open_type("Track")
    b.type_att_value(AttValue.text("Note", 'a<b&"c"'))
    b.close_type()
    b.close_type_tree()
    b.open_instance_tree("e", "1", "t", "1")
    b.open_instance("Track")
    b.point(0.5, -1.0, 2.0)
    b.close_instance()
    b.close_instance_tree()
    return b.finish()


class TestWriter:
    def test_golden_bytes(self):
        buf = io.BytesIO()
        write_document(small_doc(), buf)
        assert buf.getvalue().decode() == (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            '<heprep version="2.0">\n'
            '  <typetree name="t" version="1">\n'
            '    <type name="Track">\n'
            '      <attvalue name="Note" kind="text" value="a&lt;b&amp;&quot;c&quot;"/>\n'
            "    </type>\n"
            "  </typetree>\n"
            '  <instancetree name="e" version="1" typetreename="t" typetreeversion="1">\n'
            '    <instance type="Track">\n'
            '      <point x="0.5" y="-1" z="2"/>\n'
            "    </instance>\n"
            "  </instancetree>\n"
            "</heprep>\n"
        )

    def test_compact_mode_single_line_body(self):
        buf = io.BytesIO()
        write_document(small_doc(), buf, XmlWriterConfig(indent=False))
        text = buf.getvalue().decode()
        assert text.count("\n") == 2  # declaration line + body line
        assert parse_document(buf.getvalue()) == small_doc()

    def test_determinism(self):
        a, b = io.BytesIO(), io.BytesIO()
        doc = make_document(random.Random(5))
        write_document(doc, a)
        write_document(doc, b)
        assert a.getvalue() == b.getvalue()

    @pytest.mark.parametrize("seed", range(30))
    def test_round_trip_random_documents(self, seed):
        doc = make_document(random.Random(seed + 1000))
        for indent in (True, False):
            buf = io.BytesIO()
            write_document(doc, buf, XmlWriterConfig(indent=indent))
            parsed = parse_document(buf.getvalue())
            assert parsed == doc
            assert validate_document(parsed) == []

    def test_interleaved_emission_round_trips(self):
        doc = make_document(random.Random(77))
        buf = io.BytesIO()
        emit_document(xml_builder(buf), doc, random.Random(78))
        assert parse_document(buf.getvalue()) == doc

    def test_streaming_bound_and_progress(self):
        sink = io.BytesIO()
        config = XmlWriterConfig(indent=False, max_buffered_bytes=4096)
        b = xml_builder(sink, config)
        b.open_type_tree("t", "1")
        b.open_type("A")
        b.close_type()
        b.close_type_tree()
        b.open_instance_tree("e", "1", "t", "1")
        for i in range(10_000):
            b.open_instance("A")
            b.point(float(i), 0.0, 1.5)
            b.close_instance()
        assert sink.tell() > 0  # bytes already flushed mid-stream
        assert b.peak_buffered_bytes <= 4096
        b.close_instance_tree()
        b.finish()
        assert b.peak_buffered_bytes <= 4096
        assert parse_document(sink.getvalue()).instance_tree.root_instances[9999].points[
            0
        ].x == 9999.0

    def test_sink_failure_poisons_builder(self):
        class FailingSink:
            def write(self, data):
                raise OSError("disk full")

        b = xml_builder(FailingSink(), XmlWriterConfig(max_buffered_bytes=1))
        with pytest.raises(SinkIOError):
            b.open_type_tree("t", "1")
        with pytest.raises(SinkIOError):
            b.open_type("A")


def _wrap(body: str) -> bytes:
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n<heprep version="2.0">'
        '<typetree name="t" version="1"><type name="T"/></typetree>'
        f'<instancetree name="e" version="1" typetreename="t" typetreeversion="1">{body}'
        "</instancetree></heprep>"
    ).encode()


class TestParserRejections:
    def test_malformed_xml(self):
        with pytest.raises(XmlSyntaxError):
            parse_document(b"<heprep version=")

    def test_truncated(self):
        data = _wrap("")
        with pytest.raises(XmlSyntaxError):
            parse_document(data[: len(data) // 2])

    def test_wrong_root(self):
        with pytest.raises(SchemaError):
            parse_document(b'<?xml version="1.0"?><display version="2.0"/>')

    def test_bad_version(self):
        with pytest.raises(VersionError):
            parse_document(b'<heprep version="1.0"></heprep>')

    def test_missing_typetree(self):
        with pytest.raises(SchemaError, match="typetree"):
            parse_document(
                b'<heprep version="2.0"><instancetree name="e" version="1" '
                b'typetreename="t" typetreeversion="1"/></heprep>'
            )

    @pytest.mark.parametrize(
        "body",
        [
            '<widget type="T"/>',  # unknown element
            '<instance type="T" extra="1"/>',  # unknown attribute
            "<instance/>",  # missing required attribute
            '<instance type="T"><point x="nan" y="0" z="0"/></instance>',
            '<instance type="T"><point x="1..2" y="0" z="0"/></instance>',
            '<instance type="T"><point x="inf" y="0" z="0"/></instance>',
            '<instance type="T"><point x="0" y="0"/></instance>',  # missing z
            '<instance type="T"><attvalue name="n" kind="int" value="1.5"/></instance>',
            '<instance type="T"><attvalue name="n" kind="bool" value="yes"/></instance>',
            '<instance type="T"><attvalue name="n" kind="color" value="1,0"/></instance>',
            '<instance type="T"><attvalue name="n" kind="color" value="2,0,0"/></instance>',
            '<instance type="T"><attvalue name="n" kind="blob" value="x"/></instance>',
            '<instance type="T"><attvalue name="n" kind="int" '
            'value="9223372036854775808"/></instance>',  # 2**63
            '<instance type="T">text</instance>',  # stray text content
        ],
    )
    def test_schema_errors(self, body):
        with pytest.raises(SchemaError):
            parse_document(_wrap(body))

    def test_bad_attdef_tokens(self):
        data = (
            '<?xml version="1.0"?><heprep version="2.0"><typetree name="t" version="1">'
            '<type name="T"><attdef name="a" category="Drawing" kind="text"/></type>'
            '</typetree><instancetree name="e" version="1" typetreename="t" '
            'typetreeversion="1"/></heprep>'
        ).encode()
        with pytest.raises(SchemaError, match="category"):
            parse_document(data)

    def test_attvalue_with_children(self):
        body = '<instance type="T"><attvalue name="n" kind="text" value="x"><point x="0" y="0" z="0"/></attvalue></instance>'
        with pytest.raises(SchemaError):
            parse_document(_wrap(body))

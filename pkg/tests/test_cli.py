import socket
import subprocess
import sys
import time
from pathlib import Path

import pytest

from heprep.cli import render_query_lines
from heprep.model import HepRepDocument
from heprep.query import InstanceRequest, get_instances
from heprep.xmlio import parse_document

from oracle import selected_paths


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "heprep.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
        timeout=120,
    )


@pytest.fixture(scope="module")
def export_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("export")
    result = run_cli("export", "--seed", "42", "--events", "5", "--out", str(out))
    assert result.returncode == 0, result.stderr
    return out


class TestExport:
    def test_writes_expected_files(self, export_dir):
        names = sorted(p.name for p in export_dir.iterdir())
        assert names == [f"event_{i:06d}.heprep.xml" for i in range(1, 6)]

    def test_files_parse_and_validate(self, export_dir):
        for path in sorted(export_dir.iterdir()):
            result = run_cli("validate", str(path))
            assert result.returncode == 0, result.stdout + result.stderr
            assert result.stdout == ""

    def test_repeat_export_is_byte_identical(self, export_dir, tmp_path):
        again = tmp_path / "again"
        result = run_cli("export", "--seed", "42", "--events", "5", "--out", str(again))
        assert result.returncode == 0
        for path in sorted(export_dir.iterdir()):
            assert (again / path.name).read_bytes() == path.read_bytes()

    def test_types_flag_filters_instances_not_types(self, tmp_path):
        out = tmp_path / "tracks_only"
        result = run_cli(
            "export", "--seed", "42", "--events", "1", "--out", str(out), "--types", "Track"
        )
        assert result.returncode == 0
        doc = parse_document((out / "event_000001.heprep.xml").read_bytes())
        type_names = {t.name for t in doc.type_tree.root_types}
        assert "CalCrystal" in type_names  # catalog stays complete
        instance_types = {i.type_full_name for i in doc.instance_tree.root_instances}
        assert instance_types == {"Track"}

    def test_unwritable_dir_exits_3(self, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("a file, not a directory")
        result = run_cli("export", "--seed", "1", "--events", "1", "--out", str(blocker))
        assert result.returncode == 3


class TestValidate:
    def test_dangling_type_reference_exits_2(self, tmp_path, export_dir):
        source = (export_dir / "event_000001.heprep.xml").read_text()
        broken = source.replace('<instance type="Track">', '<instance type="Ghost">', 1)
        path = tmp_path / "broken.heprep.xml"
        path.write_text(broken)
        result = run_cli("validate", str(path))
        assert result.returncode == 2
        lines = [l for l in result.stdout.splitlines() if l]
        assert any(l.startswith("TYPE_NOT_FOUND") for l in lines)

    def test_truncated_file_exits_3(self, tmp_path, export_dir):
        data = (export_dir / "event_000001.heprep.xml").read_bytes()
        path = tmp_path / "truncated.heprep.xml"
        path.write_bytes(data[: len(data) // 2])
        result = run_cli("validate", str(path))
        assert result.returncode == 3

    def test_missing_file_exits_3(self):
        result = run_cli("validate", "/no/such/file.heprep.xml")
        assert result.returncode == 3


class TestQuery:
    def test_filter_matches_brute_force(self, export_dir):
        path = export_dir / "event_000001.heprep.xml"
        result = run_cli("query", str(path), "--type", "Track", "--where", "Chi2>0")
        assert result.returncode == 0
        doc = parse_document(path.read_bytes())
        request = InstanceRequest(type_names=("Track",), predicates=("Chi2>0",))
        expected = selected_paths(doc, request)
        lines = [l for l in result.stdout.splitlines() if l]
        assert len(lines) == len(expected)
        got_paths = {line.split("\t")[0] for line in lines}
        assert got_paths == {"/".join(str(i) for i in p) for p in expected}
        for line in lines:
            columns = line.split("\t")
            assert columns[1] == "Track"
            assert any(c.startswith("Chi2=") for c in columns)

    def test_energy_exists_selects_cal_and_acd(self, export_dir):
        for path in sorted(export_dir.iterdir()):
            result = run_cli("query", str(path), "--where", "Energy exists")
            assert result.returncode == 0
            types = {line.split("\t")[1] for line in result.stdout.splitlines() if line}
            assert types <= {"CalCrystal", "AcdTile"}

    def test_exclude_att_drops_column(self, export_dir):
        path = export_dir / "event_000002.heprep.xml"
        result = run_cli(
            "query", str(path), "--type", "Track", "--exclude-att", "Momentum"
        )
        assert result.returncode == 0
        for line in result.stdout.splitlines():
            assert "Momentum=" not in line

    def test_malformed_predicate_exits_1(self, export_dir):
        path = export_dir / "event_000001.heprep.xml"
        result = run_cli("query", str(path), "--where", "Chi2>>1")
        assert result.returncode == 1
        assert "usage" in result.stderr.lower()

    def test_render_lines_skip_skeletons(self, export_dir):
        path = export_dir / "event_000001.heprep.xml"
        doc = parse_document(path.read_bytes())
        request = InstanceRequest(type_names=("Track/TrackHit",))
        tree = get_instances(doc, request)
        lines = list(render_query_lines(HepRepDocument(doc.type_tree, tree)))
        assert lines
        assert all(line.split("\t")[1] == "Track/TrackHit" for line in lines)


def _free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


class TestServe:
    def test_port_conflict_exits_3(self):
        with socket.socket() as blocker:
            blocker.bind(("127.0.0.1", 0))
            blocker.listen(1)
            port = blocker.getsockname()[1]
            result = run_cli("serve", "--port", str(port), "--seed", "1")
            assert result.returncode == 3

    def test_serve_and_status_round_trip(self):
        port = _free_port()
        process = subprocess.Popen(
            [sys.executable, "-m", "heprep.cli", "serve", "--port", str(port), "--seed", "77"],
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
        )
        try:
            from heprep.wire import WireClient

            deadline = time.time() + 20
            client = None
            while time.time() < deadline:
                try:
                    client = WireClient("127.0.0.1", port, timeout=5)
                    break
                except OSError:
                    time.sleep(0.1)
            assert client is not None, "server did not come up"
            with client:
                status = client.call("control.status")
            assert status == {"eventId": 1, "seed": 77, "protocolVersion": "1"}
        finally:
            process.terminate()
            process.wait(timeout=10)


class TestPipelineAcrossSeeds:
    def test_export_validate_query_for_100_random_seeds(self, tmp_path):
        """In-process CLI pipeline over 100 seeds (one event each)."""
        from click.testing import CliRunner

        from heprep.cli import cli

        runner = CliRunner()
        rng = __import__("random").Random(2718)
        for i in range(100):
            seed = rng.randrange(1 << 32)
            out = tmp_path / f"s{i}"
            result = runner.invoke(
                cli, ["export", "--seed", str(seed), "--events", "1", "--out", str(out)]
            )
            assert result.exit_code == 0, result.output
            path = out / "event_000001.heprep.xml"
            result = runner.invoke(cli, ["validate", str(path)])
            assert result.exit_code == 0, f"seed {seed}: {result.output}"
            result = runner.invoke(cli, ["query", str(path), "--where", "Chi2 exists"])
            assert result.exit_code == 0
            assert len([l for l in result.output.splitlines() if l]) == 2  # two tracks

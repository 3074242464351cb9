import json
import threading

import pytest

from heprep.events import Session
from heprep.model import iter_instances
from heprep.query import InstanceRequest, get_instance_tree_top, get_instances, get_type_tree
from heprep.wire import Dispatcher, WireCallError, WireClient
from heprep.wire.jsoncodec import (
    instance_tree_from_json,
    instance_tree_to_json,
    tree_top_from_json,
    tree_top_to_json,
    type_tree_from_json,
    type_tree_to_json,
)
from heprep.wire.server import BackgroundServer

from gen import make_document
import random


@pytest.fixture(scope="module")
def server():
    with BackgroundServer(Session(seed=1234), enable_ws=True) as srv:
        yield srv


@pytest.fixture()
def client(server):
    with WireClient("127.0.0.1", server.tcp_port) as c:
        yield c


class TestFrames:
    def test_malformed_line_keeps_connection(self, client):
        client.send_raw(b"{oops\n")
        response = client.read_response()
        assert response["id"] is None
        assert response["error"]["code"] == 1
        assert client.call("control.status")["protocolVersion"] == "1"

    def test_unknown_method(self, client):
        with pytest.raises(WireCallError) as err:
            client.call("heprep.frobnicate")
        assert err.value.code == 2

    def test_strict_params(self, client):
        with pytest.raises(WireCallError) as err:
            client.call("heprep.getTypeTree", {"surprise": True})
        assert err.value.code == 3

    def test_non_object_frame(self, client):
        client.send_raw(b"[1,2,3]\n")
        response = client.read_response()
        assert response["id"] is None and response["error"]["code"] == 1

    def test_bad_id_type(self, client):
        client.send_raw(b'{"id": "seven", "method": "control.status", "params": {}}\n')
        response = client.read_response()
        assert response["id"] is None and response["error"]["code"] == 1

    def test_id_echo_and_pipelining_order(self, server):
        with WireClient("127.0.0.1", server.tcp_port) as c:
            results = c.pipeline(
                [("control.status", {}), ("heprep.getTypeTree", {}), ("control.status", {})]
            )
        assert results[0]["eventId"] == results[2]["eventId"]
        assert "types" in results[1]


class TestMethods:
    def test_status_fields(self, client):
        status = client.call("control.status")
        assert status["seed"] == 1234
        assert status["protocolVersion"] == "1"
        assert status["eventId"] >= 1

    def test_type_tree_has_four_roots(self, client):
        roots = [t["name"] for t in client.call("heprep.getTypeTree")["types"]]
        assert roots == ["Geometry", "Track", "CalCrystal", "AcdTile"]

    def test_tree_top_counts(self, client, server):
        top = client.call("heprep.getInstanceTreeTop", {"typeNames": ["Track"]})
        assert all(r["type"] == "Track" for r in top["roots"])
        assert len(top["roots"]) == 2

    def test_instances_with_predicate(self, client):
        result = client.call(
            "heprep.getInstances", {"typeNames": ["Track"], "predicates": ["Chi2>0"]}
        )
        for instance in result.get("instances", ()):
            atts = {a["name"]: a["value"] for a in instance["attvalues"]}
            assert atts["Chi2"] > 0

    def test_omitted_params_mean_empty_request(self, server):
        with WireClient("127.0.0.1", server.tcp_port) as c:
            c.send_raw(b'{"id": 1, "method": "heprep.getInstanceTreeTop"}\n')
            response = c.read_response()
        assert "result" in response and response["id"] == 1

    def test_bad_predicate_is_bad_params(self, client):
        with pytest.raises(WireCallError) as err:
            client.call("heprep.getInstances", {"predicates": ["Chi2>>1"]})
        assert err.value.code == 3

    def test_invalid_path_code(self, client):
        with pytest.raises(WireCallError) as err:
            client.call(
                "heprep.getInstancesAfterAction",
                {"action": {"name": "removeHitAndRefit", "targetPath": "9999", "args": {}}},
            )
        assert err.value.code == 4

    def test_unknown_action_code(self, client):
        with pytest.raises(WireCallError) as err:
            client.call(
                "heprep.getInstancesAfterAction",
                {"action": {"name": "explode", "targetPath": "0", "args": {}}},
            )
        assert err.value.code == 5

    def test_failed_action_is_transactional(self, client):
        tracks = client.call("heprep.getInstances", {"typeNames": ["Track"]})
        path = tracks["instances"][0]["attvalues"][-1]["value"]
        before = client.call("heprep.getInstances", {"typeNames": ["Track", "Track/TrackHit"]})
        with pytest.raises(WireCallError) as err:
            client.call(
                "heprep.getInstancesAfterAction",
                {
                    "typeNames": ["Track"],
                    "action": {
                        "name": "removeHitAndRefit",
                        "targetPath": path,
                        "args": {"hitIndex": 99},
                    },
                },
            )
        assert err.value.code == 6
        after = client.call("heprep.getInstances", {"typeNames": ["Track", "Track/TrackHit"]})
        assert before == after

    def test_unknown_algorithm_code(self, client):
        with pytest.raises(WireCallError) as err:
            client.call("control.runAlgorithm", {"name": "bogus"})
        assert err.value.code == 6

    def test_run_algorithm_report(self, client):
        result = client.call("control.runAlgorithm", {"name": "summarize"})
        assert result["status"] == "ok" and result["report"]

    def test_list_actions_and_algorithms(self, client):
        actions = client.call("control.listActions")["actions"]
        assert any(a["name"] == "removeHitAndRefit" for a in actions)
        assert "refitAll" in client.call("control.listAlgorithms")["algorithms"]

    def test_action_applies_and_scoped_paths_work(self, server):
        with WireClient("127.0.0.1", server.tcp_port) as c:
            c.call("control.nextEvent")
            scope = {"typeNames": ["Track", "Track/TrackHit"]}
            tracks = c.call("heprep.getInstances", scope)["instances"]
            target = max(tracks, key=lambda t: len(t.get("instances", ())))
            atts = {a["name"]: a["value"] for a in target["attvalues"]}
            hits_before = len(target.get("instances", ()))
            assert hits_before >= 3
            result = c.call(
                "heprep.getInstancesAfterAction",
                dict(
                    scope,
                    action={
                        "name": "removeHitAndRefit",
                        "targetPath": atts["origPath"],
                        "args": {"hitIndex": 0},
                    },
                ),
            )
            refreshed = [
                i
                for i in result["instances"]
                if {a["name"]: a["value"] for a in i["attvalues"]}["TrackIndex"]
                == atts["TrackIndex"]
            ]
            assert len(refreshed[0].get("instances", ())) == hits_before - 1
            new_atts = {a["name"]: a["value"] for a in refreshed[0]["attvalues"]}
            assert new_atts["Chi2"] != atts["Chi2"]


class TestSharedSession:
    def test_two_clients_share_the_event_loop(self, server):
        with WireClient("127.0.0.1", server.tcp_port) as a, WireClient(
            "127.0.0.1", server.tcp_port
        ) as b:
            before = a.call("control.status")["eventId"]
            a.call("control.nextEvent")
            assert b.call("control.status")["eventId"] == before + 1

    def test_concurrent_mutations_serialize(self, server):
        start = None
        with WireClient("127.0.0.1", server.tcp_port) as c:
            start = c.call("control.status")["eventId"]

        per_thread, n_threads = 5, 4
        errors = []

        def worker():
            try:
                with WireClient("127.0.0.1", server.tcp_port) as c:
                    for _ in range(per_thread):
                        c.call("control.nextEvent")
            except Exception as exc:  # pragma: no cover
                errors.append(exc)

        threads = [threading.Thread(target=worker) for _ in range(n_threads)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        with WireClient("127.0.0.1", server.tcp_port) as c:
            assert c.call("control.status")["eventId"] == start + per_thread * n_threads


class TestTransportEquivalence:
    @pytest.mark.parametrize("seed", range(10))
    def test_document_json_round_trip(self, seed):
        doc = make_document(random.Random(seed + 500))
        assert type_tree_from_json(type_tree_to_json(doc.type_tree)) == doc.type_tree
        assert (
            instance_tree_from_json(instance_tree_to_json(doc.instance_tree))
            == doc.instance_tree
        )
        top = get_instance_tree_top(doc)
        assert tree_top_from_json(tree_top_to_json(top)) == top

    def test_wire_results_match_in_process_calls(self, server):
        session = Session(seed=1234)
        dispatcher = Dispatcher(session)

        with WireClient("127.0.0.1", server.tcp_port) as c:
            c.call("control.nextEvent")
            # Align the local session with the server's current event.
            server_event = c.call("control.status")["eventId"]
            while session.event_id < server_event:
                session.next_event()

            wire_tree = c.call("heprep.getTypeTree")
            assert type_tree_from_json(wire_tree) == session.type_tree()

            params = {"typeNames": ["Track", "Track/TrackHit"], "predicates": ["Chi2>0"]}
            wire_instances = c.call("heprep.getInstances", params)
            request = InstanceRequest(
                type_names=("Track", "Track/TrackHit"), predicates=("Chi2>0",)
            )
            local = get_instances(session.document_for(request), request)
            assert instance_tree_from_json(wire_instances) == local

            wire_top = c.call("heprep.getInstanceTreeTop", {})
            local_top = get_instance_tree_top(session.document_for(None))
            assert tree_top_from_json(wire_top) == local_top


class TestWebSocket:
    def test_same_frames_same_results(self, server):
        from websockets.sync.client import connect

        with WireClient("127.0.0.1", server.tcp_port) as tcp:
            tcp_tree = tcp.call("heprep.getTypeTree")

        url = f"ws://127.0.0.1:{server.websocket_port}/heprep"
        with connect(url) as ws:
            ws.send(json.dumps({"id": 9, "method": "heprep.getTypeTree", "params": {}}))
            response = json.loads(ws.recv())
            assert response["id"] == 9
            assert response["result"] == tcp_tree

            ws.send("{broken")
            response = json.loads(ws.recv())
            assert response["error"]["code"] == 1

            ws.send(json.dumps({"id": 10, "method": "control.status", "params": {}}))
            assert json.loads(ws.recv())["result"]["protocolVersion"] == "1"

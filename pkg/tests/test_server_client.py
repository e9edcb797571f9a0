import os
import threading
import urllib.request

import pytest

from medley.errors import TransportError
from medley.xsource.client import HttpSourceService
from medley.xsource.server import make_source_server
from medley.xsource.service import InProcService

HERE = os.path.dirname(__file__)
SOURCES = os.path.join(HERE, os.pardir, "fixtures", "sources")


@pytest.fixture(scope="module")
def server():
    svc = InProcService.from_dir(
        "sgd", os.path.join(SOURCES, "sgd"), "inproc:sgd", "sgd-2004"
    )
    httpd = make_source_server(svc)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    yield httpd
    httpd.shutdown()
    thread.join()


@pytest.fixture(scope="module")
def client(server):
    host, port = server.server_address
    return HttpSourceService("sgd", "http://%s:%d/" % (host, port))


def test_query_over_the_wire(client):
    result, prov = client.query(
        'for $d in /Result/Entries/Entry/Protein where $d/Name eq "TOP3" return $d'
    )
    assert [c.name for c in result.child_elements()] == ["Protein"]
    assert prov.source == "sgd"
    assert prov.schema_id == "sgd-2004"  # fetched from the remote, not configured
    assert "literature references" in prov.description
    assert prov.endpoint.startswith("http://")


def test_schema_over_the_wire(client):
    schema = client.schema()
    assert schema.name == "Result"
    from medley.xsource.xpath import eval_steps

    assert eval_steps([schema], ("Entries", "Entry", "Protein", "Name"))


def test_bad_query_maps_to_transport_error(client):
    with pytest.raises(TransportError) as err:
        client.query("for $d in Result return $d")
    msg = str(err.value)
    assert "rejected /query (400)" in msg
    assert "absolute path" in msg  # server forwards the parse hint


def test_unknown_route_is_404(server):
    host, port = server.server_address
    req = urllib.request.Request("http://%s:%d/nope" % (host, port))
    with pytest.raises(urllib.error.HTTPError) as err:
        urllib.request.urlopen(req)
    assert err.value.code == 404


def test_unreachable_endpoint():
    lost = HttpSourceService("ghost", "http://127.0.0.1:1/", timeout=0.5)
    with pytest.raises(TransportError) as err:
        lost.query("for $d in /R return $d")
    assert "cannot reach source" in str(err.value)


def test_identity_is_cached(server):
    host, port = server.server_address
    fresh = HttpSourceService("sgd", "http://%s:%d" % (host, port))
    first = fresh.provenance()
    fresh._identity = ("frozen", "frozen")  # a second call must not refetch
    second = fresh.provenance()
    assert first.schema_id == "sgd-2004"
    assert second.schema_id == "frozen"

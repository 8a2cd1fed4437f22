import json
import math
from fractions import Fraction

import numpy as np
import pytest

from atlas.atbd import from_polygon, nodal_trade
from atlas.errors import BadRange, InvalidDocument
from atlas.polygon import RatPolygon
from atlas.shell import (
    DiagramDocument,
    base_node,
    closes_up,
    closure_error,
    devmap_plot,
    devmap_sample,
    load_document,
    main,
    render_svg,
    save_document,
)
from atlas.fillings import bdpq


def traded_triangle():
    d = from_polygon(RatPolygon(((0, 3), (0, 0), (3, 0))))
    for v in ((0, 3), (0, 0), (3, 0)):
        d = nodal_trade(d, v, Fraction(1, 2))
    return d


def test_json_round_trip_atbd(tmp_path):
    doc = DiagramDocument(traded_triangle(), grid=False, labels=True)
    path = tmp_path / "t.atbd.json"
    save_document(doc, path)
    back = load_document(path)
    assert back.diagram == doc.diagram
    assert (back.grid, back.labels) == (False, True)
    assert back.dumps() == doc.dumps()


def test_json_round_trip_polygon():
    doc = DiagramDocument(RatPolygon(((0, 0), (Fraction(5, 3), 0), (0, Fraction(1, 7)))))
    text = doc.dumps()
    assert '"5/3"' in text
    assert DiagramDocument.loads(text).diagram == doc.diagram


@pytest.mark.parametrize("text", [
    "not json",
    "[]",
    json.dumps({"format": "other", "version": 1}),
    json.dumps({"format": "atlas-diagram", "version": 99, "kind": "polygon", "data": {}}),
    json.dumps({"format": "atlas-diagram", "version": 1, "kind": "mystery", "data": {}}),
    json.dumps({"format": "atlas-diagram", "version": 1, "kind": "polygon", "data": {}}),
])
def test_invalid_documents(text):
    with pytest.raises(InvalidDocument):
        DiagramDocument.loads(text)


def test_svg_deterministic():
    a = render_svg(traded_triangle(), grid=True)
    b = render_svg(traded_triangle(), grid=True)
    assert a == b
    assert a.startswith("<svg")
    assert "-0.000000" not in a


GOLDEN = """\
<svg xmlns="http://www.w3.org/2000/svg" width="120.000000" height="80.000000" viewBox="0 0 120.000000 80.000000">
<polygon points="20.000000,60.000000 100.000000,60.000000 20.000000,20.000000" fill="#e6e6e6" stroke="black" stroke-width="1.500000"/>
<circle cx="20.000000" cy="60.000000" r="3.000000" fill="black"/>
<circle cx="100.000000" cy="60.000000" r="3.000000" fill="black"/>
<circle cx="20.000000" cy="20.000000" r="3.000000" fill="black"/>
</svg>
"""


def test_svg_golden():
    svg = render_svg(RatPolygon(((0, 0), (2, 0), (0, 1))), grid=False)
    assert svg == GOLDEN


def test_svg_grid_env(monkeypatch):
    p = RatPolygon(((0, 0), (2, 0), (0, 1)))
    monkeypatch.setenv("ATLAS_SVG_GRID", "0")
    off = render_svg(p)
    monkeypatch.setenv("ATLAS_SVG_GRID", "1")
    on = render_svg(p)
    assert off == render_svg(p, grid=False)
    assert on == render_svg(p, grid=True)
    assert on != off


def test_svg_wedge_diagram():
    svg = render_svg(bdpq(2, 2, 1), grid=False)
    assert svg.count("stroke-dasharray") == 2  # one cut per node
    assert svg.count("<path") == 2
    assert svg == render_svg(bdpq(2, 2, 1), grid=False)


def test_devmap_closure_grid():
    s = devmap_sample(size=100)
    assert s.image.shape == (100, 100, 2)
    assert closure_error(s, 1) < 1e-9
    assert closes_up(s)


def test_devmap_two_domains():
    s = devmap_sample(theta_range=(-5 * math.pi / 2, 3 * math.pi / 2), size=60)
    assert closure_error(s, 1) < 1e-9
    assert not closes_up(devmap_sample(theta_range=(-math.pi / 2, math.pi / 2), size=40))


def test_devmap_base_node_limit():
    errs = []
    for r in (1e-3, 1e-6, 1e-9):
        s = devmap_sample(r_range=(r / 2, r), size=20)
        errs.append(np.max(np.abs(s.image - np.array(base_node()))))
    assert errs[0] > errs[1] > errs[2] and errs[2] < 1e-7


def test_devmap_with_correction():
    S = lambda b1, b2: 0.1 * b1 * b2
    s = devmap_sample(size=40, S=S)
    assert closure_error(s, 1, S) < 1e-9


@pytest.mark.parametrize("theta, r", [((1, 0), (0.1, 1)), ((0, 1), (0, 1)), ((0, 1), (1, 0.5))])
def test_devmap_bad_range(theta, r):
    with pytest.raises(BadRange):
        devmap_sample(theta_range=theta, r_range=r)


def test_devmap_plot(tmp_path):
    path = tmp_path / "d.svg"
    devmap_plot(path, size=30)
    assert path.read_text().lstrip().startswith("<?xml")


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_cli_resolve(capsys, tmp_path):
    svg = tmp_path / "r.svg"
    rc, out, _ = run(capsys, "resolve", "36", "13", "--svg", str(svg))
    assert rc == 0
    assert "-3 -5 -2 -2" in out
    assert svg.read_text().count("<svg") == 1


def test_cli_lisca_json(capsys):
    rc, out, _ = run(capsys, "lisca", "4", "1", "--json")
    assert rc == 0
    cat = json.loads(out)
    assert len(cat) == 2
    assert sorted((f["invariants"]["b2"], f["invariants"]["H1"]) for f in cat) == [(0, "Z/2"), (1, "0")]


def test_cli_lisca_svg_dir(capsys, tmp_path):
    rc, _, _ = run(capsys, "lisca", "4", "1", "--svg", str(tmp_path))
    assert rc == 0
    assert len(list(tmp_path.glob("*.svg"))) == 2


def test_cli_markov(capsys):
    rc, out, _ = run(capsys, "markov", "tree", "--max", "30")
    assert rc == 0 and "(2, 5, 29)" in out
    rc, out, _ = run(capsys, "markov", "descend", "1", "2", "5")
    assert rc == 0 and "(1, 1, 1)" in out
    rc, _, err = run(capsys, "markov", "descend", "1", "2", "3")
    assert rc == 2 and "NotMarkov" in err


def test_cli_vianna(capsys):
    rc, out, _ = run(capsys, "vianna", "1", "1", "1", "--mutate", "3,2")
    assert rc == 0
    assert "K = 9" in out and "L = 9" in out


def test_cli_cone(capsys):
    rc, out, _ = run(capsys, "cone", "--matrix", "2,1,1,1", "--ray", "0,1", "--resolve")
    assert rc == 0 and "hyperbolic" in out and "cuts: 1" in out
    rc, _, _ = run(capsys, "cone", "--matrix", "2,1,1", "--ray", "0,1")
    assert rc == 1


def test_cli_delta(capsys):
    rc, out, _ = run(capsys, "delta", "2,-1", "-1,2", "-1,-1")
    assert rc == 0 and "delta = 1" in out and "Delta = 3" in out
    rc, _, err = run(capsys, "delta", "2,-1", "-1,2")
    assert rc == 2 and "Unbalanced" in err


def test_cli_devmap(capsys, tmp_path):
    out_path = tmp_path / "d.png"
    rc, out, _ = run(capsys, "devmap", "--n", "1", "--out", str(out_path))
    assert rc == 0 and "closes up: True" in out
    assert out_path.stat().st_size > 0


def test_cli_atbd_and_render(capsys, tmp_path):
    src = tmp_path / "p.atbd.json"
    save_document(DiagramDocument(RatPolygon(((0, 3), (0, 0), (3, 0)))), src)
    dst = tmp_path / "q.atbd.json"
    rc, _, _ = run(capsys, "atbd", str(src), "--op", "trade", "--vertex", "1", "--t", "1/2", "--out", str(dst))
    assert rc == 0
    assert len(load_document(dst).diagram.nodes) == 1
    svg = tmp_path / "q.svg"
    rc, _, _ = run(capsys, "render", str(dst), "--out", str(svg))
    assert rc == 0 and svg.exists()


def test_cli_errors(capsys, tmp_path):
    assert run(capsys, "lisca", "4", "2")[0] == 2
    assert run(capsys, "bogus")[0] == 1
    assert run(capsys, "resolve", "x", "1")[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert run(capsys, "render", str(bad), "--out", str(tmp_path / "o.svg"))[0] == 2

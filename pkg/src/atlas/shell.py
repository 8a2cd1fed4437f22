"""Command line, JSON documents, SVG rendering and developing-map plots.

Floats appear only here: the geometry modules stay exact and this module
converts to floating point at the last moment for drawing.
"""
from __future__ import annotations

import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import click
import numpy as np

from . import atbd as atbd_ops
from .atbd import ATBD, FLANK, cut_end, from_polygon
from .errors import AtlasError, BadRange, InvalidDocument
from .polygon import RatPolygon

FORMAT = "atlas-diagram"
VERSION = 1


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------

@dataclass
class DiagramDocument:
    diagram: Union[ATBD, RatPolygon]
    grid: Optional[bool] = None
    labels: bool = False

    @property
    def kind(self) -> str:
        return "polygon" if isinstance(self.diagram, RatPolygon) else "atbd"

    def as_atbd(self) -> ATBD:
        return from_polygon(self.diagram) if isinstance(self.diagram, RatPolygon) else self.diagram

    def to_json(self) -> dict:
        return {
            "format": FORMAT,
            "version": VERSION,
            "kind": self.kind,
            "data": self.diagram.to_json(),
            "hints": {"grid": self.grid, "labels": self.labels},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, d: dict) -> "DiagramDocument":
        if not isinstance(d, dict) or d.get("format") != FORMAT:
            raise InvalidDocument("not an atlas diagram document")
        if d.get("version") != VERSION:
            raise InvalidDocument(f"unsupported document version {d.get('version')!r}")
        hints = d.get("hints") or {}
        try:
            if d.get("kind") == "polygon":
                diagram = RatPolygon.from_json(d["data"])
            elif d.get("kind") == "atbd":
                diagram = ATBD.from_json(d["data"])
            else:
                raise InvalidDocument(f"unknown kind {d.get('kind')!r}")
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, InvalidDocument):
                raise
            raise InvalidDocument(f"malformed diagram: {exc}") from exc
        return cls(diagram, hints.get("grid"), bool(hints.get("labels", False)))

    @classmethod
    def loads(cls, text: str) -> "DiagramDocument":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidDocument(f"invalid JSON: {exc}") from exc
        return cls.from_json(data)


def load_document(path) -> DiagramDocument:
    return DiagramDocument.loads(Path(path).read_text())


def save_document(doc: DiagramDocument, path) -> None:
    Path(path).write_text(doc.dumps() + "\n")


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

UNIT = 40.0
MARGIN = 20.0


def _fmt(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _grid_default() -> bool:
    return os.environ.get("ATLAS_SVG_GRID", "1") != "0"


def _outline(p: RatPolygon) -> list[tuple[float, float]]:
    """Boundary points as floats; rays are drawn to a fixed reach."""
    vs = [(float(x), float(y)) for x, y in p.vertices]
    if p.is_compact:
        return vs
    xs = [v[0] for v in vs] + [0.0]
    ys = [v[1] for v in vs] + [0.0]
    reach = max(max(xs) - min(xs), max(ys) - min(ys), 1.0) + 3.0

    def far(v, d):
        n = math.hypot(*d)
        return (v[0] + reach * d[0] / n, v[1] + reach * d[1] / n)

    return [far(vs[0], p.lead)] + vs + [far(vs[-1], p.trail)]


def render_svg(doc: Union[DiagramDocument, ATBD, RatPolygon], grid: Optional[bool] = None) -> str:
    """Deterministic SVG: solid boundary, dotted cuts, crosses at nodes and dots at vertices."""
    if not isinstance(doc, DiagramDocument):
        doc = DiagramDocument(doc)
    d = doc.as_atbd()
    check = atbd_ops.validate(d)
    if not check:
        raise InvalidDocument(f"diagram does not validate: {check.reason}")
    if grid is None:
        grid = doc.grid if doc.grid is not None else _grid_default()
    p = d.polygon
    outline = _outline(p)
    cuts = []
    for node in d.nodes:
        if node.cut == FLANK:
            continue
        end = cut_end(d, node)
        if end is not None:
            cuts.append(((float(node.pos[0]), float(node.pos[1])), (float(end[0]), float(end[1]))))
    pts = outline + [(float(n.pos[0]), float(n.pos[1])) for n in d.nodes]
    x0, x1 = min(q[0] for q in pts), max(q[0] for q in pts)
    y0, y1 = min(q[1] for q in pts), max(q[1] for q in pts)
    width = (x1 - x0) * UNIT + 2 * MARGIN
    height = (y1 - y0) * UNIT + 2 * MARGIN

    def X(x):
        return (x - x0) * UNIT + MARGIN

    def Y(y):
        return (y1 - y) * UNIT + MARGIN

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
    ]
    if grid:
        for i in range(math.ceil(x0), math.floor(x1) + 1):
            for j in range(math.ceil(y0), math.floor(y1) + 1):
                out.append(f'<circle cx="{_fmt(X(i))}" cy="{_fmt(Y(j))}" r="1.000000" fill="#bbbbbb"/>')
    path = " ".join(f"{_fmt(X(x))},{_fmt(Y(y))}" for x, y in outline)
    if p.is_compact:
        out.append(f'<polygon points="{path}" fill="#e6e6e6" stroke="black" stroke-width="1.500000"/>')
    else:
        out.append(f'<polygon points="{path}" fill="#e6e6e6" stroke="none"/>')
        out.append(f'<polyline points="{path}" fill="none" stroke="black" stroke-width="1.500000"/>')
    for a, b in cuts:
        out.append(
            f'<line x1="{_fmt(X(a[0]))}" y1="{_fmt(Y(a[1]))}" x2="{_fmt(X(b[0]))}" y2="{_fmt(Y(b[1]))}" '
            'stroke="black" stroke-width="1.000000" stroke-dasharray="2,3"/>'
        )
    for x, y in p.vertices:
        out.append(f'<circle cx="{_fmt(X(float(x)))}" cy="{_fmt(Y(float(y)))}" r="3.000000" fill="black"/>')
    s = 4.0
    for node in d.nodes:
        cx, cy = X(float(node.pos[0])), Y(float(node.pos[1]))
        out.append(
            f'<path d="M{_fmt(cx - s)},{_fmt(cy - s)} L{_fmt(cx + s)},{_fmt(cy + s)} '
            f'M{_fmt(cx - s)},{_fmt(cy + s)} L{_fmt(cx + s)},{_fmt(cy - s)}" stroke="black" stroke-width="1.500000"/>'
        )
        if doc.labels:
            out.append(f'<text x="{_fmt(cx + 6)}" y="{_fmt(cy - 6)}" font-size="10">{node.id}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Developing map near a focus-focus fibre
# ---------------------------------------------------------------------------

ActionCorrection = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class DevMapSample:
    r: np.ndarray
    theta: np.ndarray
    image: np.ndarray  # shape (len(r), len(theta), 2)


def action_map(r, theta, S: Optional[ActionCorrection] = None) -> np.ndarray:
    """``I(r, t) = ((S + b2 t - b1 (log r - 1)) / 2 pi, b2)`` with ``b = r e^{it}``."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    b1, b2 = r * np.cos(theta), r * np.sin(theta)
    s = np.zeros_like(b1) if S is None else S(b1, b2)
    first = (s + b2 * theta - b1 * (np.log(r) - 1.0)) / (2 * math.pi)
    return np.stack([first, b2], axis=-1)


def devmap_sample(theta_range=(-math.pi, math.pi), r_range=(0.05, 1.0), size=100,
                  S: Optional[ActionCorrection] = None) -> DevMapSample:
    r0, r1 = r_range
    if r0 <= 0 or r1 <= r0:
        raise BadRange(f"need 0 < r_min < r_max, got {r_range}")
    t0, t1 = theta_range
    if t1 <= t0:
        raise BadRange(f"need theta_min < theta_max, got {theta_range}")
    r = np.linspace(r0, r1, size)
    theta = np.linspace(t0, t1, size)
    R, T = np.meshgrid(r, theta, indexing="ij")
    return DevMapSample(r, theta, action_map(R, T, S))


def shear(n: int) -> np.ndarray:
    return np.array([[1.0, 0.0], [float(n), 1.0]])


def closure_error(sample: DevMapSample, n: int = 1, S: Optional[ActionCorrection] = None) -> float:
    """``max |I(r, t + 2 pi n) - I(r, t) <1 0; n 1>|`` over the sample grid."""
    R, T = np.meshgrid(sample.r, sample.theta, indexing="ij")
    shifted = action_map(R, T + 2 * math.pi * n, S)
    return float(np.max(np.abs(shifted - sample.image @ shear(n))))


def closes_up(sample: DevMapSample, tol: float = 1e-9) -> bool:
    """Whether the images of the two boundary rays lie on one line through the origin."""
    ends = np.concatenate([sample.image[:, 0, :], sample.image[:, -1, :]])
    k = int(np.argmax(np.hypot(ends[:, 0], ends[:, 1])))
    e = ends[k] / np.hypot(*ends[k])
    cross = ends[:, 0] * e[1] - ends[:, 1] * e[0]
    return bool(np.max(np.abs(cross)) < tol)


def base_node(S: Optional[ActionCorrection] = None) -> tuple[float, float]:
    """Limit of the action map as ``r -> 0``."""
    s = 0.0 if S is None else float(S(np.array(0.0), np.array(0.0)))
    return (s / (2 * math.pi), 0.0)


def devmap_plot(path, theta_range=(-math.pi, math.pi), r_range=(0.05, 1.0), size=100,
                S: Optional[ActionCorrection] = None, contours: int = 12) -> DevMapSample:
    """Plot contours of constant ``r`` and ``theta`` under the action map."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    sample = devmap_sample(theta_range, r_range, size, S)
    fig, ax = plt.subplots(figsize=(5, 5))
    step = max(1, size // contours)
    for i in range(0, size, step):
        ax.plot(sample.image[i, :, 0], sample.image[i, :, 1], color="0.3", lw=0.7)
        ax.plot(sample.image[:, i, 0], sample.image[:, i, 1], color="0.6", lw=0.7)
    for j, style in ((0, "-"), (-1, "--")):
        ax.plot(sample.image[:, j, 0], sample.image[:, j, 1], color="black", lw=1.5, ls=style)
    ax.plot(*base_node(S), marker="x", color="black")
    ax.set_aspect("equal")
    ax.set_xlabel("$I_1$")
    ax.set_ylabel("$I_2$")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return sample


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def _ints(text: str, count: Optional[int] = None) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {text!r}")
    if count is not None and len(vals) != count:
        raise click.BadParameter(f"expected {count} integers, got {text!r}")
    return vals


def _point(text: str) -> tuple[Fraction, Fraction]:
    parts = text.split(",")
    if len(parts) != 2:
        raise click.BadParameter(f"expected a point x,y, got {text!r}")
    try:
        return Fraction(parts[0]), Fraction(parts[1])
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"expected rational coordinates, got {text!r}")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"expected a rational number, got {text!r}")


@click.group()
def cli():
    """Exact integral-affine geometry and almost toric diagrams."""


@cli.command()
@click.argument("n", type=int)
@click.argument("a", type=int)
@click.option("--svg", "svg_path", type=click.Path(dir_okay=False), help="Write the resolved wedge as SVG.")
def resolve(n, a, svg_path):
    """Minimal resolution of the wedge pi(N, A)."""
    from .fillings import minimal_filling

    poly, chain = minimal_filling(n, a)
    click.echo("chain: " + " ".join(str(c) for c in chain))
    if svg_path:
        Path(svg_path).write_text(render_svg(poly))
        click.echo(f"wrote {svg_path}")


@cli.command()
@click.argument("n", type=int)
@click.argument("a", type=int)
@click.option("--json", "as_json", is_flag=True, help="Print the catalog as JSON.")
@click.option("--svg", "svg_dir", type=click.Path(file_okay=False), help="Write one SVG per filling.")
def lisca(n, a, as_json, svg_dir):
    """Catalog of fillings of the lens space L(N, A)."""
    from .fillings import catalog_json, lisca_fillings

    fs = lisca_fillings(n, a)
    if as_json:
        click.echo(catalog_json(fs))
    else:
        for f in fs:
            inv = f.invariants
            click.echo(f"zcf={list(f.zcf)} b2={f.b2} H1={inv.H1} pi1={inv.pi1}")
    if svg_dir:
        out = Path(svg_dir)
        out.mkdir(parents=True, exist_ok=True)
        for f in fs:
            name = out / ("lisca_%d_%d_%s.svg" % (n, a, "_".join(map(str, f.zcf))))
            name.write_text(render_svg(f.diagram))


@cli.group()
def markov():
    """Markov triples."""


@markov.command("tree")
@click.option("--max", "bound", type=int, required=True, help="Largest entry allowed.")
def markov_tree(bound):
    from .markov import enumerate_triples

    for t in enumerate_triples(bound):
        click.echo("(%d, %d, %d)" % t)


@markov.command("descend")
@click.argument("triple", nargs=3, type=int)
def markov_descend(triple):
    from .markov import descend

    click.echo("(%d, %d, %d)" % tuple(triple))
    for k, t in descend(triple):
        click.echo(f"  mutate {k} -> ({t[0]}, {t[1]}, {t[2]})")


@cli.command()
@click.argument("p", nargs=3, type=int)
@click.option("--mutate", "word", default="", help="Comma-separated corner indices, applied in order.")
@click.option("--svg", "svg_path", type=click.Path(dir_okay=False), help="Write the final triangle as SVG.")
def vianna(p, word, svg_path):
    """Vianna triangle data for a Markov triple."""
    from .markov import mutate_geometry, triangle_geometry, vianna_from_markov, vianna_mutate

    v = vianna_from_markov(*p)
    geom = triangle_geometry(v) if svg_path else None
    for k in _ints(word) if word else []:
        v = vianna_mutate(v, k)
        if geom is not None:
            geom = mutate_geometry(geom, k)
    click.echo(f"p = {v.p}")
    click.echo("lengths = (" + ", ".join(str(x) for x in v.ell) + ")")
    click.echo(f"K = {v.K}  L = {v.L}")
    if all(q is not None for q in v.q):
        click.echo(f"q = {v.q}")
    if geom is not None:
        Path(svg_path).write_text(render_svg(geom))
        click.echo(f"wrote {svg_path}")


@cli.command("atbd")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--op", type=click.Choice(["trade", "slide", "mutate", "blowup", "blowdown", "validate"]),
              required=True)
@click.option("--vertex", type=int, help="Vertex index (trade).")
@click.option("--t", "t", default="1/2", help="Trade offset along the eigenline.")
@click.option("--node", help="Node id (slide, mutate).")
@click.option("--to", help="Slide target: an offset t or a point x,y.")
@click.option("--side", type=click.Choice(["ccw", "cw"]), help="Side moved by a mutation.")
@click.option("--edge", type=int, help="Edge index (blowup).")
@click.option("--at", "at", help="Notch start x,y (blowup).")
@click.option("--size", help="Notch size (blowup).")
@click.option("--chain", help="Comma-separated edge indices (blowdown).")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the result here instead of stdout.")
@click.option("--svg", "svg_path", type=click.Path(dir_okay=False), help="Also render the result.")
def atbd_cmd(file, op, vertex, t, node, to, side, edge, at, size, chain, out, svg_path):
    """Apply one operation to a diagram document."""
    doc = load_document(file)
    d = doc.as_atbd()

    def need(value, flag):
        if value is None:
            raise click.UsageError(f"--op {op} needs {flag}")
        return value

    if op == "trade":
        d = atbd_ops.nodal_trade(d, need(vertex, "--vertex"), _rational(t))
    elif op == "slide":
        target = need(to, "--to")
        d = atbd_ops.nodal_slide(d, need(node, "--node"), _point(target) if "," in target else _rational(target))
    elif op == "mutate":
        d = atbd_ops.mutate(d, need(node, "--node"), side)
    elif op == "blowup":
        d = atbd_ops.nontoric_blowup(d, need(edge, "--edge"), _point(need(at, "--at")), _rational(need(size, "--size")))
    elif op == "blowdown":
        d = atbd_ops.rational_blowdown(d, _ints(need(chain, "--chain")))
    else:
        v = atbd_ops.validate(d)
        if not v:
            raise AtlasError(v.reason)
        click.echo("valid")
        return
    result = DiagramDocument(d, doc.grid, doc.labels)
    if out:
        save_document(result, out)
    else:
        click.echo(result.dumps())
    if svg_path:
        Path(svg_path).write_text(render_svg(result))


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--grid/--no-grid", default=None, help="Override the lattice grid setting.")
def render(file, out, grid):
    """Render a diagram document as SVG."""
    Path(out).write_text(render_svg(load_document(file), grid))


@cli.command()
@click.option("--matrix", required=True, help="Monodromy a,b,c,d (rows <a b; c d>).")
@click.option("--ray", required=True, help="Primitive ray p,q.")
@click.option("--resolve", "do_resolve", is_flag=True, help="Resolve the cone point.")
def cone(matrix, ray, do_resolve):
    """Classify an integral affine cone and optionally resolve it."""
    from .cones import AffineCone, classify, resolve_cone, wedge_domain

    M = _ints(matrix, 4)
    c = AffineCone(M, tuple(_ints(ray, 2)))
    click.echo(f"class: {classify(c.M).value}")
    sector = wedge_domain(c)
    click.echo(f"sector: {c.resolved_orientation()} from {sector.start} to {sector.end}")
    if do_resolve:
        res = resolve_cone(c)
        click.echo(f"cuts: {res.cuts}")
        click.echo("cycle: " + " ".join(map(str, res.cycle)))
        click.echo("self-intersections: " + " ".join(map(str, res.self_intersections)))


@cli.command()
@click.option("--n", "n", type=int, default=1, help="Deck element used for the closure check.")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Image file (.svg or .png).")
@click.option("--theta-min", type=float, default=-math.pi)
@click.option("--theta-max", type=float, default=math.pi)
@click.option("--r-min", type=float, default=0.05)
@click.option("--r-max", type=float, default=1.0)
def devmap(n, out, theta_min, theta_max, r_min, r_max):
    """Plot the developing map near a focus-focus fibre."""
    sample = devmap_plot(out, (theta_min, theta_max), (r_min, r_max))
    click.echo(f"closure error for n={n}: {closure_error(sample, n):.3e}")
    click.echo(f"closes up: {closes_up(sample)}")
    click.echo(f"wrote {out}")


@cli.command(context_settings={"ignore_unknown_options": True})
@click.argument("vectors", nargs=-1, required=True, type=click.UNPROCESSED)
def delta(vectors):
    """Double points over a tropical vertex, vectors given as a,b."""
    from .visible import tropical_delta

    rep = tropical_delta([tuple(_ints(v, 2)) for v in vectors])
    if rep.Delta is not None:
        click.echo(f"Delta = {rep.Delta}")
    click.echo(f"delta = {rep.delta}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point: 0 on success, 1 on usage errors, 2 on validation errors."""
    try:
        rv = cli.main(args=list(argv) if argv is not None else None, prog_name="atlas", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except AtlasError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return 2
    return rv if isinstance(rv, int) else 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()

"""Command-line surface.

Exit codes: 0 success, 1 verification/validation failure, 2 input error,
3 exhausted certified precision (raise CAT0_MAX_PRECISION_BITS to retry).
"""

from __future__ import annotations

import csv
import functools
import json
import sys
from fractions import Fraction

import click

from .balls import CriticalRadiusError, ball_view, critical_radii
from .exactnum import PrecisionExhausted, QField, RadicalSum
from .expansion import (
    audit_boundary_lemmas,
    expand_to,
    load_certificate,
    store_certificate,
    verify_certificate,
)
from .generators import gen_regular, gen_seifert
from .render import format_radical, render_ball
from .tricomplex import (
    DiskCondition,
    MarginError,
    load,
    store,
    validate_complex,
    validate_disk_condition,
)

__all__ = ["main"]


def parse_dc(text: str) -> DiskCondition:
    parts = [int(p) for p in text.split(",")]
    if len(parts) != 3:
        raise click.BadParameter("expected three comma-separated integers")
    return DiskCondition(*parts)


def parse_radius(text: str) -> RadicalSum:
    """Radii as rationals ('3', '5/4', '1.25') or 'sqrtN' / 'a/b*sqrtN'."""
    text = text.strip()
    if "sqrt" in text:
        head, _, tail = text.partition("sqrt")
        coeff = Fraction(head.rstrip("*")) if head.rstrip("*") else Fraction(1)
        return RadicalSum.sqrt_of(QField.rational(int(tail))).scale(coeff)
    return RadicalSum.of_rational(Fraction(text))


def parse_orders(entries: tuple[str, ...]) -> dict[tuple[int, int], int]:
    orders: dict[tuple[int, int], int] = {}
    for entry in entries:
        pair, _, k = entry.partition(":")
        i, j = (int(p) for p in pair.split(","))
        orders[tuple(sorted((i, j)))] = int(k)
    for pair in ((1, 2), (1, 3), (2, 3)):
        orders.setdefault(pair, 2)
    return orders


def exit_codes(fn):
    @functools.wraps(fn)
    def wrapped(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PrecisionExhausted as exc:
            click.echo(f"precision exhausted: {exc}", err=True)
            sys.exit(3)
        except click.exceptions.Exit:
            raise
        except (
            OSError,
            ValueError,
            KeyError,
            MarginError,
            CriticalRadiusError,
            json.JSONDecodeError,
        ) as exc:
            click.echo(f"input error: {exc}", err=True)
            sys.exit(2)

    return wrapped


@click.group()
def main() -> None:
    """Exact CAT(0) triangle complexes: generation, geodesics, balls,
    expansion certificates."""


@main.command()
@click.option("--dc", required=True, help="disk-condition triple N1,N2,N3")
@click.option("--radius", "radius_", required=True, type=int, help="truncation radius R")
@click.option("--mode", type=click.Choice(["seifert", "regular"]), default="seifert")
@click.option("--orders", multiple=True, help="edge order I,J:K (regular mode)")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@exit_codes
def generate(dc, radius_, mode, orders, out) -> None:
    """Generate a complex file."""
    cond = parse_dc(dc)
    if mode == "seifert":
        cx = gen_seifert(cond, radius_)
    else:
        cx = gen_regular(cond, parse_orders(orders), radius_)
    store(cx, out)
    click.echo(
        f"wrote {out}: {cx.num_vertices()} vertices, {len(cx.edges)} edges, "
        f"{len(cx.faces)} faces, margin {cx.boundary_margin}"
    )


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--orders", multiple=True, help="declared edge order I,J:K")
@exit_codes
def validate(file, orders) -> None:
    """Disk-condition and link-condition report for a complex file."""
    cx = load(file)
    dres = validate_disk_condition(cx.dc)
    click.echo(f"disk condition {cx.dc.triple}: {dres.code}")
    report = validate_complex(cx, parse_orders(orders) if orders else None)
    click.echo(f"free-edge violations: {list(report.free_edge_violations)}")
    click.echo(f"connected: {report.connected}")
    click.echo(f"euler characteristic: {report.euler_characteristic}")
    click.echo(f"simply connected: {report.simply_connected}")
    click.echo(f"link failures: {list(report.link_failures)}")
    click.echo(f"cat0 certified: {report.cat0_certified}")
    if not (dres.accepted and report.cat0_certified):
        sys.exit(1)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--base-vertex", type=int, default=0, show_default=True)
@click.option("--radius", "radius_", required=True, help="search horizon R")
@click.option("--out", type=click.Path(dir_okay=False), help="CSV output path")
@exit_codes
def criticals(file, base_vertex, radius_, out) -> None:
    """Critical radii (vertex distances) up to R."""
    cx = load(file)
    radii = critical_radii(cx, base_vertex, parse_radius(radius_))
    for r in radii:
        click.echo(format_radical(r))
    if out:
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "radius"])
            for i, r in enumerate(radii):
                w.writerow([i, format_radical(r)])


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--base-vertex", type=int, default=0, show_default=True)
@click.option("--radius", "radius_", required=True, help="ball radius (regular)")
@click.option("--out", type=click.Path(dir_okay=False), help="CSV report path")
@click.option("--render", "render_", type=click.Path(dir_okay=False), help="SVG path")
@exit_codes
def ball(file, base_vertex, radius_, out, render_) -> None:
    """Ball report: vertex distances, edge crossings, face types."""
    cx = load(file)
    r = parse_radius(radius_)
    bv = ball_view(cx, base_vertex, r)
    inside = sorted(
        w for w, res in bv.vertex_distances.items() if (res.length - r).sign() <= 0
    )
    click.echo(f"vertices in ball: {len(inside)}")
    from collections import Counter

    counts = Counter(t.value for t in bv.face_types.values())
    click.echo("face types: " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))
    if out:
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kind", "a", "b", "c", "value"])
            for wv in inside:
                w.writerow(["vertex", wv, "", "", format_radical(bv.vertex_distances[wv].length)])
            for e, k in sorted(bv.edge_crossings.items()):
                w.writerow(["edge", e[0], e[1], "", k])
            for f, t in sorted(bv.face_types.items()):
                w.writerow(["face", f[0], f[1], f[2], t.value])
    if render_:
        render_ball(cx, base_vertex, r, render_)
        click.echo(f"wrote {render_}")


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--base-vertex", type=int, default=0, show_default=True)
@click.option("--radius", "radius_", required=True, help="expand out to R")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--audit/--no-audit", default=False, help="also run boundary-lemma audits")
@exit_codes
def expand(file, base_vertex, radius_, out, audit) -> None:
    """Expand the simplicial ball and write the certificate."""
    cx = load(file)
    r = parse_radius(radius_)
    cert = expand_to(cx, base_vertex, r)
    store_certificate(cert, out)
    click.echo(
        f"wrote {out}: {len(cert.stages)} stages, "
        f"{sum(len(s.steps) for s in cert.stages)} cone steps"
    )
    if audit:
        for st in cert.stages:
            rep = audit_boundary_lemmas(cx, base_vertex, st.radius)
            click.echo(f"audit r={format_radical(st.radius)}: clean={rep.clean}")
            if not rep.clean:
                sys.exit(1)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.argument("certfile", type=click.Path(exists=True, dir_okay=False))
@exit_codes
def verify(file, certfile) -> None:
    """Recheck a certificate; exit 0 when valid, 1 when not."""
    cx = load(file)
    cert = load_certificate(certfile)
    result = verify_certificate(cx, cert)
    if result.valid:
        click.echo("Valid")
    else:
        click.echo(f"Invalid: {result.witness}")
        sys.exit(1)


@main.command("render")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--base-vertex", type=int, default=0, show_default=True)
@click.option("--radius", "radius_", required=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="SVG path")
@click.option("--scale", type=float, default=1.0, show_default=True)
@exit_codes
def render_cmd(file, base_vertex, radius_, out, scale) -> None:
    """Render the developed complex with level-sphere arcs to SVG."""
    cx = load(file)
    render_ball(cx, base_vertex, parse_radius(radius_), out, scale=scale)
    click.echo(f"wrote {out}")


if __name__ == "__main__":
    main()

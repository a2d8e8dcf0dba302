"""Command-line interface for OpenGov-LieSphere."""

import json
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from opengov_liesphere import __version__
from opengov_liesphere.config import overridden
from opengov_liesphere.core.analysis import (
    analyze as run_analysis,
    parse_criteria,
    parse_grid,
    report_json,
    summary_line,
)
from opengov_liesphere.core.errors import InvalidArgumentError, LieSphereError
from opengov_liesphere.core.legendre import LegendreMap, euclidean_projection, lift_euclidean
from opengov_liesphere.core.lie_core import random_lie_transform
from opengov_liesphere.core.models import Infinity, LieVector, Plane, Point, Sphere
from opengov_liesphere.core.sphere_model import Element, decode, encode, oriented_contact_lie
from opengov_liesphere.core.zoo import GENERATORS, build_generator
from opengov_liesphere.utils.gridfile import read_grid
from opengov_liesphere.utils.logger import get_logger
from opengov_liesphere.utils.mesh import FlattenMode, build_mesh, write_obj

app = typer.Typer(help="OpenGov-LieSphere - Lie sphere geometry and Dupin hypersurface analysis")
console = Console()
errors = Console(stderr=True)
logger = get_logger(__name__)

EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_EMPTY = 4


def _fail(message: str, code: int) -> "typer.Exit":
    errors.print(f"[red]Error: {message}[/red]")
    return typer.Exit(code=code)


@contextmanager
def _guarded() -> Iterator[None]:
    """Map library errors to exit codes: usage errors 2, numerical failures 3."""
    try:
        yield
    except (InvalidArgumentError, ValidationError, ValueError, OSError) as exc:
        raise _fail(str(exc), EXIT_USAGE) from exc
    except LieSphereError as exc:
        logger.error("command_failed", code=exc.code, error=str(exc))
        raise _fail(str(exc), EXIT_NUMERICAL) from exc


@contextmanager
def _session(config: Optional[Path], seed: Optional[int]) -> Iterator[None]:
    """Apply a JSON settings file and the seed flag for the duration of a command."""
    overrides: Dict[str, Any] = {}
    if config is not None:
        try:
            overrides.update(json.loads(config.read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise _fail(f"cannot read config {config}: {exc}", EXIT_USAGE) from exc
    if seed is not None:
        overrides["seed"] = seed
    with _guarded(), overridden(overrides):
        yield


def _floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InvalidArgumentError(f"expected comma-separated numbers, got {text!r}") from exc


def _split(text: str, what: str) -> List[List[float]]:
    head, sep, tail = text.partition(":")
    if not sep:
        raise InvalidArgumentError(f"{what} must look like 'x1,x2,...:value'")
    return [_floats(head), _floats(tail)]


def _elements(
    points: Sequence[str], spheres: Sequence[str], planes: Sequence[str], infinity: int
) -> List[Element]:
    found: List[Element] = [Point(u=_floats(p)) for p in points]
    for text in spheres:
        center, radius = _split(text, "--sphere")
        found.append(Sphere(center=center, radius=radius[0]))
    for text in planes:
        normal, offset = _split(text, "--plane")
        found.append(Plane(normal=normal, offset=offset[0]))
    found.extend(Infinity() for _ in range(infinity))
    return found


def _dimension(elements: Sequence[Element], dim: Optional[int]) -> int:
    dims = {e.dim for e in elements if e.dim is not None}
    if dim is not None:
        dims.add(dim)
    if len(dims) != 1:
        raise InvalidArgumentError("pass --dim for infinity, and keep element dimensions equal")
    return dims.pop()


def _number(x: float) -> str:
    return f"{x + 0.0:g}"


def _describe(e: Element) -> str:
    if isinstance(e, Infinity):
        return "infinity"
    if isinstance(e, Point):
        return "point " + " ".join(_number(x) for x in e.u)
    if isinstance(e, Sphere):
        center = " ".join(_number(x) for x in e.center)
        return f"sphere center {center} radius {_number(e.radius)}"
    normal = " ".join(_number(x) for x in e.normal)
    return f"plane normal {normal} offset {_number(e.offset)}"


@app.command()
def version() -> None:
    """Show version information."""
    console.print(f"OpenGov-LieSphere version {__version__}", style="bold green")


@app.command(name="encode")
def encode_cmd(
    point: Optional[str] = typer.Option(None, "--point", help="Point u as 'x1,x2,...'"),
    sphere: Optional[str] = typer.Option(None, "--sphere", help="Sphere as 'center:radius'"),
    plane: Optional[str] = typer.Option(None, "--plane", help="Plane as 'normal:offset'"),
    infinity: bool = typer.Option(False, "--infinity", help="The improper point"),
    dim: Optional[int] = typer.Option(None, "--dim", help="Dimension n (needed for --infinity)"),
    as_json: bool = typer.Option(False, "--json", help="Print JSON"),
) -> None:
    """Print the Lie quadric coordinates of one sphere element."""
    with _guarded():
        chosen = _elements(
            [point] if point else [], [sphere] if sphere else [], [plane] if plane else [],
            int(infinity),
        )
        if len(chosen) != 1:
            raise InvalidArgumentError("give exactly one of --point, --sphere, --plane, --infinity")
        x = encode(chosen[0], _dimension(chosen, dim))
    if as_json:
        console.print_json(json.dumps({"coords": [c + 0.0 for c in x.coords.tolist()]}))
    else:
        console.print(" ".join(_number(c) for c in x.coords))


@app.command(name="decode")
def decode_cmd(
    coords: str = typer.Option(..., "--coords", help="Quadric coordinates 'x1,...,x_{n+3}'"),
    as_json: bool = typer.Option(False, "--json", help="Print JSON"),
) -> None:
    """Decode quadric coordinates into a point, infinity, sphere or plane."""
    with _guarded():
        element = decode(LieVector.of(_floats(coords)))
    if as_json:
        console.print_json(json.dumps(element.model_dump(mode="json")))
    else:
        console.print(_describe(element))


@app.command()
def contact(
    point: List[str] = typer.Option([], "--point", help="Point 'x1,x2,...'"),
    sphere: List[str] = typer.Option([], "--sphere", help="Sphere 'center:radius'"),
    plane: List[str] = typer.Option([], "--plane", help="Plane 'normal:offset'"),
    infinity: int = typer.Option(0, "--infinity", count=True, help="The improper point"),
    dim: Optional[int] = typer.Option(None, "--dim", help="Dimension n (needed for infinity)"),
    as_json: bool = typer.Option(False, "--json", help="Print JSON"),
) -> None:
    """Decide oriented contact of two sphere elements."""
    with _guarded():
        chosen = _elements(point, sphere, plane, infinity)
        if len(chosen) != 2:
            raise InvalidArgumentError(f"contact needs exactly two elements, got {len(chosen)}")
        n = _dimension(chosen, dim)
        verdict = oriented_contact_lie(encode(chosen[0], n), encode(chosen[1], n))
    if as_json:
        console.print_json(json.dumps({"contact": verdict}))
    else:
        console.print(f"contact: {str(verdict).lower()}")


def _load(
    gen: Optional[str], grid_file: Optional[Path], lie_seed: Optional[int]
) -> Tuple[LegendreMap, Dict[str, Any], int]:
    if (gen is None) == (grid_file is None):
        raise InvalidArgumentError("give exactly one of --gen or --grid-file")
    descriptor: Dict[str, Any]
    if gen is not None:
        built = build_generator(gen)
        L, default = built.legendre, built.default_grid
        descriptor = {"generator": built.name, "params": built.params}
    else:
        assert grid_file is not None
        L, default = lift_euclidean(*read_grid(grid_file)), 6
        descriptor = {"grid_file": grid_file.name}
    if lie_seed is not None:
        L = L.transformed(random_lie_transform(lie_seed, L.n))
        descriptor["lie_seed"] = lie_seed
    return L, descriptor, default


@app.command()
def analyze(
    gen: Optional[str] = typer.Option(None, "--gen", help="Generator, e.g. 'cartan:t=0.5236'"),
    grid_file: Optional[Path] = typer.Option(None, "--grid-file", help="Sampled hypersurface"),
    grid: Optional[str] = typer.Option(None, "--grid", help="Samples per axis, e.g. '20x20x20'"),
    criteria: Optional[str] = typer.Option(
        None, "--criteria", help="Comma list of dupin, reduce, isopara, lie"
    ),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the JSON report here"),
    as_json: bool = typer.Option(False, "--json", help="Print the report to standard output"),
    lie_seed: Optional[int] = typer.Option(
        None, "--lie-seed", help="Apply a seeded random Lie transformation first"
    ),
    timing: bool = typer.Option(False, "--timing", help="Include section timings"),
    config: Optional[Path] = typer.Option(None, "--config", help="JSON settings overrides"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for all randomness"),
) -> None:
    """Analyze a generator or grid file: curvature samples, Dupin, reducibility, criterion."""
    with _session(config, seed):
        L, descriptor, default = _load(gen, grid_file, lie_seed)
        counts = parse_grid(grid, L.dim, default)
        report = run_analysis(L, counts, parse_criteria(criteria), descriptor, timing=timing)
        text = report_json(report)

    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
    if as_json:
        typer.echo(text, nl=False)
    else:
        console.print(summary_line(report))
    if report.errors:
        for message in report.errors:
            errors.print(f"[red]{message}[/red]")
        raise typer.Exit(code=EXIT_NUMERICAL)


@app.command(name="export-mesh")
def export_mesh(
    gen: Optional[str] = typer.Option(None, "--gen", help="Generator, e.g. 'torus:2,1'"),
    grid_file: Optional[Path] = typer.Option(None, "--grid-file", help="Sampled hypersurface"),
    out: Path = typer.Option(Path("mesh.obj"), "--out", help="OBJ output path"),
    resolution: str = typer.Option("64x64", "--resolution", help="Vertices per axis"),
    frame: Optional[str] = typer.Option(
        None, "--frame", help="Projection triple (e1, e2, e_{n+3}) as 1-based indices"
    ),
    slice_at: Optional[str] = typer.Option(
        None, "--slice", help="Values of the parameters beyond the first two"
    ),
    flatten: Optional[FlattenMode] = typer.Option(
        None, "--flatten", help="Bring R^4 vertices to R^3: stereo or drop"
    ),
    lie_seed: Optional[int] = typer.Option(None, "--lie-seed", help="Seeded Lie transform"),
    config: Optional[Path] = typer.Option(None, "--config", help="JSON settings overrides"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for all randomness"),
) -> None:
    """Export the Euclidean projection of a Legendre map as an OBJ quad mesh."""
    with _session(config, seed):
        L, descriptor, _ = _load(gen, grid_file, lie_seed)
        triple = None
        if frame is not None:
            triple = [int(x) for x in _floats(frame)]
        f, xi = euclidean_projection(L, triple)
        counts = parse_grid(resolution, 2, 64)
        fixed = _floats(slice_at) if slice_at else None
        mesh = build_mesh(f, xi, counts, fixed=fixed, flatten=flatten)

    if mesh.empty:
        raise _fail("projection is singular on the whole grid; nothing to write", EXIT_EMPTY)
    out.parent.mkdir(parents=True, exist_ok=True)
    comment = f"liesphere {__version__} {json.dumps(descriptor, sort_keys=True)}"
    write_obj(out, mesh, comment=comment)
    console.print(
        f"wrote {out}: {len(mesh.vertices)} vertices, {len(mesh.faces)} faces, "
        f"{mesh.skipped} skipped cells"
    )


@app.command()
def generators() -> None:
    """List the example generators and their default parameters."""
    table = Table(title="Generators")
    table.add_column("Name", style="cyan", no_wrap=True)
    table.add_column("Parameters", style="magenta")
    table.add_column("Description", style="green")
    for name in sorted(GENERATORS):
        entry = GENERATORS[name]
        params = ", ".join(f"{k}={_parameter(v)}" for k, v in entry.defaults.items())
        table.add_row(name, params or "-", entry.description)
    console.print(table)
    console.print(
        Panel(
            "Use --gen name:key=value,... or positional values, e.g. ellipsoid:1,2,3",
            border_style="green",
        )
    )


def _parameter(value: Any) -> str:
    return f"{value:.6g}" if isinstance(value, float) else str(value)


if __name__ == "__main__":  # pragma: no cover - module execution
    app()

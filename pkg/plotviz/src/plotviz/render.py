"""Render qnckit CSV dumps into figures.

Two plot kinds are supported:

* ``charfunc-sphere`` reads a characteristic-function surface CSV and draws
  the response magnitude as a radial surface over the sphere.  The sphere
  embedding uses colatitude 2*theta (and azimuth phi), so the theta range
  [0, pi] of the measurement parameterization covers the full sphere.
* ``steering-cloud`` reads a steering CSV, draws a unit Bloch-sphere
  wireframe, scatters the conditional Bloch vectors, and overlays the convex
  hull edges of the extremal points when a hull exists.

Rendering is read-only over its inputs and deterministic: repeated runs on
the same CSV produce images of identical dimensions and point counts.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from scipy.spatial import ConvexHull, QhullError  # noqa: E402

KINDS = ("charfunc-sphere", "steering-cloud")

CHARFUNC_COLUMNS = ("theta_1", "phi_1", "F_mag", "defined")
STEERING_COLUMNS = ("theta", "phi", "p", "rBx", "rBy", "rBz", "defined")


class SchemaError(ValueError):
    """The input CSV does not carry the expected columns or rows."""


@dataclass(frozen=True)
class PlotJob:
    input_path: str
    kind: str
    output_path: str
    title: str | None = None
    colormap: str = "viridis"


@dataclass(frozen=True)
class RenderReport:
    kind: str
    rows: int
    points_plotted: int
    output_path: str


def _read_csv(path: str, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{path}: empty file, no header row") from None
            rows = [row for row in reader if row]
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    missing = [c for c in required if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}; header is {header}")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    data = np.array([[float(v) for v in row] for row in rows])
    if data.shape[1] != len(header):
        raise SchemaError(f"{path}: ragged rows, expected {len(header)} fields")
    return {name: data[:, k] for k, name in enumerate(header)}


def _render_charfunc_sphere(job: PlotJob) -> RenderReport:
    cols = _read_csv(job.input_path, CHARFUNC_COLUMNS)
    theta = cols["theta_1"]
    phi = cols["phi_1"]
    mag = cols["F_mag"]
    rows = theta.size

    # colatitude 2*theta covers the sphere over the parameter range [0, pi]
    colat = 2.0 * theta
    x = mag * np.sin(colat) * np.cos(phi)
    y = mag * np.sin(colat) * np.sin(phi)
    z = mag * np.cos(colat)

    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(projection="3d")
    t_vals = np.unique(theta)
    p_vals = np.unique(phi)
    if t_vals.size * p_vals.size == rows:
        shape = (t_vals.size, p_vals.size)
        norm = matplotlib.colors.Normalize(vmin=float(mag.min()), vmax=float(mag.max() or 1.0))
        colors = plt.get_cmap(job.colormap)(norm(mag.reshape(shape)))
        ax.plot_surface(
            x.reshape(shape), y.reshape(shape), z.reshape(shape),
            facecolors=colors, rstride=1, cstride=1, linewidth=0, antialiased=False,
        )
    else:
        ax.scatter(x, y, z, c=mag, cmap=job.colormap, s=4)
    ax.set_box_aspect((1, 1, 1))
    ax.set_title(job.title or "response magnitude over the measurement sphere")
    fig.savefig(job.output_path, dpi=110)
    plt.close(fig)
    return RenderReport(
        kind=job.kind, rows=rows, points_plotted=rows, output_path=job.output_path
    )


def _wireframe_sphere(ax) -> None:
    u = np.linspace(0, 2 * math.pi, 24)
    v = np.linspace(0, math.pi, 16)
    uu, vv = np.meshgrid(u, v)
    ax.plot_wireframe(
        np.cos(uu) * np.sin(vv), np.sin(uu) * np.sin(vv), np.cos(vv),
        color="lightgray", linewidth=0.4, alpha=0.6,
    )


def _hull_edges(points: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Edges of the convex hull of the point cloud; planar clouds fall back
    to the hull in their dominant plane."""
    edges: list[tuple[np.ndarray, np.ndarray]] = []
    if points.shape[0] < 3:
        return edges
    try:
        hull = ConvexHull(points)
        seen = set()
        for simplex in hull.simplices:
            for a, b in ((0, 1), (1, 2), (0, 2)):
                key = tuple(sorted((simplex[a], simplex[b])))
                if key not in seen:
                    seen.add(key)
                    edges.append((points[key[0]], points[key[1]]))
        return edges
    except QhullError:
        pass
    # coplanar cloud: project out the flattest axis
    spread = np.ptp(points, axis=0)
    flat = int(np.argmin(spread))
    keep = [i for i in range(3) if i != flat]
    try:
        hull = ConvexHull(points[:, keep])
    except QhullError:
        return edges
    cycle = list(hull.vertices) + [hull.vertices[0]]
    for a, b in zip(cycle[:-1], cycle[1:]):
        edges.append((points[a], points[b]))
    return edges


def _render_steering_cloud(job: PlotJob) -> RenderReport:
    cols = _read_csv(job.input_path, STEERING_COLUMNS)
    r = np.stack([cols["rBx"], cols["rBy"], cols["rBz"]], axis=-1)
    rows = r.shape[0]
    finite = np.all(np.isfinite(r), axis=-1)
    pts = r[finite]

    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(projection="3d")
    _wireframe_sphere(ax)
    ax.scatter(pts[:, 0], pts[:, 1], pts[:, 2], c=cols["p"][finite], cmap=job.colormap, s=3)
    for a, b in _hull_edges(pts):
        ax.plot([a[0], b[0]], [a[1], b[1]], [a[2], b[2]], color="crimson", linewidth=1.0)
    ax.set_box_aspect((1, 1, 1))
    ax.set_xlim(-1, 1), ax.set_ylim(-1, 1), ax.set_zlim(-1, 1)
    ax.set_title(job.title or "conditional Bloch vectors")
    fig.savefig(job.output_path, dpi=110)
    plt.close(fig)
    return RenderReport(
        kind=job.kind, rows=rows, points_plotted=int(pts.shape[0]), output_path=job.output_path
    )


def render(job: PlotJob) -> RenderReport:
    if job.kind == "charfunc-sphere":
        return _render_charfunc_sphere(job)
    if job.kind == "steering-cloud":
        return _render_steering_cloud(job)
    raise SchemaError(f"unknown plot kind {job.kind!r}; expected one of {KINDS}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plotviz", description=__doc__.split("\n")[0])
    parser.add_argument("--input", required=True, help="CSV produced by the qnckit CLI")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--title", default=None)
    parser.add_argument("--colormap", default="viridis")
    args = parser.parse_args(argv)
    job = PlotJob(
        input_path=args.input,
        kind=args.kind,
        output_path=args.out,
        title=args.title,
        colormap=args.colormap,
    )
    try:
        report = render(job)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{report.output_path}: {report.points_plotted} points from {report.rows} rows")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""
Exports of reconstructions for external viewers.

PLY holds reconstructed and ground-truth points in two colors joined by
edge elements; SVG is an orthographic x-y scatter; CSV is one row per point.
"""

import csv
import io
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from ..utils.exceptions import LengthMismatch, UsageError
from ..utils.validators import as_points

RECONSTRUCTED_COLOR = (220, 50, 47)
GT_COLOR = (38, 139, 210)
SVG_SIZE = 600
SVG_MARGIN = 20


class ExportFormat(str, Enum):
    POINTCLOUD = 'pointcloud'
    SCATTER_SVG = 'scatter-svg'
    CSV = 'csv'

    @property
    def suffix(self) -> str:
        return {'pointcloud': '.ply', 'scatter-svg': '.svg', 'csv': '.csv'}[self.value]

    @classmethod
    def parse(cls, value) -> 'ExportFormat':
        try:
            return cls(value)
        except ValueError:
            raise UsageError(f"Unknown export format '{value}'",
                             {'expected': ', '.join(f.value for f in cls)})


def _pair(points, gt) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    points = as_points(points, 3, 'points')
    if gt is None:
        return points, None
    gt = as_points(gt, 3, 'gt_points')
    if len(gt) != len(points):
        raise LengthMismatch(len(points), len(gt), 'points and gt_points')
    return points, gt


def to_ply(points, gt=None) -> str:
    """
    ASCII PLY 1.0 with vertex (x, y, z, red, green, blue) and edge (vertex1, vertex2).

    With ground truth there are 2n vertices, reconstructed first, and n
    edges i -> n + i. Without it there are n vertices and no edge element.
    """
    points, gt = _pair(points, gt)
    n = len(points)
    vertices = [(p, RECONSTRUCTED_COLOR) for p in points]
    if gt is not None:
        vertices += [(p, GT_COLOR) for p in gt]

    lines = [
        'ply',
        'format ascii 1.0',
        'comment topo-sft reconstruction',
        f'element vertex {len(vertices)}',
        'property double x',
        'property double y',
        'property double z',
        'property uchar red',
        'property uchar green',
        'property uchar blue',
    ]
    if gt is not None:
        lines += [f'element edge {n}', 'property int vertex1', 'property int vertex2']
    lines.append('end_header')
    for (x, y, z), (r, g, b) in vertices:
        lines.append(f'{float(x)!r} {float(y)!r} {float(z)!r} {r} {g} {b}')
    if gt is not None:
        lines += [f'{i} {n + i}' for i in range(n)]
    return '\n'.join(lines) + '\n'


def to_svg(points, gt=None, size: int = SVG_SIZE) -> str:
    """Orthographic x-y scatter; ground-truth pairs joined by thin black lines."""
    points, gt = _pair(points, gt)
    everything = points if gt is None else np.vstack([points, gt])
    low = everything[:, :2].min(axis=0)
    extent = float(np.max(everything[:, :2].max(axis=0) - low)) or 1.0
    scale = (size - 2 * SVG_MARGIN) / extent

    def screen(p):
        # SVG y grows downwards
        return SVG_MARGIN + (p[0] - low[0]) * scale, size - SVG_MARGIN - (p[1] - low[1]) * scale

    def color(rgb):
        return 'rgb({},{},{})'.format(*rgb)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    if gt is not None:
        for p, q in zip(points, gt):
            (x1, y1), (x2, y2) = screen(p), screen(q)
            parts.append(f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" '
                         f'stroke="black" stroke-width="0.5"/>')
        for q in gt:
            x, y = screen(q)
            parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="3" fill="{color(GT_COLOR)}"/>')
    for p in points:
        x, y = screen(p)
        parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="3" fill="{color(RECONSTRUCTED_COLOR)}"/>')
    parts.append('</svg>')
    return '\n'.join(parts) + '\n'


def to_csv(points, gt=None) -> str:
    """One row per point: index, reconstructed x, y, z and ground truth when present."""
    points, gt = _pair(points, gt)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    header = ['index', 'x', 'y', 'z']
    if gt is not None:
        header += ['gt_x', 'gt_y', 'gt_z', 'error']
    writer.writerow(header)
    for i, p in enumerate(points):
        row = [i] + [repr(float(c)) for c in p]
        if gt is not None:
            row += [repr(float(c)) for c in gt[i]] + [repr(float(np.linalg.norm(p - gt[i])))]
        writer.writerow(row)
    return buffer.getvalue()


def export_text(fmt: ExportFormat, points, gt=None) -> str:
    fmt = ExportFormat.parse(fmt)
    if fmt is ExportFormat.POINTCLOUD:
        return to_ply(points, gt)
    if fmt is ExportFormat.SCATTER_SVG:
        return to_svg(points, gt)
    return to_csv(points, gt)

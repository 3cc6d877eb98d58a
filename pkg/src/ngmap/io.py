"""File formats: OFF meshes, voxel sets, involution tables, result reports.

Three loaders build validated gmaps:

* OFF polygon meshes become 2-gmaps (2k darts per k-gon, faces sewn along
  shared undirected edges, boundary darts left 2-free);
* voxel sets become 3-gmaps (48 darts per cube, face-adjacent cubes sewn);
* involution tables (the ``gmap`` text format, 1-based darts) round-trip
  byte-stably through read_gmap_table / write_gmap_table.

write_report serializes single runs or batches as JSON or aligned text,
with min/max/mean/std summary rows over every numeric column of a batch.
"""
from __future__ import annotations

import json
import statistics
from dataclasses import dataclass

from .core import GMap, InputError, InvalidGMap


def _validated(g: GMap, source: str) -> GMap:
    try:
        g.validate().raise_if_invalid()
    except InvalidGMap as exc:
        raise InputError(f"{source}: built map is not a valid gmap: {exc}") from exc
    return g


# -- OFF meshes --------------------------------------------------------------


@dataclass(frozen=True)
class MeshMap:
    """A 2-gmap built from a polygon mesh, plus its geometry annotation.

    dart_vertex[d] is the mesh vertex a dart sits at; positions[v] its
    coordinates.  The combinatorial core never reads these; they exist so
    reported generators can be annotated with geometry.
    """

    gmap: GMap
    dart_vertex: tuple
    positions: tuple


def _off_tokens(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def load_off(path) -> MeshMap:
    """Read an ASCII OFF polygon mesh and sew it into a 2-gmap."""
    source = str(path)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    tokens = _off_tokens(text)

    def next_line(what):
        try:
            return next(tokens)
        except StopIteration:
            raise InputError(f"{source}: unexpected end of file, wanted {what}") from None

    lineno, head = next_line("OFF header")
    if head[0].upper() != "OFF":
        raise InputError(f"{source}:{lineno}: not an OFF file (header {head[0]!r})")
    if len(head) > 1:
        counts = head[1:]
    else:
        lineno, counts = next_line("vertex/face counts")
    try:
        nv, nf = int(counts[0]), int(counts[1])
    except (ValueError, IndexError):
        raise InputError(f"{source}:{lineno}: malformed count line {counts!r}") from None
    positions = []
    for _ in range(nv):
        lineno, parts = next_line("a vertex line")
        try:
            positions.append(tuple(float(x) for x in parts[:3]))
        except ValueError:
            raise InputError(f"{source}:{lineno}: malformed vertex line") from None
        if len(parts) < 3:
            raise InputError(f"{source}:{lineno}: vertex line has fewer than 3 coordinates")
    faces = []
    for _ in range(nf):
        lineno, parts = next_line("a face line")
        try:
            k = int(parts[0])
            verts = [int(x) for x in parts[1 : 1 + k]]
        except ValueError:
            raise InputError(f"{source}:{lineno}: malformed face line") from None
        if k < 3 or len(verts) != k:
            raise InputError(f"{source}:{lineno}: face needs at least 3 vertex indices")
        for v in verts:
            if not 0 <= v < nv:
                raise InputError(f"{source}:{lineno}: vertex index {v} out of range")
        for a, b in zip(verts, verts[1:] + verts[:1]):
            if a == b:
                raise InputError(f"{source}:{lineno}: degenerate edge {a}-{b}")
        faces.append(verts)

    num_darts = sum(2 * len(f) for f in faces)
    a0 = list(range(num_darts))
    a1 = list(range(num_darts))
    a2 = list(range(num_darts))
    dart_vertex = [0] * num_darts
    by_side: dict = {}  # (undirected edge, endpoint vertex) -> darts
    base = 0
    for verts in faces:
        k = len(verts)
        for j in range(k):
            u, v = verts[j], verts[(j + 1) % k]
            d0, d1 = base + 2 * j, base + 2 * j + 1
            a0[d0], a0[d1] = d1, d0
            dart_vertex[d0], dart_vertex[d1] = u, v
            e = (u, v) if u < v else (v, u)
            by_side.setdefault((e, u), []).append(d0)
            by_side.setdefault((e, v), []).append(d1)
            c0, c1 = base + 2 * j, base + 2 * ((j - 1) % k) + 1
            a1[c0], a1[c1] = c1, c0
        base += 2 * k
    for (edge, _v), darts in sorted(by_side.items()):
        if len(darts) > 2:
            raise InputError(
                f"{source}: edge {edge} is shared by more than two faces"
            )
        if len(darts) == 2:
            a2[darts[0]], a2[darts[1]] = darts[1], darts[0]
    g = _validated(GMap(2, [a0, a1, a2]), source)
    return MeshMap(gmap=g, dart_vertex=tuple(dart_vertex), positions=tuple(positions))


# -- voxel sets --------------------------------------------------------------


def parse_voxels(text: str, source: str = "<voxels>") -> list:
    """Lines of "x y z" non-negative integers; duplicates collapse."""
    cells = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise InputError(f"{source}:{lineno}: expected three coordinates")
        try:
            x, y, z = (int(p) for p in parts)
        except ValueError:
            raise InputError(f"{source}:{lineno}: non-integer coordinate") from None
        if min(x, y, z) < 0:
            raise InputError(f"{source}:{lineno}: negative coordinate")
        cells.add((x, y, z))
    return sorted(cells)


_FACE_CORNERS = []  # per face: 4 corner offsets in cyclic order
for _axis in range(3):
    for _side in range(2):
        _cyc = []
        for _u, _v in ((0, 0), (1, 0), (1, 1), (0, 1)):
            _c = [0, 0, 0]
            _c[_axis] = _side
            _c[(_axis + 1) % 3] = _u
            _c[(_axis + 2) % 3] = _v
            _cyc.append(tuple(_c))
        _FACE_CORNERS.append(_cyc)


def gmap_from_voxels(cells) -> GMap:
    """Build the 3-gmap of a set of unit cubes (48 darts per cube).

    Each cube face is a quad of 8 darts; alpha_2 sews the faces of one cube
    along its edges, alpha_3 sews coinciding faces of face-adjacent cubes.
    Dart numbering is pure index arithmetic, so construction is linear in
    the number of cubes and independent of input order.
    """
    cubes = sorted(set(map(tuple, cells)))
    num_darts = 48 * len(cubes)
    a0 = list(range(num_darts))
    a1 = list(range(num_darts))
    a2 = list(range(num_darts))
    a3 = list(range(num_darts))
    shared: dict = {}  # (face id, corner, edge) -> dart, for alpha_3 sewing
    for ci, (x, y, z) in enumerate(cubes):
        base = 48 * ci
        sew2: dict = {}  # (edge, corner) -> darts within this cube
        for f in range(6):
            corners = [
                (x + dx, y + dy, z + dz) for dx, dy, dz in _FACE_CORNERS[f]
            ]
            fbase = base + 8 * f
            fid = tuple(sorted(corners))
            for j in range(4):
                u, v = corners[j], corners[(j + 1) % 4]
                d0, d1 = fbase + 2 * j, fbase + 2 * j + 1
                a0[d0], a0[d1] = d1, d0
                c0, c1 = fbase + 2 * j, fbase + 2 * ((j - 1) % 4) + 1
                a1[c0], a1[c1] = c1, c0
                e = tuple(sorted((u, v)))
                sew2.setdefault((e, u), []).append(d0)
                sew2.setdefault((e, v), []).append(d1)
                for corner, dart in ((u, d0), (v, d1)):
                    key = (fid, corner, e)
                    other = shared.pop(key, None)
                    if other is None:
                        shared[key] = dart
                    else:
                        a3[dart], a3[other] = other, dart
        for key, darts in sew2.items():
            if len(darts) != 2:
                raise AssertionError(f"cube sewing broke at {key}")
            a2[darts[0]], a2[darts[1]] = darts[1], darts[0]
    return GMap(3, [a0, a1, a2, a3])


def load_voxels(path) -> GMap:
    """Read a voxel-set file and build its cube-complex 3-gmap."""
    source = str(path)
    with open(path, encoding="utf-8") as fh:
        cells = parse_voxels(fh.read(), source)
    return _validated(gmap_from_voxels(cells), source)


# -- involution tables -------------------------------------------------------


def parse_gmap_table(text: str, source: str = "<gmap>") -> GMap:
    rows = []
    header = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if header is None:
            if parts[0] != "gmap" or len(parts) != 3:
                raise InputError(
                    f"{source}:{lineno}: expected header 'gmap <dim> <darts>'"
                )
            try:
                n, num_darts = int(parts[1]), int(parts[2])
            except ValueError:
                raise InputError(f"{source}:{lineno}: malformed header") from None
            if n < 0 or num_darts < 0:
                raise InputError(f"{source}:{lineno}: negative header values")
            header = (n, num_darts)
            continue
        n, num_darts = header
        i = len(rows)
        if i > n:
            raise InputError(f"{source}:{lineno}: more than {n + 1} involution rows")
        if parts[0] != f"a{i}":
            raise InputError(
                f"{source}:{lineno}: expected row 'a{i}', found {parts[0]!r}"
            )
        if len(parts) != num_darts + 1:
            raise InputError(
                f"{source}:{lineno}: involution a{i} lists {len(parts) - 1} darts, "
                f"expected {num_darts}"
            )
        try:
            row = [int(p) - 1 for p in parts[1:]]
        except ValueError:
            raise InputError(f"{source}:{lineno}: non-integer dart in a{i}") from None
        for d, e in enumerate(row):
            if not 0 <= e < num_darts:
                raise InputError(
                    f"{source}:{lineno}: a{i}({d + 1}) = {e + 1} out of range"
                )
        rows.append(row)
    if header is None:
        raise InputError(f"{source}: empty table")
    n, num_darts = header
    if len(rows) != n + 1:
        raise InputError(
            f"{source}: found {len(rows)} involution rows, expected {n + 1}"
        )
    for i, row in enumerate(rows):
        for d, e in enumerate(row):
            if row[e] != d:
                raise InputError(
                    f"{source}: a{i} is not an involution at dart {d + 1}"
                )
    return GMap(n, rows)


def format_gmap_table(g: GMap) -> str:
    lines = [f"gmap {g.dimension} {g.num_darts}"]
    for i, row in enumerate(g.alpha):
        lines.append(" ".join([f"a{i}"] + [str(e + 1) for e in row]))
    return "\n".join(lines) + "\n"


def read_gmap_table(path) -> GMap:
    source = str(path)
    with open(path, encoding="utf-8") as fh:
        return _validated(parse_gmap_table(fh.read(), source), source)


def write_gmap_table(g: GMap, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_gmap_table(g))


# -- result reports ----------------------------------------------------------


@dataclass
class ResultReport:
    """One or many runs plus context; serializable as JSON or as text.

    meta describes the whole report (inputs, seed, mode); each run is a
    flat dict.  Numeric fields present in every run are summarized with
    min/max/mean/std in batch output.
    """

    meta: dict
    runs: list

    def numeric_fields(self) -> list:
        if not self.runs:
            return []
        fields = []
        for key in self.runs[0]:
            if all(
                isinstance(r.get(key), (int, float)) and not isinstance(r.get(key), bool)
                for r in self.runs
            ):
                fields.append(key)
        return fields

    def summary(self) -> dict:
        out = {}
        for key in self.numeric_fields():
            values = [r[key] for r in self.runs]
            out[key] = {
                "min": min(values),
                "max": max(values),
                "mean": statistics.fmean(values),
                "std": statistics.pstdev(values) if len(values) > 1 else 0.0,
            }
        return out

    def to_dict(self) -> dict:
        return {"meta": self.meta, "runs": self.runs, "summary": self.summary()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = []
        for key in sorted(self.meta):
            lines.append(f"# {key}: {self.meta[key]}")
        fields = self.numeric_fields()
        if len(self.runs) == 1:
            run = self.runs[0]
            for key in run:
                lines.append(f"{key}: {run[key]}")
            return "\n".join(lines) + "\n"
        table = [["run"] + fields]
        for idx, run in enumerate(self.runs):
            table.append([str(idx)] + [_fmt(run[k]) for k in fields])
        stats = self.summary()
        for stat in ("min", "max", "mean", "std"):
            table.append([stat] + [_fmt(stats[k][stat]) for k in fields])
        widths = [max(len(row[c]) for row in table) for c in range(len(table[0]))]
        for row in table:
            lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
        return "\n".join(lines) + "\n"


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.3f}"
    return str(value)


def write_report(report: ResultReport, path, format: str = "json") -> None:
    """Serialize a report; an empty batch is an error, not an empty file."""
    if not report.runs:
        raise InputError("refusing to write a report with no runs")
    if format == "json":
        payload = report.to_json()
    elif format == "text":
        payload = report.to_text()
    else:
        raise InputError(f"unknown report format {format!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(payload)

"""Text formats: cover manifests, fan files, chart files, form and map files.

The manifest format is section based.  ``[chart <id>]`` blocks carry keys
``n``, ``m``, inequality lines ``a1 .. am >= b`` and an optional ``open``
marker line; ``[overlap <id1,id2,..>]`` blocks carry the same keys plus one
``map <chart-id> = <rows>`` line per member (rows separated by ';').  An
optional ``[meta]`` block sets ``gluing_class`` and ``orientation``.
Printing then parsing reproduces an identical manifest.
"""
from __future__ import annotations

from fractions import Fraction

from .charts import ChartSignature
from .cover import CoverManifest, OverlapData
from .errors import ManifestError
from .forms import parse_form
from .lattice import Fan, Polytope


def _parse_fraction(tok, lineno):
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ManifestError("bad rational %r" % tok, lineno)


def _parse_matrix(text, lineno):
    text = text.strip()
    if not text:
        return []
    rows = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            rows.append([int(t) for t in chunk.split()])
        except ValueError:
            raise ManifestError("bad integer row %r" % chunk, lineno)
    return rows


def _format_matrix(rows):
    return " ; ".join(" ".join(str(x) for x in row) for row in rows)


class _Block:
    def __init__(self, kind, label, lineno):
        self.kind = kind
        self.label = label
        self.lineno = lineno
        self.keys = {}
        self.ineqs = []
        self.maps = {}
        self.open_faces = ()


def _scan_blocks(text):
    blocks = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ManifestError("unterminated section header", lineno)
            inner = line[1:-1].strip()
            if inner == "meta":
                current = _Block("meta", None, lineno)
            elif inner.startswith("chart "):
                current = _Block("chart", inner[6:].strip(), lineno)
            elif inner.startswith("overlap "):
                current = _Block("overlap", inner[8:].strip(), lineno)
            else:
                raise ManifestError("unknown section %r" % inner, lineno)
            blocks.append(current)
            continue
        if current is None:
            raise ManifestError("content before any section header", lineno)
        if line.startswith("ineq "):
            current.ineqs.append((line[5:], lineno))
        elif line.startswith("map "):
            rest = line[4:]
            if "=" not in rest:
                raise ManifestError("map line needs '='", lineno)
            cid, matrix = rest.split("=", 1)
            current.maps[cid.strip()] = (matrix, lineno)
        elif line.startswith("open"):
            rest = line[4:].strip()
            if rest.startswith("="):
                rest = rest[1:].strip()
            current.open_faces = tuple(rest.split()) if rest else ("open",)
        elif "=" in line:
            key, val = line.split("=", 1)
            current.keys[key.strip()] = (val.strip(), lineno)
        else:
            raise ManifestError("unrecognized line %r" % line, lineno)
    return blocks


def _block_signature(block):
    try:
        n = int(block.keys["n"][0])
        m = int(block.keys["m"][0])
    except KeyError as missing:
        raise ManifestError("missing key %s" % missing, block.lineno)
    except ValueError:
        raise ManifestError("n and m must be integers", block.lineno)
    ineqs = []
    for text, lineno in block.ineqs:
        if ">=" not in text:
            raise ManifestError("inequality needs '>='", lineno)
        lhs, rhs = text.split(">=", 1)
        toks = lhs.split()
        if len(toks) != m:
            raise ManifestError("inequality has %d coefficients, m = %d" % (len(toks), m), lineno)
        try:
            a = tuple(int(t) for t in toks)
        except ValueError:
            raise ManifestError("inequality coefficients must be integers", lineno)
        ineqs.append((a, _parse_fraction(rhs.strip(), lineno)))
    poly = Polytope(m, ineqs, open_faces=block.open_faces)
    return ChartSignature(n, m, poly)


def parse_manifest(text) -> CoverManifest:
    blocks = _scan_blocks(text)
    if not blocks:
        raise ManifestError("empty manifest: no sections found", 1)
    gluing_class = "pure-monomial"
    orientation = "standard"
    charts = {}
    overlaps = {}
    for block in blocks:
        if block.kind == "meta":
            if "gluing_class" in block.keys:
                gluing_class = block.keys["gluing_class"][0]
            if "orientation" in block.keys:
                orientation = block.keys["orientation"][0]
            continue
        if block.kind == "chart":
            cid = block.label
            if not cid:
                raise ManifestError("chart needs an id", block.lineno)
            if cid in charts:
                raise ManifestError("duplicate chart %s" % cid, block.lineno)
            charts[cid] = _block_signature(block)
            continue
        ids = tuple(s.strip() for s in block.label.split(","))
        if len(ids) < 2:
            raise ManifestError("overlap needs at least two ids", block.lineno)
        key = tuple(sorted(ids))
        if key in overlaps:
            raise ManifestError("duplicate overlap %r" % (key,), block.lineno)
        sig = _block_signature(block)
        maps = {}
        for cid, (matrix_text, lineno) in block.maps.items():
            maps[cid] = _parse_matrix(matrix_text, lineno)
        overlaps[key] = OverlapData(signature=sig, maps=maps)
    return CoverManifest(
        charts=charts, overlaps=overlaps, gluing_class=gluing_class, orientation=orientation
    )


def serialize_manifest(manifest: CoverManifest) -> str:
    lines = ["[meta]"]
    lines.append("gluing_class = %s" % manifest.gluing_class)
    lines.append("orientation = %s" % manifest.orientation)
    for cid in sorted(manifest.charts):
        lines.append("")
        lines.extend(_signature_lines("chart %s" % cid, manifest.charts[cid]))
    for key in sorted(manifest.overlaps, key=lambda t: (len(t), t)):
        ov = manifest.overlaps[key]
        lines.append("")
        lines.extend(_signature_lines("overlap %s" % ",".join(key), ov.signature))
        for cid in key:
            if cid in ov.maps:
                lines.append("map %s = %s" % (cid, _format_matrix(ov.maps[cid])))
    return "\n".join(lines) + "\n"


def _signature_lines(header, sig: ChartSignature):
    lines = ["[%s]" % header, "n = %d" % sig.n, "m = %d" % sig.m]
    for a, b in sig.polytope.inequalities:
        lines.append("ineq %s >= %s" % (" ".join(str(x) for x in a), b))
    if sig.polytope.open_faces:
        lines.append("open = %s" % " ".join(sig.polytope.open_faces))
    return lines


# ---------------------------------------------------------------------------
# Fan, chart, form and map files
# ---------------------------------------------------------------------------


def parse_fan_file(text) -> Fan:
    cones = []
    ambient = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not line.startswith("cone:"):
            raise ManifestError("fan lines look like 'cone: v1; v2; ..'", lineno)
        rays = _parse_matrix(line[5:], lineno)
        if not rays:
            raise ManifestError("cone with no rays", lineno)
        widths = {len(r) for r in rays}
        if len(widths) != 1:
            raise ManifestError("rays of mixed dimension", lineno)
        w = widths.pop()
        if ambient is None:
            ambient = w
        elif ambient != w:
            raise ManifestError("cone dimension %d, fan lives in R^%d" % (w, ambient), lineno)
        cones.append(rays)
    if not cones:
        raise ManifestError("fan file lists no cones")
    return Fan(cones, ambient)


def parse_chart_file(text):
    """A file with a single [chart <id>] block."""
    blocks = _scan_blocks(text)
    charts = [b for b in blocks if b.kind == "chart"]
    if len(charts) != 1:
        raise ManifestError("chart file needs exactly one [chart] block")
    return charts[0].label, _block_signature(charts[0])


def parse_form_file(text, n, m):
    """A file with comment lines and one 'form:' line."""
    form_line = None
    lineno = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("form:"):
            if form_line is not None:
                raise ManifestError("multiple form lines", ln)
            form_line = line[5:].strip()
            lineno = ln
        else:
            raise ManifestError("unrecognized line in form file", ln)
    if form_line is None:
        raise ManifestError("form file has no 'form:' line")
    return parse_form(form_line, n, m)


def parse_map_file(text):
    """Key = matrix lines, e.g. 'df = 1 0 ; 0 1'."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ManifestError("map file lines look like 'name = rows'", lineno)
        name, rows = line.split("=", 1)
        out[name.strip()] = _parse_matrix(rows, lineno)
    return out

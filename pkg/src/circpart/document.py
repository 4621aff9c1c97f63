"""Partition documents (JSON), curve tables (CSV) and figures (SVG)."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .construct import DiskFamily, FlatDisks, KgonFrame, Partition
from .geom import Isometry

SCHEMA_VERSION = "1"
ROLES = ("central", "corner", "gap")


@dataclass(frozen=True)
class DiskRecord:
    role: str
    indisk: Tuple[float, float, float]
    outcircle: Tuple[float, float, float]
    parent: Optional[int]

    def to_json(self) -> dict:
        cx, cy, r = self.indisk
        ox, oy, orad = self.outcircle
        return {"role": self.role,
                "indisk": {"cx": cx, "cy": cy, "r": r},
                "outcircle": {"cx": ox, "cy": oy, "r": orad},
                "parent": self.parent}


@dataclass(frozen=True)
class PartitionDocument:
    schema_version: str
    k: int
    gamma: float
    disks: Tuple[DiskRecord, ...]
    piece_count: int
    terminated: bool

    @classmethod
    def from_partition(cls, p: Partition) -> PartitionDocument:
        flat = p.flat()
        cols = [a.tolist() for a in (flat.in_x, flat.in_y, flat.in_r, flat.out_x, flat.out_y, flat.out_r)]
        roles = flat.roles.tolist()
        parents = flat.parent.tolist()
        disks = tuple(
            DiskRecord(roles[i], (cols[0][i], cols[1][i], cols[2][i]),
                       (cols[3][i], cols[4][i], cols[5][i]), None if parents[i] < 0 else parents[i])
            for i in range(len(flat)))
        return cls(SCHEMA_VERSION, p.k, p.gamma, disks, p.piece_count, p.terminated)

    def to_json(self) -> str:
        body = {"schema_version": self.schema_version, "k": self.k, "gamma": self.gamma,
                "piece_count": self.piece_count, "terminated": self.terminated,
                "disks": [d.to_json() for d in self.disks]}
        return json.dumps(body, indent=None, separators=(",", ":"), allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> PartitionDocument:
        raw = json.loads(text)
        if raw.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {raw.get('schema_version')!r}")
        disks = []
        for i, d in enumerate(raw["disks"]):
            if d["role"] not in ROLES:
                raise ValueError(f"disk {i}: unknown role {d['role']!r}")
            ind, out = d["indisk"], d["outcircle"]
            parent = d["parent"]
            if parent is not None and not (0 <= parent < len(raw["disks"])):
                raise ValueError(f"disk {i}: parent out of range")
            disks.append(DiskRecord(d["role"], (float(ind["cx"]), float(ind["cy"]), float(ind["r"])),
                                    (float(out["cx"]), float(out["cy"]), float(out["r"])), parent))
        doc = cls(raw["schema_version"], int(raw["k"]), float(raw["gamma"]), tuple(disks),
                  int(raw["piece_count"]), bool(raw["terminated"]))
        if doc.piece_count != len(doc.disks):
            raise ValueError("piece_count does not match the number of disks")
        return doc

    def flat(self) -> FlatDisks:
        arr = np.array([d.indisk + d.outcircle for d in self.disks], dtype=float).reshape(-1, 6)
        return FlatDisks(*(arr[:, i].copy() for i in range(6)),
                         roles=np.array([d.role for d in self.disks]),
                         parent=np.array([-1 if d.parent is None else d.parent for d in self.disks]))


class FlatPartition:
    """A partition known only through its explicit disk list."""

    def __init__(self, k: int, gamma: float, disks: FlatDisks, terminated: bool = True):
        self.frame = KgonFrame(k)
        self.k = k
        self.gamma = gamma
        self._flat = disks
        self.terminated = terminated

    @classmethod
    def from_document(cls, doc: PartitionDocument) -> FlatPartition:
        return cls(doc.k, doc.gamma, doc.flat(), doc.terminated)

    @property
    def piece_count(self) -> int:
        return len(self._flat)

    def flat(self) -> FlatDisks:
        return self._flat

    def families(self) -> List[DiskFamily]:
        f = self._flat
        return [DiskFamily(f.in_x, f.in_y, f.in_r, f.out_x, f.out_y, f.out_r,
                           (Isometry.identity(),), 0, "all")]


def write_atomic(path: str, data: str) -> None:
    """Write via a temp file in the target directory, then rename over path."""
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".tmp-", suffix=os.path.basename(target))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_float(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_float(v) for v in row])
    return buf.getvalue()


def _n(v: float) -> str:
    return "%.9g" % v


def svg_text(partition, min_radius: float = 1e-4) -> str:
    """Polygon, filled indisks and stroked outcircles.

    Gap disks with radius below min_radius are left out and counted in a
    single summary marker; pass 0 to draw everything.
    """
    frame = partition.frame
    flat = partition.flat()
    c, R = frame.center, frame.circumradius
    pad = 1.1 * R
    vb = (c.x - pad, -(c.y + pad), 2 * pad, 2 * pad)
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           '<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" '
           f'viewBox="{_n(vb[0])} {_n(vb[1])} {_n(vb[2])} {_n(vb[3])}">',
           '<g transform="scale(1,-1)" stroke-width="%s">' % _n(0.002 * R)]
    pts = " ".join(f"{_n(p.x)},{_n(p.y)}" for p in frame.vertices)
    out.append(f'<polygon class="polygon" points="{pts}" fill="none" stroke="black"/>')
    thin = flat.in_r < min_radius
    thin &= flat.roles == "gap"
    for i in np.nonzero(~thin)[0]:
        out.append(f'<circle class="outcircle" cx="{_n(flat.out_x[i])}" cy="{_n(flat.out_y[i])}" '
                   f'r="{_n(flat.out_r[i])}" fill="none" stroke="#c03030"/>')
    for i in np.nonzero(~thin)[0]:
        out.append(f'<circle class="indisk" cx="{_n(flat.in_x[i])}" cy="{_n(flat.in_y[i])}" '
                   f'r="{_n(flat.in_r[i])}" fill="#3060c0" fill-opacity="0.3" stroke="none"/>')
    if thin.any():
        out.append(f'<g class="thinned" data-count="{int(thin.sum())}" '
                   f'data-min-radius="{_n(min_radius)}"></g>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"

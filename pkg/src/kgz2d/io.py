"""Deterministic artifact output: CSV series, binary snapshots, manifests.

CSV: header row, '.' decimal, 17 significant digits, '\n' line endings, so
doubles round-trip bit-exactly and reruns are byte-identical.

Binary snapshot: magic "KGZ1", little-endian u32 version, u32 N, f64 L,
f64 t, then six row-major f64 planes (n, dn/dt, E1, E2, dE1/dt, dE2/dt).
"""

import hashlib
import struct
from pathlib import Path

import numpy as np

SNAPSHOT_MAGIC = b"KGZ1"
SNAPSHOT_VERSION = 1

__all__ = ["format_float", "write_csv", "write_snapshot", "read_snapshot",
           "write_manifest"]


def format_float(x):
    return f"{float(x):.17g}"


def write_csv(path, header, rows):
    """Write rows of floats/ints/strings with reproducible formatting."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = []
            for v in row:
                if isinstance(v, str):
                    cells.append(v)
                elif isinstance(v, (int, np.integer)):
                    cells.append(str(int(v)))
                else:
                    cells.append(format_float(v))
            fh.write(",".join(cells) + "\n")
    return path


def write_snapshot(path, state):
    """Binary field snapshot of a FieldState."""
    g = state.grid
    planes = [state.n, state.ndot, state.E[0], state.E[1], state.Edot[0], state.Edot[1]]
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<IIdd", SNAPSHOT_VERSION, g.N, float(g.L), float(state.t)))
        for plane in planes:
            fh.write(np.ascontiguousarray(plane, dtype="<f8").tobytes())
    return path


def read_snapshot(path):
    """Parse a binary snapshot; returns (N, L, t, planes[6])."""
    raw = Path(path).read_bytes()
    if raw[:4] != SNAPSHOT_MAGIC:
        raise ValueError(f"{path}: not a KGZ1 snapshot")
    version, n, L, t = struct.unpack_from("<IIdd", raw, 4)
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"{path}: unsupported snapshot version {version}")
    off = 4 + struct.calcsize("<IIdd")
    planes = []
    count = n * n
    for _ in range(6):
        arr = np.frombuffer(raw, dtype="<f8", count=count, offset=off).reshape(n, n)
        planes.append(arr.copy())
        off += count * 8
    return n, L, t, planes


def write_manifest(out_dir, exclude=("manifest.txt",)):
    """List every artifact in out_dir with its sha256 digest and size."""
    out_dir = Path(out_dir)
    lines = []
    for p in sorted(out_dir.rglob("*")):
        if not p.is_file() or p.name in exclude:
            continue
        digest = hashlib.sha256(p.read_bytes()).hexdigest()
        rel = p.relative_to(out_dir).as_posix()
        lines.append(f"{digest}  {p.stat().st_size:>12d}  {rel}")
    path = out_dir / "manifest.txt"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))
    return path

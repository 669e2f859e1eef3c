"""Writes track_mask_24x32.txt from track.jsonl with exact rational arithmetic."""
import json
import math
from fractions import Fraction
from pathlib import Path

H, W, CONF_MIN = 24, 32, 0.3
BONES = [(15, 13), (13, 11), (16, 14), (14, 12), (11, 12), (5, 11), (6, 12), (5, 6), (5, 7), (6, 8),
         (7, 9), (8, 10), (1, 2), (0, 1), (0, 2), (1, 3), (2, 4), (3, 5), (4, 6)]


def pixel(v, extent):
    return min(max(math.floor(v * extent), 0), extent - 1)


def line(a, b):
    a, b = min(a, b), max(a, b)
    steps = max(abs(b[0] - a[0]), abs(b[1] - a[1]))
    if steps == 0:
        return [a]
    pts = []
    for t in range(steps + 1):
        p = []
        for c in range(2):
            f = Fraction(t * (b[c] - a[c]), steps)
            mag = math.floor(abs(f) + Fraction(1, 2))
            p.append(a[c] + (mag if f >= 0 else -mag))
        pts.append(tuple(p))
    return pts


here = Path(__file__).parent
frames = [json.loads(l) for l in (here / "track.jsonl").read_text().splitlines() if l.strip()]
out = []
for i, rec in enumerate(sorted(frames, key=lambda r: r["frame_idx"])):
    kps = rec["keypoints"]
    grid = [["."] * W for _ in range(H)]

    def put(x, y):
        if 0 <= x < W and 0 <= y < H:
            grid[y][x] = "#"

    xy = [(pixel(k[0], W), pixel(k[1], H)) for k in kps]
    vis = [k[2] >= CONF_MIN for k in kps]
    for a, b in BONES:
        if vis[a] and vis[b]:
            for x, y in line(xy[a], xy[b]):
                put(x, y)
    for k, (x, y) in enumerate(xy):
        if vis[k]:
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    put(x + dx, y + dy)
    out.append(f"# frame {i}")
    out.extend("".join(r) for r in grid)
(here / "track_mask_24x32.txt").write_text("\n".join(out) + "\n")

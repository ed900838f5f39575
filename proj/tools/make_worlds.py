#!/usr/bin/env python3
"""Regenerates the ASCII maps in worlds/. Run from the repo root.

Every world is kept small enough that no line of sight inside the free
space exceeds the default lidar range (12 m). The scan-matching weight
penalizes particles whose expected ray finds nothing within range, so a
room larger than the sensor would bias the filter toward far walls.
"""

import os

RES = 0.1


def blank(w, h):
    return [["." for _ in range(w)] for _ in range(h)]


def ring(g):
    h, w = len(g), len(g[0])
    for c in range(w):
        g[0][c] = g[h - 1][c] = "#"
    for r in range(h):
        g[r][0] = g[r][w - 1] = "#"


def fill(g, c0, c1, r0, r1):
    for r in range(r0, r1 + 1):
        for c in range(c0, c1 + 1):
            g[r][c] = "#"


def clear(g, c0, c1, r0, r1):
    for r in range(r0, r1 + 1):
        for c in range(c0, c1 + 1):
            g[r][c] = "."


def write(path, g):
    # Grid rows are indexed bottom-up; files store the top row first.
    with open(path, "w", newline="\n") as f:
        f.write(f"resolution={RES}\n")
        for row in reversed(g):
            f.write("".join(row) + "\n")
    print(f"wrote {path} ({len(g[0])}x{len(g)})")


def empty_world():
    # Odometry drift demos only; no filter runs here.
    g = blank(120, 120)
    ring(g)
    return g


def corridor_world():
    # 9 x 6 m (diagonal 10.8 m): a hallway loop around a hollow building
    # core, with a crate and a wall fin so the loop is asymmetric. Every
    # wall face borders the hallway, so scans keep matching against
    # already-mapped structure instead of staring into unmapped rooms.
    g = blank(90, 60)
    ring(g)
    fill(g, 20, 69, 20, 39)       # building core
    clear(g, 21, 68, 21, 38)      # hollow (unreachable, stays unknown)
    fill(g, 45, 48, 1, 2)         # crate against the south wall
    fill(g, 30, 31, 54, 59)       # fin off the north wall
    return g


def cluttered_world():
    # 8 x 8 m (diagonal 11.3 m) with asymmetric furniture so scans
    # disambiguate pose.
    g = blank(80, 80)
    ring(g)
    fill(g, 12, 20, 12, 24)
    fill(g, 34, 44, 30, 36)
    fill(g, 56, 66, 14, 22)
    fill(g, 14, 22, 52, 62)
    fill(g, 52, 60, 48, 58)
    fill(g, 34, 38, 62, 68)
    return g


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    out = os.path.join(here, "..", "worlds")
    os.makedirs(out, exist_ok=True)
    write(os.path.join(out, "empty.map"), empty_world())
    write(os.path.join(out, "corridor.map"), corridor_world())
    write(os.path.join(out, "cluttered.map"), cluttered_world())


if __name__ == "__main__":
    main()

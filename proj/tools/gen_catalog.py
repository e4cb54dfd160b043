#!/usr/bin/env python3
"""Regenerates the pinned catalog triangulations under data/catalog/.

The JSON files are the source of truth; this script only documents how they
were produced and refuses to write a complex that fails basic manifold checks.
"""
import itertools
import json
import pathlib
import sys

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "catalog"


def maximal(facets):
    fs = sorted({tuple(sorted(f)) for f in facets})
    keep = [f for f in fs if not any(set(f) < set(g) for g in fs)]
    return sorted(keep)


def product(x, y):
    nx, fx = x
    ny, fy = y
    out = []
    for s in fx:
        for t in fy:
            p, q = len(s) - 1, len(t) - 1
            for moves in itertools.combinations(range(p + q), p):
                i = j = 0
                simplex = [s[0] * ny + t[0]]
                for step in range(p + q):
                    if step in moves:
                        i += 1
                    else:
                        j += 1
                    simplex.append(s[i] * ny + t[j])
                out.append(simplex)
    return nx * ny, maximal(out)


def circle(n):
    return n, maximal([[i, (i + 1) % n] for i in range(n)])


def klein9():
    def v(i, j):
        if j == 3:
            i, j = (-i) % 3, 0
        return (i % 3) * 3 + j

    tris = []
    for i in range(3):
        for j in range(3):
            tris.append([v(i, j), v(i + 1, j), v(i + 1, j + 1)])
            tris.append([v(i, j), v(i, j + 1), v(i + 1, j + 1)])
    return 9, maximal(tris)


def check_pseudomanifold(name, n, facets, closed):
    dims = {len(f) for f in facets}
    assert len(dims) == 1, name
    d = dims.pop() - 1
    for f in facets:
        assert len(set(f)) == len(f), (name, f)
        assert all(0 <= v < n for v in f), (name, f)
    assert len(set(map(tuple, facets))) == len(facets)
    if d == 0:
        return
    ridges = {}
    for f in facets:
        for r in itertools.combinations(f, d):
            ridges[r] = ridges.get(r, 0) + 1
    counts = set(ridges.values())
    if closed:
        assert counts == {2}, (name, counts)
    else:
        assert counts <= {1, 2}, (name, counts)


def euler(facets):
    faces = set()
    for f in facets:
        for k in range(1, len(f) + 1):
            faces.update(itertools.combinations(f, k))
    return sum((-1) ** (len(s) - 1) for s in faces)


def main():
    s1 = circle(3)
    interval = (2, [[0, 1]])
    torus = product(s1, s1)
    entries = [
        ("point", "single vertex", (1, [[0]]), dict(dimension=0, closed=True, orientable=True), 1),
        ("interval", "1-simplex", interval, dict(dimension=1, closed=False, orientable=True), 1),
        ("disk", "filled triangle", (3, [[0, 1, 2]]), dict(dimension=2, closed=False, orientable=True), 1),
        ("s1", "3-vertex circle", s1, dict(dimension=1, closed=True, orientable=True), 0),
        ("s2", "boundary of the tetrahedron", (4, maximal(itertools.combinations(range(4), 3))),
         dict(dimension=2, closed=True, orientable=True), 2),
        ("torus", "9-vertex grid torus (staircase product s1 x s1)", torus,
         dict(dimension=2, closed=True, orientable=True), 0),
        ("klein", "9-vertex twisted grid Klein bottle", klein9(),
         dict(dimension=2, closed=True, orientable=False), 0),
        ("mobius", "5-vertex Moebius band", (5, maximal([[i, (i + 1) % 5, (i + 2) % 5] for i in range(5)])),
         dict(dimension=2, closed=False, orientable=False), 0),
        ("cylinder", "6-vertex annulus (staircase product s1 x interval)", product(s1, interval),
         dict(dimension=2, closed=False, orientable=True), 0),
        ("rp2", "6-vertex real projective plane (hemi-icosahedron)",
         (6, maximal([[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 1, 5],
                      [1, 2, 4], [2, 3, 5], [1, 3, 4], [2, 4, 5], [1, 3, 5]])),
         dict(dimension=2, closed=True, orientable=False), 1),
        ("t3", "27-vertex 3-torus (staircase product s1 x torus)", product(s1, torus),
         dict(dimension=3, closed=True, orientable=True), 0),
    ]
    OUT.mkdir(parents=True, exist_ok=True)
    for name, desc, (n, facets), meta, chi in entries:
        check_pseudomanifold(name, n, facets, meta["closed"])
        got = euler(facets)
        assert got == chi, (name, got, chi)
        doc = {"name": name, "vertex_count": n, "facets": facets, "description": desc}
        doc.update(meta)
        text = json.dumps(doc, separators=(",", ":")) + "\n"
        (OUT / f"{name}.json").write_text(text, encoding="utf-8")
        print(f"{name}: {n} vertices, {len(facets)} facets, chi={got}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

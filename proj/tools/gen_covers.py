#!/usr/bin/env python3
"""Regenerates the Mayer-Vietoris cover files under data/covers/."""
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "covers"


def complex_doc(name, n, facets):
    return {"name": name, "vertex_count": n, "facets": sorted(sorted(f) for f in facets)}


def torus_band(x_edges):
    # Staircase triangles of the catalog torus lying over the given edges of
    # the first circle factor; vertex (a, b) is 3a + b.
    out = []
    for a0, a1 in x_edges:
        for b0, b1 in [(0, 1), (0, 2), (1, 2)]:
            out.append([3 * a0 + b0, 3 * a1 + b0, 3 * a1 + b1])
            out.append([3 * a0 + b0, 3 * a0 + b1, 3 * a1 + b1])
    return out


def torus_cover():
    total = torus_band([(0, 1), (0, 2), (1, 2)])
    return {
        "name": "torus_cylinders",
        "description": "9-vertex torus as two cylinders meeting in two circles",
        "total": complex_doc("torus", 9, total),
        "A": complex_doc("cylinder over [0,1]", 9, torus_band([(0, 1)])),
        "B": complex_doc("cylinder over [1,2] and [0,2]", 9, torus_band([(1, 2), (0, 2)])),
    }


def sphere_cover():
    north, south = 0, 7
    ring1 = [1, 2, 3]
    ring2 = [4, 5, 6]
    cap_n = [[north, ring1[i], ring1[(i + 1) % 3]] for i in range(3)]
    cap_s = [[south, ring2[i], ring2[(i + 1) % 3]] for i in range(3)]
    band = []
    for i in range(3):
        j = (i + 1) % 3
        band.append([ring1[i], ring1[j], ring2[i]])
        band.append([ring1[j], ring2[i], ring2[j]])
    return {
        "name": "sphere_disks",
        "description": "8-vertex 2-sphere as two disks overlapping in an annulus",
        "total": complex_doc("s2 banded", 8, cap_n + band + cap_s),
        "A": complex_doc("northern disk", 8, cap_n + band),
        "B": complex_doc("southern disk", 8, band + cap_s),
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for cover in (torus_cover(), sphere_cover()):
        path = OUT / f"{cover['name']}.json"
        path.write_text(json.dumps(cover, separators=(",", ":")) + "\n", encoding="utf-8")
        print(path.name)


if __name__ == "__main__":
    main()

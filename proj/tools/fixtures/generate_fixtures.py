#!/usr/bin/env python3
"""Regenerates the bundled MEDIT fixtures with gmsh (OpenCASCADE kernel).

Every fixture except the unit cube is a 2 x 2 x 1 box modified near its top face. Boundary
triangles carry their CAD surface tag as patch id; mesh edges on sharp CAD
curves (and on imprinted curves) are written to the Edges section with the
CAD curve tag. Seam curves of periodic surfaces are not tagged.

    python3 tools/fixtures/generate_fixtures.py --out fixtures
"""

import argparse
import math
from pathlib import Path

import gmsh
import numpy as np

BOX = (0.0, 0.0, 0.0, 2.0, 2.0, 1.0)
SMOOTH_DIHEDRAL_DEG = 15.0


def cube():
    gmsh.model.occ.addBox(0.0, 0.0, 0.0, 1.0, 1.0, 1.0)
    return []


def notch():
    occ = gmsh.model.occ
    box = occ.addBox(*BOX)
    cyl = occ.addCylinder(2.0, 2.0, 0.45, 0.0, 0.0, 1.0, 0.9)
    occ.cut([(3, box)], [(3, cyl)])
    return []


def arc_box():
    occ = gmsh.model.occ
    box = occ.addBox(*BOX)
    arc = occ.addCircle(2.0, 2.0, 1.0, 1.0, angle1=math.pi, angle2=1.5 * math.pi)
    _, out_map = occ.fragment([(3, box)], [(1, arc)])
    occ.synchronize()
    return [tag for dim, tag in out_map[1] if dim == 1]


def halfsphere_box():
    occ = gmsh.model.occ
    box = occ.addBox(*BOX)
    sphere = occ.addSphere(1.0, 1.0, 1.0, 0.6)
    occ.fuse([(3, box)], [(3, sphere)])
    return []


def groove_box():
    occ = gmsh.model.occ
    box = occ.addBox(*BOX)
    depth = 0.35
    outer = occ.addCylinder(2.0, 2.0, 1.0 - depth, 0.0, 0.0, 1.0, 1.15)
    inner = occ.addCylinder(2.0, 2.0, 1.0 - depth, 0.0, 0.0, 1.0, 0.75)
    ring, _ = occ.cut([(3, outer)], [(3, inner)])
    occ.cut([(3, box)], ring)
    return []


def bulge(points, amplitude):
    x, z = points[:, 0], points[:, 2]
    out = points.copy()
    out[:, 2] = z + amplitude * z * np.sin(math.pi * x / 2.0)
    return out


FIXTURES = {
    "cube": (cube, None),
    "notch": (notch, None),
    "arc_box": (arc_box, None),
    "curved_arc_box": (arc_box, 0.8),
    "halfsphere_box": (halfsphere_box, None),
    "groove_box": (groove_box, None),
}


def triangle_normal(p, tri):
    n = np.cross(p[tri[1]] - p[tri[0]], p[tri[2]] - p[tri[0]])
    return n / np.linalg.norm(n)


def build(name, size):
    gmsh.clear()
    gmsh.model.add(name)
    builder, amplitude = FIXTURES[name]
    imprinted = set(builder())
    gmsh.model.occ.synchronize()
    gmsh.option.setNumber("Mesh.MeshSizeMax", size)
    gmsh.option.setNumber("Mesh.MeshSizeMin", 0.5 * size)
    gmsh.option.setNumber("Mesh.MeshSizeFromCurvature", 0)
    gmsh.option.setNumber("Mesh.Algorithm3D", 1)
    gmsh.option.setNumber("Mesh.Optimize", 1)
    gmsh.model.mesh.generate(3)

    tags, coords, _ = gmsh.model.mesh.getNodes()
    coords = coords.reshape(-1, 3)
    index = {int(t): i for i, t in enumerate(tags)}

    tets = []
    for etype, _, nodes in zip(*gmsh.model.mesh.getElements(3)):
        if etype == 4:
            tets.extend(nodes.reshape(-1, 4).tolist())
    used = sorted({int(n) for t in tets for n in t})
    renum = {n: i for i, n in enumerate(used)}
    points = np.array([coords[index[n]] for n in used])

    triangles = []
    surf_tris = {}
    for _, surf in gmsh.model.getEntities(2):
        for etype, _, nodes in zip(*gmsh.model.mesh.getElements(2, surf)):
            if etype != 2:
                continue
            for tri in nodes.reshape(-1, 3).tolist():
                t = [renum[int(n)] for n in tri]
                triangles.append((t, surf))
                surf_tris.setdefault(surf, []).append(t)

    edge_faces = {}
    for t, surf in triangles:
        for k in range(3):
            key = tuple(sorted((t[k], t[(k + 1) % 3])))
            edge_faces.setdefault(key, []).append((t, surf))

    edges = []
    for _, curve in gmsh.model.getEntities(1):
        up, _ = gmsh.model.getAdjacencies(1, curve)
        if len(set(int(s) for s in up)) < 2:
            continue  # seam or free curve
        segs = []
        for etype, _, nodes in zip(*gmsh.model.mesh.getElements(1, curve)):
            if etype == 1:
                segs.extend([[renum[int(n)] for n in s] for s in nodes.reshape(-1, 2).tolist()])
        if not segs:
            continue
        if curve not in imprinted:
            angles = []
            for a, b in segs:
                faces = edge_faces.get(tuple(sorted((a, b))), [])
                if len(faces) == 2:
                    n0 = triangle_normal(points, faces[0][0])
                    n1 = triangle_normal(points, faces[1][0])
                    angles.append(math.degrees(math.acos(max(-1.0, min(1.0, float(n0 @ n1))))))
            if angles and max(angles) < SMOOTH_DIHEDRAL_DEG:
                continue  # tangent-continuous CAD curve
        edges.extend((a, b, curve) for a, b in segs)

    if amplitude is not None:
        points = bulge(points, amplitude)
    tets = [[renum[int(n)] for n in t] for t in tets]
    return points, tets, triangles, edges


def write_medit(path, points, tets, triangles, edges):
    with open(path, "w") as f:
        f.write("MeshVersionFormatted 2\nDimension 3\n\n")
        f.write(f"Vertices\n{len(points)}\n")
        for p in points:
            f.write(f"{p[0]:.17g} {p[1]:.17g} {p[2]:.17g} 0\n")
        f.write(f"\nTetrahedra\n{len(tets)}\n")
        for t in tets:
            f.write(f"{t[0] + 1} {t[1] + 1} {t[2] + 1} {t[3] + 1} 0\n")
        f.write(f"\nTriangles\n{len(triangles)}\n")
        for t, surf in triangles:
            f.write(f"{t[0] + 1} {t[1] + 1} {t[2] + 1} {surf}\n")
        f.write(f"\nEdges\n{len(edges)}\n")
        for a, b, curve in edges:
            f.write(f"{a + 1} {b + 1} {curve}\n")
        f.write("\nEnd\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", type=Path, default=Path("fixtures"))
    parser.add_argument("--size", type=float, default=0.08, help="target mesh edge length")
    parser.add_argument("--only", nargs="*", choices=sorted(FIXTURES), help="subset of fixtures to build")
    args = parser.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    gmsh.initialize()
    gmsh.option.setNumber("General.Terminal", 0)
    gmsh.option.setNumber("General.NumThreads", 1)
    for name in args.only or sorted(FIXTURES):
        points, tets, triangles, edges = build(name, args.size)
        write_medit(args.out / f"{name}.mesh", points, tets, triangles, edges)
        print(f"{name}: {len(points)} vertices, {len(tets)} tets, {len(triangles)} triangles, {len(edges)} feature edges")
    gmsh.finalize()


if __name__ == "__main__":
    main()

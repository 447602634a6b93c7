"""Export OBJ meshes for a few catalog surfaces into a directory.

Usage: python scripts/make_meshes.py out_dir
"""

import argparse
import json
import pathlib

from cmc1 import catalog
from cmc1.mesh import MeshGrid, export_obj, metric_checks, sample_surface

JOBS = [
    ("horosphere", catalog.horosphere(1.0), "rectangle:-2,2,-2,2,21,21", {}),
    ("enneper", catalog.enneper_cousin(1.0), "rectangle:-1.5,1.5,-1.5,1.5,31,31", {}),
    ("enneper_dual", catalog.enneper_cousin(1.0), "rectangle:-1.5,1.5,-1.5,1.5,31,31", {"dual": True}),
    ("catenoid", catalog.catenoid_cousin(0.6), "annulus:0.05,20,40,48", {}),
    ("trinoid_patch", catalog.trinoid(-0.5, -0.5, -0.5), "disk:0.4,12,48", {"center": 0.5 + 0.3j}),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", type=pathlib.Path)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for name, data, spec, opts in JOBS:
        grid = MeshGrid.parse(spec, center=opts.get("center", 0j))
        mesh = sample_surface(data, grid, dual=opts.get("dual", False))
        info = export_obj(mesh, args.out / f"{name}.obj")
        info["metric_ok"] = metric_checks(data, mesh).ok
        print(json.dumps({name: info}))


if __name__ == "__main__":
    main()

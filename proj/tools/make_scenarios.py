#!/usr/bin/env python3
"""Regenerates the seeded scenarios under scenarios/.

The 32-node layout of the illustrative example is not published, so node
positions are drawn uniformly from a fixed seed, away from the endpoints.
"""
import json
import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "scenarios"
SOURCES = [[0, 4], [0, 8], [5, 0]]
GOAL = [10, 6.5]


def layout(seed, n=32, margin=0.6):
    rng = random.Random(seed)
    ends = SOURCES + [GOAL]
    pts = []
    while len(pts) < n:
        p = [round(rng.uniform(0.25, 9.75), 4), round(rng.uniform(0.25, 9.75), 4)]
        if all(math.dist(p, e) > margin for e in ends):
            pts.append(p)
    return pts


def disk_nodes(pts, lambdas):
    return [{"x": x, "y": y, "model": "attenuated_disk", "params": {"lambda": lam, "mu": 2}}
            for (x, y), lam in zip(pts, lambdas)]


def base(nodes, sources=SOURCES):
    return {
        "domain": {"min": [0, 0], "max": [10, 10]},
        "nodes": nodes,
        "intensity": {"mode": "max", "omega": 100},
        "sources": sources,
        "goal": GOAL,
        "grid": {"points_per_node": 100, "boundary_spacing": 0.25, "seed": 1},
        "solver": {"dt": 0.1, "speed": 1, "n_directions": 36},
    }


def write(name, doc):
    (OUT / name).write_text(json.dumps(doc, indent=2) + "\n")


def box(x0, y0, x1, y1):
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]


def main():
    OUT.mkdir(exist_ok=True)
    pts = layout(32)
    write("illustrative_32.json", base(disk_nodes(pts, [4] * 32)))

    # Obstacle progression from the first source: none, two, then five more.
    first_two = [box(4.4, 3.9, 5.4, 6.1), box(7.0, 2.7, 8.0, 4.3)]
    five_more = [box(2.1, 4.5, 2.8, 5.4), box(6.3, 6.1, 7.2, 7.3), box(8.5, 6.2, 9.3, 7.3),
                 box(5.6, 3.2, 6.4, 4.4), box(1.1, 3.3, 1.9, 4.1)]
    for stage, obstacles in enumerate([[], first_two, first_two + five_more]):
        doc = base(disk_nodes(pts, [4] * 32), sources=[SOURCES[0]])
        doc["obstacles"] = obstacles
        # Narrow gaps between boxes need a finer grid than the open field.
        doc["grid"].update(points_per_node=300, boundary_spacing=0.1)
        doc["solver"]["dt"] = 0.3
        write(f"obstacles_stage{stage}.json", doc)

    rng = random.Random(7)
    write("heterogeneous_32.json", base(disk_nodes(pts, [rng.choice([1, 3]) for _ in pts])))

    single = base([{"x": 5, "y": 5.5, "model": "attenuated_disk",
                    "params": {"lambda": 4, "mu": 2}}], sources=[[0, 5]])
    single["goal"] = [10, 5]
    single["grid"]["points_per_node"] = 3000
    write("single_node.json", single)

    write("minimal.json", {
        "domain": {"min": [0, 0], "max": [10, 10]},
        "nodes": [{"x": 5, "y": 5, "model": "attenuated_disk", "params": {"lambda": 4, "mu": 2}}],
        "sources": [[0, 4]],
        "goal": [10, 6.5],
    })

    # Settings for imported benchmark instances; `mep import --template` swaps in the nodes.
    # Exposures here are ~1e-5 over paths ~600 long, so the default floor would dominate.
    write("benchmark_template.json", {
        "domain": {"min": [0, 0], "max": [500, 500]},
        "nodes": [{"x": 250, "y": 250, "model": "noisy_probability",
                   "params": {"lambda": 100, "mu": 1, "sigma": 1, "a_threshold": 6}}],
        "intensity": {"mode": "all", "omega": 100, "eps_floor": 1e-12},
        "sources": [[0, 150]],
        "goal": [500, 350],
        "grid": {"points_per_node": 100, "boundary_spacing": 10, "seed": 1},
        "solver": {"dt": 2, "speed": 1, "n_directions": 36},
    })


if __name__ == "__main__":
    main()

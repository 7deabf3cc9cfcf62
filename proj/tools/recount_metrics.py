#!/usr/bin/env python3
"""Recount per-episode metrics from trajectory.csv and compare with metrics.csv."""
import argparse
import csv
import sys
from collections import OrderedDict


def recount(trajectory_path, v_max):
    episodes = OrderedDict()
    with open(trajectory_path, newline="") as f:
        for row in csv.DictReader(f):
            ep = episodes.setdefault(int(row["episode"]), {"steps": {}, "speed": 0.0, "samples": 0})
            step = int(row["step"])
            ep["steps"][step] = ep["steps"].get(step, False) or row["in_collision"] == "1"
            ep["speed"] += float(row["speed"]) / v_max
            ep["samples"] += 1
    out = {}
    for k, ep in episodes.items():
        steps = len(ep["steps"])
        collided = sum(1 for c in ep["steps"].values() if c)
        out[k] = (steps, collided, collided / steps, ep["speed"] / ep["samples"])
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trajectory", required=True)
    ap.add_argument("--metrics", required=True)
    ap.add_argument("--v-max", type=float, default=1.0)
    ap.add_argument("--tolerance", type=float, default=1e-12)
    args = ap.parse_args()

    counted = recount(args.trajectory, args.v_max)
    with open(args.metrics, newline="") as f:
        reported = {int(r["episode"]): r for r in csv.DictReader(f)}
    if set(counted) != set(reported):
        print(f"episode sets differ: {sorted(counted)} vs {sorted(reported)}")
        return 3
    worst = 0.0
    for k, (steps, collided, rate, speed) in counted.items():
        r = reported[k]
        if steps != int(r["steps"]) or collided != int(r["collision_steps"]):
            print(f"episode {k}: step counts differ")
            return 3
        worst = max(worst, abs(rate - float(r["collision_rate"])), abs(speed - float(r["relative_average_speed"])))
    print(f"{len(counted)} episodes, max abs difference {worst:.3e}")
    return 0 if worst <= args.tolerance else 3


if __name__ == "__main__":
    sys.exit(main())

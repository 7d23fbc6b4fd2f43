#!/usr/bin/env python3
"""Regenerate the bundled benchmark scenario file.

100 m x 100 m x 50 m region on a 10 x 10 x 10 grid (10 m x 10 m x 5 m
cells), 1 GHz carrier, four 2 W transmitters seeded at 0, five box
buildings, ground reflection on.
"""
import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from semrecon import fileio, scenario
from semrecon.raytrace import RtParams


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--k", type=int, default=4, help="transmitter count")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("-o", "--out",
                        default=str(pathlib.Path(__file__).resolve().parents[1]
                                    / "scenarios" / "benchmark_box_scene.json"))
    args = parser.parse_args()
    cfg = scenario.default_scenario(k=args.k, seed=args.seed)
    fileio.save_scenario(cfg, args.out, RtParams(ground_reflection=True))
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Sweep the SimplePop model across seeds and rates from the host side.

Demonstrates driving the interpreter as a library: one fresh
interpreter per run, seeded explicitly, reading the trajectory back out
of the reference object.

Usage: python3 scripts/population_sweep.py [generations]
"""

import sys
from pathlib import Path

from mls.interpreter import Interpreter

CORPUS = Path(__file__).resolve().parents[1] / "corpus"


def trajectory(seed, birth, death, size, generations):
    interp = Interpreter()
    class_def = (CORPUS / "simplepop.mls").read_text().split("p <- SimplePop")[0]
    interp.eval_source(class_def)
    interp.rng_set_seed(seed)
    interp.eval_source(f"p <- SimplePop(birth = {birth}, death = {death}, size = {size})")
    interp.eval_source(f"i <- 0\nwhile (i < {generations}) {{ p$evolve(); i <- i + 1 }}")
    return interp.eval_source("p$size").payload


def main():
    generations = int(sys.argv[1]) if len(sys.argv) > 1 else 40
    print(f"{'seed':>6} {'birth':>6} {'death':>6} {'final':>6}  trajectory tail")
    for seed in (1, 7, 42):
        for birth, death in ((0.08, 0.1), (0.1, 0.08), (0.1, 0.1)):
            sizes = trajectory(seed, birth, death, 100, generations)
            tail = " ".join(str(s) for s in sizes[-8:])
            print(f"{seed:>6} {birth:>6} {death:>6} {sizes[-1]:>6}  ... {tail}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

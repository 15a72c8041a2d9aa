#!/usr/bin/env python3
"""Regenerate tests/fixtures from forward solves of the spectralmix CLI.

usage: make_fixtures.py PATH_TO_SPECTRALMIX_BINARY
"""

import csv
import json
import pathlib
import subprocess
import sys
import tempfile

HERE = pathlib.Path(__file__).resolve().parent
FIXTURES = HERE.parent / "tests" / "fixtures"


def forward(binary, potential, bc, n):
    with tempfile.TemporaryDirectory() as tmp:
        inp = pathlib.Path(tmp) / "in.json"
        inp.write_text(json.dumps({"potential": potential, "bc": bc, "n_max": n}))
        subprocess.run([binary, "forward", "--input", str(inp), "--output", tmp], check=True, stdout=subprocess.DEVNULL)
        with open(pathlib.Path(tmp) / "spectrum.csv") as f:
            rows = list(csv.DictReader(f))
    return [float(r["eigenvalue"]) for r in rows], [float(r["mass"]) for r in rows]


def save(name, obj):
    (FIXTURES / name).write_text(json.dumps(obj, indent=2) + "\n")


def main():
    binary = sys.argv[1]
    FIXTURES.mkdir(parents=True, exist_ok=True)
    zero = {"kind": "zero"}
    n = 40
    a, gamma = forward(binary, zero, "DD", n)
    b, _ = forward(binary, zero, "ND", n)

    def mixed(hidden, masses):
        return {
            "spectrum": a,
            "bc": "DD",
            "A": hidden,
            "known_zeros": {str(i + 1): b[i] for i in range(n) if i + 1 not in hidden},
            "masses": {str(k): v for k, v in masses.items()},
        }

    save("free-A1.json", mixed([1], {1: gamma[0]}))
    save("free-A-empty.json", mixed([], {}))
    # no zero inside the interlacing box reproduces a mass fifty times too large
    save("free-corrupted-mass.json", mixed([1], {1: 50.0 * gamma[0]}))

    save("forward-free-dd.json", {"potential": zero, "bc": "DD", "n_max": 5})
    save("mfunc-free.json", {"potential": zero, "bc": "DD", "exclusion": 0.05, "n_markers": 6})

    cos = {"kind": "cosine", "params": [1.0, 2.0]}
    s1, _ = forward(binary, cos, "DD", 10)
    s2, _ = forward(binary, cos, "ND", 10)
    save(
        "reconstruct-cosine.json",
        {
            "spectrum1": s1,
            "spectrum2": s2,
            "bc": {"alpha1": 0.0, "alpha2": 1.5707963267948966, "beta": 0.0},
            "family": {"kind": "cosine", "params": [0.0, 0.0]},
        },
    )
    ks = list(range(1, 21))
    save("hypotheses-harmonic.json", {"potential": zero, "bc": "DD", "k": ks, "l": ks})


if __name__ == "__main__":
    main()

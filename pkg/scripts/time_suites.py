"""Wall-clock time of each property suite at its acceptance size."""

import argparse
import time

from adelekit.suites import run_suite

SIZES = {
    "cosimplicial": {"samples": 100},
    "flasque": {"samples": 100, "kernels": 50},
    "homotopy": {},
    "descent": {"samples": 50},
    "weil": {"samples": 30},
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("names", nargs="*", default=list(SIZES))
    a = ap.parse_args()
    for name in a.names:
        t0 = time.perf_counter()
        rep = run_suite(name, seed=a.seed, **SIZES[name])
        print(f"{name:13s} {'pass' if rep.passed else 'FAIL'} {time.perf_counter() - t0:7.2f}s")


if __name__ == "__main__":
    main()

"""Compare the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 200]
"""
import argparse
import timeit

import numpy as np

from hybd import _kernels_py

try:
    from hybd import _kernels
except ImportError:
    _kernels = None


def cases(rng):
    gamma = rng.exponential(2.0, 32)
    wexp = np.repeat(rng.uniform(0.5, 3.0, 16), 2)
    h = rng.standard_normal((16, 256)) + 1j * rng.standard_normal((16, 256))
    codebook = np.fft.ifft(np.eye(16), norm="ortho")
    return {
        "waterfill_level (32 streams)": lambda m: m.waterfill_level(gamma, wexp, 32.0, 1e-10, 200),
        "l1_scores (16x256)": lambda m: m.l1_scores(codebook, h),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    backends = [("python", _kernels_py)]
    if _kernels is not None:
        backends.append(("compiled", _kernels))
    else:
        print("compiled extension not built; timing the Python fallback only")
    for name, fn in cases(rng).items():
        times = {}
        for label, mod in backends:
            fn(mod)
            times[label] = min(timeit.repeat(lambda: fn(mod), number=args.repeat, repeat=3)) / args.repeat
        line = "  ".join(f"{k}={v * 1e6:9.2f} us" for k, v in times.items())
        if len(times) == 2:
            line += f"  speedup={times['python'] / times['compiled']:.1f}x"
        print(f"{name:<30s} {line}")


if __name__ == "__main__":
    main()

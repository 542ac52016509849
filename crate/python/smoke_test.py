"""Smoke test for the compiled `widthlab` extension.

Build and run:

    cargo build --release -p widthlab-py --features extension-module
    cp target/release/libwidthlab_py.so python/widthlab.so
    python3 python/smoke_test.py
"""

import math

import widthlab

LN2 = math.log(2.0)


def check(name, ok, detail=""):
    print(f"{'ok  ' if ok else 'FAIL'} {name} {detail}")
    return ok


def main():
    results = []

    d = widthlab.embedding_widths([1.0], [0.5], 64)
    results.append(check("widths are 2^-m", all(v == 0.5 ** (m + 1) for m, v in enumerate(d))))

    slope = widthlab.fitted_slope([1.0], [0.5], 512)
    results.append(check("1d slope", abs(slope - LN2) < 1e-10, f"{slope:.12f}"))

    slope2 = widthlab.fitted_slope([1.0, 1.0], [0.5, 0.5], 20000)
    target = widthlab.target_slope([1.0, 1.0], [0.5, 0.5])
    results.append(check("2d slope", abs(slope2 / target - 1) < 0.05, f"{slope2:.6f} vs {target:.6f}"))

    ln_lo, ln_hi = widthlab.ln_supnorm_bounds([1.0, 2.0], [0.5, 0.6], 2000)
    results.append(check("sandwich", all(lo <= hi for lo, hi in zip(ln_lo, ln_hi))))

    cap = widthlab.product_capacity([1.0], [0.5])
    poly = widthlab.product_capacity([1.0], [0.5], p=[2])
    results.append(check("capacities", abs(cap - 2 * math.pi / LN2) < 1e-12 and abs(poly - 2 * cap) < 1e-12))
    results.append(check("sublevel", abs(widthlab.sublevel_capacity([1.0], [0.25], 0.5) / widthlab.product_capacity([1.0], [0.25]) - 2) < 1e-12))

    fd = widthlab.fd_annulus_capacity(1.0, 0.5, 256)
    results.append(check("fd annulus", abs(fd / cap - 1) < 0.03, f"{fd:.4f}"))

    k = 200.0
    ln_b, density = widthlab.kernel_diagonal([1.0], [1.0], k, [0.3 + 0j])
    ratio = math.exp(ln_b - 2 * k * 0.09 - math.log(k)) / density
    results.append(check("bergman density", abs(ratio - 1) < 0.02, f"{ratio:.6f}"))

    counts = widthlab.concentration_counts(1.0, 1.0, 0.6, 0.5, [200.0])
    results.append(check("concentration", abs(counts[0] / 200 - 0.72) <= 0.05, str(counts)))

    rows = widthlab.bw_error_table([1.0], [0.5], 200)
    results.append(check("bw dominance", all(e <= bound for _, e, bound in rows)))

    try:
        widthlab.embedding_widths([1.0], [1.5], 8)
        results.append(check("b >= a rejected", False))
    except ValueError as e:
        results.append(check("b >= a rejected", True, str(e)))

    if not all(results):
        raise SystemExit(1)
    print("all smoke checks passed")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Generate a test fixture of zeta-zero ordinates (one per line, ascending).

The library never computes zeros; it ingests tables. This script exists only
to produce a table for the test suite in environments where the published
tables cannot be downloaded. Ordinates come from a vectorized Riemann-Siegel
evaluation of Z(t) (remainder terms C0..C4), isolated by sign changes between
Gram points and polished by regula falsi. Low zeros and spot checks are
cross-validated against mpmath.

usage: gen_zero_fixture.py COUNT OUT_PATH
"""
import math
import sys

import mpmath
import numpy as np

TWO_PI = 2.0 * math.pi


def _psi(p):
    return mpmath.cos(2 * mpmath.pi * (p * p - p - mpmath.mpf(1) / 16)) / mpmath.cos(2 * mpmath.pi * p)


def _remainder_fits(degree=60, nodes=160):
    """Chebyshev fits of the Riemann-Siegel correction functions C0..C4 on [0, 1]."""
    mpmath.mp.dps = 60
    pi = mpmath.pi
    xs = [0.5 - 0.5 * math.cos(math.pi * (k + 0.5) / nodes) for k in range(nodes)]
    cols = [[] for _ in range(5)]
    for x in xs:
        p = mpmath.mpf(x)
        d = [mpmath.diff(_psi, p, n) for n in range(13)]
        c0 = d[0]
        c1 = -d[3] / (96 * pi**2)
        c2 = d[2] / (64 * pi**2) + d[6] / (18432 * pi**4)
        c3 = -d[1] / (64 * pi**2) - d[5] / (3840 * pi**4) - d[9] / (5308416 * pi**6)
        c4 = (d[0] / (128 * pi**2) + 19 * d[4] / (24576 * pi**4)
              + 11 * d[8] / (5898240 * pi**6) + d[12] / (2038431744 * pi**8))
        for col, v in zip(cols, (c0, c1, c2, c3, c4)):
            col.append(float(v))
    u = 2.0 * np.array(xs) - 1.0
    return [np.polynomial.chebyshev.chebfit(u, np.array(c), degree) for c in cols]


FITS = None


def theta(t):
    t = np.asarray(t, dtype=np.float64)
    return (t / 2.0 * np.log(t / TWO_PI) - t / 2.0 - math.pi / 8.0
            + 1.0 / (48.0 * t) + 7.0 / (5760.0 * t**3) + 31.0 / (80640.0 * t**5))


def siegel_z(t):
    t = np.asarray(t, dtype=np.float64)
    out = np.empty_like(t)
    a = np.sqrt(t / TWO_PI)
    m = np.floor(a).astype(np.int64)
    p = a - m
    th = theta(t)
    mmax = int(m.max())
    logs = np.log(np.arange(1, mmax + 1, dtype=np.float64))
    inv_sqrt = 1.0 / np.sqrt(np.arange(1, mmax + 1, dtype=np.float64))
    chunk = max(1, 4_000_000 // max(mmax, 1))
    for s in range(0, t.size, chunk):
        ts = t[s:s + chunk]
        ms = m[s:s + chunk]
        ph = th[s:s + chunk, None] - ts[:, None] * logs[None, :]
        terms = np.cos(ph) * inv_sqrt[None, :]
        mask = np.arange(1, mmax + 1)[None, :] <= ms[:, None]
        out[s:s + chunk] = 2.0 * np.sum(terms * mask, axis=1)
    u = 2.0 * p - 1.0
    w = np.sqrt(TWO_PI / t)
    rem = np.zeros_like(t)
    for k in range(4, -1, -1):
        rem = rem * w + np.polynomial.chebyshev.chebval(u, FITS[k])
    sign = np.where((m - 1) % 2 == 0, 1.0, -1.0)
    return out + sign * (TWO_PI / t) ** 0.25 * rem


def gram_points(kmax):
    k = np.arange(-1, kmax + 1, dtype=np.float64)
    # initial guess from the leading asymptotic, then Newton on theta(t) = k*pi
    t = TWO_PI * np.exp(1.0 + np.real(_lambertw((k + 0.125) / math.e)))
    for _ in range(50):
        f = theta(t) - k * math.pi
        fp = 0.5 * np.log(t / TWO_PI)
        t = t - f / fp
    return k.astype(np.int64), t


def _lambertw(x):
    w = np.log1p(x)
    for _ in range(100):
        ew = np.exp(w)
        w = w - (w * ew - x) / (ew * (w + 1.0))
    return w


def refine(lo, hi, zlo, zhi, iters=60):
    a, b, fa, fb = lo.copy(), hi.copy(), zlo.copy(), zhi.copy()
    side = np.zeros(a.size, dtype=np.int8)
    for _ in range(iters):
        c = (a * fb - b * fa) / (fb - fa)
        bad = ~((c > a) & (c < b))
        c[bad] = 0.5 * (a[bad] + b[bad])
        fc = siegel_z(c)
        left = np.sign(fc) == np.sign(fa)
        # Illinois modification
        a = np.where(left, c, a)
        fa_new = np.where(left, fc, fa)
        fb_new = np.where(left, np.where(side == 1, fb * 0.5, fb), fc)
        fa_new = np.where(~left & (side == -1), fa_new * 0.5, fa_new)
        b = np.where(left, b, c)
        side = np.where(left, 1, -1).astype(np.int8)
        fa, fb = fa_new, fb_new
        if np.max(b - a) < 1e-11:
            break
    return 0.5 * (a + b)


def isolate(ts, zs):
    s = np.sign(zs)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    return ts[idx], ts[idx + 1], zs[idx], zs[idx + 1]


def main():
    global FITS
    count = int(sys.argv[1])
    out_path = sys.argv[2]
    FITS = _remainder_fits()

    mpmath.mp.dps = 20
    for tt in (14.5, 100.3, 1234.5, 50000.25, 74000.1):
        ref = float(mpmath.siegelz(tt))
        got = float(siegel_z(np.array([tt]))[0])
        print(f"Z({tt}) rs={got:.12f} mp={ref:.12f} diff={got - ref:.2e}", file=sys.stderr)

    kmax = count + 64
    ks, g = gram_points(kmax)
    sub = 24
    frac = np.arange(sub, dtype=np.float64) / sub
    ts = (g[:-1, None] + (g[1:] - g[:-1])[:, None] * frac[None, :]).ravel()
    ts = np.append(ts, g[-1])
    ts = ts[ts > 14.0]
    zs = siegel_z(ts)
    lo, hi, zlo, zhi = isolate(ts, zs)
    print(f"isolated {lo.size} sign changes below {ts[-1]:.3f}", file=sys.stderr)

    # Gram-point consistency: at good Gram points the count must be k+1.
    # A missed close pair shows up as a deficit of 2 from some point on;
    # resample the offending Gram intervals densely until consistent.
    zg = siegel_z(g)
    good = (((-1.0) ** ks) * zg > 0) & (g > 20.0)
    for _ in range(50):
        found = np.searchsorted(lo, g)
        bad = np.nonzero(good & (found != ks + 1))[0]
        if bad.size == 0:
            break
        k1 = bad[0]
        ok = np.nonzero(good[:k1] & (found[:k1] == ks[:k1] + 1))[0]
        k0 = ok[-1] if ok.size else 0
        print(f"resampling Gram interval [{g[k0]:.4f}, {g[k1]:.4f}]", file=sys.stderr)
        fine = np.linspace(g[k0], g[k1], 4096 * (k1 - k0) + 1)
        zf = siegel_z(fine)
        flo, fhi, fzlo, fzhi = isolate(fine, zf)
        keep = (lo < g[k0]) | (lo >= g[k1])
        lo = np.concatenate([lo[keep], flo])
        order = np.argsort(lo)
        hi = np.concatenate([hi[keep], fhi])[order]
        zlo = np.concatenate([zlo[keep], fzlo])[order]
        zhi = np.concatenate([zhi[keep], fzhi])[order]
        lo = lo[order]
    else:
        sys.exit("zero isolation incomplete")

    roots = refine(lo, hi, zlo, zhi)
    roots = roots[:count]
    if roots.size < count:
        sys.exit("not enough zeros isolated")

    # low zeros: polish with mpmath where the asymptotic remainder is weakest
    mpmath.mp.dps = 25
    for i in range(min(200, count)):
        roots[i] = float(mpmath.zetazero(i + 1).imag)
    for i in sorted({200, 1000, count // 2, count - 1}):
        if i < count:
            ref = float(mpmath.zetazero(i + 1).imag)
            print(f"zero #{i + 1}: {roots[i]:.10f} vs mpmath {ref:.10f} ({roots[i] - ref:.1e})",
                  file=sys.stderr)
    assert np.all(np.diff(roots) > 0)

    with open(out_path, "w") as fh:
        fh.write(f"# ordinates of the first {count} nontrivial zeros of zeta(s), rho = 1/2 + i*gamma\n")
        fh.write("# generated by scripts/gen_zero_fixture.py (Riemann-Siegel, cross-checked with mpmath)\n")
        for r in roots:
            fh.write(f"{r:.9f}\n")


if __name__ == "__main__":
    main()

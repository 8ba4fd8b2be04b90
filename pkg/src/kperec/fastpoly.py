"""numpy-backed dense arithmetic for F_p[t] at large degrees.

Coefficient vectors are 1-D int64 arrays, reduced mod p, highest nonzero
last (empty array = 0).  Large products go through a float64 FFT; with
coefficients below p <= 97 and transform sizes below 2^28 the classical
worst-case rounding bound stays far under 1/2, so rounding recovers the
integer convolution exactly.  A residual assertion and coefficient
spot-checks guard the regime anyway.
"""

from __future__ import annotations

import random

import numpy as np

_CONV_DIRECT_MAX = 1 << 20   # n*m at or below this: exact int64 convolve
_SMALL_MIN = 64              # one factor this short: always direct convolve
_FFT_SIZE_LIMIT = 1 << 28
_spot_rng = random.Random(0x5EED)


def trim(a):
    n = len(a)
    while n and a[n - 1] == 0:
        n -= 1
    return a[:n]


def from_coeffs(coeffs):
    return trim(np.array(coeffs, dtype=np.int64))


def to_tuple(a):
    return tuple(int(c) for c in a)


def deg(a):
    return len(a) - 1


def fp_mul(a, b, p):
    """Product in F_p[t], exact on every path."""
    a, b = trim(a), trim(b)
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return np.zeros(0, dtype=np.int64)
    if min(n, m) <= _SMALL_MIN or n * m <= _CONV_DIRECT_MAX:
        return trim(np.convolve(a, b) % p)
    size = 1 << (n + m - 1).bit_length()
    if size > _FFT_SIZE_LIMIT:
        raise ArithmeticError(
            f"product of degree {n + m - 2} exceeds the certified FFT regime")
    fa = np.fft.rfft(a, size)
    fb = np.fft.rfft(b, size)
    cf = np.fft.irfft(fa * fb, size)[: n + m - 1]
    c = np.rint(cf)
    if np.max(np.abs(cf - c)) > 0.25:
        raise ArithmeticError("FFT convolution lost integrality")
    c = c.astype(np.int64)
    for _ in range(2):
        k = _spot_rng.randrange(n + m - 1)
        lo, hi = max(0, k - m + 1), min(k, n - 1)
        direct = int(np.dot(a[lo:hi + 1], b[k - hi:k - lo + 1][::-1]))
        if direct != int(c[k]):
            raise ArithmeticError("FFT convolution failed a spot check")
    return trim(c % p)


def fp_series_inverse(f, n, p):
    """Inverse of f as a power series mod t^n (f[0] must be invertible)."""
    f = trim(f)
    if len(f) == 0 or f[0] % p == 0:
        raise ZeroDivisionError("series inverse needs a unit constant term")
    g = np.array([pow(int(f[0]), p - 2, p)], dtype=np.int64)
    prec = 1
    while prec < n:
        prec = min(2 * prec, n)
        fg = fp_mul(f[:prec], g, p)
        fg = fg[:prec] if len(fg) > prec else fg
        two_minus = (-fg) % p
        if len(two_minus) == 0:
            two_minus = np.zeros(1, dtype=np.int64)
        two_minus[0] = (two_minus[0] + 2) % p
        g = fp_mul(g, two_minus, p)
        g = g[:prec] if len(g) > prec else g
    return trim(g[:n])


_inv_cache = {}


def _cached_rev_inverse(d, p, prec):
    """Series inverse of reversed(d) mod t^prec, cached and Newton-extended."""
    key = (p, d.tobytes())
    rd = d[::-1].copy()
    cached = _inv_cache.get(key)
    if cached is None or len(cached) < prec:
        g = cached if cached is not None else np.array(
            [pow(int(rd[0]), p - 2, p)], dtype=np.int64)
        cur = len(g)
        while cur < prec:
            cur = min(2 * cur, prec)
            fg = fp_mul(rd[:cur], g, p)
            fg = fg[:cur] if len(fg) > cur else fg
            two_minus = (-fg) % p
            if len(two_minus) == 0:
                two_minus = np.zeros(1, dtype=np.int64)
            two_minus[0] = (two_minus[0] + 2) % p
            g = fp_mul(g, two_minus, p)
            g = g[:cur] if len(g) > cur else g
        if len(g) < prec:
            g = np.concatenate([g, np.zeros(prec - len(g), dtype=np.int64)])
        _inv_cache[key] = g
        cached = g
    return cached[:prec]


def fp_divmod(a, d, p):
    """Euclidean division by monic d: a = q*d + r, deg r < deg d."""
    a, d = trim(a), trim(d)
    if len(d) == 0:
        raise ZeroDivisionError("division by zero polynomial")
    if int(d[-1]) % p != 1:
        raise ValueError("fp_divmod expects a monic divisor")
    n, k = len(a), len(d)
    if n < k:
        return np.zeros(0, dtype=np.int64), a.copy()
    if n <= 4096:
        r = [int(c) for c in a]
        dl = [int(c) for c in d]
        q = [0] * (n - k + 1)
        for i in range(n - k, -1, -1):
            c = r[i + k - 1] % p
            if c:
                q[i] = c
                for j in range(k):
                    r[i + j] = (r[i + j] - c * dl[j]) % p
        return (trim(np.array(q, dtype=np.int64)),
                trim(np.array(r[: k - 1], dtype=np.int64)))
    qlen = n - k + 1
    inv = _cached_rev_inverse(d, p, qlen)
    ra = a[::-1][:qlen].copy()
    q = fp_mul(ra, inv, p)
    q = q[:qlen] if len(q) > qlen else q
    if len(q) < qlen:
        q = np.concatenate([q, np.zeros(qlen - len(q), dtype=np.int64)])
    q = trim(q[::-1].copy())
    if k == 1:
        return q, np.zeros(0, dtype=np.int64)
    qlow = trim(q[: k - 1].copy()) if len(q) else np.zeros(0, dtype=np.int64)
    low = fp_mul(d, qlow, p) if len(qlow) else np.zeros(0, dtype=np.int64)
    r = a[: k - 1].copy()
    if len(low):
        low = low[: k - 1]
        r[: len(low)] = (r[: len(low)] - low) % p
    return q, trim(r % p)


def fp_divisible(a, d, p):
    _, r = fp_divmod(a, d, p)
    return len(r) == 0


def fp_divexact(a, d, p):
    q, r = fp_divmod(a, d, p)
    if len(r):
        raise ArithmeticError("division was not exact")
    return q

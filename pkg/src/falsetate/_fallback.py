"""Pure Python / numpy versions of the compiled kernels in ``_kernels.pyx``.

Signatures and results match the compiled module exactly; only speed differs.
"""

from __future__ import annotations

import math

import numpy as np

NAIVE_CUTOFF = 1500
FAILED = -(1 << 62)


def _ap_naive_short(A: int, B: int, q: int) -> int:
    x = np.arange(q, dtype=np.int64)
    f = ((x * x % q) * x + A * x + B) % q
    squares = np.zeros(q, dtype=bool)
    squares[(x[1:] * x[1:]) % q] = True
    nonzero = f != 0
    chi = np.where(squares[f], 1, -1)
    return -int(chi[nonzero].sum())


def _add(P, Q, A: int, q: int):
    if P is None:
        return Q
    if Q is None:
        return P
    if P[0] == Q[0]:
        if (P[1] + Q[1]) % q == 0:
            return None
        lam = (3 * P[0] * P[0] + A) * pow(2 * P[1], -1, q) % q
    else:
        lam = (Q[1] - P[1]) * pow(Q[0] - P[0], -1, q) % q
    x = (lam * lam - P[0] - Q[0]) % q
    return x, (lam * (P[0] - x) - P[1]) % q


def _mul(P, n: int, A: int, q: int):
    R = None
    while n > 0:
        if n & 1:
            R = _add(R, P, A, q)
        P = _add(P, P, A, q)
        n >>= 1
    return R


def _order_multiples(P, A: int, q: int, lo: int, hi: int, cap: int) -> list[int]:
    width = hi - lo
    m = math.isqrt(width) + 1
    s = 2 * m + 1
    babies: dict[int, list[tuple[int, int]]] = {}
    cur = None
    for j in range(m + 1):
        if cur is not None:
            babies.setdefault(cur[0], []).append((cur[1], j))
        cur = _add(cur, P, A, q)
    G = _mul(P, s, A, q)
    R = _mul(P, lo, A, q)
    out: list[int] = []
    for k in range((width + m) // s + 2):
        base = lo + k * s
        if R is None:
            if lo <= base <= hi and base not in out:
                out.append(base)
        else:
            for y, j in babies.get(R[0], ()):
                n = base - j if y == R[1] else base + j
                if lo <= n <= hi and n not in out:
                    out.append(n)
        if len(out) >= cap:
            return out[:cap]
        R = _add(R, G, A, q)
    return out


class _XorShift:
    def __init__(self, seed: int) -> None:
        self.state = seed & 0xFFFFFFFFFFFFFFFF

    def next(self) -> int:
        x = self.state
        x ^= (x << 13) & 0xFFFFFFFFFFFFFFFF
        x ^= x >> 7
        x ^= (x << 17) & 0xFFFFFFFFFFFFFFFF
        self.state = x
        return x


def _ap_bsgs(A: int, B: int, q: int, rng: _XorShift) -> int:
    r = math.isqrt(4 * q)
    lo, hi = q + 1 - r, q + 1 + r
    cand: set[int] | None = None
    for _ in range(60):
        x0 = rng.next() % q
        f = (x0 * x0 * x0 + A * x0 + B) % q
        if f == 0:
            continue
        chi = 1 if pow(f, (q - 1) // 2, q) == 1 else -1
        Af = A * f * f % q
        found = _order_multiples((f * x0 % q, f * f % q), Af, q, lo, hi, 64)
        if not found or len(found) >= 64:
            continue
        values = {chi * (q + 1 - n) for n in found}
        cand = values if cand is None else cand & values
        if cand is not None and len(cand) == 1:
            return next(iter(cand))
        if cand is not None and not cand:
            cand = None
    return FAILED


def ap_array(ainv, primes: np.ndarray, A_mod: np.ndarray, B_mod: np.ndarray,
             seed: int = 0x9E3779B97F4A7C15) -> np.ndarray:
    out = np.zeros(len(primes), dtype=np.int64)
    rng = _XorShift(seed)
    for i, (q, A, B) in enumerate(zip(primes.tolist(), A_mod.tolist(), B_mod.tolist())):
        if q < NAIVE_CUTOFF:
            out[i] = _ap_naive_short(A, B, q)
        else:
            out[i] = _ap_bsgs(A, B, q, rng)
    return out


def build_coeffs(M: int, small_q: np.ndarray, small_series: np.ndarray,
                 large_q: np.ndarray, large_lin: np.ndarray) -> np.ndarray:
    a = np.ones(M + 1, dtype=np.int64)
    a[0] = 0
    K = small_series.shape[1]
    for i, q in enumerate(small_q.tolist()):
        qk = 1
        for k in range(1, K):
            if qk > M // q:
                break
            qk *= q
            c = int(small_series[i, k])
            if c == 1:
                continue
            idx = np.arange(qk, M + 1, qk)
            idx = idx[(idx // qk) % q != 0]
            a[idx] *= c
    for q, c in zip(large_q.tolist(), large_lin.tolist()):
        if c != 1:
            a[q::q] *= c
    return a


def kernel_sum(a: np.ndarray, scale: float, power: int, u0: float, h: float,
               cheb: np.ndarray, log_floor: float) -> tuple[float, float]:
    nint, deg = cheb.shape
    n = np.nonzero(a)[0]
    n = n[n >= 1]
    u = np.log(n * scale)
    keep = u < u0 + h * nint
    n, u = n[keep], np.maximum(u[keep], u0)
    k = np.minimum(((u - u0) / h).astype(np.int64), nint - 1)
    t = 2.0 * (u - u0 - k * h) / h - 1.0
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    for j in range(deg - 1, 0, -1):
        b0 = 2.0 * t * b1 - b2 + cheb[k, j]
        b2, b1 = b1, b0
    val = t * b1 - b2 + cheb[k, 0]
    good = val >= log_floor
    terms = a[n[good]].astype(np.float64) * np.exp(val[good])
    if power == 1:
        terms /= n[good]
    return math.fsum(terms.tolist()), float(np.abs(terms).sum())

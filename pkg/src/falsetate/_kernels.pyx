# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: Frobenius traces, Dirichlet coefficients, kernel sums.

Every function here has a numpy twin in ``_fallback.py`` with the same
signature and the same results; ``falsetate.kernels`` picks one at import.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log
from libc.stdlib cimport malloc, free, qsort

cnp.import_array()

ctypedef long long i64
ctypedef unsigned long long u64

cdef int NAIVE_CUTOFF = 1500


# ---------------------------------------------------------------------------
# modular helpers (moduli below 2^31, so products fit in 63 bits)
# ---------------------------------------------------------------------------

cdef inline i64 mulmod(i64 a, i64 b, i64 q) nogil:
    return (a * b) % q

cdef inline i64 powmod(i64 a, i64 e, i64 q) nogil:
    cdef i64 r = 1
    a %= q
    if a < 0:
        a += q
    while e > 0:
        if e & 1:
            r = (r * a) % q
        a = (a * a) % q
        e >>= 1
    return r

cdef inline i64 invmod(i64 a, i64 q) nogil:
    cdef i64 t = 0, newt = 1, r = q, newr = a % q, quo, tmp
    if newr < 0:
        newr += q
    while newr != 0:
        quo = r // newr
        tmp = t - quo * newt
        t = newt
        newt = tmp
        tmp = r - quo * newr
        r = newr
        newr = tmp
    if t < 0:
        t += q
    return t

cdef inline int legendre(i64 a, i64 q) nogil:
    a %= q
    if a < 0:
        a += q
    if a == 0:
        return 0
    if powmod(a, (q - 1) >> 1, q) == 1:
        return 1
    return -1

cdef inline u64 xorshift(u64 *state) nogil:
    cdef u64 x = state[0]
    x ^= x << 13
    x ^= x >> 7
    x ^= x << 17
    state[0] = x
    return x


# ---------------------------------------------------------------------------
# affine points on Y^2 = X^3 + A X + B over F_q; infinity flagged by inf = 1
# ---------------------------------------------------------------------------

cdef struct Pt:
    i64 x
    i64 y
    int inf

cdef inline Pt pt_add(Pt P, Pt Q, i64 A, i64 q) nogil:
    cdef Pt R
    cdef i64 lam, num, den
    if P.inf:
        return Q
    if Q.inf:
        return P
    if P.x == Q.x:
        if (P.y + Q.y) % q == 0:
            R.inf = 1
            R.x = 0
            R.y = 0
            return R
        num = (3 * mulmod(P.x, P.x, q) + A) % q
        den = (2 * P.y) % q
    else:
        num = (Q.y - P.y) % q
        den = (Q.x - P.x) % q
    if num < 0:
        num += q
    if den < 0:
        den += q
    lam = mulmod(num, invmod(den, q), q)
    R.inf = 0
    R.x = (mulmod(lam, lam, q) - P.x - Q.x) % q
    if R.x < 0:
        R.x += q
    R.y = (mulmod(lam, (P.x - R.x + q) % q, q) - P.y) % q
    if R.y < 0:
        R.y += q
    return R

cdef inline Pt pt_neg(Pt P, i64 q) nogil:
    cdef Pt R = P
    if not P.inf:
        R.y = (q - P.y) % q
    return R

cdef Pt pt_mul(Pt P, i64 n, i64 A, i64 q) nogil:
    cdef Pt R
    R.inf = 1
    R.x = 0
    R.y = 0
    if n < 0:
        P = pt_neg(P, q)
        n = -n
    while n > 0:
        if n & 1:
            R = pt_add(R, P, A, q)
        P = pt_add(P, P, A, q)
        n >>= 1
    return R

cdef struct Baby:
    i64 x
    i64 y
    i64 j

cdef int baby_cmp(const void *a, const void *b) noexcept nogil:
    cdef i64 xa = (<Baby *>a).x
    cdef i64 xb = (<Baby *>b).x
    if xa < xb:
        return -1
    if xa > xb:
        return 1
    return 0


cdef i64 isqrt_i64(i64 n) nogil:
    cdef i64 r = <i64>(n ** 0.5)
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


cdef int order_multiples(Pt P, i64 A, i64 q, i64 lo, i64 hi, i64 *out, int cap) nogil:
    """All n in [lo, hi] with nP = O; returns the count (at most cap)."""
    cdef i64 width = hi - lo
    cdef i64 m = isqrt_i64(width) + 1
    cdef i64 s = 2 * m + 1
    cdef Baby *babies = <Baby *>malloc((m + 1) * sizeof(Baby))
    cdef Pt cur, G, R
    cdef i64 j, k, kmax, n, left, right, mid
    cdef int count = 0, found, t
    cur.inf = 1
    cur.x = 0
    cur.y = 0
    for j in range(m + 1):
        babies[j].x = -1 if cur.inf else cur.x
        babies[j].y = cur.y
        babies[j].j = j
        cur = pt_add(cur, P, A, q)
    qsort(babies, m + 1, sizeof(Baby), baby_cmp)
    G = pt_mul(P, s, A, q)
    R = pt_mul(P, lo, A, q)
    kmax = (width + m) // s + 1
    for k in range(kmax + 1):
        # locate x(R) among baby steps
        if R.inf:
            n = lo + k * s
            if n >= lo and n <= hi and count < cap:
                out[count] = n
                count += 1
        else:
            left = 0
            right = m
            while left < right:
                mid = (left + right) >> 1
                if babies[mid].x < R.x:
                    left = mid + 1
                else:
                    right = mid
            while left <= m and babies[left].x == R.x:
                j = babies[left].j
                if babies[left].y == R.y:
                    n = lo + k * s - j
                else:
                    n = lo + k * s + j
                if n >= lo and n <= hi and count < cap:
                    found = 0
                    for t in range(count):
                        if out[t] == n:
                            found = 1
                    if not found:
                        out[count] = n
                        count += 1
                left += 1
        R = pt_add(R, G, A, q)
    free(babies)
    return count


cdef i64 ap_naive_short(i64 A, i64 B, i64 q, unsigned char *sq) nogil:
    """a_q of Y^2 = X^3 + A X + B by summing Legendre symbols (squares table)."""
    cdef i64 x, f, total = 0
    for x in range(q):
        f = (mulmod(mulmod(x, x, q), x, q) + mulmod(A, x, q) + B) % q
        if f == 0:
            continue
        if sq[f]:
            total += 1
        else:
            total -= 1
    return -total


cdef i64 ap_bsgs(i64 A, i64 B, i64 q, u64 *state) nogil:
    """a_q via baby-step giant-step on random points of E and its quadratic twist."""
    cdef i64 lo, hi, r, x0, f, chi, cand[64], found[64]
    cdef int ncand = -1, nf, i, j, keep, tries
    cdef Pt P
    cdef i64 Af, Bf
    r = isqrt_i64(4 * q)  # floor(2 sqrt q)
    lo = q + 1 - r
    hi = q + 1 + r
    for tries in range(60):
        x0 = <i64>(xorshift(state) % <u64>q)
        f = (mulmod(mulmod(x0, x0, q), x0, q) + mulmod(A, x0, q) + B) % q
        if f == 0:
            continue
        chi = legendre(f, q)
        # (f x0, f^2) lies on Y^2 = X^3 + A f^2 X + B f^3
        Af = mulmod(A, mulmod(f, f, q), q)
        Bf = mulmod(B, mulmod(mulmod(f, f, q), f, q), q)
        P.inf = 0
        P.x = mulmod(f, x0, q)
        P.y = mulmod(f, f, q)
        nf = order_multiples(P, Af, q, lo, hi, found, 64)
        if nf == 0 or nf >= 64:
            # point of tiny order: the candidate list may be truncated
            continue
        for i in range(nf):
            found[i] = chi * (q + 1 - found[i])
        if ncand < 0:
            ncand = nf
            for i in range(nf):
                cand[i] = found[i]
        else:
            keep = 0
            for i in range(ncand):
                for j in range(nf):
                    if cand[i] == found[j]:
                        cand[keep] = cand[i]
                        keep += 1
                        break
            ncand = keep
        if ncand == 1:
            return cand[0]
        if ncand == 0:
            ncand = -1
    return <i64>(-(1 << 62))


def ap_array(object ainv, cnp.ndarray[cnp.int64_t, ndim=1] primes,
             cnp.ndarray[cnp.int64_t, ndim=1] A_mod,
             cnp.ndarray[cnp.int64_t, ndim=1] B_mod, unsigned long long seed=0x9E3779B97F4A7C15):
    """Traces a_q for primes of good reduction q >= 5.

    ``A_mod``/``B_mod`` hold the short model coefficients -27 c4 and -54 c6
    reduced modulo each prime.  Entries equal to ``-2**62`` signal that the
    randomized search failed and the caller must count points directly.
    """
    cdef Py_ssize_t n = primes.shape[0], i
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.zeros(n, dtype=np.int64)
    cdef i64 q, A, B, x
    cdef u64 state = seed
    cdef unsigned char *sq
    cdef i64 qmax = NAIVE_CUTOFF
    sq = <unsigned char *>malloc(qmax + 1)
    for i in range(n):
        q = primes[i]
        A = A_mod[i]
        B = B_mod[i]
        if q < NAIVE_CUTOFF:
            for x in range(q):
                sq[x] = 0
            for x in range(1, q):
                sq[(x * x) % q] = 1
            out[i] = ap_naive_short(A, B, q, sq)
        else:
            out[i] = ap_bsgs(A, B, q, &state)
    free(sq)
    return out


# ---------------------------------------------------------------------------
# Dirichlet coefficients from local Euler factors
# ---------------------------------------------------------------------------

def build_coeffs(i64 M, cnp.ndarray[cnp.int64_t, ndim=1] small_q,
                 cnp.ndarray[cnp.int64_t, ndim=2] small_series,
                 cnp.ndarray[cnp.int64_t, ndim=1] large_q,
                 cnp.ndarray[cnp.int64_t, ndim=1] large_lin):
    """Coefficients a_0..a_M (a_0 = 0) of prod_q 1/P_q(q^-s).

    ``small_series[i, k]`` is the coefficient of T^k in 1/P_q(T) for the
    prime ``small_q[i]`` (k = 0 .. K-1, entry 0 ignored); K must cover every
    power q^k <= M.  Every prime
    listed in ``large_q`` must satisfy q^2 > M; only its linear
    coefficient ``large_lin`` matters.  Primes absent from both lists
    contribute the factor 1.
    """
    cdef cnp.ndarray[cnp.int64_t, ndim=1] a = np.ones(M + 1, dtype=np.int64)
    cdef i64 *pa = <i64 *>a.data
    cdef Py_ssize_t i, k, K = small_series.shape[1]
    cdef i64 q, qk, j, c, nj
    a[0] = 0
    with nogil:
        for i in range(small_q.shape[0]):
            q = small_q[i]
            qk = 1
            for k in range(1, K):
                if qk > M // q:
                    break
                qk *= q
                c = small_series[i, k]
                nj = M // qk
                if c == 1:
                    continue
                for j in range(1, nj + 1):
                    if j % q != 0:
                        pa[j * qk] *= c
        for i in range(large_q.shape[0]):
            q = large_q[i]
            c = large_lin[i]
            if c == 1:
                continue
            for j in range(1, M // q + 1):
                pa[j * q] *= c
    return a


# ---------------------------------------------------------------------------
# kernel sums  sum_n a_n n^-power F(n * scale)
# ---------------------------------------------------------------------------

def kernel_sum(cnp.ndarray[cnp.int64_t, ndim=1] a, double scale, int power,
               double u0, double h, cnp.ndarray[cnp.float64_t, ndim=2] cheb,
               double log_floor):
    """Compensated sum of a_n / n^power * exp(g(log(n*scale))) for n >= 1.

    ``g`` is the piecewise Chebyshev interpolant of log F on intervals
    [u0 + k h, u0 + (k+1) h]; arguments beyond the last interval give 0
    and arguments below u0 use the first interval's left value.
    Returns (sum, sum of absolute values).
    """
    cdef Py_ssize_t M = a.shape[0] - 1, n, k, nint = cheb.shape[0], deg = cheb.shape[1]
    cdef double s = 0.0, comp = 0.0, sabs = 0.0, u, t, b0, b1, b2, term, val, tot
    cdef double *pc = <double *>cheb.data
    cdef i64 *pa = <i64 *>a.data
    cdef double umax = u0 + h * nint
    cdef Py_ssize_t j
    with nogil:
        for n in range(1, M + 1):
            if pa[n] == 0:
                continue
            u = log(n * scale)
            if u >= umax:
                break
            if u < u0:
                u = u0
            k = <Py_ssize_t>((u - u0) / h)
            if k >= nint:
                k = nint - 1
            t = 2.0 * (u - u0 - k * h) / h - 1.0
            b1 = 0.0
            b2 = 0.0
            for j in range(deg - 1, 0, -1):
                b0 = 2.0 * t * b1 - b2 + pc[k * deg + j]
                b2 = b1
                b1 = b0
            val = t * b1 - b2 + pc[k * deg]
            if val < log_floor:
                continue
            term = pa[n] * exp_(val)
            if power == 1:
                term /= n
            sabs += term if term > 0 else -term
            tot = s + term
            if (s if s > 0 else -s) >= (term if term > 0 else -term):
                comp += (s - tot) + term
            else:
                comp += (term - tot) + s
            s = tot
    return s + comp, sabs


cdef extern from "math.h" nogil:
    double exp_ "exp"(double)

# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled term-merge kernel; behavioural twin of ``_kernel_py``.

Masks are C uint64 (generator budget capped at 64 elsewhere), while
coefficients stay generic Python objects so exact rationals and floats
share one code path.
"""

IMPLEMENTATION = "cython"

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    #define SI_POPCOUNT(x) __builtin_popcountll(x)
    #else
    static int SI_POPCOUNT(unsigned long long x) {
        int n = 0;
        while (x) { x &= x - 1; n++; }
        return n;
    }
    #endif
    """
    int SI_POPCOUNT(unsigned long long x) nogil


cdef inline int _swaps(unsigned long long a, unsigned long long b) nogil:
    cdef int swaps = 0
    cdef unsigned long long x = a >> 1
    while x:
        swaps += SI_POPCOUNT(x & b)
        x >>= 1
    return swaps


def merge_swaps(a, b):
    """Transpositions needed to interleave sorted words ``a`` and ``b``."""
    return _swaps(<unsigned long long> a, <unsigned long long> b)


def merge_sign(a, b):
    """Sign of the product of disjoint generator words, 0 on overlap."""
    cdef unsigned long long ma = <unsigned long long> a
    cdef unsigned long long mb = <unsigned long long> b
    if ma & mb:
        return 0
    return -1 if _swaps(ma, mb) & 1 else 1


def mul_masked(dict ta, dict tb):
    """Product of two mask->coefficient term maps; zero terms dropped."""
    cdef dict out = {}
    cdef unsigned long long ma, mb
    cdef object ca, cb, c, acc, key
    for ka, ca in ta.items():
        ma = <unsigned long long> ka
        for kb, cb in tb.items():
            mb = <unsigned long long> kb
            if ma & mb:
                continue
            c = ca * cb
            if _swaps(ma, mb) & 1:
                c = -c
            key = ka | kb
            acc = out.get(key)
            if acc is None:
                out[key] = c
            else:
                acc = acc + c
                if acc == 0:
                    del out[key]
                else:
                    out[key] = acc
    return out


def mul_keyed(dict ta, dict tb):
    """Product of (exponents, mask)->coefficient term maps."""
    cdef dict out = {}
    cdef unsigned long long ma, mb
    cdef object ca, cb, c, acc, key, ea, eb
    for ka, ca in ta.items():
        ea = ka[0]
        ma = <unsigned long long> ka[1]
        for kb, cb in tb.items():
            eb = kb[0]
            mb = <unsigned long long> kb[1]
            if ma & mb:
                continue
            c = ca * cb
            if _swaps(ma, mb) & 1:
                c = -c
            key = (tuple(x + y for x, y in zip(ea, eb)), ka[1] | kb[1])
            acc = out.get(key)
            if acc is None:
                out[key] = c
            else:
                acc = acc + c
                if acc == 0:
                    del out[key]
                else:
                    out[key] = acc
    return out

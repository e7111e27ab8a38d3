"""Pure-Python term-merge kernel.

Terms of a multivector are stored sparsely: a bitmask encodes which
anticommuting generators occur in a monomial (bit i = generator i+1),
and the value is the scalar coefficient. The product of two term maps
is the distributive merge with the anticommutation sign; overlapping
masks annihilate. This module is the fallback twin of the compiled
kernel in ``_kernel.pyx`` and must stay behaviourally identical.
"""

IMPLEMENTATION = "python"


def merge_swaps(a: int, b: int) -> int:
    """Transpositions needed to interleave sorted words ``a`` and ``b``.

    Counts pairs (i, j) with i in ``a``, j in ``b`` and i > j; the merge
    sign of the generator product is (-1)**merge_swaps(a, b).
    """
    swaps = 0
    x = a >> 1
    while x:
        swaps += (x & b).bit_count()
        x >>= 1
    return swaps


def merge_sign(a: int, b: int) -> int:
    """Sign of the product of disjoint generator words, 0 on overlap."""
    if a & b:
        return 0
    return -1 if merge_swaps(a, b) & 1 else 1


def mul_masked(ta: dict, tb: dict) -> dict:
    """Product of two mask->coefficient term maps; zero terms dropped."""
    out: dict = {}
    for ma, ca in ta.items():
        for mb, cb in tb.items():
            if ma & mb:
                continue
            c = ca * cb
            if merge_swaps(ma, mb) & 1:
                c = -c
            key = ma | mb
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


def mul_keyed(ta: dict, tb: dict) -> dict:
    """Product of (exponents, mask)->coefficient term maps.

    Keys pair a tuple of even-variable exponents with a generator mask;
    exponents add, masks merge with the anticommutation sign.
    """
    out: dict = {}
    for (ea, ma), ca in ta.items():
        for (eb, mb), cb in tb.items():
            if ma & mb:
                continue
            c = ca * cb
            if merge_swaps(ma, mb) & 1:
                c = -c
            key = (tuple(x + y for x, y in zip(ea, eb)), ma | mb)
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

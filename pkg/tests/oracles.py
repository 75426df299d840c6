"""Independent reference computations used by the tests."""

from fractions import Fraction


def brute_force_atomic(m):
    """Exact best uniform price of a purely discrete market, by rational enumeration.

    Returns ``(price, profit)`` with the lowest price among exact maximizers.
    """
    cost = Fraction(m.cost)
    segs = [(Fraction(float(w)), [(Fraction(v), Fraction(p)) for v, p in zip(d.values, d.probs)])
            for w, d in m.segments]
    prices = sorted({cost} | {v for _, atoms in segs for v, _ in atoms if v >= cost})
    best_p, best_v = None, None
    for p in prices:
        total = sum(w * (p - cost) * sum(q for v, q in atoms if v >= p) for w, atoms in segs)
        if best_v is None or total > best_v:
            best_p, best_v = p, total
    return best_p, best_v


def harmonic(K):
    return sum(Fraction(1, k) for k in range(1, K + 1))

"""Random difference structures, morphisms and central functions.

Shared by the quandle unit tests and the law acceptance suite. All
randomness flows through a caller-supplied random.Random so corpus runs
replay exactly.
"""

from fractions import Fraction

from frobtwist.gaussian import GaussianRational
from frobtwist.quandle import (CentralFunction, DiffMorphism, DiffStructure,
                               GroupWithOperators, coset_quandle,
                               trivial_structure)


def cyclic_group(m):
    return GroupWithOperators([[(a + b) % m for b in range(m)]
                               for a in range(m)])


def klein_group():
    return GroupWithOperators([[a ^ b for b in range(4)] for a in range(4)])


def sym3_group():
    perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2),
             (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(a[b[i]] for i in range(3))] for b in perms]
             for a in perms]
    return GroupWithOperators(table)


def conj_structure(G):
    """Conjugation quandle s^t = t^-1 * s * t of a finite group."""
    n = G.order
    table = [[G.mul(G.mul(G.inv(t), s), t) for t in range(n)]
             for s in range(n)]
    return DiffStructure(table)


def product_structure(S, T):
    """Componentwise structure on pairs; returns (structure, pair list)."""
    pairs = [(a, b) for a in range(S.n) for b in range(T.n)]
    index = {pr: i for i, pr in enumerate(pairs)}
    table = [[index[(S.conj[a1][b1], T.conj[a2][b2])] for (b1, b2) in pairs]
             for (a1, a2) in pairs]
    return DiffStructure(table), pairs


def projection(P, pairs, factor, which):
    """Projection morphism of a product onto one factor (1 or 2)."""
    comp = 0 if which == 1 else 1
    return DiffMorphism(P, factor, tuple(pr[comp] for pr in pairs))


def subinclusion(S, domain_ids):
    """Substructure on a union of conjugacy domains, with its inclusion."""
    doms = S.domains()
    members = sorted(m for d in domain_ids for m in doms[d])
    pos = {m: i for i, m in enumerate(members)}
    # closed: s^t stays inside the domain of s
    table = [[pos[S.conj[a][b]] for b in members] for a in members]
    sub = DiffStructure(table)
    return sub, DiffMorphism(sub, S, tuple(members))


def relabel(S, rng):
    """Isomorphic copy along a random permutation, with the iso to S."""
    perm = list(range(S.n))
    rng.shuffle(perm)
    inv = [0] * S.n
    for i, v in enumerate(perm):
        inv[v] = i
    table = [[inv[S.conj[perm[a]][perm[b]]] for b in range(S.n)]
             for a in range(S.n)]
    R = DiffStructure(table)
    return R, DiffMorphism(R, S, tuple(perm))


def to_point(S):
    return DiffMorphism(S, trivial_structure(1), (0,) * S.n)


def random_gaussian(rng):
    return GaussianRational(
        Fraction(rng.randint(-9, 9), rng.randint(1, 5)),
        Fraction(rng.randint(-9, 9), rng.randint(1, 5)))


def random_central(S, rng):
    by_domain = [random_gaussian(rng) for _ in S.domains()]
    return CentralFunction(
        S, [by_domain[S.domain_of(s)] for s in range(S.n)])


def _coset_of_cyclic(rng, m):
    k = rng.choice([k for k in range(1, m) if _gcd(k, m) == 1])
    G = cyclic_group(m)
    return coset_quandle(G, tuple((k * g) % m for g in range(m)))


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def random_structure(rng, max_n=8, depth=1):
    """One random valid structure with at most max_n elements."""
    kinds = 5 + (3 if depth > 0 else 0)
    kind = rng.randrange(kinds)
    if kind == 0:
        return trivial_structure(rng.randint(1, max_n))
    if kind == 1:
        return conj_structure(cyclic_group(rng.randint(1, max_n)))
    if kind == 2:
        if max_n >= 6 and rng.random() < 0.6:
            return conj_structure(sym3_group())
        return conj_structure(klein_group())
    if kind == 3:
        return _coset_of_cyclic(rng, rng.randint(2, max_n))
    if kind == 4:
        # klein coset with a coordinate swap operator
        G = klein_group()
        return coset_quandle(G, (0, 2, 1, 3))
    if kind == 5:
        S = random_structure(rng, max_n, depth - 1)
        doms = S.domains()
        take = rng.randint(1, len(doms))
        ids = rng.sample(range(len(doms)), take)
        sub, _ = subinclusion(S, ids)
        return sub
    if kind == 6:
        a = random_structure(rng, max_n // 2, 0)
        b = random_structure(rng, max(max_n // a.n, 1), 0)
        P, _ = product_structure(a, b)
        return P
    S = random_structure(rng, max_n, depth - 1)
    R, _ = relabel(S, rng)
    return R

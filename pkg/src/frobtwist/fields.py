"""Exact arithmetic in finite fields F_(p^N) with deterministic moduli.

Elements are coefficient tuples (c_0, ..., c_{N-1}) over the prime field,
written in the polynomial basis of F_p[T] modulo a fixed monic irreducible
modulus of degree N. The modulus is chosen deterministically: coefficient
vectors are read as base-p integers (constant coefficient = least significant
digit) and the first irreducible in that order wins, so a given (p, N) always
yields the same field. Degree 1 uses the modulus T, i.e. the residue of T
is 0 and elements are the prime-field constants.

Univariate polynomials over a field context come in two flavours:

* dense: list of element tuples, index = degree;
* sparse: dict {exponent: element}, used for the twisted point-counting
  fast path where degrees reach q^n and can never be materialized.

All randomized routines take a seeded random.Random so repeated runs are
bit-identical.
"""

import hashlib
import math
import random

import numpy as np


class BudgetError(Exception):
    """Raised when an enumeration or basis-size budget is exceeded."""


def is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _poly_trim(c):
    # strip leading zeros of an int-list polynomial
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mulmod_fp(a, b, mod, p):
    # int-list arithmetic over F_p, reduced mod the monic int-list `mod`
    n = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for j in range(n):
                prod[k - n + j] = (prod[k - n + j] - c * mod[j]) % p
    return _poly_trim(prod[:n] if len(prod) > n else prod)


def _poly_powmod_fp(a, e, mod, p):
    result = [1]
    base = list(a)
    while e:
        if e & 1:
            result = _poly_mulmod_fp(result, base, mod, p)
        base = _poly_mulmod_fp(base, base, mod, p)
        e >>= 1
    return result


def _poly_gcd_fp(a, b, p):
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        inv = pow(b[-1], p - 2, p)
        nb = len(b) - 1
        r = list(a)
        while len(r) - 1 >= nb and _poly_trim(r):
            if not r:
                break
            c = (r[-1] * inv) % p
            shift = len(r) - 1 - nb
            for j in range(len(b)):
                r[shift + j] = (r[shift + j] - c * b[j]) % p
            _poly_trim(r)
        a, b = b, r
    return a


def _is_irreducible_fp(mod, p):
    """Spec check: gcd(T^{p^k} - T, h) = 1 for 0 < k < N, and h | T^{p^N} - T."""
    n = len(mod) - 1
    if n == 1:
        return True
    x = [0, 1]
    t = [0, 1]
    for k in range(1, n + 1):
        x = _poly_powmod_fp(x, p, mod, p)
        diff = [( (x[i] if i < len(x) else 0) - (t[i] if i < len(t) else 0)) % p
                for i in range(max(len(x), len(t)))]
        _poly_trim(diff)
        if k < n:
            g = _poly_gcd_fp(diff, mod, p)
            if len(g) != 1:
                return False
        else:
            if diff:
                return False
    return True


class FieldCtx:
    """Immutable context for F_(p^N): modulus, reduction and Frobenius tables.

    Construct through make_field; the constructor verifies irreducibility but
    does not search for the canonical modulus.
    """

    def __init__(self, p, N, modulus):
        if not is_prime(p):
            raise ValueError("field_tower.make_field: p = %r is not prime" % (p,))
        if N < 1:
            raise ValueError("field_tower.make_field: degree N = %r < 1" % (N,))
        if len(modulus) != N + 1 or modulus[-1] % p != 1:
            raise ValueError("field_tower: modulus must be monic of degree N")
        modulus = [c % p for c in modulus]
        if not _is_irreducible_fp(modulus, p):
            raise ValueError("field_tower: modulus is not irreducible over F_%d" % p)
        self.p = p
        self.N = N
        self.modulus = tuple(modulus)
        self.order = p ** N
        self.zero = (0,) * N
        self.one = ((1,) + (0,) * (N - 1)) if N >= 1 else ()
        if N == 1 and modulus[0] == 0:
            # modulus T: the residue of T is 0
            pass
        # rows of _red: T^{N+j} mod modulus for j = 0..N-2
        red = []
        if N >= 2:
            cur = [(-modulus[i]) % p for i in range(N)]  # T^N mod h
            red.append(list(cur))
            for _ in range(N - 2):
                c = cur[-1]
                nxt = [0] + cur[:-1]
                if c:
                    for i in range(N):
                        nxt[i] = (nxt[i] - c * modulus[i]) % p
                cur = nxt
                red.append(list(cur))
        self._red = np.array(red, dtype=np.int64).reshape(max(N - 1, 0), N)
        # Frobenius: x -> x^p is F_p-linear; matrix rows = (T^i)^p in the basis
        rows = []
        for i in range(N):
            img = _poly_powmod_fp([0] * i + [1], p, list(self.modulus), p)
            rows.append([img[j] if j < len(img) else 0 for j in range(N)])
        self._frob1 = np.array(rows, dtype=np.int64)
        self._frob_cache = {0: np.eye(N, dtype=np.int64), 1: self._frob1}
        self._nonresidue_cache = {}
        self._unity_cache = {}
        self._amm_cache = {}

    def __repr__(self):
        return "FieldCtx(p=%d, N=%d)" % (self.p, self.N)

    # -- element plumbing ---------------------------------------------------

    def element(self, coeffs):
        if len(coeffs) != self.N:
            raise ValueError("field_tower: element has %d coefficients, context needs %d"
                             % (len(coeffs), self.N))
        return tuple(c % self.p for c in coeffs)

    def from_int(self, v):
        """Canonical labeling: base-p digits of v mod p^N, low digit first."""
        v %= self.order
        out = []
        for _ in range(self.N):
            out.append(v % self.p)
            v //= self.p
        return tuple(out)

    def to_int(self, a):
        v = 0
        for c in reversed(a):
            v = v * self.p + c
        return v

    def scalar(self, k):
        return ((k % self.p,) + (0,) * (self.N - 1))

    def gen(self):
        """Residue class of T (equals 0 when N = 1 and the modulus is T)."""
        if self.N == 1:
            return self.scalar(-self.modulus[0])
        return self.from_int(self.p)

    def elements(self, budget=1 << 20):
        if self.order > budget:
            raise BudgetError("field_tower: enumeration budget exceeded "
                              "(p^N = %d > %d)" % (self.order, budget))
        return [self.from_int(v) for v in range(self.order)]

    # -- arithmetic ---------------------------------------------------------

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple((-x) % p for x in a)

    def mul(self, a, b):
        N = self.N
        if N == 1:
            return ((a[0] * b[0]) % self.p,)
        full = np.convolve(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64))
        lo = full[:N].copy()
        if len(full) > N:
            hi = full[N:]
            lo[: self._red.shape[1]] += hi @ self._red
        return tuple(int(x) for x in lo % self.p)

    def mul_int(self, a, k):
        k %= self.p
        return tuple((c * k) % self.p for c in a)

    def inv(self, a):
        if all(c == 0 for c in a):
            raise ZeroDivisionError("field_tower.gf_arith: inversion of zero")
        p = self.p
        # extended Euclid in F_p[T] against the modulus
        r0, r1 = list(self.modulus), _poly_trim(list(a))
        s0, s1 = [], [1]
        while r1:
            lead_inv = pow(r1[-1], p - 2, p)
            q = [0] * (len(r0) - len(r1) + 1)
            r = list(r0)
            while len(r) >= len(r1) and _poly_trim(list(r)):
                if len(r) < len(r1):
                    break
                c = (r[-1] * lead_inv) % p
                d = len(r) - len(r1)
                q[d] = c
                for j in range(len(r1)):
                    r[d + j] = (r[d + j] - c * r1[j]) % p
                _poly_trim(r)
            r0, r1 = r1, r
            ns0 = [(s0[i] if i < len(s0) else 0) for i in range(max(len(s0), len(q) + len(s1) - 1))]
            for i, qi in enumerate(q):
                if qi:
                    for j, sj in enumerate(s1):
                        ns0[i + j] = (ns0[i + j] - qi * sj) % p
            _poly_trim(ns0)
            s0, s1 = s1, ns0
        # r0 is now the gcd, a nonzero constant
        c_inv = pow(r0[0], p - 2, p)
        out = [(x * c_inv) % p for x in s0]
        out += [0] * (self.N - len(out))
        return tuple(out[: self.N])

    def pow(self, a, e):
        if e < 0:
            return self.pow(self.inv(a), -e)
        if e >= self.order:
            # twisted substitution produces astronomically large exponents;
            # the multiplicative group has order |F| - 1
            if a == self.zero:
                return self.zero
            e %= self.order - 1
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def frobenius(self, a, e):
        e %= self.N
        mat = self._frob_cache.get(e)
        if mat is None:
            # square-and-multiply with reduction mod p at every step so int64
            # entries stay small
            m = self._frob1.copy()
            acc = np.eye(self.N, dtype=np.int64)
            k = e
            while k:
                if k & 1:
                    acc = (acc @ m) % self.p
                m = (m @ m) % self.p
                k >>= 1
            mat = acc
            self._frob_cache[e] = mat
        return tuple(int(x) for x in (np.array(a, dtype=np.int64) @ mat) % self.p)

    def pth_root(self, a):
        return self.frobenius(a, self.N - 1)

    def fixed_field(self, e, budget=1 << 20):
        """All x in the context with frobenius(x, e) = x, sorted canonically.

        This is the subfield F_(p^gcd(e, N)); computed as the kernel of the
        F_p-linear map Frob^e - id so no field-wide sweep is needed.
        """
        e %= self.N
        if e == 0:
            return self.elements(budget=budget)
        mat = None
        m = self._frob1.copy()
        acc = np.eye(self.N, dtype=np.int64)
        k = e
        while k:
            if k & 1:
                acc = (acc @ m) % self.p
            m = (m @ m) % self.p
            k >>= 1
        mat = (acc - np.eye(self.N, dtype=np.int64)) % self.p
        basis = _nullspace_mod_p(mat.T, self.p)
        if self.p ** len(basis) > budget:
            raise BudgetError("field_tower: fixed-field enumeration exceeds budget")
        out = []
        for v in range(self.p ** len(basis)):
            vec = np.zeros(self.N, dtype=np.int64)
            t = v
            for b in basis:
                vec = (vec + (t % self.p) * b) % self.p
                t //= self.p
            out.append(tuple(int(x) for x in vec))
        return sorted(set(out), key=self.to_int)


def _nullspace_mod_p(mat, p):
    """Row vectors spanning the right-nullspace of mat over F_p."""
    a = np.array(mat, dtype=np.int64) % p
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        sel = None
        for i in range(r, rows):
            if a[i, c] % p:
                sel = i
                break
        if sel is None:
            continue
        a[[r, sel]] = a[[sel, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] = (a[i] - a[i, c] * a[r]) % p
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = np.zeros(cols, dtype=np.int64)
        vec[fc] = 1
        for i, pc in enumerate(pivots):
            vec[pc] = (-a[i, fc]) % p
        basis.append(vec % p)
    return basis


_FIELD_CACHE = {}


def make_field(p, N):
    """Deterministic F_(p^N): first irreducible in base-p integer order."""
    if not is_prime(p):
        raise ValueError("field_tower.make_field: p = %r is not prime" % (p,))
    if N < 1:
        raise ValueError("field_tower.make_field: degree N = %r < 1" % (N,))
    key = (p, N)
    ctx = _FIELD_CACHE.get(key)
    if ctx is not None:
        return ctx
    v = 0
    while True:
        digits = []
        t = v
        for _ in range(N):
            digits.append(t % p)
            t //= p
        if t == 0:
            mod = digits + [1]
            if _is_irreducible_fp(mod, p):
                ctx = FieldCtx(p, N, mod)
                _FIELD_CACHE[key] = ctx
                return ctx
        v += 1
        if v > p ** N:
            raise RuntimeError("field_tower.make_field: no irreducible found (unreachable)")


def gf_arith(ctx, op, a, b=None):
    """Spec-shaped dispatcher; a and b must be coefficient tuples of ctx."""
    if len(a) != ctx.N:
        raise ValueError("field_tower.gf_arith: operand from a different context")
    if op == "add":
        if len(b) != ctx.N:
            raise ValueError("field_tower.gf_arith: operand from a different context")
        return ctx.add(a, b)
    if op == "mul":
        if len(b) != ctx.N:
            raise ValueError("field_tower.gf_arith: operand from a different context")
        return ctx.mul(a, b)
    if op == "inv":
        return ctx.inv(a)
    if op == "pow":
        return ctx.pow(a, b)
    raise ValueError("field_tower.gf_arith: unknown op %r" % (op,))


def frobenius(ctx, a, e):
    return ctx.frobenius(a, e)


def subfield_degree(ctx, a):
    """Smallest d | N with a^(p^d) = a."""
    for d in range(1, ctx.N + 1):
        if ctx.N % d == 0 and ctx.frobenius(a, d) == a:
            return d
    return ctx.N


# ---------------------------------------------------------------------------
# dense univariate polynomials over a FieldCtx (list of elements, index = deg)
# ---------------------------------------------------------------------------


def dense_trim(ctx, f):
    while f and f[-1] == ctx.zero:
        f.pop()
    return f


def dense_mul(ctx, f, g):
    if not f or not g:
        return []
    out = [ctx.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == ctx.zero:
            continue
        for j, b in enumerate(g):
            if b == ctx.zero:
                continue
            out[i + j] = ctx.add(out[i + j], ctx.mul(a, b))
    return dense_trim(ctx, out)


def dense_divmod(ctx, f, g):
    f = list(f)
    g = dense_trim(ctx, list(g))
    if not g:
        raise ZeroDivisionError("field_tower: polynomial division by zero")
    q = [ctx.zero] * max(len(f) - len(g) + 1, 0)
    inv_lead = ctx.inv(g[-1])
    while len(f) >= len(g) and dense_trim(ctx, f):
        if len(f) < len(g):
            break
        c = ctx.mul(f[-1], inv_lead)
        d = len(f) - len(g)
        q[d] = c
        for j in range(len(g)):
            f[d + j] = ctx.sub(f[d + j], ctx.mul(c, g[j]))
        dense_trim(ctx, f)
    return dense_trim(ctx, q), f


def dense_gcd(ctx, f, g):
    f = dense_trim(ctx, list(f))
    g = dense_trim(ctx, list(g))
    while g:
        _, r = dense_divmod(ctx, f, g)
        f, g = g, r
    if f:
        inv = ctx.inv(f[-1])
        f = [ctx.mul(c, inv) for c in f]
    return f


def dense_derivative(ctx, f):
    out = []
    for i in range(1, len(f)):
        out.append(ctx.mul_int(f[i], i))
    return dense_trim(ctx, out)


def dense_eval(ctx, f, x):
    acc = ctx.zero
    for c in reversed(f):
        acc = ctx.add(ctx.mul(acc, x), c)
    return acc


def dense_mulmod(ctx, f, g, h):
    _, r = dense_divmod(ctx, dense_mul(ctx, f, g), h)
    return r


def dense_powmod(ctx, f, e, h):
    result = [ctx.one]
    base = list(f)
    _, base = dense_divmod(ctx, base, h)
    while e:
        if e & 1:
            result = dense_mulmod(ctx, result, base, h)
        base = dense_mulmod(ctx, base, base, h)
        e >>= 1
    return result


def twisted_pow_mod(ctx, h, Q):
    """Remainder of T^Q modulo h by repeated squaring; h dense over ctx."""
    h = dense_trim(ctx, list(h))
    if len(h) <= 1:
        raise ValueError("field_tower.twisted_pow_mod: deg h must be >= 1")
    if Q < 1:
        raise ValueError("field_tower.twisted_pow_mod: Q must be >= 1")
    return dense_powmod(ctx, [ctx.zero, ctx.one], Q, h)


# ---------------------------------------------------------------------------
# sparse univariate polynomials: dict {exponent: nonzero element}
# ---------------------------------------------------------------------------


def sparse_normalize(ctx, h):
    return {e: c for e, c in h.items() if c != ctx.zero}


def sparse_degree(h):
    return max(h) if h else -1


def sparse_derivative(ctx, h):
    out = {}
    for e, c in h.items():
        if e == 0:
            continue
        k = e % ctx.p
        if k:
            out[e - 1] = ctx.mul_int(c, k)
    return out


def sparse_pth_root(ctx, h):
    out = {}
    for e, c in h.items():
        if e % ctx.p:
            raise ValueError("field_tower: polynomial is not a p-th power")
        out[e // ctx.p] = ctx.pth_root(c)
    return out


def sparse_to_dense(ctx, h, budget):
    d = sparse_degree(h)
    if d + 1 > budget:
        raise BudgetError("field_tower: enumeration budget exceeded "
                          "(dense degree %d > %d)" % (d, budget))
    out = [ctx.zero] * (d + 1)
    for e, c in h.items():
        out[e] = c
    return out


def dense_distinct_root_count(ctx, f):
    f = dense_trim(ctx, list(f))
    if not f:
        raise ValueError("field_tower.distinct_root_count: zero polynomial")
    count = 0
    while len(f) > 1:
        d = dense_derivative(ctx, f)
        if not d:
            # every exponent divisible by p: pass to the p-th root
            nf = [ctx.zero] * ((len(f) - 1) // ctx.p + 1)
            for i in range(0, len(f), ctx.p):
                nf[i // ctx.p] = ctx.pth_root(f[i])
            f = dense_trim(ctx, nf)
            continue
        g = dense_gcd(ctx, f, d)
        w, _ = dense_divmod(ctx, f, g)
        # w = product of the distinct factors with multiplicity prime to p
        count += len(w) - 1
        r = g
        while True:
            c = dense_gcd(ctx, r, w)
            if len(c) <= 1:
                break
            r, _ = dense_divmod(ctx, r, c)
        f = dense_trim(ctx, r)
    return count


def distinct_root_count(ctx, h, dense_budget=1 << 14):
    """Number of distinct roots of h in the algebraic closure.

    h may be dense (list) or sparse (dict). Works over any F_(p^m) context;
    irreducible factors over a finite field are separable, so the count is
    the degree of the radical. Sparse chains (valuation strip, derivative
    zero -> p-th root, monomial derivative -> already squarefree) avoid
    materializing astronomically long polynomials; anything else falls
    through to the dense algorithm under dense_budget.
    """
    if isinstance(h, dict):
        h = sparse_normalize(ctx, h)
        if not h:
            raise ValueError("field_tower.distinct_root_count: zero polynomial")
        extra = 0
        while True:
            deg = sparse_degree(h)
            if deg == 0:
                return extra
            v = min(h)
            if v > 0:
                # x^v divides h: zero is one distinct root
                extra += 1
                h = {e - v: c for e, c in h.items()}
                continue
            d = sparse_derivative(ctx, h)
            if not d:
                h = sparse_pth_root(ctx, h)
                continue
            if len(d) == 1:
                # gcd with c*x^m is 1 (the constant term of h is nonzero),
                # so h is squarefree
                return extra + deg
            return extra + dense_distinct_root_count(
                ctx, sparse_to_dense(ctx, h, dense_budget))
    return dense_distinct_root_count(ctx, h)


# ---------------------------------------------------------------------------
# root extraction
# ---------------------------------------------------------------------------


def _seed_from(ctx, items):
    blob = repr((ctx.p, ctx.N, tuple(items))).encode()
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "big")


def _trace_poly_mod(ctx, c_elt, r, M):
    """sum_{i<M} (c*T)^(2^i) mod r, the F_2 trace map used for splitting."""
    acc = dense_trim(ctx, [ctx.zero, c_elt])
    _, acc = dense_divmod(ctx, acc, r)
    total = list(acc)
    for _ in range(M - 1):
        acc = dense_mulmod(ctx, acc, acc, r)
        total = dense_trim(ctx, [
            ctx.add(total[i] if i < len(total) else ctx.zero,
                    acc[i] if i < len(acc) else ctx.zero)
            for i in range(max(len(total), len(acc)))
        ])
    return total


def dense_roots(ctx, f, rng=None):
    """All roots of f that lie inside ctx's field, each once, sorted.

    Equal-degree splitting with deterministic seeding: the rng defaults to
    one derived from (p, N, coefficients), so root lists are reproducible.
    """
    f = dense_trim(ctx, list(f))
    if not f:
        raise ValueError("field_tower.dense_roots: zero polynomial")
    if len(f) == 1:
        return []
    if rng is None:
        rng = random.Random(_seed_from(ctx, sorted(f[i] for i in range(len(f)))))
    # keep only the part that splits into linears over this field
    xq = dense_powmod(ctx, [ctx.zero, ctx.one], ctx.order, f)
    lin = dense_gcd(ctx, f, dense_trim(ctx, [
        ctx.sub(xq[i] if i < len(xq) else ctx.zero,
                (ctx.one if i == 1 else ctx.zero))
        for i in range(max(len(xq), 2))
    ]))
    roots = []

    def split(r):
        r = dense_trim(ctx, list(r))
        if len(r) <= 1:
            return
        if len(r) == 2:
            # monic linear T + c -> root -c
            inv = ctx.inv(r[1])
            roots.append(ctx.neg(ctx.mul(r[0], inv)))
            return
        while True:
            if ctx.p == 2:
                c = ctx.from_int(rng.randrange(1, ctx.order))
                g = dense_gcd(ctx, r, _trace_poly_mod(ctx, c, r, ctx.N))
            else:
                a = ctx.from_int(rng.randrange(ctx.order))
                probe = dense_powmod(ctx, [a, ctx.one], (ctx.order - 1) // 2, r)
                probe = dense_trim(ctx, [
                    ctx.sub(probe[i] if i < len(probe) else ctx.zero,
                            ctx.one if i == 0 else ctx.zero)
                    for i in range(max(len(probe), 1))
                ])
                g = dense_gcd(ctx, r, probe)
            if 1 < len(g) < len(r):
                q, _ = dense_divmod(ctx, r, g)
                split(g)
                split(q)
                return

    split(lin)
    return sorted(set(roots), key=ctx.to_int)


def _factorize(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def nonresidue(ctx, r):
    """First element in canonical order that is not an r-th power (r prime)."""
    cached = ctx._nonresidue_cache.get(r)
    if cached is not None:
        return cached
    e = (ctx.order - 1) // r
    v = 2
    while v < ctx.order:
        a = ctx.from_int(v)
        if ctx.pow(a, e) != ctx.one:
            ctx._nonresidue_cache[r] = a
            return a
        v += 1
    raise ValueError("field_tower: no %d-th nonresidue exists in this field" % r)


def prime_root(ctx, c, r):
    """One solution of y^r = c in the field for prime r, or None.

    Adleman-Manders-Miller digit correction when r divides the group order,
    plain inverse-exponent power when it does not, Frobenius inversion for
    the characteristic itself. Fully deterministic.
    """
    if c == ctx.zero:
        return ctx.zero
    if r == ctx.p:
        return ctx.pth_root(c)
    q1 = ctx.order - 1
    if q1 % r:
        return ctx.pow(c, pow(r, -1, q1))
    if ctx.pow(c, q1 // r) != ctx.one:
        return None
    setup = ctx._amm_cache.get(r)
    if setup is None:
        s, t = 0, q1
        while t % r == 0:
            s += 1
            t //= r
        b = ctx.pow(nonresidue(ctx, r), t)          # order exactly r^s
        step = ctx.pow(b, r ** (s - 1))             # primitive r-th root of 1
        setup = ctx._amm_cache[r] = (s, t, b, step)
    s, t, b, step = setup
    x = ctx.pow(c, pow(r, -1, t)) if t > 1 else ctx.one
    # x^r = c * err with err = (c^t)^j of order dividing r^(s-1), err in <b^r>
    err = ctx.mul(ctx.pow(x, r), ctx.inv(c))
    m = 0
    cur = err
    for k in range(s):
        probe = ctx.pow(cur, r ** (s - 1 - k))
        d = 0
        acc = ctx.one
        while acc != probe:
            acc = ctx.mul(acc, step)
            d += 1
            if d >= r:
                return None
        if d:
            # clear digit k: cur = b^(m_rem), subtract d*r^k from the exponent
            d = r - d
            m += d * (r ** k)
            cur = ctx.mul(cur, ctx.pow(b, d * (r ** k)))
    # now err * b^m = 1 with r | m (err has trivial low digit)
    if cur != ctx.one or m % r:
        return None
    y = ctx.mul(x, ctx.pow(b, m // r))
    if ctx.pow(y, r) != c:
        return None
    return y


def nth_root(ctx, c, m):
    """One y with y^m = c, or None if none exists in the field."""
    y = c
    for r, k in _factorize(m).items():
        for _ in range(k):
            y = prime_root(ctx, y, r)
            if y is None:
                return None
    return y


def roots_of_unity(ctx, k):
    """All k-th roots of unity in the field, sorted canonically.

    In characteristic p only the p'-part of k matters. The subgroup is
    enumerated from an element of exact order, found along canonical element
    order, so the list is deterministic.
    """
    if k < 1:
        raise ValueError("field_tower.roots_of_unity: k must be >= 1")
    while k % ctx.p == 0:
        k //= ctx.p
    k = math.gcd(k, ctx.order - 1)
    if k <= 1:
        return [ctx.one]
    cached = ctx._unity_cache.get(k)
    if cached is not None:
        return list(cached)
    fac = _factorize(k)
    e = (ctx.order - 1) // k
    v = 2
    while v < ctx.order:
        u = ctx.pow(ctx.from_int(v), e)
        if all(ctx.pow(u, k // r) != ctx.one for r in fac):
            out = []
            acc = ctx.one
            for _ in range(k):
                out.append(acc)
                acc = ctx.mul(acc, u)
            out.sort(key=ctx.to_int)
            ctx._unity_cache[k] = tuple(out)
            return out
        v += 1
    raise ValueError("field_tower: could not find a generator of the root group")


def all_nth_roots(ctx, c, m):
    """All y in the field with y^m = c, sorted canonically."""
    if c == ctx.zero:
        return [ctx.zero]
    y0 = nth_root(ctx, c, m)
    if y0 is None:
        return []
    return sorted((ctx.mul(y0, z) for z in roots_of_unity(ctx, m)), key=ctx.to_int)


_EMBED_CACHE = {}


def embedding(src, dst):
    """Canonical embedding F_(p^N) -> F_(p^M) for N | M, as a callable.

    The polynomial-basis generator of src goes to the smallest root (in
    canonical element order) of src's modulus inside dst, so the embedding is
    deterministic and a genuine ring homomorphism.
    """
    if src.p != dst.p:
        raise ValueError("field_tower.embedding: different characteristics")
    if dst.N % src.N != 0:
        raise ValueError("field_tower.embedding: target degree %d is not a "
                         "multiple of source degree %d" % (dst.N, src.N))
    key = (src.p, src.N, tuple(src.modulus), dst.N, tuple(dst.modulus))
    fn = _EMBED_CACHE.get(key)
    if fn is not None:
        return fn
    if src.N == 1:
        def fn(a, _dst=dst):
            return _dst.scalar(a[0])
    elif (src.N, tuple(src.modulus)) == (dst.N, tuple(dst.modulus)):
        def fn(a):
            return a
    else:
        f = [dst.scalar(int(c)) for c in src.modulus]
        roots = dense_roots(dst, f)
        if not roots:
            raise ValueError("field_tower.embedding: source modulus has no "
                             "root in the target field")
        r = roots[0]
        powers = [dst.one]
        for _ in range(src.N - 1):
            powers.append(dst.mul(powers[-1], r))

        def fn(a, _dst=dst, _pw=powers):
            acc = _dst.zero
            for c, w in zip(a, _pw):
                if c:
                    acc = _dst.add(acc, _dst.mul_int(w, c))
            return acc
    _EMBED_CACHE[key] = fn
    return fn

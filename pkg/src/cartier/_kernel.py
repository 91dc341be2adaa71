"""Integer-encoded arithmetic kernels for the search engine.

Private module.  Field elements are encoded as their position in the
canonical base-p enumeration (0..q-1); polynomials are plain lists of
encodings.  Prime fields use direct modular integer arithmetic with deferred
reduction; extension fields use dense q x q operation tables built once per
field and cached per process.

The object layer in fields/poly/invariants is the reference implementation.
Everything here is cross-checked against it by the test suite, and every
witness a search emits is re-validated through the object layer before it
enters a report.
"""

from __future__ import annotations

# ---------------------------------------------------------------------------
# kernels


class PrimeKernel:
    """F_p arithmetic on plain residues; convolutions accumulate unreduced
    integer sums and reduce once per coefficient."""

    def __init__(self, p: int):
        self.char = p
        self.q = p
        self.k = 1
        self.inv = [0] + [pow(i, -1, p) for i in range(1, p)]

    # -- polynomial primitives (lists of residues, not normalized) --

    def poly_mul(self, a, b):
        p = self.char
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return [v % p for v in out]

    def _poly_sq(self, a):
        p = self.char
        n = len(a)
        out = [0] * (2 * n - 1)
        for i in range(n):
            ai = a[i]
            if ai:
                out[2 * i] += ai * ai
                twice = 2 * ai
                for j in range(i + 1, n):
                    out[i + j] += twice * a[j]
        return [v % p for v in out]

    def poly_mul_trunc(self, a, b, n):
        p = self.char
        out = [0] * min(n, len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if i >= n:
                break
            if ai:
                top = min(len(b), n - i)
                for j in range(top):
                    out[i + j] += ai * b[j]
        return [v % p for v in out]

    def poly_pow(self, a, e):
        result = list(a)
        for bit in bin(e)[3:]:
            result = self._poly_sq(result)
            if bit == "1":
                result = self.poly_mul(result, a)
        return result

    def poly_pow_trunc(self, a, e, n):
        result = a[:n]
        for bit in bin(e)[3:]:
            result = self.poly_mul_trunc(result, result, n)
            if bit == "1":
                result = self.poly_mul_trunc(result, a, n)
        return result

    def is_squarefree(self, f):
        """gcd(f, f') constant and f' nonzero; f must have exact degree
        len(f)-1 >= 1 (nonzero leading encoding)."""
        p = self.char
        d = [(i * f[i]) % p for i in range(1, len(f))]
        while d and d[-1] == 0:
            d.pop()
        if not d:
            return False
        inv = self.inv
        a, b = list(f), d
        while True:
            db = len(b) - 1
            if db == 0:
                return True
            r = a
            binv = inv[b[db]]
            for i in range(len(r) - 1 - db, -1, -1):
                c = r[db + i]
                if c:
                    qc = (c * binv) % p
                    for j in range(db):
                        r[i + j] = (r[i + j] - qc * b[j]) % p
                    r[db + i] = 0
            while r and r[-1] == 0:
                r.pop()
            if not r:
                return False
            a, b = b, r

    # -- element primitives --

    def frob(self, x):
        return x

    def mul_enc(self, x, y):
        return (x * y) % self.char

    # -- matrices (lists of row lists of encodings) --

    def rank(self, rows):
        """Rank by Gaussian elimination; mutates rows."""
        p = self.char
        inv = self.inv
        m = len(rows)
        n = len(rows[0]) if m else 0
        r = 0
        for col in range(n):
            pivot = -1
            for i in range(r, m):
                if rows[i][col]:
                    pivot = i
                    break
            if pivot < 0:
                continue
            rows[r], rows[pivot] = rows[pivot], rows[r]
            prow = rows[r]
            pinv = inv[prow[col]]
            for i in range(r + 1, m):
                c = rows[i][col]
                if c:
                    factor = (c * pinv) % p
                    row = rows[i]
                    for j in range(col, n):
                        row[j] = (row[j] - factor * prow[j]) % p
            r += 1
            if r == m:
                break
        return r

    def _matmul(self, x, y):
        p = self.char
        cols = list(zip(*y))
        return [[sum(a * b for a, b in zip(row, col)) % p for col in cols] for row in x]

    def p_rank(self, rows, g):
        # sigma is the identity on F_p, so the iterate is just A^g
        prod = rows
        for _ in range(1, g):
            prod = self._matmul(prod, rows)
        return self.rank([list(r) for r in prod])


class TableKernel:
    """F_{p^k} arithmetic through dense add/mul/inv/frobenius tables."""

    MAX_ORDER = 4096  # q^2 table entries; plenty for every field in scope

    def __init__(self, p: int, k: int, modulus: tuple[int, ...]):
        q = p**k
        if q > self.MAX_ORDER:
            raise ValueError(
                f"field of order {q} too large for the table kernel "
                f"(cap {self.MAX_ORDER})"
            )
        self.char = p
        self.k = k
        self.q = q
        digits = []
        for e in range(q):
            ds = []
            v = e
            for _ in range(k):
                v, r = divmod(v, p)
                ds.append(r)
            digits.append(ds)

        def enc(ds):
            e = 0
            for c in reversed(ds):
                e = e * p + c
            return e

        self.add = [
            [enc([(a + b) % p for a, b in zip(da, db)]) for db in digits]
            for da in digits
        ]
        self.neg = [enc([-a % p for a in ds]) for ds in digits]

        mod_low = modulus[:k]
        mul = []
        for da in digits:
            row = []
            for db in digits:
                prod = [0] * (2 * k - 1)
                for i, ai in enumerate(da):
                    if ai:
                        for j, bj in enumerate(db):
                            prod[i + j] += ai * bj
                for i in range(2 * k - 2, k - 1, -1):
                    c = prod[i] % p
                    if c:
                        base = i - k
                        for j in range(k):
                            prod[base + j] -= c * mod_low[j]
                row.append(enc([v % p for v in prod[:k]]))
            mul.append(row)
        self.mul = mul

        self.inv = [0] * q
        for x in range(1, q):
            self.inv[x] = mul[x].index(1)
        self.frob_table = [self._pow_enc(x, p) for x in range(q)]

    def _pow_enc(self, x, n):
        mul = self.mul
        result = 1
        base = x
        while n:
            if n & 1:
                result = mul[result][base]
            base = mul[base][base]
            n >>= 1
        return result

    def frob(self, x):
        return self.frob_table[x]

    def mul_enc(self, x, y):
        return self.mul[x][y]

    # -- polynomial primitives --

    def poly_mul(self, a, b):
        add = self.add
        mul = self.mul
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                mrow = mul[ai]
                for j, bj in enumerate(b):
                    if bj:
                        out[i + j] = add[out[i + j]][mrow[bj]]
        return out

    def poly_mul_trunc(self, a, b, n):
        add = self.add
        mul = self.mul
        out = [0] * min(n, len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if i >= n:
                break
            if ai:
                mrow = mul[ai]
                top = min(len(b), n - i)
                for j in range(top):
                    bj = b[j]
                    if bj:
                        out[i + j] = add[out[i + j]][mrow[bj]]
        return out

    def poly_pow(self, a, e):
        result = list(a)
        for bit in bin(e)[3:]:
            result = self.poly_mul(result, result)
            if bit == "1":
                result = self.poly_mul(result, a)
        return result

    def poly_pow_trunc(self, a, e, n):
        result = a[:n]
        for bit in bin(e)[3:]:
            result = self.poly_mul_trunc(result, result, n)
            if bit == "1":
                result = self.poly_mul_trunc(result, a, n)
        return result

    def is_squarefree(self, f):
        p = self.char
        add = self.add
        mul = self.mul
        neg = self.neg
        inv = self.inv
        d = [mul[i % p][f[i]] for i in range(1, len(f))]
        while d and d[-1] == 0:
            d.pop()
        if not d:
            return False
        a, b = list(f), d
        while True:
            db = len(b) - 1
            if db == 0:
                return True
            r = a
            binv = inv[b[db]]
            for i in range(len(r) - 1 - db, -1, -1):
                c = r[db + i]
                if c:
                    qc = mul[c][binv]
                    qrow = mul[qc]
                    for j in range(db):
                        bj = b[j]
                        if bj:
                            r[i + j] = add[r[i + j]][neg[qrow[bj]]]
                    r[db + i] = 0
            while r and r[-1] == 0:
                r.pop()
            if not r:
                return False
            a, b = b, r

    # -- matrices --

    def rank(self, rows):
        add = self.add
        mul = self.mul
        neg = self.neg
        inv = self.inv
        m = len(rows)
        n = len(rows[0]) if m else 0
        r = 0
        for col in range(n):
            pivot = -1
            for i in range(r, m):
                if rows[i][col]:
                    pivot = i
                    break
            if pivot < 0:
                continue
            rows[r], rows[pivot] = rows[pivot], rows[r]
            prow = rows[r]
            pinv = inv[prow[col]]
            for i in range(r + 1, m):
                c = rows[i][col]
                if c:
                    factor = mul[c][pinv]
                    frow = mul[factor]
                    row = rows[i]
                    for j in range(col, n):
                        pj = prow[j]
                        if pj:
                            row[j] = add[row[j]][neg[frow[pj]]]
            r += 1
            if r == m:
                break
        return r

    def _matmul(self, x, y):
        add = self.add
        mul = self.mul
        cols = list(zip(*y))
        out = []
        for row in x:
            orow = []
            for col in cols:
                acc = 0
                for a, b in zip(row, col):
                    if a and b:
                        acc = add[acc][mul[a][b]]
                orow.append(acc)
            out.append(orow)
        return out

    def p_rank(self, rows, g):
        frob = self.frob_table
        prod = rows
        twisted = rows
        for _ in range(1, g):
            twisted = [[frob[x] for x in row] for row in twisted]
            prod = self._matmul(prod, twisted)
        return self.rank([list(r) for r in prod])


_KERNELS: dict[tuple, PrimeKernel | TableKernel] = {}


def get_kernel(p: int, k: int, modulus: tuple[int, ...], force_table: bool = False):
    key = (p, k, tuple(modulus), force_table)
    kern = _KERNELS.get(key)
    if kern is None:
        if k == 1 and not force_table:
            kern = PrimeKernel(p)
        else:
            kern = TableKernel(p, k, tuple(modulus))
        _KERNELS[key] = kern
    return kern


# ---------------------------------------------------------------------------
# per-candidate pipeline and shard scan


def matrix_rows(kappa, g, p):
    """Rows of [kappa_{p*i - j}] (1-indexed i, j); out-of-range reads are 0."""
    n = len(kappa)
    return [
        [kappa[p * i - j] if 0 <= p * i - j < n else 0 for j in range(1, g + 1)]
        for i in range(1, g + 1)
    ]


def end_rows(kern, f, g):
    """Rows 1 and g of the matrix from truncated powers of f and of its
    reversal; used by the rank-1 prefilter without a full expansion."""
    p = kern.char
    e = (p - 1) // 2
    low_in = f[:p]
    while low_in and low_in[-1] == 0:
        low_in.pop()
    low = kern.poly_pow_trunc(low_in, e, p) if low_in else []
    half = (p + 1) // 2
    rev = f[::-1]
    high_in = rev[:half]
    high = kern.poly_pow_trunc(high_in, e, half)
    nl, nh = len(low), len(high)
    row1 = [low[p - j] if 0 <= p - j < nl else 0 for j in range(1, g + 1)]
    rowg = []
    shift = g - e
    for j in range(1, g + 1):
        t = j - shift
        rowg.append(high[t] if 0 <= t < nh else 0)
    return row1, rowg


def rows_could_be_rank_le_1(kern, r1, rg):
    """False only when some 2x2 minor of the two rows is provably nonzero
    (which forces rank >= 2)."""
    j0 = -1
    for j, v in enumerate(r1):
        if v:
            j0 = j
            break
    if j0 < 0:
        return True
    mul_enc = kern.mul_enc
    a = r1[j0]
    b = rg[j0]
    for j in range(len(r1)):
        if mul_enc(a, rg[j]) != mul_enc(b, r1[j]):
            return False
    return True


def scan(task: dict) -> dict:
    """Run one shard of a search; pure function of the task description.

    Returns enumerated/squarefree/rank/p-rank counts and up to
    ``collect_limit`` matching coefficient vectors (encodings, ascending).
    """
    kern = get_kernel(task["p"], task["k"], tuple(task["modulus"]))
    q = kern.q
    p = kern.char
    e = (p - 1) // 2
    degree = task["degree"]
    g = (degree - 1) // 2
    factor = task["factor"]
    free = task["free"]
    require_smooth = task["require_smooth"]
    target_a = task["target_a"]
    target_p_rank = task["target_p_rank"]
    limit = task["collect_limit"]
    target_rank = g - target_a if target_a is not None else None
    use_prefilter = (
        task["prefilter"] and target_rank == 1 and e >= 2
    )

    cof_len = degree + 1 - (len(factor) - 1 if factor else 0)
    u = [0] * cof_len
    for idx, enc in task["fixed"]:
        u[idx] = enc

    poly_mul = kern.poly_mul
    is_squarefree = kern.is_squarefree
    poly_pow = kern.poly_pow
    rank = kern.rank
    p_rank = kern.p_rank

    if task["mode"] == "exhaustive":
        if free:
            u[free[-1]] = task["top"]
            vary = free[:-1]
        else:
            vary = []
        total = q ** len(vary)
        vals = [0] * len(vary)
        sample_iter = None
    else:
        vary = list(free)
        draws = task["draws"]
        total = task["count"]
        nf = len(vary)
        sample_iter = True

    n_sq = 0
    n_rank = 0
    n_pr = 0
    wits: list[list[int]] = []

    for n in range(total):
        if sample_iter is None:
            if n:
                i = 0
                while True:
                    v = vals[i] + 1
                    if v < q:
                        vals[i] = v
                        u[vary[i]] = v
                        break
                    vals[i] = 0
                    u[vary[i]] = 0
                    i += 1
        else:
            base = n * nf
            for t in range(nf):
                u[vary[t]] = draws[base + t]

        f = poly_mul(factor, u) if factor else u

        sq = is_squarefree(f)
        if sq:
            n_sq += 1
        if require_smooth and not sq:
            continue

        if target_rank is None and target_p_rank is None:
            n_rank += 1
            n_pr += 1
            if len(wits) < limit:
                wits.append(list(f))
            continue

        if use_prefilter:
            r1, rg = end_rows(kern, f, g)
            if not rows_could_be_rank_le_1(kern, r1, rg):
                continue

        kappa = poly_pow(f, e) if e > 1 else list(f)
        rows = matrix_rows(kappa, g, p)
        if target_rank is not None:
            if rank([row[:] for row in rows]) != target_rank:
                continue
        n_rank += 1
        if target_p_rank is not None:
            if p_rank(rows, g) != target_p_rank:
                continue
        n_pr += 1
        if len(wits) < limit:
            wits.append(list(f))

    return {
        "enumerated": total,
        "squarefree": n_sq,
        "rank_matched": n_rank,
        "p_rank_matched": n_pr,
        "witnesses": wits,
    }

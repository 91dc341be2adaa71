"""Exact arithmetic in small prime and extension fields F_{p^k}.

A field is described by a :class:`FieldSpec` (odd prime characteristic ``p``,
extension degree ``k``, and a monic irreducible modulus of degree ``k`` over
F_p).  Elements are immutable coordinate vectors over F_p, ascending powers of
the generator, always kept in canonical reduced form.

The representation is deliberately table-free and allocation-honest: fields in
scope are tiny (p <= 13, k <= 3 in practice) and exactness beats speed.  The
search engine keeps its own integer-encoded fast path and is cross-checked
against this module by the test suite.

Text formats:
  * element: prime field as a decimal integer ("5"); extension field as a
    bracketed ascending coordinate list ("[2,1]" means 2 + a).  A bare decimal
    over an extension field is accepted on input as the constant embedding.
  * field: "p=3,k=2,mod=[1,0,1]".
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Sequence

__all__ = [
    "FieldSpec",
    "FieldElement",
    "make_field",
    "enumerate_field",
    "random_element",
    "parse_element",
    "parse_field_spec",
]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _rand_below(rng: random.Random, n: int) -> int:
    """Uniform integer in [0, n) from ``rng`` via bit rejection.

    This is the project's pinned draw primitive: ceil(log2(n)) bits from
    MT19937 ``getrandbits``, rejecting values >= n.  Identical seeds give
    identical streams on every platform and Python version.
    """
    if n <= 1:
        return 0
    bits = (n - 1).bit_length()
    while True:
        r = rng.getrandbits(bits)
        if r < n:
            return r


@dataclass(frozen=True)
class FieldSpec:
    """Description of F_{p^k}.

    ``modulus`` is the defining monic irreducible, length k+1, ascending
    powers, residues in [0, p-1].  For k = 1 it is the formal placeholder
    (0, 1) and plays no role in arithmetic.  Build instances through
    :func:`make_field`, which validates everything.
    """

    p: int
    k: int
    modulus: tuple[int, ...]

    @property
    def order(self) -> int:
        return self.p**self.k

    def element(self, value: int | Sequence[int]) -> "FieldElement":
        """Element from an integer (constant embedding, reduced mod p) or a
        full coordinate sequence."""
        if isinstance(value, int):
            coords = (value,) + (0,) * (self.k - 1)
        else:
            if len(value) != self.k:
                raise ValueError(
                    f"expected {self.k} coordinates, got {len(value)}"
                )
            coords = tuple(value)
        return FieldElement(self, coords)

    def from_encoding(self, e: int) -> "FieldElement":
        """Element number ``e`` in the canonical base-p enumeration order."""
        if not 0 <= e < self.order:
            raise ValueError(f"encoding {e} out of range for {self}")
        coords = []
        for _ in range(self.k):
            e, r = divmod(e, self.p)
            coords.append(r)
        return FieldElement(self, tuple(coords))

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, (0,) * self.k)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, (1,) + (0,) * (self.k - 1))

    @property
    def gen(self) -> "FieldElement":
        """The generator a of the extension (the residue of x); requires k > 1."""
        if self.k < 2:
            raise ValueError("prime field has no extension generator")
        return FieldElement(self, (0, 1) + (0,) * (self.k - 2))

    def text(self) -> str:
        return f"p={self.p},k={self.k},mod=[{','.join(str(c) for c in self.modulus)}]"

    def __str__(self) -> str:
        return self.text()


class FieldElement:
    """An element of F_{p^k} in canonical coordinates (ascending powers)."""

    __slots__ = ("spec", "coords")

    def __init__(self, spec: FieldSpec, coords: tuple[int, ...]):
        p = spec.p
        self.spec = spec
        self.coords = tuple(c % p for c in coords)

    def _same_field(self, other: "FieldElement") -> None:
        if self.spec is not other.spec and self.spec != other.spec:
            raise ValueError(
                f"elements of different fields: {self.spec} vs {other.spec}"
            )

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._same_field(other)
        p = self.spec.p
        return FieldElement(
            self.spec, tuple((a + b) % p for a, b in zip(self.coords, other.coords))
        )

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._same_field(other)
        p = self.spec.p
        return FieldElement(
            self.spec, tuple((a - b) % p for a, b in zip(self.coords, other.coords))
        )

    def __neg__(self) -> "FieldElement":
        p = self.spec.p
        return FieldElement(self.spec, tuple(-a % p for a in self.coords))

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._same_field(other)
        spec = self.spec
        if spec.k == 1:
            return FieldElement(spec, ((self.coords[0] * other.coords[0]) % spec.p,))
        return FieldElement(
            spec, _mul_coords(self.coords, other.coords, spec.p, spec.modulus)
        )

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return self * other.inv()

    def __pow__(self, n: int) -> "FieldElement":
        if n < 0:
            return self.inv() ** (-n)
        result = self.spec.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inv(self) -> "FieldElement":
        """Multiplicative inverse; raises ZeroDivisionError on zero."""
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero field element")
        spec = self.spec
        if spec.k == 1:
            return FieldElement(spec, (pow(self.coords[0], -1, spec.p),))
        return self ** (spec.order - 2)

    def frobenius(self, i: int = 1) -> "FieldElement":
        """The i-fold p-th power map a -> a^(p^i)."""
        if i < 0:
            raise ValueError("frobenius power must be >= 0")
        spec = self.spec
        if spec.k == 1:
            return self
        return self ** (spec.p ** (i % spec.k))

    def pth_root(self) -> "FieldElement":
        """The unique b with b^p = a (Frobenius is an automorphism)."""
        return self.frobenius(self.spec.k - 1)

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)

    @property
    def encoding(self) -> int:
        """Position in the canonical base-p enumeration (c0 + c1*p + ...)."""
        e = 0
        for c in reversed(self.coords):
            e = e * self.spec.p + c
        return e

    def __bool__(self) -> bool:
        return not self.is_zero

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.coords == other.coords and self.spec == other.spec

    def __hash__(self) -> int:
        return hash((self.spec, self.coords))

    def __str__(self) -> str:
        if self.spec.k == 1:
            return str(self.coords[0])
        return "[" + ",".join(str(c) for c in self.coords) + "]"

    def __repr__(self) -> str:
        return f"FieldElement({self} in {self.spec})"


def _mul_coords(
    a: tuple[int, ...], b: tuple[int, ...], p: int, modulus: tuple[int, ...]
) -> tuple[int, ...]:
    # schoolbook product followed by reduction modulo the monic modulus
    k = len(a)
    prod = [0] * (2 * k - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    for i in range(2 * k - 2, k - 1, -1):
        c = prod[i] % p
        if c:
            base = i - k
            for j in range(k):
                prod[base + j] -= c * modulus[j]
    return tuple(v % p for v in prod[:k])


def make_field(
    p: int, k: int = 1, modulus: Sequence[int] | None = None
) -> FieldSpec:
    """Validated constructor for F_{p^k}.

    If ``modulus`` is omitted and k > 1, picks the lexicographically smallest
    monic irreducible of degree k over F_p (coefficient tuples compared
    low-to-high as base-p integers).  A supplied modulus must be monic of
    degree k and irreducible.
    """
    if not isinstance(p, int) or p < 3 or not _is_prime(p):
        raise ValueError(f"characteristic must be an odd prime, got {p}")
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"extension degree must be >= 1, got {k}")
    if k == 1:
        if modulus is not None and tuple(modulus) != (0, 1):
            raise ValueError("prime field takes no modulus (placeholder is x)")
        return FieldSpec(p, 1, (0, 1))
    if modulus is None:
        return FieldSpec(p, k, _smallest_irreducible(p, k))
    mod = tuple(int(c) % p for c in modulus)
    if len(mod) != k + 1:
        raise ValueError(f"modulus must have degree {k} (length {k + 1})")
    if mod[-1] != 1:
        raise ValueError("modulus must be monic")
    if not _modulus_irreducible(p, mod):
        raise ValueError(f"modulus {list(mod)} is reducible over F_{p}")
    return FieldSpec(p, k, mod)


def _modulus_irreducible(p: int, mod: tuple[int, ...]) -> bool:
    from .poly import Poly, is_irreducible

    base = make_field(p, 1)
    return is_irreducible(Poly.from_ints(base, mod))


def _smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    for n in range(p**k):
        digits = []
        e = n
        for _ in range(k):
            e, r = divmod(e, p)
            digits.append(r)
        cand = tuple(digits) + (1,)
        if _modulus_irreducible(p, cand):
            return cand
    raise AssertionError("no irreducible polynomial found (unreachable)")


def enumerate_field(spec: FieldSpec) -> Iterator[FieldElement]:
    """All p^k elements exactly once, ascending base-p coordinate order."""
    for e in range(spec.order):
        yield spec.from_encoding(e)


def random_element(spec: FieldSpec, rng: random.Random) -> FieldElement:
    """Uniform element from a seeded generator; identical seeds give
    identical streams (see :func:`_rand_below` for the pinned scheme)."""
    return spec.from_encoding(_rand_below(rng, spec.order))


def _split_csv(text: str) -> list[str]:
    """Split on commas that are outside [...] brackets."""
    parts: list[str] = []
    depth = 0
    current: list[str] = []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced brackets in {text!r}")
        if ch == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    if depth != 0:
        raise ValueError(f"unbalanced brackets in {text!r}")
    parts.append("".join(current))
    return parts


def parse_element(spec: FieldSpec, text: str) -> FieldElement:
    """Parse the element text format (decimal, or bracketed coordinates)."""
    t = text.strip()
    if not t:
        raise ValueError("empty field element")
    if t.startswith("["):
        if not t.endswith("]"):
            raise ValueError(f"malformed element {text!r}")
        inner = t[1:-1].strip()
        coords = [int(c) for c in inner.split(",")] if inner else []
        if len(coords) != spec.k:
            raise ValueError(
                f"element {text!r} has {len(coords)} coordinates, field needs {spec.k}"
            )
        return spec.element(coords)
    return spec.element(int(t))


def parse_field_spec(text: str) -> FieldSpec:
    """Parse "p=3,k=2,mod=[1,0,1]" (k and mod optional)."""
    p = None
    k = 1
    mod: list[int] | None = None
    for part in _split_csv(text):
        key, _, value = part.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "p":
            p = int(value)
        elif key == "k":
            k = int(value)
        elif key == "mod":
            if not (value.startswith("[") and value.endswith("]")):
                raise ValueError(f"malformed modulus in {text!r}")
            mod = [int(c) for c in value[1:-1].split(",")]
        else:
            raise ValueError(f"unknown field spec key {key!r}")
    if p is None:
        raise ValueError(f"field spec {text!r} missing p")
    return make_field(p, k, mod)

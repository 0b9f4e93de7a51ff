"""Dense Clifford algebra Cl(q,p) over complex-capable scalars.

Generators are numbered 1..p+q.  Generators 1..p square to -1 and
generators p+1..p+q square to +1; blade e_J is stored at index
``mask(J)`` with bit ``j-1`` set when generator ``j`` is present.

The two instances used throughout the package are Cl(0,n) (values of
lattice fields, ``Signature(n, 0)``) and Cl(n,n) (operators and
momentum symbols, ``Signature(n, n)``).  In Cl(n,n) the generator
``e_{j+n}`` is identified with the endomorphism ``a -> a' e_j`` of
Cl(0,n), see :func:`endomorphism_matrix`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

MAX_GENERATORS = 12


class CliffordError(ValueError):
    """Raised on signature mismatches and out-of-range axes or grades."""


@dataclass(frozen=True)
class Signature:
    p: int
    q: int = 0

    def __post_init__(self) -> None:
        if self.p < 0 or self.q < 0:
            raise CliffordError(f"negative signature ({self.p}, {self.q})")
        if self.p + self.q > MAX_GENERATORS:
            raise CliffordError(
                f"p+q = {self.p + self.q} exceeds the cap of {MAX_GENERATORS} generators"
            )

    @property
    def dim(self) -> int:
        return self.p + self.q

    @property
    def size(self) -> int:
        return 1 << self.dim

    def square(self, j: int) -> int:
        """Value of e_j * e_j for the 1-based generator index ``j``."""
        return -1 if j <= self.p else 1


def cl0n(n: int) -> Signature:
    return Signature(n, 0)


def clnn(n: int) -> Signature:
    return Signature(n, n)


def popcount(x: int) -> int:
    return bin(x).count("1")


def reorder_sign(a: int, b: int) -> int:
    """Sign picked up when bringing e_a e_b into ascending generator order."""
    a >>= 1
    swaps = 0
    while a:
        swaps += popcount(a & b)
        a >>= 1
    return -1 if swaps & 1 else 1


def blade_product_sign(sig: Signature, a: int, b: int) -> int:
    sign = reorder_sign(a, b)
    common = a & b
    j = 1
    while common:
        if common & 1 and j <= sig.p:
            sign = -sign
        common >>= 1
        j += 1
    return sign


@lru_cache(maxsize=None)
def _product_tables(sig: Signature) -> tuple[np.ndarray, np.ndarray]:
    # permuted layout: row i, column k holds the partner blade j = i ^ k
    size = sig.size
    idx = np.arange(size)
    partner = idx[:, None] ^ idx[None, :]
    signs = np.empty((size, size), dtype=np.float64)
    for i in range(size):
        for k in range(size):
            signs[i, k] = blade_product_sign(sig, i, i ^ k)
    partner.setflags(write=False)
    signs.setflags(write=False)
    return partner, signs


@lru_cache(maxsize=None)
def cayley_tensor(sig: Signature) -> np.ndarray:
    """C[i, j, k] = sign of e_i e_j if e_i e_j = +-e_k, else 0."""
    size = sig.size
    table = np.zeros((size, size, size), dtype=np.float64)
    for i in range(size):
        for j in range(size):
            table[i, j, i ^ j] = blade_product_sign(sig, i, j)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def grades(sig: Signature) -> np.ndarray:
    g = np.array([popcount(m) for m in range(sig.size)], dtype=np.int64)
    g.setflags(write=False)
    return g


def blade_name(mask: int) -> str:
    if mask == 0:
        return "1"
    return "e" + "".join(str(j + 1) for j in range(mask.bit_length()) if mask >> j & 1)


class Multivector:
    """Immutable element of Cl(q,p) with a dense complex coefficient vector."""

    __slots__ = ("sig", "coeffs")

    def __init__(self, sig: Signature, coeffs: Iterable[complex] | np.ndarray) -> None:
        arr = np.array(coeffs, dtype=np.complex128)
        if arr.shape != (sig.size,):
            raise CliffordError(
                f"expected {sig.size} coefficients for {sig}, got shape {arr.shape}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "sig", sig)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is immutable")

    # constructors

    @classmethod
    def zero(cls, sig: Signature) -> Multivector:
        return cls(sig, np.zeros(sig.size))

    @classmethod
    def scalar(cls, sig: Signature, value: complex = 1.0) -> Multivector:
        c = np.zeros(sig.size, dtype=np.complex128)
        c[0] = value
        return cls(sig, c)

    @classmethod
    def blade(cls, sig: Signature, *indices: int, coeff: complex = 1.0) -> Multivector:
        """The product e_{i1} e_{i2} ... of 1-based generators, in the given order."""
        out = cls.scalar(sig, coeff)
        for j in indices:
            if not 1 <= j <= sig.dim:
                raise CliffordError(f"generator index {j} out of range for {sig}")
            out = out * cls.from_mask(sig, 1 << (j - 1))
        return out

    @classmethod
    def from_mask(cls, sig: Signature, mask: int, coeff: complex = 1.0) -> Multivector:
        c = np.zeros(sig.size, dtype=np.complex128)
        c[mask] = coeff
        return cls(sig, c)

    @classmethod
    def vector(cls, sig: Signature, components: Sequence[complex]) -> Multivector:
        if len(components) != sig.dim:
            raise CliffordError("vector needs one component per generator")
        c = np.zeros(sig.size, dtype=np.complex128)
        for j, x in enumerate(components):
            c[1 << j] = x
        return cls(sig, c)

    @classmethod
    def random(cls, sig: Signature, rng: np.random.Generator, complex_: bool = False) -> Multivector:
        c = rng.standard_normal(sig.size)
        if complex_:
            c = c + 1j * rng.standard_normal(sig.size)
        return cls(sig, c)

    # arithmetic

    def _check(self, other: Multivector) -> None:
        if other.sig != self.sig:
            raise CliffordError(f"signature mismatch: {self.sig} vs {other.sig}")

    def __add__(self, other):
        if isinstance(other, Multivector):
            self._check(other)
            return Multivector(self.sig, self.coeffs + other.coeffs)
        if np.isscalar(other):
            return self + Multivector.scalar(self.sig, other)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Multivector):
            self._check(other)
            return Multivector(self.sig, self.coeffs - other.coeffs)
        if np.isscalar(other):
            return self - Multivector.scalar(self.sig, other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self) -> Multivector:
        return Multivector(self.sig, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return geometric_product(self, other)
        if np.isscalar(other):
            return Multivector(self.sig, self.coeffs * other)
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return Multivector(self.sig, self.coeffs * other)
        return NotImplemented

    def __truediv__(self, other):
        if np.isscalar(other):
            return Multivector(self.sig, self.coeffs / other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.sig == other.sig and bool(np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None  # type: ignore[assignment]

    def allclose(self, other: Multivector, rtol: float = 1e-12, atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=rtol, atol=atol))

    def scalar_part(self) -> complex:
        return complex(self.coeffs[0])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def __repr__(self) -> str:
        terms = [
            f"({c.real:.6g}{c.imag:+.6g}j)*{blade_name(m)}" if c.imag else f"{c.real:.6g}*{blade_name(m)}"
            for m, c in enumerate(self.coeffs)
            if c != 0
        ]
        return f"Multivector[{self.sig.p},{self.sig.q}](" + (" + ".join(terms) or "0") + ")"

    # serialization: (mask, re, im) triples, zeros omitted

    def to_records(self) -> list[tuple[int, float, float]]:
        return [(m, float(c.real), float(c.imag)) for m, c in enumerate(self.coeffs) if c != 0]

    @classmethod
    def from_records(cls, sig: Signature, records: Iterable[Sequence[float]]) -> Multivector:
        c = np.zeros(sig.size, dtype=np.complex128)
        for mask, re, im in records:
            mask = int(mask)
            if not 0 <= mask < sig.size:
                raise CliffordError(f"blade mask {mask} out of range for {sig}")
            c[mask] += complex(re, im)
        return cls(sig, c)


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    if a.sig != b.sig:
        raise CliffordError(f"signature mismatch: {a.sig} vs {b.sig}")
    partner, signs = _product_tables(a.sig)
    if a.coeffs.imag.any() or b.coeffs.imag.any():
        return Multivector(a.sig, a.coeffs @ (b.coeffs[partner] * signs))
    return Multivector(a.sig, a.coeffs.real @ (b.coeffs.real[partner] * signs))


def grade_project(a: Multivector, r: int) -> Multivector:
    if not 0 <= r <= a.sig.dim:
        raise CliffordError(f"grade {r} out of range 0..{a.sig.dim}")
    return Multivector(a.sig, np.where(grades(a.sig) == r, a.coeffs, 0))


@lru_cache(maxsize=None)
def _involution_signs(sig: Signature) -> np.ndarray:
    low = (1 << sig.p) - 1
    s = np.array([(-1) ** popcount(m & low) for m in range(sig.size)], dtype=np.float64)
    s.setflags(write=False)
    return s


@lru_cache(maxsize=None)
def _reversion_signs(sig: Signature) -> np.ndarray:
    g = grades(sig)
    s = np.where((g * (g - 1) // 2) % 2 == 0, 1.0, -1.0)
    s.setflags(write=False)
    return s


def main_involution(a: Multivector) -> Multivector:
    """a -> a': negates the first-block generators, fixes the second block."""
    return Multivector(a.sig, a.coeffs * _involution_signs(a.sig))


def reversion(a: Multivector) -> Multivector:
    return Multivector(a.sig, a.coeffs * _reversion_signs(a.sig))


def dagger(a: Multivector) -> Multivector:
    return Multivector(a.sig, a.coeffs * _involution_signs(a.sig) * _reversion_signs(a.sig))


# Pointwise Witt-basis endomorphisms of Cl(0,n)


def _require_cl0n(a: Multivector, j: int) -> int:
    if a.sig.q != 0:
        raise CliffordError(f"Witt endomorphisms act on Cl(0,n), got {a.sig}")
    n = a.sig.p
    if not 1 <= j <= n:
        raise CliffordError(f"axis {j} out of range 1..{n}")
    return n


def dot_vector(j: int, a: Multivector) -> Multivector:
    """e_j . a = -1/2 (e_j a - a' e_j); lowers the grade by one."""
    _require_cl0n(a, j)
    e = Multivector.from_mask(a.sig, 1 << (j - 1))
    return -0.5 * (e * a - main_involution(a) * e)


def wedge_vector(j: int, a: Multivector) -> Multivector:
    """e_j ^ a = 1/2 (e_j a + a' e_j); raises the grade by one."""
    _require_cl0n(a, j)
    e = Multivector.from_mask(a.sig, 1 << (j - 1))
    return 0.5 * (e * a + main_involution(a) * e)


witt_lower = dot_vector  # action of e_j^+
witt_raise = wedge_vector  # action of e_j^-


def axis_commutator(j: int, a: Multivector) -> Multivector:
    """[e_j^+, e_j^-] a: +a_J on blades without j, -a_J on blades containing j."""
    return witt_lower(j, witt_raise(j, a)) - witt_raise(j, witt_lower(j, a))


def involution_operator_K(a: Multivector) -> Multivector:
    """Composition of the axis commutators over every axis of Cl(0,n)."""
    if a.sig.q != 0:
        raise CliffordError(f"K acts on Cl(0,n), got {a.sig}")
    out = a
    for j in range(1, a.sig.p + 1):
        out = axis_commutator(j, out)
    return out


# Matrix forms on coefficient vectors, used for vectorized field operators.


def operator_matrix(fn: Callable[[Multivector], Multivector], sig: Signature) -> np.ndarray:
    """Matrix M with fn(a).coeffs == M @ a.coeffs for a linear map fn."""
    cols = [fn(Multivector.from_mask(sig, m)).coeffs for m in range(sig.size)]
    return np.stack(cols, axis=1)


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.real_if_close(m)
    m.setflags(write=False)
    return m


@lru_cache(maxsize=None)
def witt_lower_matrix(n: int, j: int) -> np.ndarray:
    return _frozen(operator_matrix(lambda a: witt_lower(j, a), cl0n(n)))


@lru_cache(maxsize=None)
def witt_raise_matrix(n: int, j: int) -> np.ndarray:
    return _frozen(operator_matrix(lambda a: witt_raise(j, a), cl0n(n)))


@lru_cache(maxsize=None)
def involution_matrix(n: int) -> np.ndarray:
    return _frozen(np.diag(_involution_signs(cl0n(n))))


@lru_cache(maxsize=None)
def k_matrix(n: int) -> np.ndarray:
    """Matrix of K built by composing axis commutators (not assumed diagonal)."""
    return _frozen(operator_matrix(involution_operator_K, cl0n(n)))


@lru_cache(maxsize=None)
def left_generator_matrix(n: int, j: int) -> np.ndarray:
    """E_j: a -> e_j a on Cl(0,n)."""
    sig = cl0n(n)
    e = Multivector.from_mask(sig, 1 << (j - 1))
    return _frozen(operator_matrix(lambda a: e * a, sig))


@lru_cache(maxsize=None)
def right_generator_matrix(n: int, j: int) -> np.ndarray:
    """E_{j+n}: a -> a' e_j on Cl(0,n)."""
    sig = cl0n(n)
    e = Multivector.from_mask(sig, 1 << (j - 1))
    return _frozen(operator_matrix(lambda a: main_involution(a) * e, sig))


@lru_cache(maxsize=None)
def _blade_endomorphism(n: int, mask: int) -> np.ndarray:
    m = np.eye(1 << n)
    for g in range(2 * n):
        if mask >> g & 1:
            j = g + 1
            gen = left_generator_matrix(n, j) if j <= n else right_generator_matrix(n, j - n)
            m = m @ gen
    return _frozen(m)


def endomorphism_matrix(a: Multivector) -> np.ndarray:
    """Image of a in Cl(n,n) under e_j -> E_j, e_{j+n} -> E_{j+n}, as a complex matrix."""
    if a.sig.p != a.sig.q:
        raise CliffordError(f"endomorphism identification needs Cl(n,n), got {a.sig}")
    n = a.sig.p
    out = np.zeros((1 << n, 1 << n), dtype=np.complex128)
    for mask, c in enumerate(a.coeffs):
        if c != 0:
            out += c * _blade_endomorphism(n, mask)
    return out


def gamma(n: int) -> Multivector:
    """The Cl(n,n) element prod_j e_{j+n} e_j."""
    sig = clnn(n)
    out = Multivector.scalar(sig)
    for j in range(1, n + 1):
        out = out * Multivector.blade(sig, j + n, j)
    return out


def witt_element(n: int, j: int, kind: str) -> Multivector:
    """e_j^+ = (e_{j+n} - e_j)/2 and e_j^- = (e_{j+n} + e_j)/2 as elements of Cl(n,n)."""
    sig = clnn(n)
    ej = Multivector.blade(sig, j)
    ejn = Multivector.blade(sig, j + n)
    if kind == "+":
        return 0.5 * (ejn - ej)
    if kind == "-":
        return 0.5 * (ejn + ej)
    raise CliffordError(f"unknown Witt kind {kind!r}")

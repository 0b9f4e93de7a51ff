"""Exact normal ordering for words in decorated function symbols and Witt letters.

An expression is a formal sum of terms ``c * h^-p * F_1 ... F_k * w`` where
the F_i are function symbols carrying a lattice shift and an involution bit
and w is a word in the Witt letters e_j^- / e_j^+.  Normal form puts every
Witt letter to the right of every function symbol, using

    e_j^+ F = F[-e_j]' e_j^+,      e_j^- F = F[+e_j]' e_j^-,

then orders the Witt word by axis, with e_j^- before e_j^+ inside an axis.
h is a formal unit, so all arithmetic is exact over the rationals.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

RAISE = 0  # e_j^-
LOWER = 1  # e_j^+

Letter = tuple[int, int]  # (axis, RAISE | LOWER)


@dataclass(frozen=True, order=True)
class FunFactor:
    name: str
    shift: tuple[int, ...]
    inv: int = 0

    def shifted(self, j: int, s: int) -> FunFactor:
        sh = list(self.shift)
        sh[j - 1] += s
        return FunFactor(self.name, tuple(sh), self.inv)

    def involuted(self, times: int = 1) -> FunFactor:
        return FunFactor(self.name, self.shift, (self.inv + times) % 2)

    def __str__(self) -> str:
        return f"{self.name}[{','.join(map(str, self.shift))}]" + ("'" if self.inv else "")


def free_symbol(name: str, n: int) -> FunFactor:
    return FunFactor(name, (0,) * n, 0)


def move_witt_past(letter: Letter, factor: FunFactor) -> FunFactor:
    """The factor left behind when ``letter`` moves from its left to its right."""
    axis, kind = letter
    return factor.shifted(axis, -1 if kind == LOWER else 1).involuted()


@lru_cache(maxsize=None)
def normal_order(word: tuple[Letter, ...]) -> tuple[tuple[tuple[Letter, ...], int], ...]:
    """Expand a Witt word into normal-ordered words with integer coefficients."""
    for i in range(len(word) - 1):
        a, b = word[i], word[i + 1]
        if a[0] > b[0]:
            swapped = word[:i] + (b, a) + word[i + 2:]
            return tuple((w, -c) for w, c in normal_order(swapped))
        if a[0] == b[0]:
            if a[1] == b[1]:
                return ()
            if a[1] == LOWER:
                out: dict[tuple[Letter, ...], int] = defaultdict(int)
                for w, c in normal_order(word[:i] + word[i + 2:]):
                    out[w] += c
                for w, c in normal_order(word[:i] + (b, a) + word[i + 2:]):
                    out[w] -= c
                return tuple((w, c) for w, c in sorted(out.items()) if c)
    return ((word, 1),)


TermKey = tuple[tuple[Letter, ...], tuple[FunFactor, ...], int]


@dataclass(frozen=True)
class OperatorExpr:
    """Immutable formal sum; ``terms`` is sorted by (Witt word, function word, h power)."""

    n: int
    terms: tuple[tuple[TermKey, Fraction], ...] = ()

    @classmethod
    def from_dict(cls, n: int, d: Mapping[TermKey, Fraction]) -> OperatorExpr:
        return cls(n, tuple(sorted((k, Fraction(c)) for k, c in d.items() if c != 0)))

    @classmethod
    def zero(cls, n: int) -> OperatorExpr:
        return cls(n)

    @classmethod
    def one(cls, n: int) -> OperatorExpr:
        return cls(n, ((((), (), 0), Fraction(1)),))

    @classmethod
    def fun(cls, n: int, *factors: FunFactor | str) -> OperatorExpr:
        word = tuple(free_symbol(f, n) if isinstance(f, str) else f for f in factors)
        for f in word:
            if len(f.shift) != n:
                raise ValueError(f"factor {f} does not have {n} shift components")
        return cls(n, ((((), word, 0), Fraction(1)),))

    @classmethod
    def witt(cls, n: int, axis: int, kind: int) -> OperatorExpr:
        if not 1 <= axis <= n or kind not in (RAISE, LOWER):
            raise ValueError(f"bad Witt letter ({axis}, {kind}) for n={n}")
        key: TermKey = (((axis, kind),), (), 0)
        return cls(n, ((key, Fraction(1)),))

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: OperatorExpr) -> None:
        if self.n != other.n:
            raise ValueError(f"dimension mismatch {self.n} vs {other.n}")

    def __add__(self, other: OperatorExpr) -> OperatorExpr:
        self._check(other)
        d: dict[TermKey, Fraction] = defaultdict(Fraction)
        for k, c in self.terms + other.terms:
            d[k] += c
        return OperatorExpr.from_dict(self.n, d)

    def __neg__(self) -> OperatorExpr:
        return OperatorExpr(self.n, tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other: OperatorExpr) -> OperatorExpr:
        return self + (-other)

    def scale(self, c: Fraction | int, hpow: int = 0) -> OperatorExpr:
        """Multiply by c * h^-hpow."""
        d = {(w, f, p + hpow): coef * c for (w, f, p), coef in self.terms}
        return OperatorExpr.from_dict(self.n, d)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, self.terms))

    def involute(self) -> OperatorExpr:
        """Apply the main involution factor-wise to every function symbol."""
        d = {(w, tuple(f.involuted() for f in fw), p): c for (w, fw, p), c in self.terms}
        return OperatorExpr.from_dict(self.n, d)

    def sexpr(self) -> str:
        return to_sexpr(self)

    def __str__(self) -> str:
        return self.sexpr()


def compose(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    """Normal form of the product a * b."""
    a._check(b)
    d: dict[TermKey, Fraction] = defaultdict(Fraction)
    for (wa, fa, pa), ca in a.terms:
        for (wb, fb, pb), cb in b.terms:
            moved = fb
            for letter in reversed(wa):
                moved = tuple(move_witt_past(letter, f) for f in moved)
            for w, sign in normal_order(wa + wb):
                d[(w, fa + moved, pa + pb)] += sign * ca * cb
    return OperatorExpr.from_dict(a.n, d)


def compose_all(*exprs: OperatorExpr) -> OperatorExpr:
    out = exprs[0]
    for e in exprs[1:]:
        out = compose(out, e)
    return out


def shift_functions(expr: OperatorExpr, j: int, s: int) -> OperatorExpr:
    d = {(w, tuple(f.shifted(j, s) for f in fw), p): c for (w, fw, p), c in expr.terms}
    return OperatorExpr.from_dict(expr.n, d)


def diff(expr: OperatorExpr, j: int, direction: int) -> OperatorExpr:
    """Forward (direction > 0) or backward difference along axis j.

    Only the function symbols are shifted; Witt letters to their right are
    untouched.
    """
    if direction > 0:
        return (shift_functions(expr, j, 1) - expr).scale(1, 1)
    return (expr - shift_functions(expr, j, -1)).scale(1, 1)


def diff_expand(j: int, direction: int, word: Iterable[FunFactor | str], n: int) -> OperatorExpr:
    """Difference of a product word through the discrete product rule.

    d+(F G) = (d+F) G + F[+e_j] (d+G) and d-(F G) = (d-F) G + F[-e_j] (d-G),
    applied recursively from the left.
    """
    word = tuple(free_symbol(f, n) if isinstance(f, str) else f for f in word)
    if not word:
        return OperatorExpr.zero(n)
    first, rest = word[0], word[1:]
    s = 1 if direction > 0 else -1
    single = diff(OperatorExpr.fun(n, first), j, direction)
    head = compose(single, OperatorExpr.fun(n, *rest)) if rest else single
    if not rest:
        return head
    tail = compose(OperatorExpr.fun(n, first.shifted(j, s)), diff_expand(j, direction, rest, n))
    return head + tail


def dirac_half(expr: OperatorExpr, direction: int) -> OperatorExpr:
    """sum_j e_j^+ d^{+j} (direction > 0) or sum_j e_j^- d^{-j} applied to expr."""
    kind = LOWER if direction > 0 else RAISE
    out = OperatorExpr.zero(expr.n)
    for j in range(1, expr.n + 1):
        out = out + compose(OperatorExpr.witt(expr.n, j, kind), diff(expr, j, direction))
    return out


def star_laplacian_expr(expr: OperatorExpr) -> OperatorExpr:
    out = OperatorExpr.zero(expr.n)
    for j in range(1, expr.n + 1):
        second = shift_functions(expr, j, 1) + shift_functions(expr, j, -1) - expr.scale(2)
        out = out + second.scale(1, 2)
    return out


@dataclass(frozen=True)
class Verdict:
    check: str
    n: int
    variant: str
    equal: bool
    lhs: OperatorExpr
    rhs: OperatorExpr

    @property
    def label(self) -> str:
        if self.check == "nilpotent":
            return "zero" if self.equal else "not zero"
        return "equal" if self.equal else "not equal"

    def to_json(self, include_forms: bool | None = None) -> dict:
        out = {"check": self.check, "n": self.n, "variant": self.variant,
               "verdict": self.label}
        if include_forms or (include_forms is None and not self.equal):
            out["lhs"] = self.lhs.sexpr()
            out["rhs"] = self.rhs.sexpr()
        return out


def check_leibniz(n: int, direction: int = 1, mutate: bool = False) -> Verdict:
    """D(f g) against (D f) g + f' (D g) for D = sum_j e_j^+- d^{+-j}.

    ``mutate`` drops the involution on f in the second term.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    f, g = OperatorExpr.fun(n, "f"), OperatorExpr.fun(n, "g")
    lhs = dirac_half(OperatorExpr.fun(n, "f", "g"), direction)
    f_left = f if mutate else f.involute()
    rhs = compose(dirac_half(f, direction), g) + compose(f_left, dirac_half(g, direction))
    variant = ("plus" if direction > 0 else "minus") + ("-mutated" if mutate else "")
    return Verdict("leibniz", n, variant, lhs == rhs, lhs, rhs)


def check_nilpotent(n: int, direction: int = 1, single_axis: bool = False) -> Verdict:
    """(sum_j e_j^+- d^{+-j})^2 f reduces to the zero expression."""
    if n < 1:
        raise ValueError("n must be >= 1")
    f = OperatorExpr.fun(n, "f")
    if single_axis:
        kind = LOWER if direction > 0 else RAISE
        e = OperatorExpr.witt(n, 1, kind)
        once = compose(e, diff(f, 1, direction))
        lhs = compose(e, diff(once, 1, direction))
    else:
        lhs = dirac_half(dirac_half(f, direction), direction)
    variant = ("plus" if direction > 0 else "minus") + ("-single" if single_axis else "")
    return Verdict("nilpotent", n, variant, lhs.is_zero(), lhs, OperatorExpr.zero(n))


def check_laplacian_factorization(n: int, half_only: bool = False) -> Verdict:
    """d+ d- f + d- d+ f against the star Laplacian of f.

    ``half_only`` keeps only d+ d- f, which misses half of the identity.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    f = OperatorExpr.fun(n, "f")
    lhs = dirac_half(dirac_half(f, -1), 1)
    if not half_only:
        lhs = lhs + dirac_half(dirac_half(f, 1), -1)
    rhs = star_laplacian_expr(f)
    return Verdict("laplacian", n, "half" if half_only else "full", lhs == rhs, lhs, rhs)


def _fmt_coef(c: Fraction, p: int) -> str:
    s = str(c)
    return s if p == 0 else f"{s} h^-{p}"


def to_sexpr(expr: OperatorExpr) -> str:
    if expr.is_zero():
        return "0"
    parts = []
    for (w, fw, p), c in expr.terms:
        letters = [f"e{axis}{'+' if kind == LOWER else '-'}" for axis, kind in w]
        items = [_fmt_coef(c, p)] + [str(f) for f in fw] + letters
        parts.append("(* " + " ".join(items) + ")")
    return "(+ " + " ".join(parts) + ")"

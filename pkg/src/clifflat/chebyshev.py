"""Chebyshev polynomials of the first kind and exact lattice solutions built from them.

The multivariable polynomial used here is

    T0(x; lam, a) = a * prod_j T_{|k_j|}(lam_j),    x = k h,

which solves the lattice Klein-Gordon equation whenever
``sum_j 2 lam_j = (m h)^2 + 2 n``.  Its chiral projections
``(1 +- chi_h) T0 / 2`` depend on how chi_h is evaluated once the projected
field sits inside a difference stencil; see :class:`Convention`.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import clifford as cl
from . import lattice as lf
from .clifford import Multivector
from .lattice import Field, LatticeBox, MassTerm, Semantics

KG_CONSTRAINT_TOL = 1e-12
IMAG_SANITY = 1e-10
_EXACT_K_LIMIT = 4096


class ChebyshevError(ValueError):
    pass


class Convention(str, enum.Enum):
    """How chi_h inside a projected polynomial behaves under lattice shifts.

    STATIC keeps chi_h at the stencil centre for every neighbour; SHIFTED
    re-evaluates chi_h at each neighbour site.  At a single site they agree.
    """

    STATIC = "static"
    SHIFTED = "shifted"


def cheb_T(k: int, lam: float) -> float:
    """T_|k|(lam), evaluated branch by branch.

    Integer arguments go through the integer three-term recurrence so that
    values such as T_3(2) = 26 come out exact.
    """
    k = abs(int(k))
    lam = float(lam)
    if lam.is_integer() and k <= _EXACT_K_LIMIT:
        t_prev, t = 1, int(lam)
        if k == 0:
            return 1.0
        two_lam = 2 * int(lam)
        for _ in range(k - 1):
            t_prev, t = t, two_lam * t - t_prev
        return float(t)
    if abs(lam) <= 1.0:
        return math.cos(k * math.acos(lam))
    if lam < -1.0:
        return (-1.0) ** k * cheb_T(k, -lam)
    root = lam + math.sqrt((lam - 1.0) * (lam + 1.0))
    try:
        return 0.5 * (root ** k + root ** (-k))
    except OverflowError:
        return math.inf


def cheb_T_recurrence(k: int, lam: float) -> float:
    """Plain floating-point T_{k+1} = 2 lam T_k - T_{k-1}; used as a cross-check."""
    k = abs(int(k))
    t_prev, t = 1.0, float(lam)
    if k == 0:
        return 1.0
    for _ in range(k - 1):
        t_prev, t = t, 2.0 * lam * t - t_prev
    return t


def conjugate_root_power(t: int, lam: float, gam_sign: int) -> float | complex:
    """(lam +- sqrt(lam^2 - 1))^t; complex when |lam| < 1."""
    if gam_sign not in (1, -1):
        raise ChebyshevError("gam_sign must be +1 or -1")
    t = int(t)
    if abs(lam) >= 1.0:
        s = math.sqrt((lam - 1.0) * (lam + 1.0))
        return (lam + gam_sign * s) ** t
    s = cmath.sqrt(lam * lam - 1.0)
    return (lam + gam_sign * s) ** t


def hyp2f1_terminating(k: int, t: complex) -> complex:
    """2F1(-k, k; 1/2; t) summed term by term; terminates after |k|+1 terms."""
    k = abs(int(k))
    total = 0.0
    term = 1.0
    for s in range(k + 1):
        total += term
        # ratio of consecutive Pochhammer terms
        term = term * (-k + s) * (k + s) / ((0.5 + s) * (s + 1)) * t
    return total


def operator_power_split(c: float, mu: float, s: int, projector: np.ndarray) -> np.ndarray:
    """(c + mu P)^s for an idempotent P, as P (c+mu)^s + (1-P) c^s."""
    eye = np.eye(projector.shape[0])
    return projector * (c + mu) ** s + (eye - projector) * c ** s


def hyp2f1_operator(k: int, c: float, mu: float, projector: np.ndarray) -> np.ndarray:
    """2F1(-k, k; 1/2; c + mu P) for an idempotent P, evaluated on both eigenspaces."""
    eye = np.eye(projector.shape[0])
    return (projector * hyp2f1_terminating(k, c + mu)
            + (eye - projector) * hyp2f1_terminating(k, c))


@dataclass(frozen=True)
class ChebyshevParams:
    n: int
    h: float
    m: float
    y: tuple[float, ...]
    alpha: tuple[float, ...]
    a: Multivector
    convention: Convention = Convention.STATIC

    def __post_init__(self) -> None:
        if len(self.y) != self.n or len(self.alpha) != self.n:
            raise ChebyshevError("y and alpha need one entry per axis")
        if self.a.sig != cl.cl0n(self.n):
            raise ChebyshevError(f"amplitude must live in Cl(0,{self.n})")
        object.__setattr__(self, "convention", Convention(self.convention))

    @property
    def lam(self) -> tuple[float, ...]:
        return tuple(yj + 2.0 * aj for yj, aj in zip(self.y, self.alpha))

    def kg_constraint_defect(self) -> float:
        lhs = sum(2.0 * yj + 4.0 * aj for yj, aj in zip(self.y, self.alpha))
        return abs(lhs - ((self.m * self.h) ** 2 + 2 * self.n))

    def satisfies_kg_constraint(self) -> bool:
        return self.kg_constraint_defect() < KG_CONSTRAINT_TOL

    @classmethod
    def dirac_split(cls, n: int, h: float, m: float, a: Multivector | None = None,
                    weights: Sequence[float] | None = None,
                    convention: Convention = Convention.STATIC) -> ChebyshevParams:
        """sum y_j = (mh)^2/2 spread by ``weights``, alpha_j = 1/2."""
        w = _weights(n, weights)
        y = tuple(wj * (m * h) ** 2 / 2.0 for wj in w)
        a = Multivector.scalar(cl.cl0n(n)) if a is None else a
        return cls(n, h, m, y, (0.5,) * n, a, convention)

    def to_json(self) -> dict:
        return {"n": self.n, "h": self.h, "m": self.m, "y": list(self.y),
                "alpha": list(self.alpha), "lambda": list(self.lam),
                "amplitude": self.a.to_records(), "convention": self.convention.value}


def _weights(n: int, weights: Sequence[float] | None) -> tuple[float, ...]:
    if weights is None:
        return (1.0 / n,) * n
    w = tuple(float(v) for v in weights)
    if len(w) != n:
        raise ChebyshevError(f"need {n} weights, got {len(w)}")
    if abs(sum(w) - 1.0) > 1e-12:
        raise ChebyshevError(f"weights must sum to 1, got {sum(w)!r}")
    return w


def cheb_T0_multi(params: ChebyshevParams, x: Sequence[int]) -> Multivector:
    """a * prod_j T_{|k_j|}(y_j + 2 alpha_j) at the site with integer labels x."""
    value = 1.0
    for kj, lj in zip(x, params.lam):
        value *= cheb_T(kj, lj)
    return value * params.a


def cheb_T0_conjugate_roots(params: ChebyshevParams, x: Sequence[int]) -> Multivector:
    """Same value as :func:`cheb_T0_multi`, through the conjugate-root closed form."""
    value = 1.0 + 0.0j
    for kj, lj in zip(x, params.lam):
        value *= conjugate_root_power(abs(kj), lj, 1) + conjugate_root_power(abs(kj), lj, -1)
    value /= 2 ** params.n
    if abs(value.imag) > IMAG_SANITY * max(1.0, abs(value.real)):
        raise ChebyshevError(f"conjugate-root sum has imaginary part {value.imag}")
    return value.real * params.a


def cheb_T0_field(params: ChebyshevParams, box: LatticeBox) -> Field:
    if box.n != params.n or box.h != params.h:
        raise ChebyshevError("box dimension or mesh width does not match the parameters")
    weights = np.ones(box.shape)
    for axis, (lo, hi, lam) in enumerate(zip(box.lo, box.hi, params.lam)):
        t = np.array([cheb_T(k, lam) for k in range(lo, hi + 1)])
        shape = [1] * box.n
        shape[axis] = -1
        weights = weights * t.reshape(shape)
    return Field(box, weights[..., None] * params.a.coeffs)


def _projector_value(value: Multivector, sign: int, sigma: float) -> Multivector:
    kv = cl.involution_operator_K(value)
    return 0.5 * (value + sign * sigma * kv)


def cheb_projected(params: ChebyshevParams, sign: int, x: Sequence[int]) -> Multivector:
    """(1 +- chi_h(x)) T0(x) / 2 at a single site; both conventions agree here."""
    if all(aj == 0 for aj in params.alpha):
        raise ChebyshevError("projected polynomials need alpha != 0")
    sigma = (-1.0) ** (sum(int(k) for k in x) % 2)
    return _projector_value(cheb_T0_multi(params, x), sign, sigma)


def projected_apply(op: Callable[[Field], Field], base: Field, sign: int,
                    convention: Convention = Convention.STATIC,
                    mass_term: MassTerm = MassTerm.CHI) -> Field:
    """op applied to (1 +- X) base / 2 with X = chi_h or K.

    With X = chi_h and the STATIC convention, the projector inside op is
    frozen at the site where op's output is read, so the result at c is
    (op(base) +- sigma(c) op(K base))(c) / 2.  op must be linear.
    """
    if MassTerm(mass_term) is MassTerm.K or Convention(convention) is Convention.SHIFTED:
        return op(lf.project_chiral(base, sign, mass_term))
    plain = op(base)
    flipped = op(lf.k_action(base)).scale_sites(base.box.sigma())
    return 0.5 * (plain + flipped) if sign > 0 else 0.5 * (plain - flipped)


def cheb_projected_field(params: ChebyshevParams, sign: int, box: LatticeBox,
                         mass_term: MassTerm = MassTerm.CHI) -> Field:
    if all(aj == 0 for aj in params.alpha):
        raise ChebyshevError("projected polynomials need alpha != 0")
    return lf.project_chiral(cheb_T0_field(params, box), sign, mass_term)


def cheb_operator_definition(params: ChebyshevParams, sign: int, x: Sequence[int]) -> Multivector:
    """prod_j 2F1(-k_j, k_j; 1/2; (1-y_j)/2 +- alpha_j chi_h(x)) a, with an operator argument.

    chi_h(x) = sigma(x) K = sigma(x) (2 P - 1) with P = (1+K)/2, so each factor is
    evaluated on the two eigenspaces of K.
    """
    n = params.n
    p_plus = (np.eye(1 << n) + cl.k_matrix(n)) / 2.0
    sigma = (-1.0) ** (sum(int(k) for k in x) % 2)
    out = np.eye(1 << n)
    for kj, yj, aj in zip(x, params.y, params.alpha):
        coef = sign * aj * sigma
        c = (1.0 - yj) / 2.0 - coef
        out = out @ hyp2f1_operator(kj, c, 2.0 * coef, p_plus)
    return Multivector(params.a.sig, out @ params.a.coeffs)


@dataclass(frozen=True)
class SolutionField:
    field: Field
    params: ChebyshevParams
    builder: str
    convention: Convention | None = None
    extra: dict = field(default_factory=dict)


def build_kg_solution(n: int, h: float, m: float, weights: Sequence[float] | None = None,
                      a: Multivector | None = None, box: LatticeBox | None = None) -> SolutionField:
    """g(x) = a prod_j T_{|k_j|}(1 + w_j (mh)^2 / 2)."""
    w = _weights(n, weights)
    lam = tuple(1.0 + wj * (m * h) ** 2 / 2.0 for wj in w)
    a = Multivector.scalar(cl.cl0n(n)) if a is None else a
    params = ChebyshevParams(n, h, m, lam, (0.0,) * n, a)
    box = LatticeBox.cube(n, h, -4, 4) if box is None else box
    return SolutionField(cheb_T0_field(params, box), params, "kg")


def _coupled_convention(u: Field, m: float, sem: Semantics, mass_term: MassTerm,
                        convention: Convention) -> lf.CoupledResiduals:
    """Coupled-system residuals for f_+- = (1 +- X) u / 2, stencils read per convention."""
    d = lambda f: lf.dirac_dh(f, sem)  # noqa: E731
    f_plus = lf.project_chiral(u, 1, mass_term)
    f_minus = lf.project_chiral(u, -1, mass_term)
    d_plus = projected_apply(d, u, 1, convention, mass_term)
    d_minus = projected_apply(d, u, -1, convention, mass_term)
    x = lf.mass_operator(mass_term)
    return lf.CoupledResiduals(
        literal=((d_plus - m * f_plus).max_norm(), (d_minus + m * f_minus).max_norm()),
        cross=((d_minus - m * f_plus).max_norm(), (d_plus + m * f_minus).max_norm()),
        full=lf.dirac_residual(u, m, sem, mass_term)[1],
        eigen=((x(f_plus) - f_plus).max_norm(), (x(f_minus) + f_minus).max_norm()),
    )


def build_dirac_solutions(n: int, h: float, m: float, a: Multivector | None = None,
                          box: LatticeBox | None = None, sem: Semantics = Semantics.S1,
                          mass_term: MassTerm = MassTerm.K,
                          convention: Convention = Convention.STATIC,
                          weights: Sequence[float] | None = None
                          ) -> tuple[SolutionField, SolutionField, dict]:
    """Spinor components f_+- = (1 +- X)(D_h g - m X g)/2 from a Chebyshev KG solution g.

    The report also carries residuals for the variant that subtracts m g instead
    of m X g, and for the pair D_h T^(-+alpha) - m T^(+-alpha).
    """
    sem, mass_term, convention = Semantics(sem), MassTerm(mass_term), Convention(convention)
    params = ChebyshevParams.dirac_split(n, h, m, a, weights, convention)
    box = LatticeBox.cube(n, h, -4, 4) if box is None else box
    g = cheb_T0_field(params, box)
    x = lf.mass_operator(mass_term)
    d = lambda f: lf.dirac_dh(f, sem)  # noqa: E731

    u = d(g) - m * x(g)
    f_plus = lf.project_chiral(u, 1, mass_term)
    f_minus = lf.project_chiral(u, -1, mass_term)
    x_mass = _coupled_convention(u, m, sem, mass_term, convention)
    scalar_mass = _coupled_convention(d(g) - m * g, m, sem, mass_term, convention)

    t_plus = lf.project_chiral(g, 1, mass_term)
    t_minus = lf.project_chiral(g, -1, mass_term)
    s_plus = projected_apply(d, g, -1, convention, mass_term) - m * t_plus
    s_minus = projected_apply(d, g, 1, convention, mass_term) - m * t_minus
    spinor = lf.coupled_residuals(s_plus, s_minus, m, sem, mass_term)

    report = {
        "params": params.to_json(),
        "box": box.to_json(),
        "semantics": sem.value,
        "mass_term": mass_term.value,
        "convention": convention.value,
        "kg_residual": lf.kg_residual(g, m)[1],
        "kg_constraint_defect": params.kg_constraint_defect(),
        "x_mass_form": x_mass.to_json(),
        "scalar_mass_form": scalar_mass.to_json(),
        "spinor_form": spinor.to_json(),
    }
    mk = lambda f, name: SolutionField(f, params, name, convention)  # noqa: E731
    return mk(f_plus, "dirac_plus"), mk(f_minus, "dirac_minus"), report


def _recurrence_op(params: ChebyshevParams, j: int) -> Callable[[Field], Field]:
    lam = params.lam[j - 1]
    return lambda f: lf.shift(f, j, 1) + lf.shift(f, j, -1) - (2.0 * lam) * f


def check_recurrence(params: ChebyshevParams, box: LatticeBox, tol: float = 1e-9) -> dict:
    """Three-term recurrence T(x+he_j) + T(x-he_j) = (2y_j + 4alpha_j) T(x), per axis.

    Residuals are scaled by max(1, max|T0|).  The projected variants are
    evaluated under both conventions and reported with their own verdicts.
    """
    if any(hi - lo < 2 for lo, hi in zip(box.lo, box.hi)) and not box.periodic:
        raise ChebyshevError("box has no interior sites")
    g = cheb_T0_field(params, box)
    scale = max(1.0, g.max_norm())
    axes = []
    for j in range(1, params.n + 1):
        op = _recurrence_op(params, j)
        entry = {"axis": j, "unprojected": op(g).max_norm() / scale}
        if any(aj != 0 for aj in params.alpha):
            for conv in Convention:
                for sign, label in ((1, "plus"), (-1, "minus")):
                    r = projected_apply(op, g, sign, conv).max_norm() / scale
                    entry[f"{conv.value}_{label}"] = r
        axes.append(entry)
    verdicts = {"unprojected": all(e["unprojected"] < tol for e in axes)}
    if any(aj != 0 for aj in params.alpha):
        for conv in Convention:
            verdicts[conv.value] = all(
                e[f"{conv.value}_plus"] < tol and e[f"{conv.value}_minus"] < tol for e in axes
            )
    return {"params": params.to_json(), "box": box.to_json(), "tolerance": tol,
            "axes": axes, "verdicts": verdicts}

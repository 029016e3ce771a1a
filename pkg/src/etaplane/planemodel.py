"""Plane models of X_0(N) from triples of weight-12 eta-quotients.

The map z -> (f(z) : g(z) : h(z)) sends X_0(N) onto a plane curve C. Its degree
and the degree of the map satisfy

    map_degree * curve_degree = index - sum over cusps of min(ord f, ord g, ord h)

and the defining polynomial of C is found as the unique (up to scale) linear
relation among the degree-D monomials in f, g, h, checked to the valence bound.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .etaquot import EtaQuotient, certify, delta, delta_scaled, divisor, format_expression, parse_expression
from .maxvanish import max_vanishing_form
from .numth import cusp_count, divisors, is_prime, profile, psi
from .qseries import PrecisionError, QSeries, inverse_trunc, linear_rank, mul_trunc, one, pow_trunc
from .traces import characteristic_polynomial

log = logging.getLogger(__name__)

Exps = tuple[int, int, int]


class ModelError(ArithmeticError):
    """A computed model violates one of the degree identities."""


class CurveNotFound(ModelError):
    pass


# --- polynomials ------------------------------------------------------------

@dataclass(frozen=True)
class PlanePolynomial:
    """Homogeneous integer polynomial in x0, x1, x2."""

    degree: int
    terms: dict[Exps, int] = field(hash=False)

    def __post_init__(self):
        for e, c in self.terms.items():
            if sum(e) != self.degree or c == 0:
                raise ValueError(f"bad term {c}*x^{e} in a degree-{self.degree} polynomial")

    def __hash__(self) -> int:
        return hash((self.degree, tuple(sorted(self.terms.items()))))

    @classmethod
    def from_vector(cls, degree: int, monomials: Sequence[Exps], vec: Sequence[int | Fraction]) -> PlanePolynomial:
        ints = linalg.primitive(vec)
        terms = {m: c for m, c in zip(monomials, ints) if c}
        return cls(degree, terms).normalized()

    def normalized(self) -> PlanePolynomial:
        """Primitive, with a positive coefficient on the lexicographically largest monomial."""
        g = 0
        for c in self.terms.values():
            g = gcd(g, c)
        if g == 0:
            return self
        lead = self.terms[max(self.terms)]
        s = g if lead > 0 else -g
        return PlanePolynomial(self.degree, {e: c // s for e, c in self.terms.items()})

    def __neg__(self) -> PlanePolynomial:
        return PlanePolynomial(self.degree, {e: -c for e, c in self.terms.items()})

    def equal_up_to_sign(self, other: PlanePolynomial) -> bool:
        return self.normalized() == other.normalized()

    def format(self) -> str:
        out = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            vars_ = "*".join(
                f"x{i}" if k == 1 else f"x{i}^{k}" for i, k in enumerate(e) if k
            ) or "1"
            mag = abs(c)
            body = vars_ if mag == 1 else (f"{mag}" if vars_ == "1" else f"{mag}*{vars_}")
            if not out:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out) or "0"

    __str__ = format

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "terms": [{"exps": list(e), "coeff": str(self.terms[e])} for e in sorted(self.terms, reverse=True)],
        }

    @classmethod
    def from_json(cls, data: dict) -> PlanePolynomial:
        return cls(int(data["degree"]), {tuple(t["exps"]): int(t["coeff"]) for t in data["terms"]})

    @classmethod
    def parse(cls, text: str) -> PlanePolynomial:
        """Inverse of :meth:`format` (also accepts the Unicode minus sign)."""
        import re

        src = text.replace("−", "-").replace(" ", "")
        if src[0] not in "+-":
            src = "+" + src
        terms: dict[Exps, int] = {}
        for sign, body in re.findall(r"([+-])([^+-]+)", src):
            coeff = 1
            e = [0, 0, 0]
            for factor in body.split("*"):
                m = re.fullmatch(r"x([012])(?:\^(\d+))?", factor)
                if m:
                    e[int(m.group(1))] += int(m.group(2) or 1)
                else:
                    coeff *= int(factor)
            key = tuple(e)
            terms[key] = terms.get(key, 0) + (coeff if sign == "+" else -coeff)
        degree = sum(next(iter(terms)))
        return cls(degree, {k: v for k, v in terms.items() if v})

    def evaluate(self, f: QSeries, g: QSeries, h: QSeries) -> QSeries:
        """Substitute three q-series (all of the same precision past valuation)."""
        total: QSeries | None = None
        for (a, b, c), coeff in self.terms.items():
            t = (f**a) * (g**b) * (h**c)
            t = t.scale(coeff)
            total = t if total is None else total + t
        return total


# --- triples ----------------------------------------------------------------

@dataclass(frozen=True)
class FormTriple:
    level: int
    forms: tuple[EtaQuotient, EtaQuotient, EtaQuotient]
    label: str = "custom"

    def __post_init__(self):
        for f in self.forms:
            if f.level != self.level:
                raise ValueError("all three forms must live at the triple's level")

    @property
    def f(self) -> EtaQuotient:
        return self.forms[0]

    @property
    def g(self) -> EtaQuotient:
        return self.forms[1]

    @property
    def h(self) -> EtaQuotient:
        return self.forms[2]

    def key(self) -> str:
        """Normalized encoding; equal triples give equal keys whatever their label."""
        return f"{self.level}|" + "|".join(format_expression(f) for f in self.forms)

    def validate(self) -> None:
        for f in self.forms:
            cert = certify(f)
            if not cert.is_modular_form or cert.weight != 12:
                raise ValueError(f"{f} is not a weight-12 modular form on Gamma_0({self.level}): {cert.failing}")
        n = psi(self.level) + 1
        rows = [f.q_expansion(n + 1) for f in self.forms]
        # rank of truncations bounds the true rank from below
        if linear_rank(rows, n + 1) < 3:
            raise ValueError("the three forms are linearly dependent")

    def to_json(self) -> dict:
        return {"level": self.level, "label": self.label, "forms": [format_expression(f) for f in self.forms]}

    @classmethod
    def from_json(cls, data: dict) -> FormTriple:
        n = int(data["level"])
        forms = tuple(parse_expression(t, n) for t in data["forms"])
        return cls(n, forms, data.get("label", "custom"))


def standard_triple(n: int) -> FormTriple:
    """(Delta_{N,12} : Delta : Delta(N z)), with Delta_{N,12} of maximal vanishing at infinity."""
    return FormTriple(n, (max_vanishing_form(n), delta(n), delta_scaled(n)), "standard")


def conic_triple(p: int) -> FormTriple:
    """(Delta : eta^12 eta(p z)^12 : Delta(p z)) on Gamma_0(p), p an odd prime."""
    if not is_prime(p) or p == 2:
        raise ValueError(f"the conic triple needs an odd prime level, got {p}")
    return FormTriple(p, (delta(p), EtaQuotient(p, {1: 12, p: 12}), delta_scaled(p)), "conic")


# --- divisor bookkeeping ------------------------------------------------------

def pole_degree(num: EtaQuotient, den: EtaQuotient) -> int:
    """Degree of the polar divisor of num/den on X_0(N)."""
    if num.level != den.level:
        raise ValueError("levels differ")
    if num.weight != den.weight:
        raise ValueError(f"weights differ: {num.weight} vs {den.weight}")
    dn, dd = divisor(num), divisor(den)
    n = num.level
    total = sum(
        (cusp_count(n, d) * max(Fraction(0), dd.by_denominator[d] - dn.by_denominator[d]) for d in divisors(n)),
        Fraction(0),
    )
    if total.denominator != 1:
        raise ModelError(f"non-integral pole degree {total}")
    return int(total)


def pole_cusps(num: EtaQuotient, den: EtaQuotient) -> list[int]:
    """Denominators of the cusps where num/den has a pole."""
    return [d for d in divisors(num.level) if den.order_at(d) > num.order_at(d)]


def min_divisor_sum(triple: FormTriple) -> Fraction:
    divs = [divisor(f) for f in triple.forms]
    n = triple.level
    return sum(
        (cusp_count(n, d) * min(dv.by_denominator[d] for dv in divs) for d in divisors(n)),
        Fraction(0),
    )


@dataclass(frozen=True)
class GcdCertificate:
    pole_degrees: tuple[int, int]
    gcd: int

    @property
    def birational(self) -> bool:
        return self.gcd == 1

    def to_json(self) -> dict:
        return {"poleDegrees": list(self.pole_degrees), "gcd": self.gcd, "birational": self.birational}


def gcd_birationality_check(triple: FormTriple) -> GcdCertificate:
    a = pole_degree(triple.g, triple.f)
    b = pole_degree(triple.h, triple.f)
    return GcdCertificate((a, b), gcd(a, b))


def degree_budget(triple: FormTriple) -> int:
    """map_degree * curve_degree, i.e. dim M_12 + g - 1 minus the common zeros."""
    prof = profile(triple.level)
    t = prof.dim_m12 + prof.genus - 1 - min_divisor_sum(triple)
    if t.denominator != 1 or t <= 0:
        raise ModelError(f"degree budget {t} is not a positive integer")
    return int(t)


# --- the relation search ------------------------------------------------------

@dataclass
class SearchStep:
    degree: int
    monomials: int
    equations: int
    nullity: int | None
    method: str
    skipped: str | None = None

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


@dataclass
class _Geometry:
    """Pole data of the triple that constrains the shape of the relation."""

    pole_gf: int
    pole_hf: int
    pole_hg: int
    single_pole_cusp: bool


def _geometry(triple: FormTriple) -> _Geometry:
    f, g, h = triple.forms
    cg, ch = pole_cusps(g, f), pole_cusps(h, f)
    single = (
        len(cg) == 1 and cg == ch and cusp_count(triple.level, cg[0]) == 1
    )
    return _Geometry(pole_degree(g, f), pole_degree(h, f), pole_degree(h, g), single)


def candidate_support(D: int, map_degree: int | None, geo: _Geometry | None) -> list[Exps] | None:
    """Monomials x0^i x1^j x2^k of degree D allowed in the relation.

    With ``geo`` given, the degree in each variable is fixed by pole degrees
    divided by the map degree, and when all poles of g/f and h/f sit at one cusp
    the Newton polygon lies under the segment joining the two pure powers.
    Returns None when the divisibility conditions rule the degree out.
    """
    if geo is None:
        return [(D - j - k, j, k) for j in range(D + 1) for k in range(D - j + 1)][::-1]
    dm = map_degree
    if any(x % dm for x in (geo.pole_gf, geo.pole_hf, geo.pole_hg)):
        return None
    max_i, max_j, max_k = geo.pole_hg // dm, geo.pole_hf // dm, geo.pole_gf // dm
    out = []
    for j in range(min(D, max_j) + 1):
        for k in range(min(D - j, max_k) + 1):
            i = D - j - k
            if i > max_i:
                continue
            if geo.single_pole_cusp and geo.pole_gf * j + geo.pole_hf * k > geo.pole_gf * geo.pole_hf // dm:
                continue
            out.append((i, j, k))
    out.sort(reverse=True)
    return out


class MonomialTable:
    """q-expansions of f^i g^j h^k, all known through q^bound - 1."""

    def __init__(self, triple: FormTriple, monomials: Sequence[Exps], bound: int):
        self.triple = triple
        self.monomials = list(monomials)
        self.bound = bound
        vals = [f.order_at_infinity() for f in triple.forms]
        for v in vals:
            if v.denominator != 1:
                raise ModelError("forms must have integral order at infinity")
        self.vals = [int(v) for v in vals]
        self.valuations = [sum(e * v for e, v in zip(m, self.vals)) for m in self.monomials]
        self.base = min(self.valuations)
        if max(self.valuations) >= bound:
            raise ModelError("a monomial vanishes beyond the valence bound")
        self.width = bound - self.base
        self.rows = self._expand()

    def _expand(self) -> list[list[int]]:
        L = self.width
        units = [list(f.q_expansion(L).coeffs) for f in self.triple.forms]
        for u in units:
            if u[0] != 1:
                raise ModelError("expected normalized eta-quotients")
        uf, ug, uh = units
        # h/f as a unit series, to walk from f^(i+1) g^j h^k to f^i g^j h^(k+1)
        step = mul_trunc(uh, inverse_trunc(uf, L), L)
        by_j: dict[int, list[Exps]] = {}
        for m in self.monomials:
            by_j.setdefault(m[1], []).append(m)
        cache: dict[Exps, list[int]] = {}
        for j, ms in by_j.items():
            ks = sorted(m[2] for m in ms)
            i0 = ms[0][0] + ms[0][2]  # i + k is constant for fixed j
            cur = mul_trunc(pow_trunc(uf, i0, L), pow_trunc(ug, j, L), L)
            k = 0
            for target in ks:
                while k < target:
                    cur = mul_trunc(cur, step, L)
                    k += 1
                cache[(i0 - target, j, target)] = cur
        out = []
        for m, v in zip(self.monomials, self.valuations):
            shift = v - self.base
            row = [0] * shift + [int(x) for x in cache[m][: L - shift]]
            out.append(row)
        return out

    def equations(self) -> list[list[int]]:
        """Matrix with one row per q-exponent and one column per monomial."""
        return [list(col) for col in zip(*self.rows)]

    def combination(self, coeffs: Sequence[int]) -> list[int]:
        acc = [0] * self.width
        for c, row in zip(coeffs, self.rows):
            if c:
                for t, x in enumerate(row):
                    if x:
                        acc[t] += c * x
        return acc


def _mod_matrix(table: MonomialTable, p: int) -> np.ndarray:
    arr = np.array([[x % p for x in row] for row in table.rows], dtype=np.int64)
    return arr.T.copy()


def _modular_kernel(table: MonomialTable, max_primes: int = 400) -> tuple[int, list[int] | None]:
    """Nullity and, if it is one, the exact kernel vector via CRT and reconstruction."""
    primes = linalg.primes_below()
    modulus = 1
    acc: np.ndarray | None = None
    acc_int: list[int] | None = None
    free_col = None
    previous = None
    for count, p in enumerate(primes):
        if count >= max_primes:
            raise CurveNotFound("modular reconstruction did not stabilize")
        mat = _mod_matrix(table, p)
        basis = linalg.nullspace_mod(mat, p)
        if not basis:
            return 0, None
        if len(basis) > 1:
            if count < 3:
                continue
            return len(basis), None
        v = [int(x) for x in basis[0]]
        col = max(i for i, x in enumerate(v) if x)
        if free_col is None:
            free_col = col
        elif col != free_col:
            continue  # unlucky prime
        if acc_int is None:
            acc_int, modulus = v, p
        else:
            inv = pow(modulus, -1, p)
            acc_int = [a + modulus * ((b - a) * inv % p) for a, b in zip(acc_int, v)]
            modulus *= p
        rec = [linalg.rational_reconstruct(a, modulus) for a in acc_int]
        if any(r is None for r in rec):
            continue
        cand = linalg.primitive(rec)
        if cand == previous and not any(table.combination(cand)):
            return 1, cand
        previous = cand
    raise CurveNotFound("ran out of primes")


def relation_at_degree(
    triple: FormTriple,
    D: int,
    monomials: Sequence[Exps],
    method: str = "auto",
) -> tuple[SearchStep, list[int] | None, MonomialTable]:
    """Look for a linear relation among the given degree-D monomials."""
    bound = D * psi(triple.level) + 1
    table = MonomialTable(triple, monomials, bound)
    if method == "auto":
        method = "bareiss" if len(monomials) <= 60 else "modular"
    if method == "bareiss":
        basis = linalg.nullspace(table.equations(), len(monomials))
        nullity = len(basis)
        vec = basis[0] if nullity == 1 else None
    elif method == "modular":
        nullity, vec = _modular_kernel(table)
    else:
        raise ValueError(f"unknown null-space method {method!r}")
    step = SearchStep(D, len(monomials), table.width, nullity, method)
    return step, vec, table


def relation_vanishes(triple: FormTriple, poly: PlanePolynomial, margin: int = 1) -> bool:
    """Exact test that poly(f, g, h) is the zero form.

    A weight 12D form vanishing at infinity past order margin*D*Psi(N) is zero
    (margin 1 is the valence bound; larger margins re-check beyond it). The
    evaluation runs on X = g/f and Y = h/f, since poly(f, g, h) = f^D poly(1, X, Y).
    """
    D = poly.degree
    vf, vg, vh = (int(e.order_at_infinity()) for e in triple.forms)
    a, b = vf - vg, vf - vh
    E = margin * D * psi(triple.level) - D * vf  # need zero through q^E
    e_min = min(-(a * j + b * k) for (_, j, k) in poly.terms)
    R = E - e_min + 1
    by_k: dict[int, list[tuple[int, int]]] = {}
    for (_, j, k), c in poly.terms.items():
        by_k.setdefault(k, []).append((j, c))
    for _attempt in range(4):
        fi = triple.f.q_expansion(R).inverse()
        X = triple.g.q_expansion(R) * fi
        Y = triple.h.q_expansion(R) * fi
        xpow = [one(R)]
        for _ in range(max(j for (_, j, _) in poly.terms)):
            xpow.append(xpow[-1] * X)
        acc: QSeries | None = None
        for k in range(max(by_k), -1, -1):
            if acc is not None:
                acc = acc * Y
            for j, c in by_k.get(k, ()):
                t = xpow[j].scale(c)
                acc = t if acc is None else acc + t
        if acc.bound > E:
            return all(c == 0 for c in acc.coeffs[: max(0, int(E - acc.valuation) + 1)])
        R += int(E - acc.bound) + 1
    raise PrecisionError("could not reach the valence bound")


def _trace_applies(triple: FormTriple) -> bool:
    """Both g/f and h/f have their only pole at the cusp at infinity."""
    f, g, h = triple.forms
    n = triple.level
    return pole_cusps(g, f) == [n] and pole_cusps(h, f) == [n]


@dataclass
class CurveResult:
    polynomial: PlanePolynomial
    steps: list[SearchStep]


def find_curve(triple: FormTriple, method: str = "auto", restrict: bool = True) -> CurveResult:
    """Defining polynomial of the image curve, searching degrees D | T upwards.

    Each candidate below the winner is ruled out by an exact rank argument. With
    method "auto", the last candidate D = T of a triple whose quotients only have
    poles at infinity is produced as a characteristic polynomial and then checked
    against the valence bound instead of solving the large linear system.
    """
    T = degree_budget(triple)
    geo = _geometry(triple) if restrict else None
    use_trace = method in ("auto", "trace") and _trace_applies(triple)
    if method == "trace" and not use_trace:
        raise ValueError("the trace method needs g/f and h/f to have poles only at infinity")
    steps: list[SearchStep] = []
    for D in divisors(T):
        support = candidate_support(D, T // D, geo)
        if support is None:
            steps.append(SearchStep(D, 0, 0, None, "pole-degree divisibility", skipped="map degree must divide pole degrees"))
            continue
        if D == T and use_trace:
            chi = characteristic_polynomial(*triple.forms)
            deg = max(l + k for l, k in chi)
            if deg != T:
                raise ModelError(f"characteristic polynomial has degree {deg}, expected {T}")
            poly = PlanePolynomial.from_vector(T, [(T - l - k, l, k) for (l, k) in chi], list(chi.values()))
            if not relation_vanishes(triple, poly):
                raise ModelError("characteristic polynomial does not vanish on the forms")
            # no relation of lower degree exists, so the degree-T relation is unique
            steps.append(SearchStep(D, len(chi), 0, 1, "trace"))
            return CurveResult(poly, steps)
        nullspace_method = "auto" if method == "trace" else method
        step, vec, _ = relation_at_degree(triple, D, support, nullspace_method)
        steps.append(step)
        log.info("degree %d: %d monomials, %d equations, nullity %s", D, step.monomials, step.equations, step.nullity)
        if step.nullity == 1:
            return CurveResult(PlanePolynomial.from_vector(D, support, vec), steps)
        if step.nullity and step.nullity > 1:
            raise ModelError(f"{step.nullity}-dimensional relation space at degree {D}")
    raise CurveNotFound(f"no relation at any degree dividing {T}")


# --- the report ---------------------------------------------------------------

@dataclass
class ModelReport:
    triple: FormTriple
    min_divisor_sum: Fraction
    T: int
    curve: PlanePolynomial
    map_degree: int
    pole_degrees: tuple[int, int]
    birational_by_gcd: bool
    steps: list[SearchStep] = field(default_factory=list)

    @property
    def curve_degree(self) -> int:
        return self.curve.degree

    def check(self) -> None:
        """Raise ModelError unless the degree identities hold exactly."""
        prof = profile(self.triple.level)
        if self.map_degree * self.curve_degree != self.T:
            raise ModelError(f"map degree {self.map_degree} times curve degree {self.curve_degree} is not {self.T}")
        if self.map_degree * self.curve_degree + self.min_divisor_sum != prof.dim_m12 + prof.genus - 1:
            raise ModelError("degree identity fails")
        if any(p % self.map_degree for p in self.pole_degrees):
            raise ModelError(f"map degree {self.map_degree} does not divide the pole degrees {self.pole_degrees}")
        if self.birational_by_gcd and self.map_degree != 1:
            raise ModelError("coprime pole degrees but map degree is not 1")

    def to_json(self) -> dict:
        return {
            "triple": self.triple.to_json(),
            "minDivisorSum": str(self.min_divisor_sum),
            "T": self.T,
            "curve": self.curve.to_json(),
            "polynomial": self.curve.format(),
            "curveDegree": self.curve_degree,
            "mapDegree": self.map_degree,
            "poleDegrees": list(self.pole_degrees),
            "birationalByGcd": self.birational_by_gcd,
            "steps": [s.to_json() for s in self.steps],
        }

    @classmethod
    def from_json(cls, data: dict) -> ModelReport:
        curve = PlanePolynomial.from_json(data["curve"])
        if curve.degree != data["curveDegree"]:
            raise ModelError("curve degree does not match the polynomial")
        return cls(
            triple=FormTriple.from_json(data["triple"]),
            min_divisor_sum=Fraction(data["minDivisorSum"]),
            T=int(data["T"]),
            curve=curve,
            map_degree=int(data["mapDegree"]),
            pole_degrees=tuple(int(x) for x in data["poleDegrees"]),
            birational_by_gcd=bool(data["birationalByGcd"]),
            steps=[SearchStep(**s) for s in data.get("steps", [])],
        )

    def text(self) -> str:
        lines = [
            f"level        {self.triple.level} ({self.triple.label})",
            f"forms        " + " : ".join(format_expression(f) for f in self.triple.forms),
            f"T            {self.T}  (min divisor sum {self.min_divisor_sum})",
            f"curve degree {self.curve_degree}",
            f"map degree   {self.map_degree}",
            f"pole degrees {self.pole_degrees[0]}, {self.pole_degrees[1]}"
            f" (gcd {gcd(*self.pole_degrees)}, {'birational' if self.birational_by_gcd else 'inconclusive'})",
            f"curve        {self.curve.format()} = 0",
        ]
        return "\n".join(lines)


def model_report(triple: FormTriple, method: str = "auto", restrict: bool = True) -> ModelReport:
    """Find the image curve and collect the degree bookkeeping around it."""
    triple.validate()
    T = degree_budget(triple)
    cert = gcd_birationality_check(triple)
    result = find_curve(triple, method=method, restrict=restrict)
    D = result.polynomial.degree
    if T % D:
        raise ModelError(f"curve degree {D} does not divide {T}")
    report = ModelReport(
        triple=triple,
        min_divisor_sum=min_divisor_sum(triple),
        T=T,
        curve=result.polynomial,
        map_degree=T // D,
        pole_degrees=cert.pole_degrees,
        birational_by_gcd=cert.birational,
        steps=result.steps,
    )
    report.check()
    return report

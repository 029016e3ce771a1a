"""Truncated q-expansions with exact coefficients.

A :class:`QSeries` stores a rational leading exponent (on the 1/24 grid) and the
coefficients of ``q^v, q^(v+1), ...`` up to a fixed number of trusted terms.
Integer coefficients are kept as ``int``; anything else becomes ``Fraction``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

try:
    import gmpy2
except ImportError:  # pragma: no cover
    gmpy2 = None

from . import linalg

Coeff = int | Fraction

# below this length schoolbook products beat packing into big integers
_KRONECKER_MIN = 48


class PrecisionError(ValueError):
    """Raised when a coefficient beyond the trusted range is requested."""


def _norm(c: Coeff) -> Coeff:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class QSeries:
    __slots__ = ("valuation", "coeffs")

    def __init__(self, valuation: int | Fraction, coeffs: Iterable[Coeff]):
        v = Fraction(valuation)
        if (v * 24).denominator != 1:
            raise ValueError(f"valuation {v} is not on the 1/24 grid")
        cs = [_norm(c) for c in coeffs]
        if not cs:
            raise ValueError("a q-series needs at least one trusted coefficient")
        # absorb leading zeros, unless everything known is zero
        k = 0
        while k < len(cs) - 1 and cs[k] == 0:
            k += 1
        if cs[k] == 0:
            k = 0
        self.valuation = v + k
        self.coeffs = tuple(cs[k:])

    # -- basic queries --------------------------------------------------
    @property
    def precision(self) -> int:
        """Number of trusted coefficients."""
        return len(self.coeffs)

    @property
    def bound(self) -> Fraction:
        """Exponent of the first unknown term, i.e. the series is known mod q^bound."""
        return self.valuation + len(self.coeffs)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    def __getitem__(self, n: int | Fraction) -> Coeff:
        """Coefficient of ``q^n``."""
        n = Fraction(n)
        if n >= self.bound:
            raise PrecisionError(f"coefficient of q^{n} is beyond precision q^{self.bound}")
        i = n - self.valuation
        if i < 0 or i.denominator != 1:
            return 0
        return self.coeffs[int(i)]

    def truncate(self, precision: int) -> QSeries:
        if precision > self.precision:
            raise PrecisionError(f"cannot extend precision {self.precision} to {precision}")
        return QSeries(self.valuation, self.coeffs[:precision])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.valuation == other.valuation and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.valuation, self.coeffs))

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self.coeffs[:6])
        return f"QSeries(v={self.valuation}, P={self.precision}, [{head}{', ...' if self.precision > 6 else ''}])"

    # -- arithmetic -----------------------------------------------------
    def _aligned(self, other: QSeries) -> tuple[Fraction, int, list[Coeff], list[Coeff]]:
        shift = other.valuation - self.valuation
        if shift.denominator != 1:
            raise ValueError("series live on incompatible exponent grids")
        v = min(self.valuation, other.valuation)
        b = min(self.bound, other.bound)
        n = int(b - v)
        a = [0] * int(self.valuation - v) + list(self.coeffs)
        c = [0] * int(other.valuation - v) + list(other.coeffs)
        return v, n, a[:n], c[:n]

    def __add__(self, other: QSeries) -> QSeries:
        v, n, a, c = self._aligned(other)
        a += [0] * (n - len(a))
        c += [0] * (n - len(c))
        return QSeries(v, [x + y for x, y in zip(a, c)])

    def __neg__(self) -> QSeries:
        return QSeries(self.valuation, [-c for c in self.coeffs])

    def __sub__(self, other: QSeries) -> QSeries:
        return self + (-other)

    def scale(self, c: Coeff) -> QSeries:
        return QSeries(self.valuation, [c * x for x in self.coeffs])

    def shift(self, k: int | Fraction) -> QSeries:
        """Multiply by ``q^k``."""
        return QSeries(self.valuation + k, self.coeffs)

    def __mul__(self, other: QSeries | int | Fraction) -> QSeries:
        if not isinstance(other, QSeries):
            return self.scale(other)
        n = min(self.precision, other.precision)
        if self.is_zero() or other.is_zero():
            # only the absolute bound is meaningful here
            v = self.valuation + other.valuation
            return QSeries(v, [0] * n)
        return QSeries(self.valuation + other.valuation, mul_trunc(self.coeffs, other.coeffs, n))

    __rmul__ = __mul__

    def inverse(self) -> QSeries:
        if self.coeffs[0] == 0:
            raise ZeroDivisionError("cannot invert a series with zero leading coefficient")
        return QSeries(-self.valuation, inverse_trunc(self.coeffs, self.precision))

    def __pow__(self, k: int) -> QSeries:
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return QSeries(0, [1] + [0] * (self.precision - 1))
        return QSeries(self.valuation * k, pow_trunc(self.coeffs, k, self.precision))

    # -- output ---------------------------------------------------------
    def format(self, terms: int | None = None) -> str:
        """Human-readable ``q^a - 24*q^(a+1) + ... + O(q^b)``."""
        parts: list[str] = []
        shown = self.coeffs if terms is None else self.coeffs[:terms]
        for i, c in enumerate(shown):
            if c == 0:
                continue
            e = self.valuation + i
            mono = "" if e == 0 else ("q" if e == 1 else f"q^{e}" if e.denominator == 1 and e > 0 else f"q^({e})")
            mag = abs(c)
            body = str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}")
            sign = "-" if c < 0 else "+"
            parts.append(("-" if sign == "-" else "") + body if not parts else f" {sign} {body}")
        end = self.bound if terms is None else self.valuation + len(shown)
        parts.append(f"{' + ' if parts else ''}O(q^{end if end.denominator == 1 else f'({end})'})")
        return "".join(parts)

    def to_json(self) -> dict:
        return {
            "valuation": str(self.valuation),
            "precision": self.precision,
            "coefficients": [str(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> QSeries:
        return cls(Fraction(data["valuation"]), [Fraction(c) for c in data["coefficients"]])


def one(precision: int) -> QSeries:
    return QSeries(0, [1] + [0] * (precision - 1))


# --- coefficient-level kernels -------------------------------------------

def _schoolbook(a: Sequence[Coeff], b: Sequence[Coeff], n: int) -> list[Coeff]:
    out: list[Coeff] = [0] * n
    lb = min(len(b), n)
    for i in range(min(len(a), n)):
        x = a[i]
        if not x:
            continue
        for j in range(min(lb, n - i)):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


def _pack(cs: Sequence[int], bits: int) -> int:
    nbytes = bits // 8
    pos = b"".join(c.to_bytes(nbytes, "little") if c > 0 else bytes(nbytes) for c in cs)
    neg = b"".join((-c).to_bytes(nbytes, "little") if c < 0 else bytes(nbytes) for c in cs)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _unpack_signed(value: int, n: int, bits: int) -> list[int]:
    """Read the low ``n`` signed slots of ``value``; each slot is below 2^(bits-1)."""
    nbytes = bits // 8
    half = 1 << (bits - 1)
    offset = int.from_bytes(half.to_bytes(nbytes, "little") * n, "little")
    value = (value + offset) & ((1 << (n * bits)) - 1)
    raw = value.to_bytes(nbytes * n, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half for i in range(n)]


def _kronecker(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    a = a[:n]
    b = b[:n]
    ma = max(abs(x) for x in a)
    mb = max(abs(x) for x in b)
    need = ma.bit_length() + mb.bit_length() + min(len(a), len(b)).bit_length() + 2
    bits = (need + 7) // 8 * 8
    pa, pb = _pack(a, bits), _pack(b, bits)
    if gmpy2 is not None:
        prod = int(gmpy2.mpz(pa) * gmpy2.mpz(pb))
    else:  # pragma: no cover
        prod = pa * pb
    return _unpack_signed(prod, n, bits)


def mul_trunc(a: Sequence[Coeff], b: Sequence[Coeff], n: int) -> list[Coeff]:
    """First ``n`` coefficients of the product of two coefficient lists."""
    if (
        min(len(a), len(b), n) >= _KRONECKER_MIN
        and all(type(x) is int for x in a[:n])
        and all(type(x) is int for x in b[:n])
    ):
        if not any(a[:n]) or not any(b[:n]):
            return [0] * n
        return _kronecker(a, b, n)
    return [_norm(c) for c in _schoolbook(a, b, n)]


def pow_trunc(a: Sequence[Coeff], k: int, n: int) -> list[Coeff]:
    result: list[Coeff] = [1] + [0] * (n - 1)
    base = list(a[:n])
    first = True
    while k:
        if k & 1:
            result = base if first else mul_trunc(result, base, n)
            first = False
        k >>= 1
        if k:
            base = mul_trunc(base, base, n)
    return list(result)


def inverse_trunc(a: Sequence[Coeff], n: int) -> list[Coeff]:
    a0 = a[0]
    if n >= 2 * _KRONECKER_MIN and a0 in (1, -1) and all(type(x) is int for x in a[:n]):
        return _newton_inverse(a, n)
    inv0: Coeff = 1 if a0 == 1 else (-1 if a0 == -1 else Fraction(1) / a0)
    out: list[Coeff] = [inv0] + [0] * (n - 1)
    for k in range(1, n):
        s = 0
        for j in range(1, min(k, len(a) - 1) + 1):
            if a[j]:
                s += a[j] * out[k - j]
        out[k] = _norm(-s * inv0)
    return out


def _newton_inverse(a: Sequence[int], n: int) -> list[int]:
    # b <- b (2 - a b), doubling the number of correct terms each round
    a = list(a[:n]) + [0] * max(0, n - len(a))
    m = _KRONECKER_MIN
    b = inverse_trunc(a[:m], m) if n > m else None
    while m < n:
        m2 = min(2 * m, n)
        e = mul_trunc(a[:m2], b, m2)
        e = [-x for x in e]
        e[0] += 2
        b = mul_trunc(b, e, m2)
        m = m2
    return b


# --- the eta building block -----------------------------------------------

@lru_cache(maxsize=64)
def euler_product(n: int) -> tuple[int, ...]:
    """First ``n`` coefficients of prod_{m>=1} (1 - q^m) via pentagonal numbers."""
    out = [0] * n
    k = 0
    while True:
        hit = False
        for j in ((0,) if k == 0 else (k, -k)):
            e = j * (3 * j - 1) // 2
            if e < n:
                out[e] += -1 if j % 2 else 1
                hit = True
        if not hit and k > 0:
            break
        k += 1
    return tuple(out)


@lru_cache(maxsize=64)
def partition_numbers(n: int) -> tuple[int, ...]:
    """First ``n`` coefficients of 1/prod(1 - q^m), by Euler's recurrence."""
    p = [0] * n
    p[0] = 1
    pent = []
    k = 1
    while True:
        for j in (k, -k):
            e = j * (3 * j - 1) // 2
            if e < n:
                pent.append((e, 1 if k % 2 else -1))
        if k * (3 * k - 1) // 2 >= n:
            break
        k += 1
    pent.sort()
    for m in range(1, n):
        s = 0
        for e, sg in pent:
            if e > m:
                break
            s += sg * p[m - e]
        p[m] = s
    return tuple(p)


@lru_cache(maxsize=256)
def _euler_power(r: int, n: int) -> tuple[int, ...]:
    if r == 0:
        return tuple([1] + [0] * (n - 1))
    base = euler_product(n) if r > 0 else partition_numbers(n)
    if abs(r) == 1:
        return base
    return tuple(pow_trunc(base, abs(r), n))


def eta_power(delta: int, r: int, precision: int) -> QSeries:
    """``eta(delta*z)^r`` to ``precision`` coefficients past its valuation ``delta*r/24``."""
    if delta < 1 or precision < 1:
        raise ValueError("eta_power needs delta >= 1 and precision >= 1")
    m = (precision + delta - 1) // delta
    base = _euler_power(r, m)
    coeffs = [0] * precision
    for i, c in enumerate(base):
        if i * delta < precision:
            coeffs[i * delta] = c
    return QSeries(Fraction(delta * r, 24), coeffs)


def linear_rank(rows: Sequence[QSeries], precision: int) -> int:
    """Rank over Q of the coefficient vectors, aligned to a common exponent grid."""
    if not rows:
        return 0
    v = min(s.valuation for s in rows)
    bound = v + precision
    for s in rows:
        if (s.valuation - v).denominator != 1:
            raise ValueError("series live on incompatible exponent grids")
        if s.bound < bound:
            raise PrecisionError(f"series known only to q^{s.bound}, need q^{bound}")
    mat = [[s[v + i] if v + i < s.bound else 0 for i in range(precision)] for s in rows]
    return linalg.rank(mat)

"""Phase parameters of the spanner construction, all in exact arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConfigError

GUARANTEED = "guaranteed"
EXPLORATORY = "exploratory"
MODES = (GUARANTEED, EXPLORATORY)


def ceil_root_power(n: int, num: int, den: int) -> int:
    """Smallest integer ``x`` with ``x**den >= n**num``, i.e. ``ceil(n ** (num/den))``."""
    if num < 0 or den <= 0 or n < 0:
        raise ValueError("ceil_root_power needs n >= 0, num >= 0, den > 0")
    target = n**num
    if target <= 1:
        return target
    x = max(1, int(round(math.exp(math.log(n) * num / den))))
    while x**den < target:
        x += 1
    while x > 1 and (x - 1) ** den >= target:
        x -= 1
    return x


def floor_log2(x: Fraction) -> int:
    """Exact ``floor(log2(x))`` for a positive rational."""
    if x <= 0:
        raise ValueError("floor_log2 needs a positive argument")
    k = x.numerator.bit_length() - x.denominator.bit_length()
    while Fraction(2) ** k > x:
        k -= 1
    while Fraction(2) ** (k + 1) <= x:
        k += 1
    return k


def ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def to_fraction(value) -> Fraction:
    """Accept ints, Fractions and strings such as ``"1/2"``; floats are refused."""
    if isinstance(value, float):
        raise ConfigError("exact-rational", f"pass {value!r} as a fraction string, not a float")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError):
        raise ConfigError("rational-syntax", f"cannot parse {value!r} as an exact fraction") from None


def phase_count(kappa: int, c: int) -> tuple[int, int]:
    """Returns ``(i0, ell)`` for integer ``kappa`` and ``rho = 1/c``."""
    i0 = floor_log2(Fraction(kappa, c))
    ell = i0 + ceil_frac(Fraction((kappa + 1) * c, kappa)) - 1
    return i0, ell


def radius_recurrence(eps: Fraction, c: int, ell: int) -> list[Fraction]:
    inv = 1 / eps
    radii = [Fraction(0)]
    for i in range(ell):
        radii.append(2 * c * inv**i + 5 * c * radii[i])
    return radii


def radius_closed_form(eps: Fraction, c: int, i: int) -> Fraction:
    inv = 1 / eps
    return sum((2 * c * inv**j * Fraction(5 * c) ** (i - 1 - j) for j in range(i)), Fraction(0))


@dataclass(frozen=True)
class PhaseSchedule:
    n: int
    kappa: int
    c: int
    mode: str
    eps_user: Fraction | None
    eps: Fraction
    ell: int
    i0: int
    i1: int
    R: tuple[Fraction, ...]
    delta: tuple[Fraction, ...]
    deg: tuple[int, ...]
    beta: Fraction
    stretch_bound_guaranteed: bool
    notes: tuple[str, ...] = field(default=())

    @property
    def rho(self) -> Fraction:
        return Fraction(1, self.c)

    @property
    def deg_cap(self) -> int:
        """``ceil(n ** rho)``; also the ruling-set digit base."""
        return ceil_root_power(self.n, 1, self.c)

    def popularity_depth(self, i: int) -> int:
        return floor_frac(self.delta[i])

    def ruling_q(self, i: int) -> int:
        return ceil_frac(2 * self.delta[i])

    def forest_depth(self, i: int) -> int:
        return self.c * self.ruling_q(i)

    def internal_stretch(self) -> tuple[Fraction, Fraction]:
        """Multiplicative and additive terms of the un-rescaled stretch bound."""
        alpha = 1 + 30 * self.eps * self.ell * self.c
        additive = Fraction(30 * self.c) / self.eps ** (self.ell - 1)
        return alpha, additive

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "kappa": self.kappa,
            "c": self.c,
            "rho": rational_json(self.rho),
            "mode": self.mode,
            "eps_user": rational_json(self.eps_user) if self.eps_user is not None else None,
            "eps": rational_json(self.eps),
            "ell": self.ell,
            "i0": self.i0,
            "i1": self.i1,
            "R": [rational_json(x) for x in self.R],
            "delta": [rational_json(x) for x in self.delta],
            "deg": list(self.deg),
            "beta": rational_json(self.beta),
            "stretch_bound_guaranteed": self.stretch_bound_guaranteed,
            "notes": list(self.notes),
        }

    @classmethod
    def from_json(cls, data: dict) -> "PhaseSchedule":
        return build_schedule(
            data["n"],
            data["kappa"],
            data["c"],
            data["mode"],
            rational_from_json(data["eps_user"] if data["mode"] == GUARANTEED else data["eps"]),
        )


def rational_json(x: Fraction) -> dict:
    x = Fraction(x)
    try:
        approx = float(x)
    except OverflowError:
        approx = None
    return {"num": x.numerator, "den": x.denominator, "approx": approx}


def rational_from_json(obj) -> Fraction:
    if isinstance(obj, dict):
        return Fraction(obj["num"], obj["den"])
    return to_fraction(obj)


def build_schedule(n: int, kappa: int, c: int, mode: str, eps_arg) -> PhaseSchedule:
    """Derive every phase parameter for an ``n``-vertex input.

    In guaranteed mode ``eps_arg`` is the user-facing stretch slack and the
    internal epsilon is rescaled from it; in exploratory mode it is the
    internal epsilon itself.
    """
    if mode not in MODES:
        raise ConfigError("mode", f"mode must be one of {MODES}, got {mode!r}")
    if not isinstance(n, int) or n < 2:
        raise ConfigError("n >= 2", f"need n >= 2, got {n}")
    if not isinstance(kappa, int) or kappa < 3:
        raise ConfigError("kappa >= 3", f"need integer kappa >= 3, got {kappa}")
    if not isinstance(c, int) or c < 3:
        raise ConfigError("c >= 3 (rho < 1/2)", f"need integer c >= 3, got {c}")
    if c > kappa:
        raise ConfigError("kappa * rho >= 1", f"rho = 1/{c} is below 1/kappa = 1/{kappa}")
    eps_arg = to_fraction(eps_arg)

    rho = Fraction(1, c)
    i0, ell = phase_count(kappa, c)
    notes = []
    if mode == GUARANTEED:
        if not (0 < eps_arg <= 1):
            raise ConfigError("0 < eps' <= 1", f"guaranteed mode needs eps' in (0, 1], got {eps_arg}")
        eps_user = eps_arg
        eps = eps_user * rho / (30 * ell)
        beta = (Fraction(30 * ell) / (rho * eps_user)) ** ell
    else:
        if not (0 < eps_arg < 1):
            raise ConfigError("0 < eps < 1", f"exploratory mode needs eps in (0, 1), got {eps_arg}")
        eps_user = None
        eps = eps_arg
        beta = (1 / eps) ** ell
    guaranteed = eps <= Fraction(1, 10) and rho >= 10 * eps
    if not guaranteed:
        notes.append("bound not guaranteed: stretch analysis needs eps <= 1/10 and rho >= 10*eps")

    R = radius_recurrence(eps, c, ell)
    delta = [(1 / eps) ** i + 2 * R[i] for i in range(ell + 1)]
    cap = ceil_root_power(n, 1, c)
    deg = [ceil_root_power(n, 2**i, kappa) if i <= i0 else cap for i in range(ell + 1)]
    return PhaseSchedule(
        n=n,
        kappa=kappa,
        c=c,
        mode=mode,
        eps_user=eps_user,
        eps=eps,
        ell=ell,
        i0=i0,
        i1=ell - 1,
        R=tuple(R),
        delta=tuple(delta),
        deg=tuple(deg),
        beta=beta,
        stretch_bound_guaranteed=guaranteed,
        notes=tuple(notes),
    )

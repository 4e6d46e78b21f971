"""Graded modules over R = F[[V]][Q]/(Q^3), F the two-element field.

The ring has deg V = -4 and deg Q = -1. Everything downstream (Gysin
solving, surgery formulas) works with the small zoo of R-modules that
actually occur:

* ``Tower(base, step, kind)`` -- a rank-one-per-degree ladder. ``plus``
  towers are bounded below and extend upward forever; ``bar`` towers are
  two-sided and only ever materialize inside an explicit degree window.
* ``Box(deg, dim)`` -- a finite F^dim summand sitting in one degree, with
  no V-action and no outgoing Q guaranteed.
* ``StructuredModule`` -- a direct sum of towers and boxes plus a list of
  Q-links between towers (source index, target index).
* ``StandardModule`` -- the three-tower Q-chain with correction terms
  (alpha, beta, gamma); tower starts are (2*alpha, 2*beta+1, 2*gamma+2)
  and Q passes c-tower -> b-tower -> a-tower.

Gradings are exact rationals (`fractions.Fraction`) throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

__all__ = [
    "V_CUTOFF",
    "Box",
    "CorrectionTerms",
    "RingElement",
    "StandardModule",
    "StructuredModule",
    "Tower",
    "WindowError",
    "as_grading",
    "bar_tower",
    "classify_parity",
    "correction_terms_of",
    "dims",
    "direct_sum",
    "F_box",
    "format_grading",
    "module_from_json",
    "module_to_json",
    "q_rank_profile",
    "reverse_orientation",
    "ring_mul",
    "standard_from_starts",
    "T_plus",
    "V_plus",
]

#: V-adic truncation order for ring arithmetic. Computations in this
#: package never need V-exponents anywhere near this.
V_CUTOFF = 64

GradingLike = Union[int, str, Fraction]


class WindowError(ValueError):
    """An operation needed a finite degree window and none was usable."""


def as_grading(x: GradingLike) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to an exact grading."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a grading")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a grading")


def format_grading(x: Fraction) -> str:
    """Render a grading as 'n' for integers, 'p/q' otherwise."""
    x = as_grading(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _is_int(x: Fraction) -> bool:
    return x.denominator == 1


# ---------------------------------------------------------------------------
# Ring elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RingElement:
    """An element of F[[V]][Q]/(Q^3), truncated at V^V_CUTOFF.

    Coefficients are stored as three bitmasks, one per power of Q; bit v of
    ``qv[q]`` is the coefficient of Q^q V^v. The monomial Q^q V^v has degree
    -q - 4v.
    """

    qv: tuple[int, int, int] = (0, 0, 0)

    def __post_init__(self):
        if len(self.qv) != 3:
            raise ValueError("RingElement stores exactly three Q-slices")
        mask = (1 << (V_CUTOFF + 1)) - 1
        object.__setattr__(self, "qv", tuple(int(b) & mask for b in self.qv))

    @classmethod
    def zero(cls) -> "RingElement":
        return cls((0, 0, 0))

    @classmethod
    def one(cls) -> "RingElement":
        return cls.monomial(0, 0)

    @classmethod
    def monomial(cls, q: int = 0, v: int = 0) -> "RingElement":
        if not (0 <= q <= 2):
            raise ValueError(f"Q-exponent {q} outside 0..2 (Q^3 = 0)")
        if v < 0:
            raise ValueError(f"negative V-exponent {v}")
        if v > V_CUTOFF:
            return cls.zero()
        slices = [0, 0, 0]
        slices[q] = 1 << v
        return cls(tuple(slices))

    def is_zero(self) -> bool:
        return not any(self.qv)

    def monomials(self) -> list[tuple[int, int]]:
        """All (q, v) with nonzero coefficient, sorted."""
        out = []
        for q, bits in enumerate(self.qv):
            b = bits
            while b:
                low = b & -b
                out.append((q, low.bit_length() - 1))
                b ^= low
        return sorted(out)

    def degrees(self) -> list[Fraction]:
        return [Fraction(-q - 4 * v) for q, v in self.monomials()]

    def __add__(self, other: "RingElement") -> "RingElement":
        return RingElement(tuple(a ^ b for a, b in zip(self.qv, other.qv)))

    def __mul__(self, other: "RingElement") -> "RingElement":
        return ring_mul(self, other)

    def __str__(self) -> str:
        terms = []
        for q, v in self.monomials():
            parts = []
            if q:
                parts.append(f"Q^{q}")
            if v:
                parts.append(f"V^{v}")
            terms.append(" ".join(parts) if parts else "1")
        return " + ".join(terms) if terms else "0"


def ring_mul(x: RingElement, y: RingElement) -> RingElement:
    """Product in F[[V]][Q]/(Q^3), V-truncated at V_CUTOFF.

    Commutative and degree-additive on surviving monomials; Q-exponents at
    or past 3 and V-exponents past the cutoff are dropped.
    """
    vmask = (1 << (V_CUTOFF + 1)) - 1
    out = [0, 0, 0]
    for q1, b1 in enumerate(x.qv):
        if not b1:
            continue
        for q2, b2 in enumerate(y.qv):
            if not b2 or q1 + q2 > 2:
                continue
            acc = 0
            bb = b1
            while bb:
                low = bb & -bb
                acc ^= (b2 << (low.bit_length() - 1)) & vmask
                bb ^= low
            out[q1 + q2] ^= acc
    return RingElement(tuple(out))


# ---------------------------------------------------------------------------
# Towers, boxes, structured modules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Tower:
    """A rank-one-per-degree ladder with step 2 or 4.

    ``plus`` towers live in degrees base, base+step, ... ; ``bar`` towers
    are two-sided (all degrees congruent to base mod step) and can only be
    materialized inside a window.
    """

    base: Fraction
    step: int = 4
    kind: str = "plus"

    def __post_init__(self):
        object.__setattr__(self, "base", as_grading(self.base))
        if self.step not in (2, 4):
            raise ValueError(f"tower step must be 2 or 4, got {self.step}")
        if self.kind not in ("plus", "bar"):
            raise ValueError(f"unknown tower kind {self.kind!r}")
        if self.kind == "bar" and self.step != 4:
            raise ValueError("two-sided towers are step-4 only")

    def supports(self, z: Fraction) -> bool:
        t = (as_grading(z) - self.base) / self.step
        if not _is_int(t):
            return False
        return True if self.kind == "bar" else t >= 0


@dataclass(frozen=True)
class Box:
    """F^dim concentrated in a single degree.

    ``qsplit`` marks summands coming from conjugate spin-c pairs in the
    surgery formulas; they are carried along but excluded from Gysin
    bookkeeping and correction terms.
    """

    deg: Fraction
    dim: int
    qsplit: bool = False

    def __post_init__(self):
        object.__setattr__(self, "deg", as_grading(self.deg))
        if self.dim < 1:
            raise ValueError(f"box dimension must be positive, got {self.dim}")


@dataclass(frozen=True)
class StructuredModule:
    """Direct sum of towers and boxes with declared Q-links between towers.

    Links are (source tower index, target tower index); Q has degree -1, so
    the link contributes rank one out of degree z exactly when z is in the
    source tower and z-1 is in the target tower.
    """

    towers: tuple[Tower, ...] = ()
    boxes: tuple[Box, ...] = ()
    links: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "towers", tuple(self.towers))
        object.__setattr__(self, "boxes", tuple(self.boxes))
        object.__setattr__(self, "links", tuple((int(i), int(j)) for i, j in self.links))
        n = len(self.towers)
        for i, j in self.links:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"link ({i},{j}) references missing tower (have {n})")
            if i == j:
                raise ValueError(f"link ({i},{j}) may not point a tower at itself")

    # -- structure -------------------------------------------------------

    def has_bar(self) -> bool:
        return any(t.kind == "bar" for t in self.towers)

    def support_min(self) -> Fraction:
        """Lowest supported degree; two-sided towers make this undefined."""
        if self.has_bar():
            raise WindowError(
                "module has a two-sided tower; support is unbounded below "
                "(supply an explicit window)"
            )
        cands = [t.base for t in self.towers] + [b.deg for b in self.boxes]
        if not cands:
            raise ValueError("empty module has no support")
        return min(cands)

    def feature_max(self) -> Fraction:
        """Highest 'feature' degree: tower bases and box degrees."""
        cands = [t.base for t in self.towers] + [b.deg for b in self.boxes]
        if not cands:
            raise ValueError("empty module has no features")
        return max(cands)

    def direct_sum(self, other: "StructuredModule") -> "StructuredModule":
        shift = len(self.towers)
        return StructuredModule(
            towers=self.towers + other.towers,
            boxes=self.boxes + other.boxes,
            links=self.links + tuple((i + shift, j + shift) for i, j in other.links),
        )

    __add__ = direct_sum


def dims(
    m: StructuredModule, window: tuple[GradingLike, GradingLike]
) -> dict[Fraction, int]:
    """Per-degree dimensions of m inside the closed window [lo, hi]."""
    lo, hi = as_grading(window[0]), as_grading(window[1])
    if lo > hi:
        raise WindowError(f"empty window [{lo}, {hi}]")
    out: dict[Fraction, int] = {}
    for t in m.towers:
        # first supported degree >= lo in this tower
        k0 = math.ceil((lo - t.base) / t.step)
        if t.kind == "plus":
            k0 = max(k0, 0)
        z = t.base + t.step * k0
        while z <= hi:
            out[z] = out.get(z, 0) + 1
            z += t.step
    for b in m.boxes:
        if lo <= b.deg <= hi:
            out[b.deg] = out.get(b.deg, 0) + b.dim
    return out


def q_rank_profile(
    m: StructuredModule, window: tuple[GradingLike, GradingLike]
) -> dict[Fraction, int]:
    """Guaranteed Q-rank out of each degree, from tower links only.

    A link (src, tgt) is active at z when z lies in the source tower and
    z-1 lies in the target tower. Boxes contribute nothing here: their
    Q-behavior is not pinned by the structure data.
    """
    lo, hi = as_grading(window[0]), as_grading(window[1])
    out: dict[Fraction, int] = {}
    for i, j in m.links:
        src, tgt = m.towers[i], m.towers[j]
        z = lo
        while z <= hi:
            if src.supports(z) and tgt.supports(z - 1):
                out[z] = out.get(z, 0) + 1
            z += 1
    return out


# -- convenience constructors ------------------------------------------------


def T_plus(base: GradingLike) -> StructuredModule:
    """The step-2 plus tower T^+_base (the F[[U]]-side infinite tower)."""
    return StructuredModule(towers=(Tower(as_grading(base), 2, "plus"),))


def V_plus(base: GradingLike) -> StructuredModule:
    """The step-4 plus tower V^+_base."""
    return StructuredModule(towers=(Tower(as_grading(base), 4, "plus"),))


def bar_tower(base: GradingLike) -> Tower:
    """A two-sided step-4 tower (window-only)."""
    return Tower(as_grading(base), 4, "bar")


def F_box(dim: int, deg: GradingLike, qsplit: bool = False) -> StructuredModule:
    """F^dim concentrated in one degree; dim 0 gives the zero module."""
    if dim == 0:
        return StructuredModule()
    return StructuredModule(boxes=(Box(as_grading(deg), dim, qsplit),))


def direct_sum(*mods: StructuredModule) -> StructuredModule:
    out = StructuredModule()
    for m in mods:
        out = out + m
    return out


# ---------------------------------------------------------------------------
# Standard modules and correction terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StandardModule:
    """Three step-4 plus towers in a Q-chain, named by correction terms.

    Tower starts are a = 2*alpha, b = 2*beta + 1, c = 2*gamma + 2 and Q maps
    the c-tower into the b-tower and the b-tower into the a-tower. For those
    links to be grading-compatible (Q has degree -1, towers have step 4) the
    starts must satisfy b = a+1 and c = b+1 mod 4, i.e. alpha - beta and
    beta - gamma are even. The ordering alpha >= beta >= gamma is required.
    """

    alpha: Fraction
    beta: Fraction
    gamma: Fraction

    def __post_init__(self):
        a = as_grading(self.alpha)
        b = as_grading(self.beta)
        g = as_grading(self.gamma)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "gamma", g)
        if not (a >= b >= g):
            raise ValueError(f"correction terms must be ordered: {a} >= {b} >= {g} fails")
        for hi_, lo_, name in ((a, b, "alpha-beta"), (b, g, "beta-gamma")):
            d = hi_ - lo_
            if not _is_int(d) or d.numerator % 2:
                raise ValueError(
                    f"{name} difference {d} must be an even integer for the "
                    "Q-links between towers to be grading-compatible"
                )

    def tower_starts(self) -> tuple[Fraction, Fraction, Fraction]:
        return (2 * self.alpha, 2 * self.beta + 1, 2 * self.gamma + 2)

    def to_structured(self, boxes: Sequence[Box] = ()) -> StructuredModule:
        a, b, c = self.tower_starts()
        return StructuredModule(
            towers=(Tower(a, 4, "plus"), Tower(b, 4, "plus"), Tower(c, 4, "plus")),
            boxes=tuple(boxes),
            links=((2, 1), (1, 0)),
        )

    def dims(self, window) -> dict[Fraction, int]:
        return dims(self.to_structured(), window)


def standard_from_starts(a: GradingLike, b: GradingLike, c: GradingLike) -> StandardModule:
    """Build a standard module from its tower starts (a, b, c)."""
    a, b, c = as_grading(a), as_grading(b), as_grading(c)
    return StandardModule(a / 2, (b - 1) / 2, (c - 2) / 2)


@dataclass(frozen=True)
class CorrectionTerms:
    """The (alpha, beta, gamma) triple: ordered, equal fractional parts."""

    alpha: Fraction
    beta: Fraction
    gamma: Fraction

    def __post_init__(self):
        a, b, g = (as_grading(v) for v in (self.alpha, self.beta, self.gamma))
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "gamma", g)
        if not (a >= b >= g):
            raise ValueError(f"correction terms must be ordered: {a} >= {b} >= {g} fails")
        if not (_is_int(a - b) and _is_int(b - g)):
            raise ValueError("correction terms must share one fractional part")

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.alpha, self.beta, self.gamma)

    def __str__(self) -> str:
        return (
            f"({format_grading(self.alpha)}, {format_grading(self.beta)}, "
            f"{format_grading(self.gamma)})"
        )


def correction_terms_of(s: StandardModule) -> CorrectionTerms:
    """Read the correction terms off a standard module."""
    return CorrectionTerms(s.alpha, s.beta, s.gamma)


def reverse_orientation(ct: CorrectionTerms) -> CorrectionTerms:
    """Correction terms of the orientation reversal: (a,b,g) -> (-g,-b,-a).

    An involution; it negates beta exactly.
    """
    return CorrectionTerms(-ct.gamma, -ct.beta, -ct.alpha)


def classify_parity(s_dims: Mapping[Fraction, int], h: GradingLike) -> str:
    """Which mod-4 class near the top of the window the module misses.

    'even' when degrees congruent to 2h-1 (mod 4) are absent from the top
    period, 'odd' when 2h+1 is the absent class. Exactly one must hold for
    a stabilized standard-module window; anything else raises.
    """
    if not s_dims:
        raise ValueError("cannot classify an empty dimension profile")
    h = as_grading(h)
    top = max(s_dims)
    band = {d: n for d, n in s_dims.items() if top - 3 <= d <= top and n}

    def class_empty(anchor: Fraction) -> bool:
        return not any(_is_int((d - anchor) / 4) for d in band)

    even_ok = class_empty(2 * h - 1)
    odd_ok = class_empty(2 * h + 1)
    if even_ok == odd_ok:
        raise ValueError(
            "top window period does not show a stabilized standard module "
            f"(even-pattern={even_ok}, odd-pattern={odd_ok})"
        )
    return "even" if even_ok else "odd"


# ---------------------------------------------------------------------------
# JSON (de)serialization
# ---------------------------------------------------------------------------


def _grading_to_json(x: Fraction):
    return x.numerator if x.denominator == 1 else format_grading(x)


def module_to_json(m: StructuredModule) -> dict:
    towers = [
        {"base": _grading_to_json(t.base), "step": t.step, "kind": t.kind}
        for t in m.towers
    ]
    boxes = []
    for b in m.boxes:
        entry: dict = {"deg": _grading_to_json(b.deg), "dim": b.dim}
        if b.qsplit:
            entry["qsplit"] = True
        boxes.append(entry)
    return {
        "towers": towers,
        "boxes": boxes,
        "links": [list(l) for l in m.links],
    }


def module_from_json(data: Mapping) -> StructuredModule:
    towers = tuple(
        Tower(
            as_grading(t["base"]),
            int(t.get("step", 4)),
            str(t.get("kind", "plus")),
        )
        for t in data.get("towers", ())
    )
    boxes = tuple(
        Box(as_grading(b["deg"]), int(b["dim"]), bool(b.get("qsplit", False)))
        for b in data.get("boxes", ())
    )
    links = tuple((int(i), int(j)) for i, j in data.get("links", ()))
    return StructuredModule(towers=towers, boxes=boxes, links=links)

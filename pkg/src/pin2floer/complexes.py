"""Finite chain complexes over F2: cones, triangles, filtrations.

Everything is homologically graded with differentials of degree -1 and
integer degrees. The pieces:

* ``GradedComplex`` / ``ChainMap`` / ``Homotopy`` -- validated containers
  (d^2 = 0 and the chain-map identity are checked at construction).
* ``mapping_cone`` and ``iterated_mapping_cone`` -- the one- and two-step
  cone constructions, the latter taking (f1, f2, H1) with
  d3 H1 + H1 d1 = f2 f1.
* ``triangle_detect`` -- decides whether the iterated cone is acyclic and,
  when it is, emits the induced exact triangle on homology, including the
  degree -1 connecting map obtained by inverting the comparison iso.
* ``check_exact_triangle`` -- rank-level exactness audit of a triangle of
  graded maps, reusable for any graded vector spaces (integer or rational
  degrees).
* ``assemble_monopole_complexes`` -- builds the three flavors of monopole
  complex from the eight block maps and validates d^2 = 0.
* ``cone_module_action`` / ``iterated_cone_module_action`` -- extends
  compatible module actions on the pieces to the cones.
* ``FilteredComplex`` / ``filtered_pages`` -- exact spectral-sequence pages
  of a filtered complex, plus the six-column toy model whose pages collapse
  at E^4 under invertible diagonal blocks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

from .gf2 import ContractError, F2Matrix

__all__ = [
    "AssemblyError",
    "ChainMap",
    "ExactnessReport",
    "FilteredComplex",
    "GradedComplex",
    "GradedMap",
    "Homology",
    "Homotopy",
    "NotAcyclic",
    "SpectralPages",
    "Triangle",
    "assemble_monopole_complexes",
    "chain_map_from_json",
    "chain_map_to_json",
    "check_exact_triangle",
    "complex_from_json",
    "complex_to_json",
    "cone_module_action",
    "filtered_from_json",
    "filtered_pages",
    "filtered_to_json",
    "homology",
    "induced_map",
    "iterated_cone_module_action",
    "iterated_mapping_cone",
    "mainiso_toy_model",
    "mapping_cone",
    "random_admissible_triple",
    "random_chain_map",
    "random_complex",
    "random_filtered_complex",
    "solve_homotopy",
    "triangle_bundle_from_json",
    "triangle_bundle_to_json",
    "triangle_detect",
]

Degree = Union[int, "object"]  # ints for complexes; Fractions welcome in GradedMap


# ---------------------------------------------------------------------------
# Complexes and maps
# ---------------------------------------------------------------------------


class GradedComplex:
    """A finite chain complex of F2 spaces, differential of degree -1."""

    __slots__ = ("dims", "d")

    def __init__(self, dims: Mapping[int, int], d: Mapping[int, F2Matrix], check: bool = True):
        clean_dims = {int(k): int(n) for k, n in dims.items() if int(n) > 0}
        clean_d: dict[int, F2Matrix] = {}
        for k, m in d.items():
            k = int(k)
            want = (clean_dims.get(k - 1, 0), clean_dims.get(k, 0))
            if m.shape != want:
                raise ContractError(
                    f"differential at degree {k} has shape {m.shape}, expected {want}"
                )
            if m.rows and m.cols and not m.is_zero():
                clean_d[k] = m
        object.__setattr__(self, "dims", clean_dims)
        object.__setattr__(self, "d", clean_d)
        if check:
            for k in list(clean_d) + [k + 1 for k in clean_d]:
                if not self.d_at(k - 1).mul(self.d_at(k)).is_zero():
                    raise ValueError(f"d^2 != 0 at degree {k}")

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("GradedComplex is immutable")

    def dim_at(self, k: int) -> int:
        return self.dims.get(k, 0)

    def d_at(self, k: int) -> F2Matrix:
        m = self.d.get(k)
        if m is None:
            return F2Matrix.zero(self.dim_at(k - 1), self.dim_at(k))
        return m

    def degrees(self) -> list[int]:
        return sorted(self.dims)

    def window(self) -> tuple[int, int]:
        if not self.dims:
            return (0, -1)
        return (min(self.dims), max(self.dims))

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedComplex):
            return NotImplemented
        if self.dims != other.dims:
            return False
        keys = set(self.d) | set(other.d)
        return all(self.d_at(k) == other.d_at(k) for k in keys)

    def __hash__(self):  # pragma: no cover
        return hash((tuple(sorted(self.dims.items())),))

    def __repr__(self) -> str:  # pragma: no cover
        return f"GradedComplex(dims={dict(sorted(self.dims.items()))})"


class ChainMap:
    """A chain map between complexes; blocks indexed by source degree."""

    __slots__ = ("source", "target", "degree", "blocks")

    def __init__(
        self,
        source: GradedComplex,
        target: GradedComplex,
        blocks: Mapping[int, F2Matrix],
        degree: int = 0,
        check: bool = True,
    ):
        clean: dict[int, F2Matrix] = {}
        for k, m in blocks.items():
            k = int(k)
            want = (target.dim_at(k + degree), source.dim_at(k))
            if m.shape != want:
                raise ContractError(
                    f"map block at degree {k} has shape {m.shape}, expected {want}"
                )
            if m.rows and m.cols and not m.is_zero():
                clean[k] = m
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "degree", int(degree))
        object.__setattr__(self, "blocks", clean)
        if check:
            for k in self._relevant_degrees():
                lhs = target.d_at(k + degree).mul(self.block_at(k))
                rhs = self.block_at(k - 1).mul(source.d_at(k))
                if lhs != rhs:
                    raise ValueError(f"chain-map identity fails at degree {k}")

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("ChainMap is immutable")

    def _relevant_degrees(self) -> list[int]:
        ks = set(self.source.dims) | set(self.blocks)
        ks |= {k + 1 for k in ks}
        return sorted(ks)

    def block_at(self, k: int) -> F2Matrix:
        m = self.blocks.get(k)
        if m is None:
            return F2Matrix.zero(self.target.dim_at(k + self.degree), self.source.dim_at(k))
        return m


class Homotopy:
    """Degree +d block collection with no identity requirement of its own."""

    __slots__ = ("source", "target", "degree", "blocks")

    def __init__(
        self,
        source: GradedComplex,
        target: GradedComplex,
        blocks: Mapping[int, F2Matrix],
        degree: int = 1,
    ):
        clean: dict[int, F2Matrix] = {}
        for k, m in blocks.items():
            k = int(k)
            want = (target.dim_at(k + degree), source.dim_at(k))
            if m.shape != want:
                raise ContractError(
                    f"homotopy block at degree {k} has shape {m.shape}, expected {want}"
                )
            if m.rows and m.cols and not m.is_zero():
                clean[k] = m
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "degree", int(degree))
        object.__setattr__(self, "blocks", clean)

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("Homotopy is immutable")

    def block_at(self, k: int) -> F2Matrix:
        m = self.blocks.get(k)
        if m is None:
            return F2Matrix.zero(self.target.dim_at(k + self.degree), self.source.dim_at(k))
        return m


# ---------------------------------------------------------------------------
# Homology
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Homology:
    dims: dict[int, int]
    representatives: dict[int, list[tuple[int, ...]]]


class _Echelon:
    """Row echelon over masks with coefficient tracking for quotient coords."""

    def __init__(self):
        self.rows: list[tuple[int, int, int]] = []  # (pivot, vector, coeffs)

    def reduce(self, v: int) -> tuple[int, int]:
        coeffs = 0
        for p, vec, cf in self.rows:
            if (v >> p) & 1:
                v ^= vec
                coeffs ^= cf
        return v, coeffs

    def insert(self, v: int, coeffs: int = 0) -> bool:
        v, c = self.reduce(v)
        if not v:
            return False
        p = (v & -v).bit_length() - 1
        self.rows.append((p, v, c ^ coeffs))
        return True

    def dim(self) -> int:
        return len(self.rows)


class _DegreeHomology:
    """Cycle/boundary bookkeeping for one degree of one complex."""

    def __init__(self, d_out: F2Matrix, d_in: F2Matrix):
        self.n = d_out.cols
        ech = _Echelon()
        for col in d_in.transpose().bits:  # columns of d_in span the boundaries
            ech.insert(col)
        self.boundary_dim = ech.dim()
        self.reps: list[int] = []
        for v in d_out.kernel_masks():
            if ech.insert(v, coeffs=1 << len(self.reps)):
                self.reps.append(v)
        self.ech = ech

    @property
    def dim(self) -> int:
        return len(self.reps)

    def class_of(self, v: int) -> Optional[int]:
        """Homology coordinates of a cycle v, or None if v is not a cycle here."""
        residue, coeffs = self.ech.reduce(v)
        if residue:
            return None
        return coeffs


class _HomologyIndex:
    def __init__(self, c: GradedComplex):
        self.complex = c
        self.at: dict[int, _DegreeHomology] = {}
        for k in c.degrees():
            self.at[k] = _DegreeHomology(c.d_at(k), c.d_at(k + 1))

    def dim_at(self, k: int) -> int:
        h = self.at.get(k)
        return h.dim if h else 0

    def dims(self) -> dict[int, int]:
        return {k: h.dim for k, h in self.at.items() if h.dim}


def homology(c: GradedComplex) -> Homology:
    """Homology dimensions and representative cycles, degree by degree.

    dim H_k = dim ker d_k - rank d_{k+1}; representatives extend an echelon
    basis of the boundaries and are deterministic.
    """
    idx = _HomologyIndex(c)
    dims = idx.dims()
    reps: dict[int, list[tuple[int, ...]]] = {}
    for k, h in idx.at.items():
        if h.dim:
            reps[k] = [tuple((v >> j) & 1 for j in range(h.n)) for v in h.reps]
    return Homology(dims=dims, representatives=reps)


# ---------------------------------------------------------------------------
# Graded maps (no differential), exactness checking
# ---------------------------------------------------------------------------


class GradedMap:
    """A degree-homogeneous linear map between graded F2 spaces.

    ``src`` and ``tgt`` are degree -> dimension mappings; blocks are indexed
    by source degree. Degrees may be ints or Fractions, as long as they are
    mutually comparable.
    """

    __slots__ = ("src", "tgt", "degree", "blocks")

    def __init__(self, src: Mapping, tgt: Mapping, degree, blocks: Mapping):
        src = {k: int(n) for k, n in src.items() if int(n) > 0}
        tgt = {k: int(n) for k, n in tgt.items() if int(n) > 0}
        clean = {}
        for k, m in blocks.items():
            want = (tgt.get(k + degree, 0), src.get(k, 0))
            if m.shape != want:
                raise ContractError(
                    f"graded-map block at degree {k} has shape {m.shape}, expected {want}"
                )
            if m.rows and m.cols and not m.is_zero():
                clean[k] = m
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "tgt", tgt)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "blocks", clean)

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("GradedMap is immutable")

    def block_at(self, k) -> F2Matrix:
        m = self.blocks.get(k)
        if m is None:
            return F2Matrix.zero(self.tgt.get(k + self.degree, 0), self.src.get(k, 0))
        return m


@dataclass(frozen=True)
class ExactnessReport:
    ok: bool
    failures: tuple[tuple[str, object, str], ...]


def check_exact_triangle(
    u: GradedMap,
    v: GradedMap,
    w: GradedMap,
    degrees: Optional[Iterable] = None,
) -> ExactnessReport:
    """Audit exactness of A --u--> B --v--> C --w--> A at every vertex.

    At each vertex and degree this checks both containment (the incoming
    image lies in the outgoing kernel, i.e. the composite vanishes) and the
    rank identity rank(in) + rank(out) = dim(vertex degree). When
    ``degrees`` is given, only those vertex degrees are audited (useful for
    windowed two-sided data whose edges are truncation artifacts).
    """
    failures: list[tuple[str, object, str]] = []
    triples = (("B", u, v), ("C", v, w), ("A", w, u))
    for name, inc, out in triples:
        if degrees is None:
            ks = set(inc.tgt) | {k + inc.degree for k in inc.src} | set(out.src)
        else:
            ks = set(degrees)
        for k in sorted(ks, key=lambda x: (float(x))):
            dim_here = inc.tgt.get(k, 0)
            rk_in = inc.block_at(k - inc.degree).rank()
            rk_out = out.block_at(k).rank()
            comp = out.block_at(k).mul(inc.block_at(k - inc.degree))
            if not comp.is_zero():
                failures.append((name, k, "composite of consecutive maps is nonzero"))
            if rk_in + rk_out != dim_here:
                failures.append(
                    (name, k, f"rank(in)={rk_in} + rank(out)={rk_out} != dim={dim_here}")
                )
    return ExactnessReport(ok=not failures, failures=tuple(failures))


def induced_map(
    f: ChainMap,
    source_index: Optional[_HomologyIndex] = None,
    target_index: Optional[_HomologyIndex] = None,
) -> GradedMap:
    """The map induced by a chain map on homology, as a GradedMap."""
    hs = source_index or _HomologyIndex(f.source)
    ht = target_index or _HomologyIndex(f.target)
    blocks = {}
    for k, h in hs.at.items():
        if not h.dim:
            continue
        tgt_h = ht.at.get(k + f.degree)
        tdim = tgt_h.dim if tgt_h else 0
        cols = []
        for rep in h.reps:
            img = f.block_at(k).apply(rep)
            if tgt_h is None:
                if img:
                    raise ValueError(
                        f"image of a cycle lands outside the target window at degree {k}"
                    )
                cols.append(0)
                continue
            cls = tgt_h.class_of(img)
            if cls is None:
                raise ValueError(f"chain map sent a cycle to a non-cycle at degree {k}")
            cols.append(cls)
        rows = [0] * tdim
        for j, cmask in enumerate(cols):
            for i in range(tdim):
                if (cmask >> i) & 1:
                    rows[i] |= 1 << j
        blocks[k] = F2Matrix(tdim, h.dim, rows)
    return GradedMap(hs.dims(), ht.dims(), f.degree, blocks)


# ---------------------------------------------------------------------------
# Cones
# ---------------------------------------------------------------------------


def mapping_cone(f: ChainMap) -> tuple[GradedComplex, ChainMap, ChainMap]:
    """Cone of a degree-0 chain map f: C1 -> C2.

    Returns (cone, inclusion of C2, projection to C1). The C1 summand sits
    with a +1 homological shift: cone_k = C2_k + C1_{k-1}, differential
    [[d2, f], [0, d1]]; the projection has degree -1. The short exact
    sequence 0 -> C2 -> cone -> C1[1] -> 0 holds on the nose.
    """
    if f.degree != 0:
        raise ContractError(f"mapping_cone needs a degree-0 map, got degree {f.degree}")
    c1, c2 = f.source, f.target
    ks = set(c1.dims) | {k + 1 for k in c1.dims} | set(c2.dims)
    dims = {k: c2.dim_at(k) + c1.dim_at(k - 1) for k in ks}
    d = {}
    for k in ks:
        d[k] = F2Matrix.block(
            [
                [c2.d_at(k), f.block_at(k - 1)],
                [None, c1.d_at(k - 1)],
            ],
            row_dims=[c2.dim_at(k - 1), c1.dim_at(k - 2)],
            col_dims=[c2.dim_at(k), c1.dim_at(k - 1)],
        )
    cone = GradedComplex(dims, d)
    incl = ChainMap(
        c2,
        cone,
        {
            k: F2Matrix.vstack(
                [F2Matrix.identity(c2.dim_at(k)), F2Matrix.zero(c1.dim_at(k - 1), c2.dim_at(k))]
            )
            for k in c2.dims
        },
        degree=0,
    )
    proj = ChainMap(
        cone,
        c1,
        {
            k: F2Matrix.hstack(
                [F2Matrix.zero(c1.dim_at(k - 1), c2.dim_at(k)), F2Matrix.identity(c1.dim_at(k - 1))]
            )
            for k in ks
            if c1.dim_at(k - 1)
        },
        degree=-1,
    )
    return cone, incl, proj


def _check_homotopy_identity(f1: ChainMap, f2: ChainMap, h1: Homotopy) -> None:
    if f1.degree or f2.degree:
        raise ContractError("iterated cone data needs degree-0 chain maps")
    if h1.degree != 1:
        raise ContractError(f"the connecting homotopy must have degree +1, got {h1.degree}")
    if f1.target is not f2.source and f1.target != f2.source:
        raise ContractError("f2 must start where f1 ends")
    c1, c3 = f1.source, f2.target
    if h1.source != c1 or h1.target != c3:
        raise ContractError("homotopy must run from the first complex to the third")
    for k in sorted(set(c1.dims) | {k + 1 for k in c1.dims}):
        lhs = c3.d_at(k + 1).mul(h1.block_at(k)) + h1.block_at(k - 1).mul(c1.d_at(k))
        rhs = f2.block_at(k).mul(f1.block_at(k))
        if lhs != rhs:
            raise ValueError(
                f"homotopy identity d3*H1 + H1*d1 = f2*f1 fails at degree {k}"
            )


def iterated_mapping_cone(f1: ChainMap, f2: ChainMap, h1: Homotopy) -> GradedComplex:
    """The two-step cone of (f1, f2, H1) with its upper-triangular differential.

    Degree k carries C3_k + C2_{k-1} + C1_{k-2} with differential
    [[d3, f2, H1], [0, d2, f1], [0, 0, d1]].
    """
    _check_homotopy_identity(f1, f2, h1)
    c1, c2, c3 = f1.source, f1.target, f2.target
    ks = set(c3.dims) | {k + 1 for k in c2.dims} | {k + 2 for k in c1.dims}
    ks |= {k + 1 for k in ks}
    dims = {k: c3.dim_at(k) + c2.dim_at(k - 1) + c1.dim_at(k - 2) for k in ks}
    d = {}
    for k in ks:
        d[k] = F2Matrix.block(
            [
                [c3.d_at(k), f2.block_at(k - 1), h1.block_at(k - 2)],
                [None, c2.d_at(k - 1), f1.block_at(k - 2)],
                [None, None, c1.d_at(k - 2)],
            ],
            row_dims=[c3.dim_at(k - 1), c2.dim_at(k - 2), c1.dim_at(k - 3)],
            col_dims=[c3.dim_at(k), c2.dim_at(k - 1), c1.dim_at(k - 2)],
        )
    return GradedComplex(dims, d)


@dataclass(frozen=True)
class NotAcyclic:
    """Iterated cone had homology; its nonzero dimensions are reported."""

    homology_dims: dict[int, int]


@dataclass(frozen=True)
class Triangle:
    """The exact triangle on homology emitted by triangle_detect."""

    f1_star: GradedMap
    f2_star: GradedMap
    f3: GradedMap  # degree -1 connecting map
    h_dims: tuple[dict[int, int], dict[int, int], dict[int, int]]


def triangle_detect(f1: ChainMap, f2: ChainMap, h1: Homotopy):
    """Decide acyclicity of the iterated cone and emit the exact triangle.

    The iterated cone is the cone of g = (f2 + H1): cone(f1) -> C3. It is
    acyclic exactly when g induces an isomorphism on homology; in that case
    the connecting map is F3 = (projection)_* composed with that iso's
    inverse, and the triangle ((f1)_*, (f2)_*, F3) is exact. Otherwise a
    NotAcyclic report with the homology dimensions comes back.
    """
    _check_homotopy_identity(f1, f2, h1)
    c1, c2, c3 = f1.source, f1.target, f2.target
    cone1, _incl, proj = mapping_cone(f1)
    g_blocks = {}
    for k in cone1.dims:
        g_blocks[k] = F2Matrix.hstack([f2.block_at(k), h1.block_at(k - 1)])
    g = ChainMap(cone1, c3, g_blocks, degree=0)

    big = iterated_mapping_cone(f1, f2, h1)
    h_big = homology(big)
    if h_big.dims:
        return NotAcyclic(homology_dims=h_big.dims)

    hc1 = _HomologyIndex(c1)
    hc2 = _HomologyIndex(c2)
    hc3 = _HomologyIndex(c3)
    hcone = _HomologyIndex(cone1)

    delta = induced_map(g, hcone, hc3)
    # acyclicity of the cone of g forces delta to be an isomorphism
    inv_blocks = {}
    for k in sorted(set(hc3.dims()) | set(hcone.dims())):
        m = delta.block_at(k)
        if m.rows != m.cols or m.rank() != m.rows:
            raise AssertionError(
                "comparison map is not an isomorphism despite an acyclic cone"
            )
        if not m.rows:
            continue
        cols = []
        for i in range(m.rows):
            x = m.solve_mask(1 << i)
            cols.append(x)
        rows = [0] * m.rows
        for j, cmask in enumerate(cols):
            for i in range(m.rows):
                if (cmask >> i) & 1:
                    rows[i] |= 1 << j
        inv_blocks[k] = F2Matrix(m.rows, m.rows, rows)
    delta_inv = GradedMap(hc3.dims(), hcone.dims(), 0, inv_blocks)

    proj_star = induced_map(proj, hcone, hc1)
    f3_blocks = {}
    for k in hc3.dims():
        f3_blocks[k] = proj_star.block_at(k).mul(delta_inv.block_at(k))
    f3 = GradedMap(hc3.dims(), hc1.dims(), -1, f3_blocks)

    f1_star = induced_map(f1, hc1, hc2)
    f2_star = induced_map(f2, hc2, hc3)
    return Triangle(
        f1_star=f1_star,
        f2_star=f2_star,
        f3=f3,
        h_dims=(hc1.dims(), hc2.dims(), hc3.dims()),
    )


# ---------------------------------------------------------------------------
# Monopole-style assembly
# ---------------------------------------------------------------------------


class AssemblyError(ValueError):
    pass


def _gmap(src: Mapping[int, int], tgt: Mapping[int, int], degree: int, blocks) -> GradedMap:
    return GradedMap(src, tgt, degree, blocks)


def assemble_monopole_complexes(
    o_dims: Mapping[int, int],
    s_dims: Mapping[int, int],
    u_dims: Mapping[int, int],
    d_oo: Mapping[int, F2Matrix],
    d_os: Mapping[int, F2Matrix],
    d_uo: Mapping[int, F2Matrix],
    d_us: Mapping[int, F2Matrix],
    dbar_ss: Mapping[int, F2Matrix],
    dbar_su: Mapping[int, F2Matrix],
    dbar_us: Mapping[int, F2Matrix],
    dbar_uu: Mapping[int, F2Matrix],
) -> tuple[GradedComplex, GradedComplex, GradedComplex]:
    """Assemble the to/from/bar complexes from the eight block maps.

    Blocks are named source-to-target: d_os maps the o-summand into the
    s-summand, and so on. Degree conventions: the interior blocks and
    dbar_ss, dbar_uu have degree -1, dbar_su has degree 0, dbar_us has
    degree -2; the bar complex shifts its u-summand down by one so that all
    three assembled differentials have degree -1. Each output complex is
    validated (d^2 = 0) and an AssemblyError names the offender otherwise.
    """
    oo = _gmap(o_dims, o_dims, -1, d_oo)
    os_ = _gmap(o_dims, s_dims, -1, d_os)
    uo = _gmap(u_dims, o_dims, -1, d_uo)
    us = _gmap(u_dims, s_dims, -1, d_us)
    bss = _gmap(s_dims, s_dims, -1, dbar_ss)
    bsu = _gmap(s_dims, u_dims, 0, dbar_su)
    bus = _gmap(u_dims, s_dims, -2, dbar_us)
    buu = _gmap(u_dims, u_dims, -1, dbar_uu)

    ks = set(o_dims) | set(s_dims) | set(u_dims)
    ks |= {k + 1 for k in ks} | {k - 1 for k in ks}

    def build(name, dims_fn, block_fn) -> GradedComplex:
        dims = {k: dims_fn(k) for k in ks}
        d = {k: block_fn(k) for k in ks}
        try:
            return GradedComplex(dims, d)
        except ValueError as e:
            raise AssemblyError(f"{name} complex is not a complex: {e}") from None

    def check_dims(k):
        return o_dims.get(k, 0) + s_dims.get(k, 0)

    def check_block(k):
        return F2Matrix.block(
            [
                [oo.block_at(k), uo.block_at(k).mul(bsu.block_at(k))],
                [os_.block_at(k), bss.block_at(k) + us.block_at(k).mul(bsu.block_at(k))],
            ],
            row_dims=[o_dims.get(k - 1, 0), s_dims.get(k - 1, 0)],
            col_dims=[o_dims.get(k, 0), s_dims.get(k, 0)],
        )

    def hat_dims(k):
        return o_dims.get(k, 0) + u_dims.get(k, 0)

    def hat_block(k):
        return F2Matrix.block(
            [
                [oo.block_at(k), uo.block_at(k)],
                [bsu.block_at(k - 1).mul(os_.block_at(k)), bsu.block_at(k - 1).mul(us.block_at(k))],
            ],
            row_dims=[o_dims.get(k - 1, 0), u_dims.get(k - 1, 0)],
            col_dims=[o_dims.get(k, 0), u_dims.get(k, 0)],
        )

    def bar_dims(k):
        return s_dims.get(k, 0) + u_dims.get(k + 1, 0)

    def bar_block(k):
        return F2Matrix.block(
            [
                [bss.block_at(k), bus.block_at(k + 1)],
                [bsu.block_at(k), buu.block_at(k + 1)],
            ],
            row_dims=[s_dims.get(k - 1, 0), u_dims.get(k, 0)],
            col_dims=[s_dims.get(k, 0), u_dims.get(k + 1, 0)],
        )

    check = build("to", check_dims, check_block)
    hat = build("from", hat_dims, hat_block)
    bar = build("bar", bar_dims, bar_block)
    return check, hat, bar


# ---------------------------------------------------------------------------
# Module actions on cones
# ---------------------------------------------------------------------------


def cone_module_action(
    f1: ChainMap, v1: ChainMap, v2: ChainMap, hmix: Homotopy
) -> ChainMap:
    """Extend compatible endomorphism actions to the cone of f1.

    Needs d2*Hmix + Hmix*d1 = f1*V1 + V2*f1 (Hmix one degree above the
    common degree of V1 and V2); the action on the cone is then the
    upper-triangular [[V2, Hmix], [0, V1]].
    """
    vdeg = v1.degree
    if v2.degree != vdeg:
        raise ContractError(f"action degrees differ: {v1.degree} vs {v2.degree}")
    if hmix.degree != vdeg + 1:
        raise ContractError(
            f"mixing homotopy must have degree {vdeg + 1}, got {hmix.degree}"
        )
    c1, c2 = f1.source, f1.target
    if v1.source != c1 or v1.target != c1 or v2.source != c2 or v2.target != c2:
        raise ContractError("actions must be endomorphism-shaped on the cone pieces")
    for k in sorted(set(c1.dims) | {k + 1 for k in c1.dims}):
        lhs = c2.d_at(k + vdeg + 1).mul(hmix.block_at(k)) + hmix.block_at(k - 1).mul(c1.d_at(k))
        rhs = f1.block_at(k + vdeg).mul(v1.block_at(k)) + v2.block_at(k).mul(f1.block_at(k))
        if lhs != rhs:
            raise ValueError(f"action mixing identity fails at degree {k}")
    cone, _, _ = mapping_cone(f1)
    blocks = {}
    for k in cone.dims:
        blocks[k] = F2Matrix.block(
            [
                [v2.block_at(k), hmix.block_at(k - 1)],
                [None, v1.block_at(k - 1)],
            ],
            row_dims=[c2.dim_at(k + vdeg), c1.dim_at(k + vdeg - 1)],
            col_dims=[c2.dim_at(k), c1.dim_at(k - 1)],
        )
    return ChainMap(cone, cone, blocks, degree=vdeg)


def iterated_cone_module_action(
    f1: ChainMap,
    f2: ChainMap,
    h1: Homotopy,
    v1: ChainMap,
    v2: ChainMap,
    v3: ChainMap,
    hmix1: Homotopy,
    hmix2: Homotopy,
    g1: Homotopy,
) -> ChainMap:
    """Extend actions to the two-step cone via [[V3, Hmix2, G1], [0, V2, Hmix1], [0, 0, V1]].

    Preconditions: the two pairwise mixing identities, plus the corner
    identity d3*G1 + G1*d1 = f2*Hmix1 + Hmix2*f1 + H1*V1 + V3*H1 (the last
    two terms are the cone homotopy H1 interacting with the outer actions).
    A failed identity raises with the first offending degree.
    """
    _check_homotopy_identity(f1, f2, h1)
    vdeg = v1.degree
    for v in (v2, v3):
        if v.degree != vdeg:
            raise ContractError("all three action maps must share one degree")
    if hmix1.degree != vdeg + 1 or hmix2.degree != vdeg + 1:
        raise ContractError(f"mixing homotopies must have degree {vdeg + 1}")
    if g1.degree != vdeg + 2:
        raise ContractError(f"corner block must have degree {vdeg + 2}, got {g1.degree}")
    c1, c2, c3 = f1.source, f1.target, f2.target
    # pairwise identities
    for k in sorted(set(c1.dims) | {k + 1 for k in c1.dims}):
        lhs = c2.d_at(k + vdeg + 1).mul(hmix1.block_at(k)) + hmix1.block_at(k - 1).mul(c1.d_at(k))
        rhs = f1.block_at(k + vdeg).mul(v1.block_at(k)) + v2.block_at(k).mul(f1.block_at(k))
        if lhs != rhs:
            raise ValueError(f"first mixing identity fails at degree {k}")
    for k in sorted(set(c2.dims) | {k + 1 for k in c2.dims}):
        lhs = c3.d_at(k + vdeg + 1).mul(hmix2.block_at(k)) + hmix2.block_at(k - 1).mul(c2.d_at(k))
        rhs = f2.block_at(k + vdeg).mul(v2.block_at(k)) + v3.block_at(k).mul(f2.block_at(k))
        if lhs != rhs:
            raise ValueError(f"second mixing identity fails at degree {k}")
    for k in sorted(set(c1.dims) | {k + 1 for k in c1.dims}):
        lhs = c3.d_at(k + vdeg + 2).mul(g1.block_at(k)) + g1.block_at(k - 1).mul(c1.d_at(k))
        rhs = (
            f2.block_at(k + vdeg + 1).mul(hmix1.block_at(k))
            + hmix2.block_at(k).mul(f1.block_at(k))
            + h1.block_at(k + vdeg).mul(v1.block_at(k))
            + v3.block_at(k + 1).mul(h1.block_at(k))
        )
        if lhs != rhs:
            raise ValueError(f"corner identity fails at degree {k}")
    big = iterated_mapping_cone(f1, f2, h1)
    blocks = {}
    for k in big.dims:
        blocks[k] = F2Matrix.block(
            [
                [v3.block_at(k), hmix2.block_at(k - 1), g1.block_at(k - 2)],
                [None, v2.block_at(k - 1), hmix1.block_at(k - 2)],
                [None, None, v1.block_at(k - 2)],
            ],
            row_dims=[c3.dim_at(k + vdeg), c2.dim_at(k + vdeg - 1), c1.dim_at(k + vdeg - 2)],
            col_dims=[c3.dim_at(k), c2.dim_at(k - 1), c1.dim_at(k - 2)],
        )
    return ChainMap(big, big, blocks, degree=vdeg)


# ---------------------------------------------------------------------------
# Filtered complexes and spectral pages
# ---------------------------------------------------------------------------


class FilteredComplex:
    """A complex with an increasing filtration given by a level per basis vector.

    The differential must be filtration-nonincreasing: a nonzero entry from
    basis vector j (degree k) to basis vector i (degree k-1) needs
    level(i) <= level(j).
    """

    __slots__ = ("complex", "levels")

    def __init__(self, complex: GradedComplex, levels: Mapping[int, Sequence[int]]):
        lv: dict[int, tuple[int, ...]] = {}
        for k, n in complex.dims.items():
            seq = levels.get(k)
            if seq is None or len(seq) != n:
                raise ContractError(
                    f"degree {k} has {n} basis vectors but {0 if seq is None else len(seq)} levels"
                )
            lv[k] = tuple(int(x) for x in seq)
        for k, seq in levels.items():
            if complex.dim_at(int(k)) == 0 and len(seq):
                raise ContractError(f"levels given at empty degree {k}")
        for k, m in complex.d.items():
            src_lv = lv[k]
            tgt_lv = lv.get(k - 1, ())
            for i in range(m.rows):
                b = m.bits[i]
                while b:
                    j = (b & -b).bit_length() - 1
                    b &= b - 1
                    if tgt_lv[i] > src_lv[j]:
                        raise ValueError(
                            f"differential raises the filtration at degree {k},"
                            f" entry ({i}, {j})"
                        )
        object.__setattr__(self, "complex", complex)
        object.__setattr__(self, "levels", lv)

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("FilteredComplex is immutable")

    def level_span(self) -> int:
        vals = [x for seq in self.levels.values() for x in seq]
        if not vals:
            return 0
        return max(vals) - min(vals)

    def level_range(self) -> tuple[int, int]:
        vals = [x for seq in self.levels.values() for x in seq]
        if not vals:
            return (0, 0)
        return (min(vals), max(vals))


@dataclass(frozen=True)
class SpectralPages:
    """Pages E^0..E^r of the filtration spectral sequence, plus the limit.

    ``pages[r]`` maps (filtration level p, degree k) to the page dimension;
    zero entries are omitted. ``einf`` is the stable page, reached at
    ``stable_r`` and verified against the next page.
    """

    pages: tuple[dict[tuple[int, int], int], ...]
    einf: dict[tuple[int, int], int]
    stable_r: int


def filtered_pages(fc: FilteredComplex, r_max: Optional[int] = None) -> SpectralPages:
    """Exact spectral-sequence pages of a filtered complex.

    Uses the cycle spaces Z^r(p, k) = {x in F_p C_k : dx in F_{p-r} C_{k-1}}
    and E^r = Z^r / (Z^{r-1}(p-1) + d Z^{r-1}(p+r-1)); dimensions are
    computed exactly with echelon spans. Pages stabilize once r exceeds the
    filtration span; the stable page must agree with its successor, which is
    asserted.
    """
    c = fc.complex
    lo_p, hi_p = fc.level_range()
    span = hi_p - lo_p
    stable_r = span + 1
    r_top = max(stable_r + 1, r_max if r_max is not None else 0)

    def fmask(p: int, k: int) -> int:
        lvs = fc.levels.get(k)
        if not lvs:
            return 0
        out = 0
        for i, x in enumerate(lvs):
            if x <= p:
                out |= 1 << i
        return out

    z_cache: dict[tuple[int, int, int], list[int]] = {}

    def z_basis(r: int, p: int, k: int) -> list[int]:
        key = (r, p, k)
        got = z_cache.get(key)
        if got is not None:
            return got
        n = c.dim_at(k)
        if n == 0:
            z_cache[key] = []
            return []
        allow = fmask(p, k)
        if r <= 0:
            out = [1 << i for i in range(n) if (allow >> i) & 1]
            z_cache[key] = out
            return out
        d = c.d_at(k)
        tgt_lvs = fc.levels.get(k - 1, ())
        bad_rows = [i for i, x in enumerate(tgt_lvs) if x > p - r]
        allowed_cols = [j for j in range(n) if (allow >> j) & 1]
        if not allowed_cols:
            z_cache[key] = []
            return []
        if not bad_rows:
            out = [1 << j for j in allowed_cols]
            z_cache[key] = out
            return out
        sub_rows = []
        for i in bad_rows:
            b = d.bits[i]
            rb = 0
            for jj, j in enumerate(allowed_cols):
                if (b >> j) & 1:
                    rb |= 1 << jj
            sub_rows.append(rb)
        sub = F2Matrix(len(bad_rows), len(allowed_cols), sub_rows)
        out = []
        for kmask in sub.kernel_masks():
            full = 0
            for jj, j in enumerate(allowed_cols):
                if (kmask >> jj) & 1:
                    full |= 1 << j
            out.append(full)
        z_cache[key] = out
        return out

    def span_dim(vectors: Iterable[int]) -> int:
        ech = _Echelon()
        for v in vectors:
            ech.insert(v)
        return ech.dim()

    degrees = c.degrees()
    pages: list[dict[tuple[int, int], int]] = []
    for r in range(r_top + 1):
        page: dict[tuple[int, int], int] = {}
        for k in degrees:
            lvs = fc.levels.get(k, ())
            for p in range(lo_p, hi_p + 1):
                if r == 0:
                    dim = sum(1 for x in lvs if x == p)
                else:
                    num = z_basis(r, p, k)
                    den = list(z_basis(r - 1, p - 1, k))
                    dk1 = c.d_at(k + 1)
                    for x in z_basis(r - 1, p + r - 1, k + 1):
                        den.append(dk1.apply(x))
                    dim = span_dim(num) - span_dim(den)
                if dim:
                    page[(p, k)] = dim
        pages.append(page)

    if pages[stable_r] != pages[stable_r + 1]:
        raise AssertionError("spectral pages failed to stabilize past the filtration span")
    keep = r_max if r_max is not None else stable_r
    return SpectralPages(
        pages=tuple(pages[: keep + 1]),
        einf=dict(pages[stable_r]),
        stable_r=stable_r,
    )


def mainiso_toy_model(grouped: bool = False) -> FilteredComplex:
    """Six-column filtered model of the two-cone comparison complex.

    Three primed and three unprimed columns of F^3 with identity comparison
    maps and inner differentials zero; total homology vanishes, yet the page
    at which the sequence collapses depends on the filtration: per-column
    levels 0..5 (the default) keep nonzero E^2 = E^3 and reach zero exactly
    at E^4, while grouping the columns in pairs (``grouped=True``) already
    collapses at E^1.
    """
    e13 = F2Matrix.from_rows([[0, 0, 1], [0, 0, 0], [0, 0, 0]])
    e23 = F2Matrix.from_rows([[0, 0, 0], [0, 0, 1], [0, 0, 0]])
    i3 = F2Matrix.identity(3)
    z3 = F2Matrix.zero(3, 3)
    d1 = F2Matrix.block([[e13, i3]], row_dims=[3], col_dims=[3, 3])
    d2 = F2Matrix.block([[e23, i3], [z3, e13]], row_dims=[3, 3], col_dims=[3, 3])
    d3 = F2Matrix.block([[i3], [e23]], row_dims=[3, 3], col_dims=[3])
    cx = GradedComplex({0: 3, 1: 6, 2: 6, 3: 3}, {1: d1, 2: d2, 3: d3})
    if grouped:
        levels = {0: (0,) * 3, 1: (1, 1, 1, 0, 0, 0), 2: (2, 2, 2, 1, 1, 1), 3: (2,) * 3}
    else:
        levels = {0: (0,) * 3, 1: (1, 1, 1, 3, 3, 3), 2: (2, 2, 2, 4, 4, 4), 3: (5,) * 3}
    return FilteredComplex(cx, levels)


# ---------------------------------------------------------------------------
# Random generators (test fuel)
# ---------------------------------------------------------------------------


def _invert(m: F2Matrix) -> F2Matrix:
    n = m.rows
    rows = [0] * n
    for i in range(n):
        x = m.solve_mask(1 << i)
        if x is None:
            raise ContractError("matrix is not invertible")
        for r in range(n):
            if (x >> r) & 1:
                rows[r] |= 1 << i
    return F2Matrix(n, n, rows)


def _random_invertible(rng: random.Random, n: int) -> tuple[F2Matrix, F2Matrix]:
    if n == 0:
        m = F2Matrix.identity(0)
        return m, m
    while True:
        m = F2Matrix(n, n, [rng.getrandbits(n) for _ in range(n)])
        if m.rank() == n:
            return m, _invert(m)


def random_complex(
    rng: random.Random,
    degrees: Sequence[int],
    max_dots: int = 2,
    max_intervals: int = 2,
) -> GradedComplex:
    """A random complex: dots plus two-term intervals, in a scrambled basis.

    Built as a direct sum of elementary pieces and conjugated degreewise by
    random invertible matrices, so d^2 = 0 holds by construction while the
    matrices look generic.
    """
    degrees = sorted(set(int(k) for k in degrees))
    dots = {k: rng.randint(0, max_dots) for k in degrees}
    ints = {
        k: (rng.randint(0, max_intervals) if k - 1 in degrees else 0) for k in degrees
    }
    dims: dict[int, int] = {}
    for k in degrees:
        above = ints.get(k + 1, 0)
        dims[k] = above + dots[k] + ints[k]
    d: dict[int, F2Matrix] = {}
    for k in degrees:
        n, m = dims.get(k - 1, 0), dims.get(k, 0)
        rows = [0] * n
        # interval sources at k occupy the last ints[k] coordinates; their
        # targets at k-1 occupy the first ints[k] coordinates
        for t in range(ints[k]):
            src = m - ints[k] + t
            rows[t] |= 1 << src
        d[k] = F2Matrix(n, m, rows)
    p: dict[int, tuple[F2Matrix, F2Matrix]] = {
        k: _random_invertible(rng, dims.get(k, 0)) for k in degrees
    }
    d_conj = {}
    for k in degrees:
        if k - 1 in dims:
            d_conj[k] = p[k - 1][0].mul(d[k]).mul(p[k][1])
    return GradedComplex({k: n for k, n in dims.items() if n}, d_conj)


def _random_block(rng: random.Random, rows: int, cols: int, density: float = 0.5) -> F2Matrix:
    bits = []
    for _ in range(rows):
        b = 0
        for j in range(cols):
            if rng.random() < density:
                b |= 1 << j
        bits.append(b)
    return F2Matrix(rows, cols, bits)


def _nullhomotopic_parts(
    rng: random.Random, c: GradedComplex, d_: GradedComplex
) -> tuple[dict[int, F2Matrix], ChainMap]:
    """Random degree +1 blocks g and the chain map dg + gd they generate."""
    g = {
        k: _random_block(rng, d_.dim_at(k + 1), c.dim_at(k))
        for k in c.dims
        if d_.dim_at(k + 1)
    }

    def g_at(k: int) -> F2Matrix:
        m = g.get(k)
        return m if m is not None else F2Matrix.zero(d_.dim_at(k + 1), c.dim_at(k))

    blocks = {}
    for k in set(c.dims) | {k - 1 for k in c.dims}:
        blocks[k] = d_.d_at(k + 1).mul(g_at(k)) + g_at(k - 1).mul(c.d_at(k))
    f = ChainMap(c, d_, {k: m for k, m in blocks.items() if m.rows and m.cols}, degree=0)
    return g, f


def random_chain_map(rng: random.Random, c: GradedComplex, d_: GradedComplex) -> ChainMap:
    """A random (nullhomotopic) chain map c -> d_, valid by construction."""
    return _nullhomotopic_parts(rng, c, d_)[1]


def solve_homotopy(
    f1: ChainMap, f2: ChainMap
) -> Optional[Homotopy]:
    """Solve d3*H + H*d1 = f2*f1 for a degree +1 homotopy H, if one exists.

    Sets up the block equations as one linear system over F2 and returns
    None when f2*f1 is not nullhomotopic.
    """
    c1, c3 = f1.source, f2.target
    var_index: dict[tuple[int, int, int], int] = {}
    for k in c1.dims:
        for i in range(c3.dim_at(k + 1)):
            for j in range(c1.dim_at(k)):
                var_index[(k, i, j)] = len(var_index)
    nvars = len(var_index)
    rows: list[int] = []
    rhs_bits: list[int] = []
    eq_degrees = sorted(set(c1.dims) | {k + 1 for k in c1.dims})
    for k in eq_degrees:
        rhs = f2.block_at(k).mul(f1.block_at(k))
        d3 = c3.d_at(k + 1)
        d1 = c1.d_at(k)
        for r in range(c3.dim_at(k)):
            for cc in range(c1.dim_at(k)):
                row = 0
                # (d3 * H_k)[r, cc] = sum_i d3[r, i] H_k[i, cc]
                for i in range(c3.dim_at(k + 1)):
                    if d3.entry(r, i):
                        row ^= 1 << var_index[(k, i, cc)]
                # (H_{k-1} * d1)[r, cc] = sum_j H_{k-1}[r, j] d1[j, cc]
                for j in range(c1.dim_at(k - 1)):
                    if d1.entry(j, cc):
                        row ^= 1 << var_index[(k - 1, r, j)]
                rows.append(row)
                rhs_bits.append(rhs.entry(r, cc))
    system = F2Matrix(len(rows), nvars, rows)
    target = 0
    for i, b in enumerate(rhs_bits):
        if b:
            target |= 1 << i
    sol = system.solve_mask(target)
    if sol is None:
        return None
    blocks: dict[int, F2Matrix] = {}
    for k in c1.dims:
        n, m = c3.dim_at(k + 1), c1.dim_at(k)
        bits = [0] * n
        for i in range(n):
            for j in range(m):
                if (sol >> var_index[(k, i, j)]) & 1:
                    bits[i] |= 1 << j
        blocks[k] = F2Matrix(n, m, bits)
    return Homotopy(c1, c3, blocks, degree=1)


def random_admissible_triple(
    rng: random.Random,
    degrees: Sequence[int] = (0, 1, 2, 3),
    method: str = "formula",
    max_dots: int = 2,
    max_intervals: int = 2,
) -> tuple[ChainMap, ChainMap, Homotopy]:
    """Random (f1, f2, H1) satisfying d3*H1 + H1*d1 = f2*f1.

    ``method='formula'`` draws nullhomotopic f1 = dg1 + g1d and
    f2 = dg2 + g2d on three random complexes and uses the closed-form
    homotopy H1 = g2*d*g1 + g2*g1*d. ``method='cone'`` takes C3 to be the
    cone of f1, f2 the structural inclusion and H1 = (0, id); the identity
    then holds on the nose and the triple is always acyclic.
    """
    if method == "cone":
        c1 = random_complex(rng, degrees, max_dots, max_intervals)
        c2 = random_complex(rng, degrees, max_dots, max_intervals)
        f1 = random_chain_map(rng, c1, c2)
        c3, f2, _proj = mapping_cone(f1)
        h_blocks = {}
        for k in c1.dims:
            n2 = c2.dim_at(k + 1)
            n1 = c1.dim_at(k)
            h_blocks[k] = F2Matrix.vstack(
                [F2Matrix.zero(n2, n1), F2Matrix.identity(n1)]
            )
        h1 = Homotopy(c1, c3, h_blocks, degree=1)
        _check_homotopy_identity(f1, f2, h1)
        return f1, f2, h1
    if method != "formula":
        raise ContractError(f"unknown method {method!r}")
    c1 = random_complex(rng, degrees, max_dots, max_intervals)
    c2 = random_complex(rng, degrees, max_dots, max_intervals)
    c3 = random_complex(rng, degrees, max_dots, max_intervals)
    g1, f1 = _nullhomotopic_parts(rng, c1, c2)
    g2, f2 = _nullhomotopic_parts(rng, c2, c3)

    def g_at(g, src, tgt, k):
        m = g.get(k)
        return m if m is not None else F2Matrix.zero(tgt.dim_at(k + 1), src.dim_at(k))

    h_blocks = {}
    for k in c1.dims:
        a = g_at(g2, c2, c3, k).mul(c2.d_at(k + 1)).mul(g_at(g1, c1, c2, k))
        b = g_at(g2, c2, c3, k).mul(g_at(g1, c1, c2, k - 1)).mul(c1.d_at(k))
        h_blocks[k] = a + b
    h1 = Homotopy(c1, c3, h_blocks, degree=1)
    _check_homotopy_identity(f1, f2, h1)
    return f1, f2, h1


def random_filtered_complex(
    rng: random.Random,
    degrees: Sequence[int],
    num_levels: int = 3,
    max_dots: int = 2,
    max_intervals: int = 2,
) -> FilteredComplex:
    """A random filtered complex whose filtration is respected by design.

    Levels are assigned per elementary piece before conjugation; the
    conjugating matrices are block upper-triangular with respect to the
    level order so the filtration survives the change of basis.
    """
    degrees = sorted(set(int(k) for k in degrees))
    dots = {k: rng.randint(0, max_dots) for k in degrees}
    ints = {
        k: (rng.randint(0, max_intervals) if k - 1 in degrees else 0) for k in degrees
    }
    dims: dict[int, int] = {}
    piece_levels: dict[int, list[int]] = {}
    for k in degrees:
        above = ints.get(k + 1, 0)
        dims[k] = above + dots[k] + ints[k]
        piece_levels[k] = [0] * dims[k]
    # assign a level to each dot and each interval (shared by its two ends)
    int_levels: dict[int, list[int]] = {}
    for k in degrees:
        int_levels[k] = [rng.randrange(num_levels) for _ in range(ints[k])]
    for k in degrees:
        above = ints.get(k + 1, 0)
        for t in range(above):
            piece_levels[k][t] = int_levels[k + 1][t]
        for t in range(dots[k]):
            piece_levels[k][above + t] = rng.randrange(num_levels)
        for t in range(ints[k]):
            piece_levels[k][above + dots[k] + t] = int_levels[k][t]
    d: dict[int, F2Matrix] = {}
    for k in degrees:
        n, m = dims.get(k - 1, 0), dims.get(k, 0)
        rows = [0] * n
        for t in range(ints[k]):
            rows[t] |= 1 << (m - ints[k] + t)
        d[k] = F2Matrix(n, m, rows)
    # level-sorted basis & triangular conjugation: sort coordinates by level,
    # then conjugate with matrices that never move mass to a higher level.
    perm: dict[int, list[int]] = {}
    for k in degrees:
        perm[k] = sorted(range(dims[k]), key=lambda i: (piece_levels[k][i], i))
    levels = {k: tuple(piece_levels[k][i] for i in perm[k]) for k in degrees}

    def perm_matrix(k: int) -> F2Matrix:
        n = dims[k]
        rows = [0] * n
        for new_i, old_i in enumerate(perm[k]):
            rows[new_i] |= 1 << old_i
        return F2Matrix(n, n, rows)

    def random_triangular(k: int) -> tuple[F2Matrix, F2Matrix]:
        n = dims[k]
        lv = levels[k]
        while True:
            bits = []
            for i in range(n):
                b = 1 << i
                for j in range(n):
                    if j != i and lv[i] <= lv[j] and rng.random() < 0.4:
                        b |= 1 << j
                bits.append(b)
            m = F2Matrix(n, n, bits)
            if m.rank() == n:
                return m, _invert(m)

    tri = {k: random_triangular(k) for k in degrees}
    d_final = {}
    for k in degrees:
        if k - 1 in dims:
            base = perm_matrix(k - 1).mul(d[k]).mul(perm_matrix(k).transpose())
            d_final[k] = tri[k - 1][0].mul(base).mul(tri[k][1])
    cx = GradedComplex({k: n for k, n in dims.items() if n}, d_final)
    return FilteredComplex(cx, {k: levels[k] for k in cx.dims})


# ---------------------------------------------------------------------------
# JSON round-tripping
# ---------------------------------------------------------------------------


def complex_to_json(c: GradedComplex) -> dict:
    lo, hi = c.window()
    return {
        "window": [lo, hi],
        "dims": {str(k): n for k, n in sorted(c.dims.items())},
        "d": {str(k): c.d[k].to_lists() for k in sorted(c.d)},
    }


def complex_from_json(data: Mapping) -> GradedComplex:
    dims = {int(k): int(n) for k, n in data.get("dims", {}).items()}
    d = {}
    for k, rows in data.get("d", {}).items():
        k = int(k)
        d[k] = F2Matrix.from_rows(rows, cols=dims.get(k, 0))
    return GradedComplex(dims, d)


def chain_map_from_json(
    data: Mapping, source: GradedComplex, target: GradedComplex
) -> ChainMap:
    degree = int(data.get("degree", 0))
    blocks = {}
    for k, rows in data.get("blocks", {}).items():
        k = int(k)
        blocks[k] = F2Matrix.from_rows(rows, cols=source.dim_at(k))
    return ChainMap(source, target, blocks, degree=degree)


def chain_map_to_json(f: ChainMap) -> dict:
    return {
        "degree": f.degree,
        "blocks": {str(k): f.blocks[k].to_lists() for k in sorted(f.blocks)},
    }


def filtered_to_json(fc: FilteredComplex) -> dict:
    out = complex_to_json(fc.complex)
    out["levels"] = {str(k): list(v) for k, v in sorted(fc.levels.items())}
    return out


def filtered_from_json(data: Mapping) -> FilteredComplex:
    cx = complex_from_json(data)
    levels = {int(k): tuple(v) for k, v in data.get("levels", {}).items()}
    return FilteredComplex(cx, levels)


def triangle_bundle_from_json(data: Mapping) -> tuple[ChainMap, ChainMap, Homotopy]:
    c1 = complex_from_json(data["c1"])
    c2 = complex_from_json(data["c2"])
    c3 = complex_from_json(data["c3"])
    f1 = chain_map_from_json(data["f1"], c1, c2)
    f2 = chain_map_from_json(data["f2"], c2, c3)
    hb = {}
    for k, rows in data.get("h1", {}).get("blocks", {}).items():
        k = int(k)
        hb[k] = F2Matrix.from_rows(rows, cols=c1.dim_at(k))
    h1 = Homotopy(c1, c3, hb, degree=1)
    return f1, f2, h1


def triangle_bundle_to_json(f1: ChainMap, f2: ChainMap, h1: Homotopy) -> dict:
    return {
        "c1": complex_to_json(f1.source),
        "c2": complex_to_json(f1.target),
        "c3": complex_to_json(f2.target),
        "f1": chain_map_to_json(f1),
        "f2": chain_map_to_json(f2),
        "h1": {
            "degree": h1.degree,
            "blocks": {str(k): h1.blocks[k].to_lists() for k in sorted(h1.blocks)},
        },
    }

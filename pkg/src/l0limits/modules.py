"""Normed modules over a finite atomic base space.

A module is represented as one finite-dimensional normed fiber per atom;
an element picks one coordinate vector per fiber, and a morphism one
matrix per atom.  All values are immutable after construction and every
operation is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import tolerance
from .errors import ShapeMismatchError, SpaceMismatchError
from .measure import AtomicMeasureSpace, L0Function, l0_distance
from .norms import (
    WeightedP,
    norm_eval,
    operator_norm_witness,
    zero_norm,
)


@dataclass(frozen=True, eq=False)
class Fiber:
    """One atom's normed space: a dimension and a norm spec over it."""

    dim: int
    norm: object

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("fiber dimension must be nonnegative")
        if self.norm.dim != self.dim:
            raise ShapeMismatchError(
                f"norm of dim {self.norm.dim} attached to fiber of dim {self.dim}"
            )

    def __eq__(self, other):
        return isinstance(other, Fiber) and self.dim == other.dim and self.norm == other.norm

    def __hash__(self):
        return hash((self.dim, self.norm))


def zero_fiber() -> Fiber:
    return Fiber(0, zero_norm())


def euclidean_fiber(dim: int) -> Fiber:
    return Fiber(dim, WeightedP(2, np.ones(dim)))


@dataclass(frozen=True, eq=False)
class FiberModule:
    """A normed module presented as one fiber per atom of its space."""

    space: AtomicMeasureSpace
    fibers: Tuple[Fiber, ...]

    def __post_init__(self):
        object.__setattr__(self, "fibers", tuple(self.fibers))
        if len(self.fibers) != self.space.atom_count:
            raise ShapeMismatchError(
                f"{len(self.fibers)} fibers over a space with "
                f"{self.space.atom_count} atoms"
            )

    def dims(self) -> Tuple[int, ...]:
        return tuple(f.dim for f in self.fibers)

    @property
    def is_zero(self) -> bool:
        return all(f.dim == 0 for f in self.fibers)

    def __eq__(self, other):
        return (
            isinstance(other, FiberModule)
            and self.space == other.space
            and self.fibers == other.fibers
        )

    def __hash__(self):
        return hash((self.space, self.fibers))

    def __repr__(self):
        return f"FiberModule(dims={self.dims()})"


def uniform_module(space: AtomicMeasureSpace, fiber: Fiber) -> FiberModule:
    return FiberModule(space, tuple(fiber for _ in space.atom_ids))


def euclidean_module(space: AtomicMeasureSpace, dim: int) -> FiberModule:
    return uniform_module(space, euclidean_fiber(dim))


def zero_module(space: AtomicMeasureSpace) -> FiberModule:
    return uniform_module(space, zero_fiber())


def scalar_module(space: AtomicMeasureSpace) -> FiberModule:
    """The ring of measurable functions viewed as a module over itself."""
    return uniform_module(space, Fiber(1, WeightedP(1, (1.0,))))


@dataclass(frozen=True, eq=False)
class Element:
    """A module element: one coordinate vector per atom."""

    module: FiberModule
    coords: Tuple[np.ndarray, ...]

    def __init__(self, module: FiberModule, coords: Sequence):
        coords = tuple(np.asarray(c, dtype=float).reshape(-1) for c in coords)
        if len(coords) != module.space.atom_count:
            raise ShapeMismatchError("one coordinate vector per atom required")
        for c, f in zip(coords, module.fibers):
            if c.size != f.dim:
                raise ShapeMismatchError(
                    f"coordinate vector of length {c.size} in fiber of dim {f.dim}"
                )
            c.setflags(write=False)
        object.__setattr__(self, "module", module)
        object.__setattr__(self, "coords", coords)

    def __add__(self, other: "Element") -> "Element":
        _require_same_module(self, other)
        return Element(self.module, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: "Element") -> "Element":
        _require_same_module(self, other)
        return Element(self.module, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> "Element":
        return Element(self.module, [-c for c in self.coords])

    def scale(self, factor: float) -> "Element":
        return Element(self.module, [factor * c for c in self.coords])

    def scale_fn(self, f: L0Function) -> "Element":
        if f.space != self.module.space:
            raise SpaceMismatchError("scaling function lives over a different space")
        return Element(self.module, [v * c for v, c in zip(f.values, self.coords)])

    def __repr__(self):
        return f"Element({[np.array2string(c, precision=4) for c in self.coords]})"


def zero_element(module: FiberModule) -> Element:
    return Element(module, [np.zeros(f.dim) for f in module.fibers])


def basis_elements(module: FiberModule) -> List[Element]:
    """Standard basis elements: one coordinate set at one atom, zero elsewhere."""
    out = []
    for a, fiber in enumerate(module.fibers):
        for k in range(fiber.dim):
            coords = [np.zeros(f.dim) for f in module.fibers]
            coords[a][k] = 1.0
            out.append(Element(module, coords))
    return out


def elements_close(v: Element, w: Element, tol: Optional[float] = None) -> bool:
    _require_same_module(v, w)
    tol = tolerance() if tol is None else tol
    return all(
        np.max(np.abs(a - b), initial=0.0) <= tol for a, b in zip(v.coords, w.coords)
    )


def _require_same_module(v: Element, w: Element) -> None:
    if v.module != w.module:
        raise SpaceMismatchError("elements belong to different modules")


@dataclass(frozen=True, eq=False)
class ModuleMorphism:
    """A linear map over the ring of functions: one matrix per atom.

    Admissibility (pointwise operator norm at most one) is checked by
    :func:`is_morphism`, never assumed by the type.
    """

    source: FiberModule
    target: FiberModule
    matrices: Tuple[np.ndarray, ...]

    def __init__(self, source: FiberModule, target: FiberModule, matrices: Sequence):
        if source.space != target.space:
            raise SpaceMismatchError("morphism endpoints live over different spaces")
        mats = []
        for a, raw in enumerate(matrices):
            m = np.asarray(raw, dtype=float)
            expected = (target.fibers[a].dim, source.fibers[a].dim)
            if m.size == 0:
                m = np.zeros(expected)
            if m.ndim != 2 or m.shape != expected:
                raise ShapeMismatchError(
                    f"matrix at atom {source.space.atom_ids[a]!r} has shape "
                    f"{m.shape}, expected {expected}"
                )
            m = m.copy()
            m.setflags(write=False)
            mats.append(m)
        if len(mats) != source.space.atom_count:
            raise ShapeMismatchError("one matrix per atom required")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "matrices", tuple(mats))

    def __repr__(self):
        return f"ModuleMorphism({self.source.dims()}->{self.target.dims()})"


def identity_morphism(module: FiberModule) -> ModuleMorphism:
    return ModuleMorphism(module, module, [np.eye(f.dim) for f in module.fibers])


def zero_morphism(source: FiberModule, target: FiberModule) -> ModuleMorphism:
    return ModuleMorphism(
        source,
        target,
        [np.zeros((t.dim, s.dim)) for s, t in zip(source.fibers, target.fibers)],
    )


def apply(phi: ModuleMorphism, v: Element) -> Element:
    if v.module != phi.source:
        raise ShapeMismatchError("element does not belong to the morphism source")
    return Element(phi.target, [m @ c for m, c in zip(phi.matrices, v.coords)])


def compose(psi: ModuleMorphism, phi: ModuleMorphism) -> ModuleMorphism:
    """The composite ``psi after phi``."""
    if psi.source != phi.target:
        raise ShapeMismatchError("composition endpoints do not match")
    return ModuleMorphism(
        phi.source, psi.target, [b @ a for b, a in zip(psi.matrices, phi.matrices)]
    )


def scale_morphism(phi: ModuleMorphism, factor) -> ModuleMorphism:
    """Entrywise scaling, by a constant or per-atom by a function."""
    if isinstance(factor, L0Function):
        if factor.space != phi.source.space:
            raise SpaceMismatchError("scaling function lives over a different space")
        factors = factor.values
    else:
        factors = np.full(phi.source.space.atom_count, float(factor))
    return ModuleMorphism(
        phi.source, phi.target, [f * m for f, m in zip(factors, phi.matrices)]
    )


def morphisms_close(a: ModuleMorphism, b: ModuleMorphism, tol: Optional[float] = None) -> bool:
    tol = tolerance() if tol is None else tol
    return morphism_deviation(a, b) <= tol


def morphism_deviation(a: ModuleMorphism, b: ModuleMorphism) -> float:
    if a.source.dims() != b.source.dims() or a.target.dims() != b.target.dims():
        raise ShapeMismatchError("morphisms have incompatible shapes")
    dev = 0.0
    for m, n in zip(a.matrices, b.matrices):
        if m.size:
            dev = max(dev, float(np.max(np.abs(m - n))))
    return dev


def pointwise_norm(v: Element) -> L0Function:
    """Per-atom fiber norm of an element's coordinates."""
    values = [norm_eval(f.norm, c) for f, c in zip(v.module.fibers, v.coords)]
    return L0Function(v.module.space, values)


def module_distance(v: Element, w: Element) -> float:
    """Complete distance induced by the pointwise norm (fibers are finite
    dimensional, so completeness holds automatically)."""
    _require_same_module(v, w)
    return l0_distance(
        pointwise_norm(v - w),
        L0Function(v.module.space, np.zeros(v.module.space.atom_count)),
    )


def operator_pointwise_norm(phi: ModuleMorphism) -> L0Function:
    """Exact per-atom operator norm of a morphism.

    This is the minimal function bounding ``|phi(v)|`` by a multiple of
    ``|v|`` at every atom.
    """
    values = [
        operator_norm_witness(m, s.norm, t.norm)[0]
        for m, s, t in zip(phi.matrices, phi.source.fibers, phi.target.fibers)
    ]
    return L0Function(phi.source.space, values)


def operator_norm_witnesses(phi: ModuleMorphism):
    """Per-atom (value, maximizer) pairs; maximizers have source norm one."""
    return [
        operator_norm_witness(m, s.norm, t.norm)
        for m, s, t in zip(phi.matrices, phi.source.fibers, phi.target.fibers)
    ]


def is_morphism(phi: ModuleMorphism, tol: Optional[float] = None) -> bool:
    """True iff the pointwise operator norm is at most one at every atom."""
    tol = tolerance() if tol is None else tol
    return bool(np.all(operator_pointwise_norm(phi).values <= 1.0 + tol))


def _orth_basis(columns: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis of the column space; identity when the span is full."""
    dim = columns.shape[0]
    if dim == 0 or columns.size == 0:
        return np.zeros((dim, 0))
    u, sv, _ = np.linalg.svd(columns, full_matrices=False)
    rank = int(np.sum(sv > tol * max(1.0, sv[0] if sv.size else 1.0)))
    if rank == dim:
        return np.eye(dim)
    return u[:, :rank]


def submodule_from_bases(module: FiberModule, bases: Sequence[np.ndarray]):
    """Submodule with the given per-atom orthonormal bases and the
    inclusion morphism.  Fiber norms are the restrictions of the ambient
    norms along the bases."""
    fibers = []
    for f, b in zip(module.fibers, bases):
        r = b.shape[1]
        fibers.append(Fiber(r, zero_norm()) if r == 0 else Fiber(r, f.norm.restrict(b)))
    sub = FiberModule(module.space, tuple(fibers))
    inclusion = ModuleMorphism(sub, module, list(bases))
    return sub, inclusion


def submodule_generated(module: FiberModule, gens: Sequence[Element]):
    """Smallest submodule containing the generators, with its inclusion.

    Over a finite atomic space with finite-dimensional fibers the span of
    the generators is closed atom by atom, so density collapses to
    equality and the fiber at each atom is simply the column space of the
    generators' coordinates there.
    """
    for g in gens:
        if g.module != module:
            raise SpaceMismatchError("generator does not belong to the module")
    tol = tolerance()
    bases = []
    for a, f in enumerate(module.fibers):
        if gens:
            cols = np.column_stack([g.coords[a] for g in gens])
        else:
            cols = np.zeros((f.dim, 0))
        bases.append(_orth_basis(cols, tol))
    return submodule_from_bases(module, bases)


@dataclass(frozen=True)
class KernelImage:
    kernel: FiberModule
    kernel_inclusion: ModuleMorphism
    image: FiberModule
    image_inclusion: ModuleMorphism


def kernel_image(phi: ModuleMorphism) -> KernelImage:
    """Per-atom null space and column space with restricted norms.

    The image is automatically closed in finite dimensions, so it equals
    the closure of the set-theoretic range.
    """
    tol = tolerance()
    kernel_bases = []
    image_bases = []
    for m in phi.matrices:
        t, s = m.shape
        if s == 0:
            kernel_bases.append(np.zeros((0, 0)))
            image_bases.append(np.zeros((t, 0)))
            continue
        u, sv, vt = np.linalg.svd(m, full_matrices=True)
        top = sv[0] if sv.size else 0.0
        rank = int(np.sum(sv > tol * max(1.0, top)))
        kernel = vt[rank:].T
        kernel_bases.append(np.eye(s) if kernel.shape[1] == s else kernel)
        image = u[:, :rank]
        image_bases.append(np.eye(t) if rank == t else image)
    kernel, kernel_inc = submodule_from_bases(phi.source, kernel_bases)
    image, image_inc = submodule_from_bases(phi.target, image_bases)
    return KernelImage(kernel, kernel_inc, image, image_inc)


def mask_module(module: FiberModule, keep: np.ndarray):
    """Zero out the fibers at atoms where ``keep`` is false.

    Returns the masked module together with the projection morphism from
    the original module (identity on kept atoms, zero map elsewhere).
    """
    keep = np.asarray(keep, dtype=bool)
    if keep.shape != (module.space.atom_count,):
        raise ShapeMismatchError("one keep flag per atom required")
    fibers = [f if k else zero_fiber() for f, k in zip(module.fibers, keep)]
    masked = FiberModule(module.space, tuple(fibers))
    mats = [
        np.eye(f.dim) if k else np.zeros((0, f.dim))
        for f, k in zip(module.fibers, keep)
    ]
    projection = ModuleMorphism(module, masked, mats)
    return masked, projection


def mask_inclusion(module: FiberModule, masked: FiberModule) -> ModuleMorphism:
    """Inclusion of a masked module back into its parent."""
    mats = []
    for f, g in zip(module.fibers, masked.fibers):
        mats.append(np.eye(f.dim) if g.dim == f.dim else np.zeros((f.dim, 0)))
    return ModuleMorphism(masked, module, mats)


@dataclass(frozen=True)
class IsoCertificate:
    """Evidence that a morphism is an isometric isomorphism."""

    ok: bool
    bijective: bool
    max_norm_deviation: float
    detail: str = ""


def certify_isometric_iso(
    phi: ModuleMorphism,
    rng: Optional[np.random.Generator] = None,
    samples: int = 8,
    tol: Optional[float] = None,
) -> IsoCertificate:
    """Check that a morphism is bijective per atom and norm preserving.

    Norm preservation is tested on every standard basis element and on
    seeded random elements; bijectivity by per-atom rank.
    """
    tol = tolerance() if tol is None else tol
    rng = np.random.default_rng(0) if rng is None else rng
    bijective = True
    for m, s, t in zip(phi.matrices, phi.source.fibers, phi.target.fibers):
        if s.dim != t.dim:
            bijective = False
            break
        if s.dim and np.linalg.matrix_rank(m, tol=1e-10) != s.dim:
            bijective = False
            break
    probes = basis_elements(phi.source)
    for _ in range(samples):
        coords = [rng.standard_normal(f.dim) for f in phi.source.fibers]
        probes.append(Element(phi.source, coords))
    max_dev = 0.0
    for v in probes:
        before = pointwise_norm(v).values
        after = pointwise_norm(apply(phi, v)).values
        if before.size:
            max_dev = max(max_dev, float(np.max(np.abs(before - after))))
    ok = bijective and max_dev <= tol
    detail = "" if ok else (
        "not bijective per atom" if not bijective else f"norm deviation {max_dev:g}"
    )
    return IsoCertificate(ok, bijective, max_dev, detail)

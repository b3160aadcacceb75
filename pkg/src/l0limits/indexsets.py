"""Directed index sets: finite posets and integer chains with declared tails.

A finite directed poset always has a greatest element, which makes limits
over it collapse to the top stage.  The interesting infinite behaviour is
captured by chains 0..N whose connecting maps beyond the last explicit
stage follow one of three finitely presented tail rules:

* identity tail: all further maps are the identity;
* scalar tail f (values in [0, 1]): all further maps scale by f;
* harmonic tail: the map at step k scales by (k+1)/(k+2), so composite
  factors telescope to (N+1)/(N+j+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from .measure import AtomicMeasureSpace, L0Function


@dataclass(frozen=True, eq=False)
class FinitePoset:
    """A finite directed poset given by elements and order pairs.

    The supplied pairs are closed reflexively and transitively; the result
    must be antisymmetric and directed (every pair has an upper bound).
    """

    elements: Tuple[str, ...]
    relation: frozenset

    def __init__(self, elements: Iterable[str], pairs: Iterable[Tuple[str, str]]):
        elements = tuple(str(e) for e in elements)
        if not elements:
            raise ValueError("a directed set is nonempty")
        if len(set(elements)) != len(elements):
            raise ValueError("poset elements must be distinct")
        known = set(elements)
        rel = {(str(a), str(b)) for a, b in pairs}
        for a, b in rel:
            if a not in known or b not in known:
                raise KeyError(f"order pair ({a!r}, {b!r}) mentions unknown elements")
        rel |= {(e, e) for e in elements}
        changed = True
        while changed:
            changed = False
            for a, b in list(rel):
                for c, d in list(rel):
                    if b == c and (a, d) not in rel:
                        rel.add((a, d))
                        changed = True
        for a, b in rel:
            if a != b and (b, a) in rel:
                raise ValueError(f"relation is not antisymmetric: {a!r} ~ {b!r}")
        for a in elements:
            for b in elements:
                if not any((a, c) in rel and (b, c) in rel for c in elements):
                    raise ValueError(
                        f"relation is not directed: {a!r}, {b!r} have no upper bound"
                    )
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "relation", frozenset(rel))

    def leq(self, a: str, b: str) -> bool:
        return (a, b) in self.relation

    def explicit_indices(self) -> Tuple[str, ...]:
        return self.elements

    def related_pairs(self) -> Tuple[Tuple[str, str], ...]:
        """All strictly related pairs (a, b) with a < b, deterministic order."""
        order = {e: k for k, e in enumerate(self.elements)}
        pairs = [(a, b) for (a, b) in self.relation if a != b]
        pairs.sort(key=lambda p: (order[p[0]], order[p[1]]))
        return tuple(pairs)

    def covers(self) -> Tuple[Tuple[str, str], ...]:
        """Covering pairs: a < b with nothing strictly between."""
        out = []
        for a, b in self.related_pairs():
            if not any(
                c != a and c != b and self.leq(a, c) and self.leq(c, b)
                for c in self.elements
            ):
                out.append((a, b))
        return tuple(out)

    def same_shape(self, other) -> bool:
        return (
            isinstance(other, FinitePoset)
            and self.elements == other.elements
            and self.relation == other.relation
        )

    def __eq__(self, other):
        return self.same_shape(other)

    def __hash__(self):
        return hash((self.elements, self.relation))


def greatest_element(poset: FinitePoset) -> str:
    """The unique maximum, found by folding pairwise upper bounds."""
    top = poset.elements[0]
    for e in poset.elements[1:]:
        if poset.leq(top, e):
            top = e
        elif not poset.leq(e, top):
            top = next(
                c for c in poset.elements if poset.leq(top, c) and poset.leq(e, c)
            )
    for e in poset.elements:
        if not poset.leq(e, top):
            raise ValueError("directedness invariant violated: no greatest element")
    return top


class IdentityTail:
    """Connecting maps beyond the last stage are identities."""

    kind = "identity"

    def __eq__(self, other):
        return isinstance(other, IdentityTail)

    def __hash__(self):
        return hash("identity-tail")

    def __repr__(self):
        return "IdentityTail()"


class ScalarTail:
    """Connecting maps beyond the last stage scale by a fixed function."""

    kind = "scalar"

    def __init__(self, function: L0Function):
        from .config import tolerance

        tol = tolerance()
        values = function.values
        if np.any(values < -tol) or np.any(values > 1.0 + tol):
            raise ValueError("scalar tail values must lie in [0, 1]")
        # Snap to the exact endpoints so the closed-form case analysis
        # (f = 0, 0 < f < 1, f = 1) never depends on float dust.
        snapped = np.where(np.abs(values - 1.0) <= tol, 1.0, values)
        snapped = np.where(np.abs(snapped) <= tol, 0.0, snapped)
        snapped = np.clip(snapped, 0.0, 1.0)
        if np.array_equal(snapped, values):
            self.function = function
        else:
            self.function = L0Function(function.space, snapped)

    def __eq__(self, other):
        return isinstance(other, ScalarTail) and self.function == other.function

    def __hash__(self):
        return hash(("scalar-tail", self.function))

    def __repr__(self):
        return f"ScalarTail({self.function!r})"


class HarmonicTail:
    """Connecting maps beyond the last stage scale by (k+1)/(k+2)."""

    kind = "harmonic"

    def __eq__(self, other):
        return isinstance(other, HarmonicTail)

    def __hash__(self):
        return hash("harmonic-tail")

    def __repr__(self):
        return "HarmonicTail()"


@dataclass(frozen=True, eq=False)
class Chain:
    """Stages 0..N with the total order and a tail rule beyond stage N."""

    stages: int
    tail: object

    def __post_init__(self):
        if self.stages < 1:
            raise ValueError("a chain needs at least one explicit stage")

    @property
    def last(self) -> int:
        return self.stages - 1

    def explicit_indices(self) -> Tuple[int, ...]:
        return tuple(range(self.stages))

    def related_pairs(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(
            (i, j) for i in range(self.stages) for j in range(i + 1, self.stages)
        )

    def leq(self, a: int, b: int) -> bool:
        return a <= b

    def same_shape(self, other) -> bool:
        """Equal explicit structure; tails may differ between systems."""
        return isinstance(other, Chain) and self.stages == other.stages

    def __eq__(self, other):
        return self.same_shape(other) and self.tail == other.tail

    def __hash__(self):
        return hash(("chain", self.stages, self.tail))


def tail_limit_factor(tail, space: AtomicMeasureSpace) -> np.ndarray:
    """Per-atom limit of the composite forward tail factors.

    Identity stays one, a scalar tail converges to the indicator of the
    set where it equals one, and the harmonic products telescope to zero.
    """
    if isinstance(tail, IdentityTail):
        return np.ones(space.atom_count)
    if isinstance(tail, ScalarTail):
        # tolerance-free by construction: values are clipped into [0, 1]
        return (tail.function.values >= 1.0).astype(float)
    if isinstance(tail, HarmonicTail):
        return np.zeros(space.atom_count)
    raise ValueError(f"unrecognized tail rule {tail!r}")


def _scalar_values(tail, space: AtomicMeasureSpace):
    """Per-atom step factor for scalar-like tails, None for harmonic."""
    if isinstance(tail, IdentityTail):
        return np.ones(space.atom_count)
    if isinstance(tail, ScalarTail):
        return tail.function.values
    if isinstance(tail, HarmonicTail):
        return None
    raise ValueError(f"unrecognized tail rule {tail!r}")


def tail_growth_sup(num_tail, den_tail, last_stage: int, space: AtomicMeasureSpace):
    """Per-atom supremum of the telescoped factor ratios num/den.

    A component family beyond the last stage must scale by the ratio of
    the two tails' step factors; the supremum over all steps bounds how
    much the last explicit component is amplified.  ``inf`` means the
    last component has to vanish at that atom.
    """
    n_atoms = space.atom_count
    num = _scalar_values(num_tail, space)
    den = _scalar_values(den_tail, space)
    out = np.ones(n_atoms)
    base = last_stage + 1  # harmonic composite factor is base / (base + j)
    for a in range(n_atoms):
        if num is not None and den is not None:
            f_num, f_den = num[a], den[a]
            if f_den == 0.0:
                out[a] = 1.0 if f_num == 0.0 else math.inf
            elif f_num <= f_den:
                out[a] = 1.0
            else:
                out[a] = math.inf
        elif num is None and den is None:
            out[a] = 1.0
        elif num is None:
            # harmonic over scalar: (base/(base+j)) / f^j
            f = den[a]
            if f == 0.0:
                out[a] = math.inf
            elif f >= 1.0:
                out[a] = 1.0
            else:
                out[a] = math.inf
        else:
            # scalar over harmonic: f^j (base+j)/base, maximized in closed form
            f = num[a]
            if f >= 1.0:
                out[a] = math.inf
            elif f == 0.0:
                out[a] = 1.0
            else:
                peak = -1.0 / math.log(f) - base
                best = 1.0
                for j in {0, max(0, math.floor(peak)), max(0, math.ceil(peak))}:
                    best = max(best, f**j * (base + j) / base)
                out[a] = best
    return out

"""The subspace semilattice of a bundle, its ground set, and flats.

The ground set construction follows the ascending-dimension sweep over the
intersection lattice: at each lattice element V whose current ground vectors
do not yet span it, a complement basis is appended, chosen greedily from the
echelon basis rows of V (preference pool first when a target subspace is
given). The traversal order inside a dimension class is the one licensed
degree of freedom and is pinned to the lexicographic order of canonical
bases; tests exercise its irrelevance.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import total_ordering

from .bundle import (
    IncompatibilityWitness,
    ToricBundle,
    _split_cone,
    check_compatibility,
)
from .linalg import Subspace, Vector, intersect, span, subspace_sum


@dataclass(frozen=True)
class SubspaceLattice:
    """All intersections of per-ray filtration values, intersection-closed."""

    ambient: int
    elements: tuple[Subspace, ...]  # sorted by (dim, canonical basis)

    def by_dimension(self, k: int) -> tuple[Subspace, ...]:
        return tuple(w for w in self.elements if w.dim == k)


def build_lattice(bundle: ToricBundle, ray_indices=None) -> SubspaceLattice:
    if ray_indices is None:
        ray_indices = range(len(bundle.fan.rays))
    ray_indices = list(ray_indices)
    if not ray_indices:
        raise ValueError("lattice over an empty ray subset")
    r = bundle.rank
    current = {Subspace.full(r)}
    for i in ray_indices:
        filt = bundle.filtrations[i]
        values = [sp for _, sp in filt.steps] + [Subspace.zero(r)]
        current = {intersect(w, v) for w in current for v in values} | current
    elements = tuple(sorted(current, key=lambda w: w.sort_key()))
    return SubspaceLattice(ambient=r, elements=elements)


@dataclass(frozen=True)
class GroundSet:
    """Output of the ground-set sweep, with its step trace."""

    ambient: int
    vectors: tuple[Vector, ...]
    steps: tuple[Subspace, ...]  # steps[k] = lattice element that produced vectors[k]

    def __len__(self):
        return len(self.vectors)

    def indices_in(self, w: Subspace) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.vectors) if w.contains(v))

    def index_of_line(self, v) -> int | None:
        line = span([v], self.ambient)
        for i, g in enumerate(self.vectors):
            if span([g], self.ambient) == line:
                return i
        return None


def ground_set(
    lattice: SubspaceLattice,
    prefer: Subspace | None = None,
    shuffle: random.Random | None = None,
) -> GroundSet:
    """Sweep the lattice by ascending dimension, appending complement bases.

    `shuffle` randomizes the traversal order inside each dimension class
    (used by the invariance tests); `prefer` makes each complement basis
    exhaust candidates inside the given subspace first.
    """
    r = lattice.ambient
    vectors: list[Vector] = []
    steps: list[Subspace] = []
    maxdim = max((w.dim for w in lattice.elements), default=0)
    for k in range(1, maxdim + 1):
        group = list(lattice.by_dimension(k))
        if shuffle is not None:
            shuffle.shuffle(group)
        for v_elt in group:
            spanned = span([g for g in vectors if v_elt.contains(g)], r)
            if spanned.dim == v_elt.dim:
                continue
            pools = []
            if prefer is not None:
                pools.append(intersect(v_elt, prefer).rows)
            pools.append(v_elt.rows)
            for pool in pools:
                for cand in pool:
                    if spanned.dim == v_elt.dim:
                        break
                    if not spanned.contains(cand):
                        vectors.append(cand)
                        steps.append(v_elt)
                        spanned = subspace_sum(spanned, span([cand], r))
            assert spanned.dim == v_elt.dim
    return GroundSet(ambient=r, vectors=tuple(vectors), steps=tuple(steps))


def bundle_ground_set(bundle: ToricBundle, prefer: Subspace | None = None) -> GroundSet:
    return ground_set(build_lattice(bundle), prefer=prefer)


@total_ordering
@dataclass(frozen=True)
class Flat:
    """A closure-closed subset of the ground set, with its span."""

    indices: tuple[int, ...]
    subspace: Subspace

    @property
    def rank(self) -> int:
        return self.subspace.dim

    def is_empty(self) -> bool:
        return not self.indices

    def __eq__(self, other):
        return isinstance(other, Flat) and self.indices == other.indices

    def __lt__(self, other):
        return (self.rank, self.indices) < (other.rank, other.indices)

    def __hash__(self):
        return hash(self.indices)


def closure(gs: GroundSet, subset) -> Flat:
    """Smallest flat containing the given ground-set indices."""
    subset = sorted(set(subset))
    for i in subset:
        if not 0 <= i < len(gs.vectors):
            raise IndexError(f"ground-set index {i} out of range")
    sp = span([gs.vectors[i] for i in subset], gs.ambient)
    return Flat(indices=gs.indices_in(sp), subspace=sp)


def enumerate_flats(gs: GroundSet) -> tuple[Flat, ...]:
    """Every flat exactly once, sorted by (rank, indices); includes the
    empty and full flats, which stability callers filter out."""
    empty = closure(gs, ())
    found = {empty.indices: empty}
    frontier = [empty]
    while frontier:
        nxt = []
        for flat in frontier:
            inside = set(flat.indices)
            for e in range(len(gs.vectors)):
                if e in inside:
                    continue
                bigger = closure(gs, flat.indices + (e,))
                if bigger.indices not in found:
                    found[bigger.indices] = bigger
                    nxt.append(bigger)
        frontier = nxt
    return tuple(sorted(found.values()))


def proper_nonzero_flats(gs: GroundSet) -> tuple[Flat, ...]:
    full_dim = span(gs.vectors, gs.ambient).dim
    return tuple(
        f for f in enumerate_flats(gs) if 0 < f.rank < full_dim
    )


def is_compatible_flat(bundle: ToricBundle, flat: Flat, seed: int = 0):
    """Whether some compatible basis meets the flat's span in exactly
    rank-many lines on every maximal cone; returns (verdict, witness bases).

    The bundle itself must be compatible (raises otherwise).
    """
    check_compatibility(bundle, seed=seed)
    f_space = flat.subspace
    if f_space.dim == 0 or f_space.is_full():
        sheet = check_compatibility(bundle, seed=seed)
        return True, sheet.rows
    witness = []
    for ci in range(len(bundle.fan.max_cones)):
        res = _split_cone(bundle, ci, seed, prefer=f_space, flat_dim=f_space.dim)
        if isinstance(res, IncompatibilityWitness):
            return False, None
        witness.append(res)
    return True, tuple(witness)


def is_subbundle(bundle: ToricBundle, f_space: Subspace, seed: int = 0) -> bool:
    """Whether the subsheaf cut out by F is an equivariant subbundle.

    Requires (a) a preference-built ground set with span(G n F) = F and
    (b) a compatible flat whose witness bases, restricted to F, satisfy the
    sum condition for the intersected filtrations.
    """
    if f_space.dim == 0:
        raise ValueError("the zero subspace does not define a subbundle")
    if f_space.ambient != bundle.rank:
        raise ValueError("subspace from a different fiber")
    gs = bundle_ground_set(bundle, prefer=f_space)
    inside = gs.indices_in(f_space)
    if span([gs.vectors[i] for i in inside], gs.ambient) != f_space:
        return False
    flat = closure(gs, inside)
    ok, witness = is_compatible_flat(bundle, flat, seed=seed)
    if not ok:
        return False
    for ci, rows in enumerate(witness):
        cone = bundle.fan.max_cones[ci]
        f_rows = [row for row in rows if f_space.contains(row.vector)]
        for k, ray_index in enumerate(cone):
            filt = bundle.filtrations[ray_index]
            for j in filt.thresholds:
                expected = intersect(filt.value(j), f_space)
                got = span(
                    [row.vector for row in f_rows if row.profile[k] >= j],
                    bundle.rank,
                )
                if got != expected:
                    return False
    return True

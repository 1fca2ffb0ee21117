"""Klyachko filtration data of toric vector bundles.

A bundle is a validated fan plus one decreasing integer-indexed filtration of
the fiber per ray. The filtration stores thresholds A_1 < ... < A_s with
subspaces V_1 = E > V_2 > ... > V_s > 0 and means

    E(j) = V_k   for A_{k-1} < j <= A_k   (A_0 = -infinity),
    E(j) = 0     for j > A_s.

The compatibility check is two-phase: exact inclusion-exclusion profile
multiplicities first (necessary), then a constructive splitting that is
verified verbatim against the sum condition, so a "compatible" verdict is
unconditionally sound. The residual risk of the randomized construction is a
false "incompatible" after 16 attempts, never a false "compatible".
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .fan import Fan, FanError, validate_fan
from .linalg import (
    Subspace,
    Vector,
    intersect,
    solve_integer_system,
    span,
    subspace_sum,
)

SPLIT_ATTEMPTS = 16
_RANDOM_COEFF = 3
_RANDOM_TRIES = 32


class Filtration:
    """One ray's decreasing filtration in threshold form."""

    __slots__ = ("rank", "steps")

    def __init__(self, rank: int, steps):
        self.rank = int(rank)
        steps = tuple((int(j), sp) for j, sp in steps)
        if not steps:
            raise ValueError("a filtration needs at least one step")
        if not steps[0][1].is_full() or steps[0][1].ambient != self.rank:
            raise ValueError("the first filtration step must be the full fiber")
        for (j1, s1), (j2, s2) in zip(steps, steps[1:]):
            if j2 <= j1:
                raise ValueError("filtration thresholds must strictly increase")
            if not (s1.contains_subspace(s2) and s2.dim < s1.dim):
                raise ValueError("filtration subspaces must strictly decrease")
        if steps[-1][1].dim == 0:
            raise ValueError("the zero space is implicit beyond the last threshold")
        self.steps = steps

    @property
    def thresholds(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self.steps)

    def value(self, j: int) -> Subspace:
        """E(j), with E(j) = 0 beyond the last threshold."""
        for a, sp in self.steps:
            if j <= a:
                return sp
        return Subspace.zero(self.rank)

    def max_level(self, v) -> int:
        """max { j : v in E(j) } for a nonzero fiber vector."""
        best = None
        for a, sp in self.steps:
            if sp.contains(v):
                best = a
            else:
                break
        if best is None:
            raise ValueError("vector outside the full fiber cannot occur")
        return best

    def jump_multiset(self, f: Subspace) -> tuple[int, ...]:
        """Thresholds of j -> E(j) n F with multiplicity = dimension drop."""
        if f.ambient != self.rank:
            raise ValueError("subspace from a different fiber")
        dims = [intersect(sp, f).dim for _, sp in self.steps] + [0]
        out = []
        for (a, _), d_here, d_next in zip(self.steps, dims, dims[1:]):
            out.extend([a] * (d_here - d_next))
        return tuple(sorted(out))

    def shifted(self, offset: int) -> "Filtration":
        return Filtration(self.rank, [(j + offset, sp) for j, sp in self.steps])

    def __eq__(self, other):
        return (
            isinstance(other, Filtration)
            and self.rank == other.rank
            and self.steps == other.steps
        )

    def __hash__(self):
        return hash((self.rank, self.steps))

    def __repr__(self):
        body = ", ".join(f"(<= {j}: dim {sp.dim})" for j, sp in self.steps)
        return f"Filtration(rank={self.rank}, {body})"


def filtration_value(f: Filtration, j: int) -> Subspace:
    return f.value(j)


def jump_values(f: Filtration, subspace: Subspace) -> tuple[int, ...]:
    return f.jump_multiset(subspace)


class ToricBundle:
    """A toric vector bundle: validated fan + one filtration per ray."""

    __slots__ = ("fan", "rank", "filtrations", "summand_spans")

    def __init__(self, fan: Fan, rank: int, filtrations, summand_spans=None):
        report = validate_fan(fan)
        if not report.passed:
            raise FanError("bundle over an invalid fan:\n" + report.summary())
        self.fan = fan
        self.rank = int(rank)
        filtrations = tuple(filtrations)
        if len(filtrations) != len(fan.rays):
            raise ValueError(
                f"got {len(filtrations)} filtrations for {len(fan.rays)} rays"
            )
        for f in filtrations:
            if f.rank != self.rank:
                raise ValueError("filtration rank differs from bundle rank")
        self.filtrations = filtrations
        self.summand_spans = tuple(summand_spans) if summand_spans else None

    def __repr__(self):
        return f"ToricBundle(rank={self.rank}, rays={len(self.fan.rays)})"


# ---------------------------------------------------------------------------
# constructors


def line_bundle(fan: Fan, coefficients) -> ToricBundle:
    """O(sum a_i D_i): rank one, threshold a_i on ray i."""
    coeffs = [int(a) for a in coefficients]
    if len(coeffs) != len(fan.rays):
        raise ValueError("one divisor coefficient per ray required")
    full = Subspace.full(1)
    filts = [Filtration(1, [(a, full)]) for a in coeffs]
    return ToricBundle(fan, 1, filts)


def tangent_bundle(fan: Fan) -> ToricBundle:
    """Tangent bundle: thresholds (0, 1) with middle step <v_i> on each ray."""
    d = fan.dim
    full = Subspace.full(d)
    filts = [
        Filtration(d, [(0, full), (1, span([ray], d))]) for ray in fan.rays
    ]
    return ToricBundle(fan, d, filts)


def _embed(sub: Subspace, offset: int, total: int) -> Subspace:
    rows = [
        tuple([Fraction(0)] * offset) + r + tuple([Fraction(0)] * (total - offset - len(r)))
        for r in sub.rows
    ]
    return span(rows, total)


def direct_sum(b1: ToricBundle, b2: ToricBundle) -> ToricBundle:
    if b1.fan is not b2.fan and (b1.fan.rays != b2.fan.rays or b1.fan.max_cones != b2.fan.max_cones):
        raise ValueError("direct sum of bundles over different fans")
    r = b1.rank + b2.rank
    filts = []
    for f1, f2 in zip(b1.filtrations, b2.filtrations):
        thresholds = sorted(set(f1.thresholds) | set(f2.thresholds))
        steps = []
        for t in thresholds:
            sp = subspace_sum(
                _embed(f1.value(t), 0, r), _embed(f2.value(t), b1.rank, r)
            )
            if sp.dim == 0:
                continue
            if steps and steps[-1][1] == sp:
                steps[-1] = (t, sp)
            else:
                steps.append((t, sp))
        filts.append(Filtration(r, steps))
    spans = []
    for offset, part in ((0, b1), (b1.rank, b2)):
        for prev in part.summand_spans or (Subspace.full(part.rank),):
            spans.append(_embed(prev, offset, r))
    return ToricBundle(b1.fan, r, filts, summand_spans=spans)


def twist_by_divisor(b: ToricBundle, coefficients) -> ToricBundle:
    coeffs = [int(a) for a in coefficients]
    if len(coeffs) != len(b.fan.rays):
        raise ValueError("one divisor coefficient per ray required")
    filts = [f.shifted(a) for f, a in zip(b.filtrations, coeffs)]
    return ToricBundle(b.fan, b.rank, filts, summand_spans=b.summand_spans)


def twist_by_character(b: ToricBundle, u) -> ToricBundle:
    u = [int(x) for x in u]
    if len(u) != b.fan.dim:
        raise ValueError("character of the wrong dimension")
    shifts = [sum(ui * vi for ui, vi in zip(u, ray)) for ray in b.fan.rays]
    return twist_by_divisor(b, shifts)


# ---------------------------------------------------------------------------
# compatibility


@dataclass(frozen=True)
class SheetRow:
    """One line of a compatible decomposition on a maximal cone."""

    profile: tuple[int, ...]  # jump level on each ray of the cone, cone order
    character: tuple[int, ...]
    vector: Vector


@dataclass(frozen=True)
class CharacterSheet:
    """Per maximal cone: associated characters and a compatible basis."""

    rows: tuple[tuple[SheetRow, ...], ...]  # indexed like fan.max_cones

    def characters(self, cone_index: int) -> tuple[tuple[int, ...], ...]:
        return tuple(sorted(r.character for r in self.rows[cone_index]))


@dataclass(frozen=True)
class IncompatibilityWitness:
    cone_index: int
    cone: tuple[int, ...]
    profile: tuple[int, ...] | None
    multiplicity: int | None
    detail: str


class IncompatibleBundleError(ValueError):
    def __init__(self, witness: IncompatibilityWitness):
        self.witness = witness
        super().__init__(
            f"filtrations are incompatible on cone {witness.cone}: {witness.detail}"
        )


def _profile_multiplicities(filts):
    """Inclusion-exclusion multiplicity of every joint jump profile.

    Returns (mult, space) where mult maps profiles to integers and space
    maps level tuples to the intersection of the filtration values there.
    """
    k = len(filts)
    cache: dict[tuple[int, ...], Subspace] = {}

    def space_at(levels):
        if levels not in cache:
            sp = filts[0].value(levels[0])
            for f, j in zip(filts[1:], levels[1:]):
                if sp.dim == 0:
                    break
                sp = intersect(sp, f.value(j))
            cache[levels] = sp
        return cache[levels]

    mult = {}
    for p in product(*(f.thresholds for f in filts)):
        m = 0
        for mask in range(1 << k):
            levels = tuple(
                p[i] + 1 if mask & (1 << i) else p[i] for i in range(k)
            )
            sign = -1 if bin(mask).count("1") % 2 else 1
            m += sign * space_at(levels).dim
        if m:
            mult[p] = m
    return mult, space_at


def _greedy_candidates(pools):
    for pool in pools:
        yield from pool.rows


def _random_candidates(pools, rng):
    for pool in pools:
        if pool.dim == 0:
            continue
        for _ in range(_RANDOM_TRIES):
            coeffs = [rng.randint(-_RANDOM_COEFF, _RANDOM_COEFF) for _ in pool.rows]
            if all(c == 0 for c in coeffs):
                continue
            yield tuple(
                sum((Fraction(c) * row[i] for c, row in zip(coeffs, pool.rows)), Fraction(0))
                for i in range(pool.ambient)
            )


def _attempt_split(filts, mult, space_at, rank, prefer, rng):
    """One constructive attempt at a compatible decomposition; None on failure."""
    order = sorted(mult, key=lambda p: (-sum(p), p))
    chosen: list[tuple[tuple[int, ...], Vector]] = []
    chosen_span = Subspace.zero(rank)
    for p in order:
        inter = space_at(p)
        deeper = Subspace.zero(rank)
        for i in range(len(filts)):
            deeper = subspace_sum(deeper, intersect(inter, filts[i].value(p[i] + 1)))
        blocked = subspace_sum(chosen_span, deeper)
        pools = []
        if prefer is not None:
            pools.append(intersect(inter, prefer))
        pools.append(inter)
        if rng is None:
            candidates = _greedy_candidates(pools)
        else:
            candidates = _random_candidates(pools, rng)
        need = mult[p]
        for cand in candidates:
            if blocked.contains(cand):
                continue
            chosen.append((p, cand))
            line = span([cand], rank)
            blocked = subspace_sum(blocked, line)
            chosen_span = subspace_sum(chosen_span, line)
            need -= 1
            if need == 0:
                break
        if need:
            return None
    return chosen


def _verify_split(filts, assignment, rank) -> bool:
    """The (CC) sum condition, checked verbatim at every jump level."""
    if span([v for _, v in assignment], rank).dim != rank:
        return False
    for i, f in enumerate(filts):
        for j in f.thresholds:
            got = span([v for p, v in assignment if p[i] >= j], rank)
            if got != f.value(j):
                return False
    return True


def _split_cone(bundle, cone_index, seed, prefer, flat_dim=None):
    """Compatible basis rows on one cone, or an IncompatibilityWitness.

    With flat_dim set, an attempt is only accepted when exactly flat_dim of
    its lines lie inside `prefer` (the compatible-flat count condition).
    """
    cone = bundle.fan.max_cones[cone_index]
    filts = [bundle.filtrations[i] for i in cone]
    mult, space_at = _profile_multiplicities(filts)
    for p, m in sorted(mult.items()):
        if m < 0:
            return IncompatibilityWitness(
                cone_index, cone, p, m,
                f"profile {p} has negative multiplicity {m}",
            )
    rays = [bundle.fan.rays[i] for i in cone]
    last_reason = "no splitting attempt succeeded"
    for attempt in range(SPLIT_ATTEMPTS):
        rng = None if attempt == 0 else random.Random(f"{seed}:{cone_index}:{attempt}")
        assignment = _attempt_split(filts, mult, space_at, bundle.rank, prefer, rng)
        if assignment is None:
            last_reason = "could not draw independent lines for every profile"
            continue
        if not _verify_split(filts, assignment, bundle.rank):
            last_reason = "drawn decomposition failed the sum-condition verification"
            continue
        if flat_dim is not None:
            inside = sum(1 for _, v in assignment if prefer.contains(v))
            if inside != flat_dim:
                last_reason = (
                    f"basis meets the flat in {inside} lines, need {flat_dim}"
                )
                continue
        rows = tuple(
            SheetRow(profile=p, character=solve_integer_system(rays, p), vector=v)
            for p, v in assignment
        )
        return rows
    return IncompatibilityWitness(
        cone_index, cone, None, None,
        f"{last_reason} after {SPLIT_ATTEMPTS} attempts "
        "(randomized search; may be a false negative)",
    )


def check_compatibility(bundle: ToricBundle, seed: int = 0, prefer: Subspace | None = None) -> CharacterSheet:
    """Decide the compatibility condition; raises IncompatibleBundleError.

    `prefer` biases the line draws toward a subspace (used by the
    subbundle and compatible-flat tests); it never affects the verdict.
    """
    all_rows = []
    for ci in range(len(bundle.fan.max_cones)):
        res = _split_cone(bundle, ci, seed, prefer)
        if isinstance(res, IncompatibilityWitness):
            raise IncompatibleBundleError(res)
        all_rows.append(res)
    return CharacterSheet(rows=tuple(all_rows))


def associated_characters(bundle: ToricBundle, cone_index: int, seed: int = 0) -> tuple[tuple[int, ...], ...]:
    """The multiset u(sigma), sorted; independent of the realized basis."""
    cone = bundle.fan.max_cones[cone_index]
    filts = [bundle.filtrations[i] for i in cone]
    mult, _ = _profile_multiplicities(filts)
    bad = [(p, m) for p, m in mult.items() if m < 0]
    if bad:
        p, m = sorted(bad)[0]
        raise IncompatibleBundleError(
            IncompatibilityWitness(cone_index, cone, p, m,
                                   f"profile {p} has negative multiplicity {m}")
        )
    # characters are determined by the profile multiplicities alone, but the
    # full check still certifies that a decomposition exists
    check_compatibility(bundle, seed=seed)
    rays = [bundle.fan.rays[i] for i in cone]
    out = []
    for p, m in mult.items():
        out.extend([solve_integer_system(rays, p)] * m)
    return tuple(sorted(out))

"""The ordered K0 group of a graph algebra.

The group is the cokernel of the vertex relation matrix (one column per
regular vertex), presented with explicit torsion moduli and free rank.  The
positive cone is the monoid generated by the vertex classes together with,
for every infinite emitter, the family of differences "emitter class minus a
finite batch of target classes" (kept intensional via per-target capacities).

Membership in the cone is decided three-valued: Member carries a re-verified
witness, NotMember carries a rational separating functional on ambient
coordinates, and Unknown carries the spent search budget.  Comparison of two
presentations enumerates group isomorphisms under a budget and checks cone
preservation through the membership machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product
from math import gcd

from .graphs import (
    Graph,
    INF,
    VertexClass,
    block_decomposition,
    classify_vertex,
    desingularize_with_tails,
    emitter_edge_listing,
    predicates,
)
from .intfeas import IntInfeasible, IntUnknown, IntWitness, integer_feasibility
from .linalg import (
    CokerPresentation,
    Element,
    Matrix,
    cokernel,
    determinant,
    smith_normal_form,
    solve_diophantine,
)
from .lp import EQ, GE, LE, Feasible, constraint, solve_lp

DEFAULT_BUDGET = 100000

_ZERO = Fraction(0)


@dataclass(frozen=True)
class Family:
    """One infinite emitter's cone generators: all classes
    [emitter] - sum n_w [w] with 0 <= n_w <= capacity (None = no cap)."""

    emitter: str
    targets: tuple[tuple[str, int | None], ...]


@dataclass(frozen=True)
class ConeSpec:
    base: tuple[Element, ...]
    families: tuple[Family, ...]


class K0Presentation:
    """Cokernel presentation plus per-vertex classes, cone data and the unit."""

    def __init__(
        self,
        graph: Graph,
        coker: CokerPresentation,
        ambient_order: tuple[str, ...],
        delta: dict[str, Element],
        cone: ConeSpec,
        order_unit: Element,
        row_finite_orthant: bool,
        relation_matrix: Matrix,
    ) -> None:
        self.graph = graph
        self.coker = coker
        self.ambient_order = ambient_order
        self.delta = delta
        self.cone = cone
        self.order_unit = order_unit
        self.row_finite_orthant = row_finite_orthant
        self.relation_matrix = relation_matrix
        self._ambient_index = {v: i for i, v in enumerate(ambient_order)}
        self._membership_cache: dict[Element, tuple[object, int]] = {}
        self._functional_pool: list[tuple[Fraction, ...]] = []
        self._face_cache: dict[tuple, tuple] = {}

    def ambient_index(self, v: str) -> int:
        return self._ambient_index[v]

    def ambient_basis_vector(self, v: str) -> list[int]:
        vec = [0] * len(self.ambient_order)
        vec[self._ambient_index[v]] = 1
        return vec

    def group_invariants(self) -> tuple[int, tuple[int, ...]]:
        return self.coker.group_invariants()


def relation_matrix(g: Graph) -> tuple[Matrix, tuple[str, ...]]:
    """The (regular+singular) x regular matrix whose column for a regular
    vertex v encodes the relation [v] = sum_w A(v, w) [w]; rows are indexed
    by all vertices, regular ones first."""
    bd = block_decomposition(g)
    order = bd.regular + bd.singular
    mat = [[0] * len(bd.regular) for _ in order]
    for col, v in enumerate(bd.regular):
        for row, u in enumerate(order):
            a = g.multiplicity(v, u)
            mat[row][col] = a - (1 if u == v else 0)
    return mat, order


def _build_presentation(g: Graph, row_finite_orthant: bool) -> K0Presentation:
    mat, order = relation_matrix(g)
    coker = cokernel(mat)
    pos = {v: i for i, v in enumerate(order)}
    delta = {}
    for v in g.vertices:
        vec = [0] * len(order)
        vec[pos[v]] = 1
        delta[v] = coker.project(vec)
    unit = coker.zero()
    for v in g.vertices:
        unit = coker.add(unit, delta[v])
    families = []
    for v in g.vertices:
        if classify_vertex(g, v) is VertexClass.INFINITE_EMITTER:
            targets = tuple(
                (w, None if m is INF else m) for w, m in g.out_edges(v)
            )
            families.append(Family(emitter=v, targets=targets))
    cone = ConeSpec(base=tuple(delta[v] for v in g.vertices), families=tuple(families))
    return K0Presentation(
        graph=g,
        coker=coker,
        ambient_order=order,
        delta=delta,
        cone=cone,
        order_unit=unit,
        row_finite_orthant=row_finite_orthant,
        relation_matrix=mat,
    )


def compute_k0(g: Graph) -> K0Presentation:
    """Ordered K0 presentation of an arbitrary finitely presented graph."""
    return _build_presentation(g, row_finite_orthant=predicates(g).row_finite)


def compute_k0_row_finite(g: Graph) -> K0Presentation:
    """Row-finite specialization: the cone is the image of the nonnegative
    orthant, so no generator families appear."""
    if not predicates(g).row_finite:
        raise ValueError("graph has an infinite emitter; row-finite path not applicable")
    return _build_presentation(g, row_finite_orthant=True)


# ---------------------------------------------------------------------------
# cone membership


@dataclass(frozen=True)
class FamilyUse:
    emitter: str
    count: int
    target_counts: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class MembershipWitness:
    base_counts: tuple[tuple[str, int], ...]
    family_uses: tuple[FamilyUse, ...]


@dataclass(frozen=True)
class Member:
    witness: MembershipWitness


@dataclass(frozen=True)
class NotMember:
    functional: tuple[Fraction, ...]  # over ambient coordinates


@dataclass(frozen=True)
class UnknownMembership:
    budget_spent: int


MembershipVerdict = Member | NotMember | UnknownMembership


def evaluate_witness(k: K0Presentation, witness: MembershipWitness) -> Element:
    total = k.coker.zero()
    for v, c in witness.base_counts:
        total = k.coker.add(total, k.coker.scale(c, k.delta[v]))
    for use in witness.family_uses:
        total = k.coker.add(total, k.coker.scale(use.count, k.delta[use.emitter]))
        for w, c in use.target_counts:
            total = k.coker.subtract(total, k.coker.scale(c, k.delta[w]))
    return total


def witness_is_valid(k: K0Presentation, witness: MembershipWitness) -> bool:
    if any(c < 0 for _, c in witness.base_counts):
        return False
    caps = {
        fam.emitter: dict(fam.targets) for fam in k.cone.families
    }
    for use in witness.family_uses:
        if use.emitter not in caps or use.count < 0:
            return False
        fam_caps = caps[use.emitter]
        for w, c in use.target_counts:
            if w not in fam_caps or c < 0:
                return False
            cap = fam_caps[w]
            if cap is not None and c > use.count * cap:
                return False
            if c > 0 and use.count == 0:
                return False
    return True


def functional_certifies(
    k: K0Presentation, phi: tuple[Fraction, ...], x: Element
) -> bool:
    """Exact re-verification of a NotMember certificate."""
    m = len(k.ambient_order)
    if len(phi) != m:
        return False
    # vanishes on every relation column
    for col in range(len(k.relation_matrix[0]) if k.relation_matrix else 0):
        if sum((phi[i] * k.relation_matrix[i][col] for i in range(m)), _ZERO) != 0:
            return False
    # nonnegative on each vertex class
    if any(p < 0 for p in phi):
        return False
    # nonnegative on every family element, uniformly over capacities
    for fam in k.cone.families:
        value = phi[k.ambient_index(fam.emitter)]
        for w, cap in fam.targets:
            pw = phi[k.ambient_index(w)]
            if cap is None:
                if pw > 0:
                    return False
            elif pw > 0:
                value -= cap * pw
        if value < 0:
            return False
    # strictly negative on the query
    lift = k.coker.lift(x)
    return sum((phi[i] * lift[i] for i in range(m)), _ZERO) < 0


def _free_part_rows(k: K0Presentation) -> list[list[int]]:
    proj = k.coker.projection
    return proj[len(k.coker.torsion_moduli) :]


def _separating_functional(k: K0Presentation, x: Element) -> tuple[Fraction, ...] | None:
    """Search a rational functional proving x outside the cone."""
    f = k.coker.free_rank
    if f == 0:
        return None
    aux: list[tuple[int, str]] = []  # (family index, target) with finite cap
    for idx, fam in enumerate(k.cone.families):
        for w, cap in fam.targets:
            if cap is not None:
                aux.append((idx, w))
    aux_pos = {key: f + i for i, key in enumerate(aux)}
    num_vars = f + len(aux)

    def free_of(v: str) -> tuple[int, ...]:
        return k.delta[v].free

    cons = []
    for v in k.graph.vertices:
        row = list(free_of(v)) + [0] * len(aux)
        cons.append(constraint(row, GE, 0))
    for idx, fam in enumerate(k.cone.families):
        fam_row = list(free_of(fam.emitter)) + [0] * len(aux)
        for w, cap in fam.targets:
            if cap is None:
                row = list(free_of(w)) + [0] * len(aux)
                cons.append(constraint(row, LE, 0))
            else:
                p = aux_pos[(idx, w)]
                row = list(free_of(w)) + [0] * len(aux)
                row[p] = -1
                cons.append(constraint(row, LE, 0))  # p >= f . free(w)
                fam_row[p] -= cap
        cons.append(constraint(fam_row, GE, 0))
    cons.append(constraint(list(x.free) + [0] * len(aux), LE, -1))

    nonneg = [False] * f + [True] * len(aux)
    res = solve_lp(num_vars, cons, nonneg=nonneg)
    if not isinstance(res, Feasible):
        return None
    coeffs = res.point[:f]
    rows = _free_part_rows(k)
    m = len(k.ambient_order)
    phi = tuple(
        sum((coeffs[j] * rows[j][i] for j in range(f)), _ZERO) for i in range(m)
    )
    return phi


def _pure_torsion_witness(k: K0Presentation, x: Element) -> MembershipWitness | None:
    """With no free part the vertex classes generate a finite group, so every
    element has a witness; build one by a lattice solve reduced mod orders."""
    moduli = k.coker.torsion_moduli
    gens = [(v, k.delta[v]) for v in k.graph.vertices if not k.delta[v].is_zero()]
    if not gens:
        return None
    rows = len(moduli)
    mat = [
        [e.torsion[i] for _, e in gens] + [moduli[i] if j == i else 0 for j in range(rows)]
        for i in range(rows)
    ]
    sol = solve_diophantine(mat, list(x.torsion))
    if sol is None:
        return None
    counts = []
    for (v, e), c in zip(gens, sol):
        order = k.coker.element_order(e)
        c %= order
        if c:
            counts.append((v, c))
    witness = MembershipWitness(base_counts=tuple(counts), family_uses=())
    if evaluate_witness(k, witness) != x:
        return None
    return witness


def _quotient_coords(e: Element) -> list[int]:
    return [*e.torsion, *e.free]


def _torsion_lattice_columns(coker: CokerPresentation) -> list[list[int]]:
    """Columns spanning the representative ambiguity of torsion residues."""
    dim = len(coker.torsion_moduli) + coker.free_rank
    return [
        [coker.torsion_moduli[i] if r == i else 0 for r in range(dim)]
        for i in range(len(coker.torsion_moduli))
    ]


def _run_generator_bnb(coker, active, lattice_cols, target, node_budget):
    """Integer search for target = sum a_g * g + (lattice combination)."""
    dim = len(coker.torsion_moduli) + coker.free_rank
    nvars = len(active) + len(lattice_cols)
    equalities = []
    for row in range(dim):
        coeffs = [_quotient_coords(e)[row] for _, e in active]
        coeffs += [col[row] for col in lattice_cols]
        equalities.append((coeffs, target[row]))
    bounds: list[tuple[int | None, int | None]] = []
    for _, e in active:
        order = coker.element_order(e)
        bounds.append((0, order - 1 if order is not None else None))
    bounds += [(None, None)] * len(lattice_cols)
    return integer_feasibility(nvars, equalities, bounds=bounds, budget=node_budget)


def _face_reduction(k: K0Presentation, gens, x: Element):
    """Drop generators that no representation of x can use.

    A functional that is nonnegative on the remaining generators, zero on x
    and at least one on some generator forces that generator's coefficient
    to zero; iterate to a fixpoint.
    """
    nfree = k.coker.free_rank
    active = list(gens)
    changed = True
    while changed and active:
        changed = False
        for idx, (_, e) in enumerate(active):
            cons = [constraint(list(g.free), GE, 0) for _, g in active]
            cons.append(constraint(list(x.free), EQ, 0))
            cons.append(constraint(list(e.free), GE, 1))
            res = solve_lp(nfree, cons, nonneg=[False] * nfree)
            if isinstance(res, Feasible):
                del active[idx]
                changed = True
                break
    return active


def _lineality_units(k: K0Presentation, active):
    """Generators whose negative lies in the rational cone of the face.

    Such a generator u can be used with any integer coefficient: from a
    rational combination D*(-u) = sum n_g * g, scaling by the torsion
    exponent L gives the exact group identity -u = (D*L-1)*u + sum L*n_g*g
    with nonnegative coefficients.
    """
    nfree = k.coker.free_rank
    exponent = 1
    for d in k.coker.torsion_moduli:
        exponent *= d
    units = []
    for idx, (v, e) in enumerate(active):
        cons = []
        for j in range(nfree):
            row = [g.free[j] for _, g in active]
            cons.append(constraint(row, EQ, -e.free[j]))
        res = solve_lp(len(active), cons)
        if not isinstance(res, Feasible):
            continue
        denom = 1
        for q in res.point:
            denom = denom * q.denominator // gcd(denom, q.denominator)
        counts = tuple(int(q * denom) * exponent for q in res.point)
        scale = denom * exponent  # -u = (scale - 1) * u + sum counts * g
        units.append((idx, scale, counts))
    return units


def _expand_unit_uses(k, active, units, coefficients):
    """Turn integer coefficients on lineality generators into plain counts."""
    counts = [0] * len(active)
    for (idx, scale, expansion), c in zip(units, coefficients):
        if c >= 0:
            counts[idx] += c
        else:
            counts[idx] += (-c) * (scale - 1)
            for g_idx, n in enumerate(expansion):
                counts[g_idx] += (-c) * n
    return counts


def _no_family_decide(k: K0Presentation, x: Element, budget: int):
    """Complete membership decision when the cone has no generator families.

    Returns (witness | None, decided, nodes_spent).  A quick raw search
    handles the common cases; stalls fall through to the face-and-lineality
    reduction, whose final search region is provably bounded, so the whole
    procedure terminates with a definite answer given enough budget.
    """
    coker = k.coker
    gens = [(v, k.delta[v]) for v in k.graph.vertices if not k.delta[v].is_zero()]
    target = _quotient_coords(x)
    torsion_cols = _torsion_lattice_columns(coker)
    spent = 0

    quick = min(budget, 40)
    res = _run_generator_bnb(coker, gens, torsion_cols, target, quick)
    if isinstance(res, IntWitness):
        counts = res.point[: len(gens)]
        witness = MembershipWitness(
            base_counts=tuple((v, c) for (v, _), c in zip(gens, counts) if c),
            family_uses=(),
        )
        assert evaluate_witness(k, witness) == x
        return witness, True, spent
    if isinstance(res, IntInfeasible):
        return None, True, spent
    spent += res.nodes_explored

    face_key = (tuple(sorted(v for v, _ in gens)), tuple(x.free))
    cached = k._face_cache.get(face_key)
    if cached is None:
        active = _face_reduction(k, gens, x)
        units = _lineality_units(k, active)
        k._face_cache[face_key] = (active, units)
    else:
        active, units = cached

    unit_indices = {idx for idx, _, _ in units}
    pointed = [pair for i, pair in enumerate(active) if i not in unit_indices]
    unit_cols = [_quotient_coords(active[idx][1]) for idx, _, _ in units]

    lattice = [list(col) for col in unit_cols] + torsion_cols
    dim = len(coker.torsion_moduli) + coker.free_rank
    basis_cols: list[list[int]] = []
    basis_expr: list[list[int]] = []
    if lattice:
        mat = [[lattice[j][r] for j in range(len(lattice))] for r in range(dim)]
        snf = smith_normal_form(mat)
        for i in range(snf.rank):
            expr = [snf.v[j][i] for j in range(len(lattice))]
            col = [
                sum(mat[r][j] * expr[j] for j in range(len(lattice)))
                for r in range(dim)
            ]
            basis_cols.append(col)
            basis_expr.append(expr)

    remaining = budget - spent
    if remaining < 1:
        return None, False, spent
    res = _run_generator_bnb(coker, pointed, basis_cols, target, remaining)
    if isinstance(res, IntUnknown):
        return None, False, spent + res.nodes_explored
    if isinstance(res, IntInfeasible):
        return None, True, spent
    point = res.point
    counts = {v: c for (v, _), c in zip(pointed, point) if c}
    basis_coeffs = point[len(pointed) :]
    unit_coeffs = [
        sum(basis_expr[i][j] * basis_coeffs[i] for i in range(len(basis_coeffs)))
        for j in range(len(units))
    ]
    expanded = _expand_unit_uses(k, active, units, unit_coeffs)
    for (v, _), c in zip(active, expanded):
        if c:
            counts[v] = counts.get(v, 0) + c
    witness = MembershipWitness(
        base_counts=tuple(sorted(counts.items())), family_uses=()
    )
    assert witness_is_valid(k, witness)
    assert evaluate_witness(k, witness) == x
    return witness, True, spent


def _witness_search(k: K0Presentation, x: Element, budget: int) -> tuple[
    MembershipWitness | None, bool, int
]:
    """Branch-and-bound search for a cone decomposition of x.

    Returns (witness, proven_empty, nodes_spent); the middle flag is True
    only when every case split closed with a certified-empty search tree.
    """
    coker = k.coker
    moduli = coker.torsion_moduli
    ntor = len(moduli)
    nfree = coker.free_rank

    base = [(v, k.delta[v]) for v in k.graph.vertices if not k.delta[v].is_zero()]
    fams = []
    for fam in k.cone.families:
        targets = [
            (w, cap, k.delta[w])
            for (w, cap) in fam.targets
            if not k.delta[w].is_zero()
        ]
        fams.append((fam.emitter, k.delta[fam.emitter], targets))
    split = [
        i
        for i, (_, _, targets) in enumerate(fams)
        if any(cap is None for _, cap, _ in targets)
    ]

    spent = 0
    proven_empty = True
    for mask in range(1 << len(split)):
        active = {split[b] for b in range(len(split)) if mask >> b & 1}
        var_defs: list[tuple] = []
        bounds: list[tuple[int | None, int | None]] = []
        for v, e in base:
            order = coker.element_order(e)
            var_defs.append(("base", v, e))
            bounds.append((0, order - 1 if order is not None else None))
        for idx, (emitter, de, targets) in enumerate(fams):
            if idx in split and idx not in active:
                continue
            var_defs.append(("t", idx, de))
            bounds.append((1 if idx in active else 0, None))
            for w, cap, dw in targets:
                var_defs.append(("m", idx, w, cap, dw))
                bounds.append((0, None))
        for i in range(ntor):
            var_defs.append(("k", i))
            bounds.append((None, None))

        nvars = len(var_defs)
        equalities = []
        for i in range(ntor):
            row = [0] * nvars
            for col, vd in enumerate(var_defs):
                if vd[0] in ("base", "t"):
                    row[col] = vd[2].torsion[i]
                elif vd[0] == "m":
                    row[col] = -vd[4].torsion[i]
                elif vd[0] == "k" and vd[1] == i:
                    row[col] = -moduli[i]
            equalities.append((row, x.torsion[i]))
        for j in range(nfree):
            row = [0] * nvars
            for col, vd in enumerate(var_defs):
                if vd[0] in ("base", "t"):
                    row[col] = vd[2].free[j]
                elif vd[0] == "m":
                    row[col] = -vd[4].free[j]
            equalities.append((row, x.free[j]))
        inequalities = []
        for col, vd in enumerate(var_defs):
            if vd[0] == "m" and vd[3] is not None:
                row = [0] * nvars
                row[col] = 1
                t_col = next(
                    c for c, other in enumerate(var_defs) if other[:2] == ("t", vd[1])
                )
                row[t_col] = -vd[3]
                inequalities.append((row, 0))  # m - cap * t <= 0

        remaining = budget - spent
        if remaining < 1:
            return None, False, spent
        res = integer_feasibility(
            nvars, equalities, inequalities, bounds=bounds, budget=remaining
        )
        if isinstance(res, IntWitness):
            witness = _assemble_witness(var_defs, res.point, fams)
            return witness, False, spent
        if isinstance(res, IntUnknown):
            spent += res.nodes_explored
            proven_empty = False
        # IntInfeasible: this case is certified empty; spend nothing extra
    return None, proven_empty, spent


def _assemble_witness(var_defs, point, fams) -> MembershipWitness:
    base_counts = []
    t_count: dict[int, int] = {}
    m_count: dict[int, list[tuple[str, int]]] = {}
    for vd, val in zip(var_defs, point):
        if vd[0] == "base" and val:
            base_counts.append((vd[1], val))
        elif vd[0] == "t" and val:
            t_count[vd[1]] = val
        elif vd[0] == "m" and val:
            m_count.setdefault(vd[1], []).append((vd[2], val))
    uses = []
    for idx in sorted(set(t_count) | set(m_count)):
        uses.append(
            FamilyUse(
                emitter=fams[idx][0],
                count=t_count.get(idx, 0),
                target_counts=tuple(m_count.get(idx, [])),
            )
        )
    return MembershipWitness(base_counts=tuple(base_counts), family_uses=tuple(uses))


def cone_membership(k: K0Presentation, x: Element, budget: int = DEFAULT_BUDGET):
    """Decide whether x lies in the positive cone.

    Member witnesses and NotMember functionals are re-verified exactly before
    being returned; verdicts are cached on the presentation, and certificates
    found for one query are reused to settle later ones.  A cached Unknown is
    recomputed when a later call offers a larger budget.
    """
    k.coker._check(x)
    if budget < 1:
        raise ValueError("budget must be positive")
    cached = k._membership_cache.get(x)
    if cached is not None:
        verdict, decided_with = cached
        if not isinstance(verdict, UnknownMembership) or budget <= decided_with:
            return verdict
    verdict = _decide_membership(k, x, budget)
    k._membership_cache[x] = (verdict, budget)
    return verdict


def _member_by_extension(k: K0Presentation, x: Element):
    """x is a member whenever x - [v] is a cached member."""
    for v in k.graph.vertices:
        dv = k.delta[v]
        if dv.is_zero():
            continue
        cached = k._membership_cache.get(k.coker.subtract(x, dv))
        if cached is None or not isinstance(cached[0], Member):
            continue
        prev = cached[0].witness
        counts = dict(prev.base_counts)
        counts[v] = counts.get(v, 0) + 1
        witness = MembershipWitness(
            base_counts=tuple(sorted(counts.items())),
            family_uses=prev.family_uses,
        )
        assert evaluate_witness(k, witness) == x
        return Member(witness=witness)
    return None


def _decide_membership(k: K0Presentation, x: Element, budget: int):
    if x.is_zero():
        return Member(witness=MembershipWitness(base_counts=(), family_uses=()))
    if k.coker.free_rank == 0:
        witness = _pure_torsion_witness(k, x)
        if witness is not None:
            return Member(witness=witness)
        return UnknownMembership(budget_spent=0)
    extended = _member_by_extension(k, x)
    if extended is not None:
        return extended
    for phi in k._functional_pool:
        if functional_certifies(k, phi, x):
            return NotMember(functional=phi)
    phi = _separating_functional(k, x)
    if phi is not None and functional_certifies(k, phi, x):
        k._functional_pool.append(phi)
        return NotMember(functional=phi)
    meaningful_families = any(
        not k.delta[fam.emitter].is_zero()
        or any(not k.delta[w].is_zero() for w, _ in fam.targets)
        for fam in k.cone.families
    )
    if not meaningful_families:
        witness, _decided, spent = _no_family_decide(k, x, budget)
    else:
        witness, _decided, spent = _witness_search(k, x, budget)
    if witness is not None:
        assert witness_is_valid(k, witness)
        assert evaluate_witness(k, witness) == x
        return Member(witness=witness)
    # a certified-empty search without a separating functional still reports
    # Unknown: NotMember promises a functional, and none exists
    return UnknownMembership(budget_spent=spent)


# ---------------------------------------------------------------------------
# order properties


class ThreeValued(Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class OrderProperties:
    cone_is_everything: ThreeValued
    cone_pointed: ThreeValued
    pointed_witness: Element | None = None


def _canonical_generators(coker: CokerPresentation) -> list[Element]:
    gens = []
    ntor = len(coker.torsion_moduli)
    for i in range(ntor):
        gens.append(
            Element(
                torsion=tuple(1 if j == i else 0 for j in range(ntor)),
                free=(0,) * coker.free_rank,
            )
        )
    for j in range(coker.free_rank):
        gens.append(
            Element(
                torsion=(0,) * ntor,
                free=tuple(1 if l == j else 0 for l in range(coker.free_rank)),
            )
        )
    return gens


def _strictly_positive_functional(k: K0Presentation) -> tuple[Fraction, ...] | None:
    """A functional >= 1 on every nonzero generator certifies pointedness."""
    f = k.coker.free_rank
    if f == 0:
        return None
    aux = []
    for idx, fam in enumerate(k.cone.families):
        for w, cap in fam.targets:
            if cap is not None:
                aux.append((idx, w))
    aux_pos = {key: f + i for i, key in enumerate(aux)}
    num_vars = f + len(aux)
    cons = []
    for v in k.graph.vertices:
        if k.delta[v].is_zero():
            continue
        cons.append(constraint(list(k.delta[v].free) + [0] * len(aux), GE, 1))
    for idx, fam in enumerate(k.cone.families):
        fam_row = list(k.delta[fam.emitter].free) + [0] * len(aux)
        for w, cap in fam.targets:
            if cap is None:
                cons.append(constraint(list(k.delta[w].free) + [0] * len(aux), LE, 0))
            else:
                p = aux_pos[(idx, w)]
                row = list(k.delta[w].free) + [0] * len(aux)
                row[p] = -1
                cons.append(constraint(row, LE, 0))
                fam_row[p] -= cap
        cons.append(constraint(fam_row, GE, 1))
    nonneg = [False] * f + [True] * len(aux)
    res = solve_lp(num_vars, cons, nonneg=nonneg)
    if not isinstance(res, Feasible):
        return None
    coeffs = res.point[:f]
    rows = _free_part_rows(k)
    m = len(k.ambient_order)
    phi = tuple(
        sum((coeffs[j] * rows[j][i] for j in range(f)), _ZERO) for i in range(m)
    )
    # re-verify strictness on every nonzero vertex class
    for v in k.graph.vertices:
        if not k.delta[v].is_zero() and phi[k.ambient_index(v)] <= 0:
            return None
    return phi


def order_properties(k: K0Presentation, budget: int = DEFAULT_BUDGET) -> OrderProperties:
    gens = _canonical_generators(k.coker)
    if not gens:
        return OrderProperties(
            cone_is_everything=ThreeValued.YES, cone_pointed=ThreeValued.YES
        )
    per_call = max(1000, budget // max(1, 2 * len(gens)))

    everything = ThreeValued.YES
    for g in gens:
        for candidate in (g, k.coker.negate(g)):
            verdict = cone_membership(k, candidate, budget=per_call)
            if isinstance(verdict, NotMember):
                everything = ThreeValued.NO
                break
            if isinstance(verdict, UnknownMembership) and everything is ThreeValued.YES:
                everything = ThreeValued.UNKNOWN
        if everything is ThreeValued.NO:
            break

    pointed: ThreeValued
    pointed_witness = None
    if everything is ThreeValued.YES:
        pointed = ThreeValued.NO
        pointed_witness = gens[0]
    else:
        pointed = ThreeValued.UNKNOWN
        for v in k.graph.vertices:
            dv = k.delta[v]
            if dv.is_zero():
                continue
            verdict = cone_membership(k, k.coker.negate(dv), budget=per_call)
            if isinstance(verdict, Member):
                pointed = ThreeValued.NO
                pointed_witness = dv
                break
        if pointed is ThreeValued.UNKNOWN:
            if _strictly_positive_functional(k) is not None:
                pointed = ThreeValued.YES
            elif all(e.is_zero() for e in k.cone.base) and not k.cone.families:
                pointed = ThreeValued.YES  # the cone is {0}
    return OrderProperties(
        cone_is_everything=everything,
        cone_pointed=pointed,
        pointed_witness=pointed_witness,
    )


# ---------------------------------------------------------------------------
# comparison


@dataclass(frozen=True)
class GroupIso:
    free_map: tuple[tuple[int, ...], ...]
    torsion_map: tuple[tuple[int, ...], ...]
    mixed_map: tuple[tuple[int, ...], ...]  # free generators -> torsion parts


@dataclass(frozen=True)
class NotIsomorphic:
    reason: str


@dataclass(frozen=True)
class IsomorphicCandidate:
    iso: GroupIso
    inverse: GroupIso
    verified_bound: int


@dataclass(frozen=True)
class UnknownComparison:
    budget_spent: int


ComparisonVerdict = NotIsomorphic | IsomorphicCandidate | UnknownComparison

VERIFIED_BOUND = 2
# node budget for each membership query made while checking a candidate map;
# stalls then surface as Unknown rejections instead of multi-minute searches
COMPARE_MEMBERSHIP_BUDGET = 2000


def apply_iso(moduli: tuple[int, ...], iso: GroupIso, e: Element) -> Element:
    nfree = len(iso.free_map)
    free = tuple(
        sum(iso.free_map[i][j] * e.free[j] for j in range(nfree)) for i in range(nfree)
    )
    torsion = tuple(
        (
            sum(iso.torsion_map[i][j] * e.torsion[j] for j in range(len(moduli)))
            + sum(iso.mixed_map[i][l] * e.free[l] for l in range(nfree))
        )
        % moduli[i]
        for i in range(len(moduli))
    )
    return Element(torsion=torsion, free=free)


def _torsion_inverse(moduli, tmap) -> tuple[tuple[int, ...], ...] | None:
    n = len(moduli)
    if n == 0:
        return ()
    mat = [
        [tmap[i][j] for j in range(n)] + [moduli[i] if j == i else 0 for j in range(n)]
        for i in range(n)
    ]
    cols = []
    for i in range(n):
        rhs = [1 if r == i else 0 for r in range(n)]
        sol = solve_diophantine(mat, rhs)
        if sol is None:
            return None
        cols.append([sol[r] % moduli[r] for r in range(n)])
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def _invert_iso(moduli, iso: GroupIso) -> GroupIso | None:
    nfree = len(iso.free_map)
    tinv = _torsion_inverse(moduli, iso.torsion_map)
    if tinv is None:
        return None
    if nfree:
        fmat = [list(r) for r in iso.free_map]
        det = determinant(fmat)
        if det not in (1, -1):
            return None
        finv = _integer_inverse(fmat, det)
    else:
        finv = ()
    n = len(moduli)
    mixed = tuple(
        tuple(
            (
                -sum(
                    tinv[i][a] * iso.mixed_map[a][b] * finv[b][l]
                    for a in range(n)
                    for b in range(nfree)
                )
            )
            % moduli[i]
            for l in range(nfree)
        )
        for i in range(n)
    )
    return GroupIso(free_map=finv, torsion_map=tinv, mixed_map=mixed)


def _integer_inverse(mat: Matrix, det: int) -> tuple[tuple[int, ...], ...]:
    n = len(mat)
    adj = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [
                [mat[r][c] for c in range(n) if c != i] for r in range(n) if r != j
            ]
            row.append(((-1) ** (i + j)) * determinant(minor) // det)
        adj.append(tuple(row))
    return tuple(adj)


def _free_map_options(nfree: int):
    """Unimodular matrices in shells of growing max-entry; finite iff nfree <= 1."""
    if nfree == 0:
        yield ()
        return
    if nfree == 1:
        yield ((1,),)
        yield ((-1,),)
        return
    bound = 1
    while True:
        for flat in product(range(-bound, bound + 1), repeat=nfree * nfree):
            if max(abs(x) for x in flat) != bound:
                continue
            mat = tuple(tuple(flat[i * nfree : (i + 1) * nfree]) for i in range(nfree))
            if determinant([list(r) for r in mat]) in (1, -1):
                yield mat
        bound += 1


def _torsion_map_options(moduli):
    n = len(moduli)
    if n == 0:
        yield ()
        return
    entry_options = []
    for i in range(n):
        for j in range(n):
            step = moduli[i] // gcd(moduli[i], moduli[j])
            entry_options.append(range(0, moduli[i], step))
    for flat in product(*entry_options):
        yield tuple(tuple(flat[i * n : (i + 1) * n]) for i in range(n))


def _mixed_map_options(moduli, nfree):
    n = len(moduli)
    if n == 0 or nfree == 0:
        yield tuple(() for _ in range(n))
        return
    entry_options = [range(moduli[i]) for i in range(n) for _ in range(nfree)]
    for flat in product(*entry_options):
        yield tuple(tuple(flat[i * nfree : (i + 1) * nfree]) for i in range(n))


def _enumerate_candidates(moduli, nfree, limit):
    """At most ``limit`` candidate block maps, plus a completeness flag.

    The space is finite exactly when nfree <= 1; even then the torsion and
    mixed blocks can explode combinatorially, so enumeration stops at the
    limit and reports the cutoff.
    """
    out: list[GroupIso] = []
    for fmap in _free_map_options(nfree):
        for tmap in _torsion_map_options(moduli):
            for smap in _mixed_map_options(moduli, nfree):
                if len(out) >= limit:
                    return out, False
                out.append(GroupIso(free_map=fmap, torsion_map=tmap, mixed_map=smap))
    # only a finite generator falls through, so the space was fully listed
    return out, True


def _cone_generator_elements(k: K0Presentation, bound: int) -> list[Element]:
    gens = [k.delta[v] for v in k.graph.vertices]
    for fam in k.cone.families:
        ranges = []
        for w, cap in fam.targets:
            top = bound if cap is None else min(cap, bound)
            ranges.append(range(top + 1))
        for counts in product(*ranges):
            total = sum(counts)
            if total == 0 or total > bound:
                continue
            e = k.delta[fam.emitter]
            for (w, _), c in zip(fam.targets, counts):
                e = k.coker.subtract(e, k.coker.scale(c, k.delta[w]))
            gens.append(e)
    return gens


def compare_k0(
    k1: K0Presentation,
    k2: K0Presentation,
    use_order_unit: bool = False,
    budget: int = 2000,
):
    """Search for an isomorphism of ordered groups (optionally unit-preserving).

    Stage 1 compares group invariants, stage 2 enumerates group isomorphisms
    under the budget, stage 3 checks cone preservation in both directions on
    base generators and family elements with total parameter <= the verified
    bound.  NotIsomorphic is only reported on a certified obstruction or a
    complete exhaustion with every rejection certain.
    """
    inv1 = k1.group_invariants()
    inv2 = k2.group_invariants()
    if inv1 != inv2:
        return NotIsomorphic(
            reason=f"group invariants differ: {inv1} vs {inv2}"
        )
    op1 = order_properties(k1, budget=8 * COMPARE_MEMBERSHIP_BUDGET)
    op2 = order_properties(k2, budget=8 * COMPARE_MEMBERSHIP_BUDGET)
    for name, a, b in (
        ("cone-is-everything", op1.cone_is_everything, op2.cone_is_everything),
        ("pointedness", op1.cone_pointed, op2.cone_pointed),
    ):
        if {a, b} == {ThreeValued.YES, ThreeValued.NO}:
            return NotIsomorphic(reason=f"certified {name} flags differ")

    nfree, moduli = inv1
    gens1 = _cone_generator_elements(k1, VERIFIED_BOUND)
    gens2 = _cone_generator_elements(k2, VERIFIED_BOUND)
    canon = _canonical_generators(k1.coker)

    candidates, complete = _enumerate_candidates(moduli, nfree, budget)
    uncertain = False
    for iso in candidates:
        inverse = _invert_iso(moduli, iso)
        if inverse is None:
            continue
        if any(
            apply_iso(moduli, inverse, apply_iso(moduli, iso, g)) != g for g in canon
        ) or any(
            apply_iso(moduli, iso, apply_iso(moduli, inverse, g)) != g for g in canon
        ):
            continue
        if use_order_unit and apply_iso(moduli, iso, k1.order_unit) != k2.order_unit:
            continue
        ok = True
        for e in gens1:
            verdict = cone_membership(
                k2, apply_iso(moduli, iso, e), budget=COMPARE_MEMBERSHIP_BUDGET
            )
            if isinstance(verdict, Member):
                continue
            ok = False
            if isinstance(verdict, UnknownMembership):
                uncertain = True
            break
        if ok:
            for e in gens2:
                verdict = cone_membership(
                    k1, apply_iso(moduli, inverse, e), budget=COMPARE_MEMBERSHIP_BUDGET
                )
                if isinstance(verdict, Member):
                    continue
                ok = False
                if isinstance(verdict, UnknownMembership):
                    uncertain = True
                break
        if ok:
            return IsomorphicCandidate(
                iso=iso, inverse=inverse, verified_bound=VERIFIED_BOUND
            )
    if complete and not uncertain:
        kind = "unit-preserving ordered-group" if use_order_unit else "ordered-group"
        return NotIsomorphic(
            reason=f"no {kind} isomorphism exists (candidate space exhausted)"
        )
    return UnknownComparison(budget_spent=len(candidates))


# ---------------------------------------------------------------------------
# tail-extension consistency oracle


@dataclass(frozen=True)
class ConsistencyReport:
    groups_match: bool
    generator_correspondence_ok: bool
    cone_prefix_ok: bool


def verify_desingularization_consistency(g: Graph, depth: int) -> ConsistencyReport:
    """Cross-check the direct presentation against the row-finite presentation
    of the tail extension at finite depth.

    Tail vertices are identified with "emitter class minus a listing prefix";
    under that identification the groups, the vertex classes, and the cone
    elements supported on listing prefixes must all agree.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    k1 = compute_k0(g)
    extended, tails = desingularize_with_tails(g, depth, sinks=True, infinite_emitters=True)
    k2 = compute_k0_row_finite(extended)

    groups_match = k1.group_invariants() == k2.group_invariants()

    listings = {
        v: emitter_edge_listing(g, v, depth)
        for v in g.vertices
        if classify_vertex(g, v) is VertexClass.INFINITE_EMITTER
    }

    m1 = len(k1.ambient_order)

    def image_vector(u: str) -> list[int]:
        """Image in the original ambient lattice of an extended-graph vertex."""
        vec = [0] * m1
        if u in tails:
            base, j = tails[u]
            vec[k1.ambient_index(base)] += 1
            for target in listings.get(base, [])[:j]:
                vec[k1.ambient_index(target)] -= 1
        else:
            vec[k1.ambient_index(u)] += 1
        return vec

    # well-definedness: every relation of the extended graph maps to zero
    well_defined = True
    mat2 = k2.relation_matrix
    cols2 = len(mat2[0]) if mat2 else 0
    for col in range(cols2):
        acc = [0] * m1
        for row, u in enumerate(k2.ambient_order):
            c = mat2[row][col]
            if c:
                vec = image_vector(u)
                acc = [a + c * b for a, b in zip(acc, vec)]
        if not k1.coker.project(acc).is_zero():
            well_defined = False
            break

    def induced(e: Element) -> Element:
        lift = [0] * m1
        amb2 = k2.coker.lift(e)
        for coeff, u in zip(amb2, k2.ambient_order):
            if coeff:
                vec = image_vector(u)
                lift = [a + coeff * b for a, b in zip(lift, vec)]
        return k1.coker.project(lift)

    generator_correspondence_ok = well_defined and all(
        induced(k2.delta[v]) == k1.delta[v] for v in g.vertices
    )

    cone_prefix_ok = True
    # (a) every tail class is a member of the direct cone
    for tail, (base, j) in tails.items():
        if base in listings:
            prefix = listings[base][:j]
            counts: dict[str, int] = {}
            for w in prefix:
                counts[w] = counts.get(w, 0) + 1
            witness = MembershipWitness(
                base_counts=(),
                family_uses=(
                    FamilyUse(
                        emitter=base, count=1, target_counts=tuple(sorted(counts.items()))
                    ),
                ),
            )
            target = k1.delta[base]
            for w, c in counts.items():
                target = k1.coker.subtract(target, k1.coker.scale(c, k1.delta[w]))
        else:
            witness = MembershipWitness(base_counts=((base, 1),), family_uses=())
            target = k1.delta[base]
        if not witness_is_valid(k1, witness) or evaluate_witness(k1, witness) != target:
            cone_prefix_ok = False
        if generator_correspondence_ok and induced(k2.delta[tail]) != target:
            cone_prefix_ok = False
    # (b) every family element supported on the listing prefix is a member of
    # the extended cone: unwind the tail relations into an explicit witness
    for base, listing in listings.items():
        prefix = listing[:depth]
        distinct: dict[str, int] = {}
        for w in prefix:
            distinct[w] = distinct.get(w, 0) + 1
        names = sorted(distinct)
        last_tail = next(
            t for t, (b, j) in tails.items() if b == base and j == depth
        )
        for counts in product(*(range(distinct[w] + 1) for w in names)):
            if not any(counts):
                continue
            chosen = dict(zip(names, counts))
            # the element [base] - sum of chosen targets, in the extended group
            vec = [0] * len(k2.ambient_order)
            vec[k2.ambient_index(base)] += 1
            for w, c in chosen.items():
                vec[k2.ambient_index(w)] -= c
            element = k2.coker.project(vec)
            leftover: dict[str, int] = {last_tail: 1}
            for w, total in distinct.items():
                leftover[w] = leftover.get(w, 0) + total - chosen[w]
            witness = MembershipWitness(
                base_counts=tuple(sorted((w, c) for w, c in leftover.items() if c)),
                family_uses=(),
            )
            if not witness_is_valid(k2, witness) or evaluate_witness(k2, witness) != element:
                cone_prefix_ok = False

    return ConsistencyReport(
        groups_match=groups_match,
        generator_correspondence_ok=generator_correspondence_ok,
        cone_prefix_ok=cone_prefix_ok,
    )

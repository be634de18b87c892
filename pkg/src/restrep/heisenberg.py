"""Explicit computations for u of the 3-dimensional nilpotent family, p odd.

Two independent constructions of the modules V_r = A/Ax^r are diffed
entrywise: the generic induction through A ⊗_{k[x]/x^p} J_r, and the
explicit block matrices (the M/F/L_r/O_r family) transcribed from their
published displays.  The index conventions of those displays are subtle
(three different arrow directions), so a single-path build could
silently transpose a block; the cross-check rules that out.

The rank table compares computed ranks of L_r + O_r and its square
against the published closed forms and flags mismatches; the count
certificate compares the number of 1-blocks on both sides of the
restriction identity for the twisted module and certifies they differ.

Also here: the wild-abelian isotropy scenarios (the two dimensional
case, the three generator p = 2 case, equal and mixed prime-power
bounds), each producing a verified point-fixing automorphism whose
twisted induced module restricts neither trivially nor freely.
"""

import numpy as np

from .algebra import (AlgebraError, AlgebraMorphism, build_abelian_restricted,
                      build_heisenberg, build_truncated_polynomial)
from .fields import field
from .hopf import named_structure
from .matrices import Matrix, _INT, JordanType, nilpotent_jordan_type
from .modules import (Representation, RepresentationError, direct_sum,
                      hom_from_cyclic, hom_space_from_sum, induce,
                      induce_trivial, iso_test, jordan_block_module,
                      pbw_cosets, tensor, twist_module)
from .pipoints import PointFamily, is_isotropy


class CrossCheckFailed(RepresentationError):
    pass


class HypothesisNotMet(RepresentationError):
    pass


# -- the explicit block matrices --------------------------------------------------


def block_M(F):
    """p x p blocks of size p: block (i-1, i) = i·N_p for i = 1..p-1."""
    p = F.p
    N = Matrix.jordan_block(F, p).a
    m = np.zeros((p * p, p * p), dtype=_INT)
    for i in range(1, p):
        m[(i - 1) * p:i * p, i * p:(i + 1) * p] = F.MUL[i % F.q, N]
    return Matrix(F, m, copy=False)


def block_E(F):
    """Single 1 in the top right corner."""
    p = F.p
    m = np.zeros((p, p), dtype=_INT)
    m[0, p - 1] = 1
    return Matrix(F, m, copy=False)


def block_F(F):
    """p x p blocks of size p: E in block (p-1, 0)."""
    p = F.p
    m = np.zeros((p * p, p * p), dtype=_INT)
    m[(p - 1) * p, p - 1] = 1
    return Matrix(F, m, copy=False)


def block_L(F, r):
    """r x r blocks of size p^2: M on the diagonal, identities above."""
    p = F.p
    d = p * p
    M = block_M(F).a
    m = np.zeros((r * d, r * d), dtype=_INT)
    for b in range(r):
        m[b * d:(b + 1) * d, b * d:(b + 1) * d] = M
        if b + 1 < r:
            m[b * d:(b + 1) * d, (b + 1) * d:(b + 2) * d] = np.eye(d, dtype=_INT)
    return Matrix(F, m, copy=False)


def block_O(F, r):
    """Block diagonal with F blocks: the action of (yz)^{p-1}."""
    p = F.p
    d = p * p
    Fb = block_F(F).a
    m = np.zeros((r * d, r * d), dtype=_INT)
    for b in range(r):
        m[b * d:(b + 1) * d, b * d:(b + 1) * d] = Fb
    return Matrix(F, m, copy=False)


# -- scenario construction -----------------------------------------------------------


def paper_order_permutation(p, r):
    """Permutation from induced order (coset-major) to the display order.

    Induced basis: (coset index i·p + (p-1-j), J_r index m); display
    position: m·p² + i·p + (p-1-j).  The coset enumeration inherits the
    algebra's basis order, which already sorts the x-degree-0 monomials
    by (i ascending, j descending).
    """
    d = r * p * p
    perm = np.zeros(d, dtype=np.int64)
    for ci in range(p * p):
        for m in range(r):
            perm[m * p * p + ci] = ci * r + m
    return perm


class HeisenbergScenario:
    """All data for one (p, r): algebra, automorphism, module, matrices."""

    def __init__(self, p, r):
        if p == 2 or not (1 <= r <= p):
            raise RepresentationError("need p odd prime and 1 <= r <= p")
        self.p, self.r = p, r
        self.F = field(p)
        self.algebra = build_heisenberg(self.F)
        A = self.algebra
        y, z, x = A.generator("y"), A.generator("z"), A.generator("x")
        self.yz_term = A.multiply(y, z).pow(p - 1)
        self.phi = AlgebraMorphism.from_gen_map(A, {"x": x + self.yz_term})
        self.phi_inv = self.phi.invert()
        self.L = block_L(self.F, r)
        self.O = block_O(self.F, r)
        self.V = self._induced_module()
        self._cross_check()

    def _induced_module(self):
        A = self.algebra
        phi, cosets = pbw_cosets(A, A.generator("x"), prefer="x")
        B = phi.source
        Jr = jordan_block_module(B, self.r)
        raw = induce(Jr, phi, cosets)
        perm = paper_order_permutation(self.p, self.r)
        P = np.zeros((raw.dim, raw.dim), dtype=_INT)
        for new, old in enumerate(perm):
            P[new, old] = 1
        P = Matrix(self.F, P, copy=False)
        Pinv = P.transpose()   # permutation matrix
        rep = Representation(A, [P @ m @ Pinv for m in raw.actions],
                             label=f"V_{self.r}", verify=False)
        rep.cyclic_data = None
        return rep

    def _cross_check(self):
        A = self.algebra
        got_x = self.V.act(A.generator("x"))
        if got_x != self.L:
            raise CrossCheckFailed(f"x action differs from L_{self.r}")
        got_o = self.V.act(self.yz_term)
        if got_o != self.O:
            raise CrossCheckFailed(f"(yz)^(p-1) action differs from O_{self.r}")
        try:
            nilpotent_jordan_type(self.L + self.O)
        except Exception as exc:
            raise CrossCheckFailed("L_r + O_r is not nilpotent") from exc

    def twisted_restriction(self):
        """Jordan type of the module restricted along the moved subalgebra."""
        return nilpotent_jordan_type(self.L + self.O)

    def untwisted_restriction(self):
        return nilpotent_jordan_type(self.L)


def build_scenario(p, r):
    return HeisenbergScenario(p, r)


# -- the published rank formulas (and the computed corrections) ------------------------


def rank_formula(p, r):
    if r == 1:
        return (p - 1) ** 2 + 1
    return r * p * p - 2 * r * p + r * r


def rho_published(p, r):
    """rank((L_r+O_r)^2) as published (wrong for 3 <= r < p; see rank_table)."""
    if r == 1:
        return (p - 2) ** 2
    if r == 2:
        return 2 * p * p - 8 * p + 11
    if r == p:
        return p * p * (p - 2)
    base = r * p * p - 2 * p * r + r * r - 4 * r
    return base if r % 3 == 0 else base + 2


def rho_derived(p, r):
    """rank((L_r+O_r)^2) as computed from the matrices themselves."""
    if r in (1, 2) or r == p:
        return rho_published(p, r)
    return r * p * p - 4 * r * p + 2 * r * r + 2


def tau_published(p, r):
    if r == 1 or r == p:
        return 0
    if r == 2:
        return 3
    base = (2 * p - 4) * r - r * r
    return base if r % 3 == 0 else base + 2


def tau_derived(p, r):
    """Number of 1-blocks in the twisted restriction of V_r, as computed."""
    if r == 1 or r == p:
        return 0
    return 3 if r == 2 else 2


def tau_sum_published(p):
    """2 Σ τ(r) for r = 2..p-1, the published closed forms."""
    return {3: 6, 5: 44, 7: 226}[p]


def tau_sum_derived(p):
    return 4 * p - 6


def rank_table(p, use_scenarios=False):
    """Per-r table of computed ranks against the published forms.

    Mismatches are flagged, not hidden: the published square-rank cases
    for 3 <= r < p disagree with the matrices (both construction paths
    agree with each other), so those rows carry match=False against the
    published value and match=True against the derived one.
    """
    F = field(p)
    rows = []
    for r in range(1, p + 1):
        if use_scenarios:
            sc = build_scenario(p, r)
            L, O = sc.L, sc.O
        else:
            L, O = block_L(F, r), block_O(F, r)
        X = L + O
        X2 = X @ X
        dim = r * p * p
        rank = X.rank()
        rank2 = X2.rank()
        nullity = dim - rank
        tau = dim - 2 * rank + rank2
        rows.append({
            "p": p, "r": r, "dim": dim,
            "rank": rank, "rank_expected": rank_formula(p, r),
            "rank_match": rank == rank_formula(p, r),
            "nullity": nullity, "nullity_expected": dim - rank_formula(p, r),
            "rank_sq": rank2,
            "rho_published": rho_published(p, r),
            "rho_published_match": rank2 == rho_published(p, r),
            "rho_derived": rho_derived(p, r),
            "rho_derived_match": rank2 == rho_derived(p, r),
            "tau": tau,
            "tau_published": tau_published(p, r),
            "tau_published_match": tau == tau_published(p, r),
            "tau_derived": tau_derived(p, r),
            "tau_derived_match": tau == tau_derived(p, r),
        })
    return rows


def expected_L1_partition(p):
    """3J2 + 2J3 + ... + 2J_{p-1} + J_p."""
    parts = [2, 2, 2] + [s for s in range(3, p) for _ in (0, 1)] + [p]
    return JordanType(parts)


def expected_mackey_partition(p):
    """2J1 + 2J2 + ... + 2J_{p-1} + J_p: the untwisted restriction of V_1."""
    parts = [s for s in range(1, p) for _ in (0, 1)] + [p]
    return JordanType(parts)


def cgm_check(p):
    """The count certificate: the twisted restriction identity fails.

    Left side: number of 1-blocks in (V_1 twisted-restriction) squared,
    which is the sum of c_r**2 over r < p for the block multiplicities
    c_r of L_1's restriction (verified against a direct tensor computation
    at p = 3).  Right side: 2 Σ τ(r) for 2 <= r < p from the computed rank
    table.  The certificate is that they differ (legitimacy of both
    sides is re-derived, not assumed).
    """
    F = field(p)
    rows = rank_table(p)
    sc1 = build_scenario(p, 1)
    jt_twisted = sc1.twisted_restriction()
    jt_untwisted = sc1.untwisted_restriction()
    blocks = jt_twisted.blocks()
    left = sum(c * c for s, c in blocks.items() if s < p)
    direct_left = None
    if p == 3:
        # independent route: Jordan type of the twisted restriction squared
        MF = (sc1.L + sc1.O)
        T = MF.kron(Matrix.identity(F, p * p)) + Matrix.identity(F, p * p).kron(MF)
        direct_left = nilpotent_jordan_type(T).multiplicity(1)
    right = 2 * sum(row["tau"] for row in rows if 2 <= row["r"] <= p - 1)
    # membership of the automorphism in the point's isotropy group: the
    # twisted restriction keeps a 2-block, hence stays non-free, hence the
    # moved point still supports V_1 (whose support is the single x-line).
    sc_support = heis_support_scan(p)
    report = {
        "p": p,
        "left_one_blocks": left,
        "left_formula": 9 + 4 * (p - 3),
        "left_matches_formula": left == 9 + 4 * (p - 3),
        "direct_left_p3": direct_left,
        "right_twice_tau_sum": right,
        "right_published": tau_sum_published(p),
        "right_matches_published": right == tau_sum_published(p),
        "right_derived": tau_sum_derived(p),
        "right_matches_derived": right == tau_sum_derived(p),
        "identity_fails": left != right,
        "twisted_restriction": str(jt_twisted),
        "twisted_matches_expected": jt_twisted == expected_L1_partition(p),
        "untwisted_restriction": str(jt_untwisted),
        "untwisted_matches_mackey": jt_untwisted == expected_mackey_partition(p),
        "twisted_has_2_block": jt_twisted.multiplicity(2) > 0,
        "twisted_not_free": not jt_twisted.is_free(p),
        "isotropy_argument": (jt_twisted.multiplicity(2) > 0
                              and sc_support["support_is_x_line"]),
        "V1_support_scan": sc_support,
    }
    return report


def heis_support_scan(p):
    """Restriction Jordan types of V_1 along every direction over GF(p).

    Confirms the support of V_1 is exactly the x-line: the z and y
    directions (and every other one) restrict freely.  Flatness of the
    scan family is verified exhaustively at p = 3 and on the point that
    matters (plus the regular-module check being a theorem for the
    nullcone directions) at larger p, to stay inside the time budget.
    """
    sc = build_scenario(p, 1)
    A, V = sc.algebra, sc.V
    fam = PointFamily(A, ext_degree=1, check_flat=(p <= 3))
    if p > 3:
        from .pipoints import PiPoint
        PiPoint(A, A.generator("x"), coords=(0, 0, 1), check_flat=True)
    detected = []
    z_free = y_free = None
    for pt in fam:
        jt = pt.restriction_jordan(V)
        if not jt.is_free(p):
            detected.append(pt.label)
        if pt.coords == (0, 1, 0):
            z_free = jt.is_free(p)
        if pt.coords == (1, 0, 0):
            y_free = jt.is_free(p)
    x_label = "[0:0:1]"
    return {"detected": detected, "support_is_x_line": detected == [x_label],
            "z_direction_free": z_free, "y_direction_free": y_free}


def index_scaling_check(p=3):
    """The two-parameter family consistency check at n = 2.

    Induction up the central inclusion multiplies every restriction
    multiplicity by the index p²; the restriction of the induced V_1
    over the 5-dimensional family is checked against p² times the
    Mackey partition of the n = 1 case.
    """
    F = field(p)
    H2 = build_heisenberg(F, 2)
    x1 = H2.generator("x1")
    V = induce_trivial(H2, x1, label="V_1(n=2)", prefer="x1")
    jt = nilpotent_jordan_type(V.act(x1))
    scale = p * p
    base = expected_mackey_partition(p).blocks()
    expected = JordanType([s for s, c in base.items() for _ in range(scale * c)])
    return {"p": p, "n": 2, "restriction": str(jt),
            "expected": str(expected), "match": jt == expected}


# -- wild abelian isotropies -----------------------------------------------------------


def _neither_trivial_nor_free(jt, bound):
    return (not jt.is_free(bound)) and any(s > 1 for s in jt.parts)


def wild_abelian_isotropy_check(case, p=None, n=None, m=None):
    """Build the named automorphism, verify it fixes the point, and certify
    that the twisted induced module restricts neither trivially nor freely.

    Cases: twodim (p > 2), klein3gen (p = 2), mixed(n, m) for odd p with
    n = m, and equal2power(n) at p = 2.  HypothesisNotMet when the
    certificate fails (e.g. p = 2 mixed bounds, where the twisted
    restriction comes out free).
    """
    if case == "twodim":
        p = p or 3
        if p == 2:
            return {"case": case, "p": 2, "applicable": False,
                    "note": "no PA violation at p=2 (the construction needs p > 2)"}
        F = field(p)
        A = build_truncated_polynomial(F, [p, p])
        x, y = A.generators()
        phi = AlgebraMorphism.from_gen_map(A, {"y": y + x.pow(2)})
        fam = PointFamily(A, ext_degree=1)
        pt = fam.point((0, 1))
        fixed = is_isotropy(phi, pt, fam)
        M = induce_trivial(A, y, label="M")
        M_tw = twist_module(M, phi.invert())
        jt = nilpotent_jordan_type(M_tw.act(y))
        # tensor-square identity holds untwisted and fails twisted
        lie = named_structure(A, "lie_primitive")
        T = tensor(M, M, lie)
        pM = direct_sum([M] * p)
        iso = iso_test(T, pM,
                       hom_fwd=lambda: hom_space_from_sum([M] * p, T,
                                                          lambda part, N: hom_from_cyclic(part, N)),
                       hom_rev=lambda: hom_from_cyclic_sum_rev(T, M, p))
        T_tw = tensor(M_tw, M_tw, lie)
        jt_ttw = nilpotent_jordan_type(T_tw.act(y))
        jt_sum = nilpotent_jordan_type(direct_sum([M_tw] * p).act(y))
        report = {
            "case": case, "p": p, "applicable": True,
            "isotropy_fixed_point": fixed,
            "restriction": str(jt),
            "max_part": jt.max_part,
            "max_part_expected": (p + 1) // 2,
            "tensor_square_untwisted_splits": iso.verdict == "isomorphic",
            "twisted_square_restriction": str(jt_ttw),
            "twisted_square_has_full_block": jt_ttw.multiplicity(p) > 0,
            "sum_restriction": str(jt_sum),
            "sum_lacks_full_block": jt_sum.multiplicity(p) == 0,
            "hypothesis_met": fixed and _neither_trivial_nor_free(jt, p),
        }
        report["pa_violation_certified"] = (
            report["twisted_square_has_full_block"] and report["sum_lacks_full_block"])
        if not report["hypothesis_met"]:
            raise HypothesisNotMet(str(report))
        return report

    if case == "klein3gen":
        F = field(2)
        A = build_abelian_restricted(F, [1, 1, 1])
        x, y, z = A.generators()
        phi = AlgebraMorphism.from_gen_map(A, {"x": x + A.multiply(y, z)})
        fam = PointFamily(A, ext_degree=1)
        pt = fam.point((1, 0, 0))
        fixed = is_isotropy(phi, pt, fam)
        V = induce_trivial(A, x, label="V")
        V_tw = twist_module(V, phi.invert())
        jt = nilpotent_jordan_type(V_tw.act(x))
        report = {"case": case, "p": 2, "applicable": True,
                  "isotropy_fixed_point": fixed,
                  "restriction": str(jt),
                  "has_J2": jt.multiplicity(2) > 0,
                  "hypothesis_met": fixed and _neither_trivial_nor_free(jt, 2)}
        if not report["hypothesis_met"]:
            raise HypothesisNotMet(str(report))
        return report

    if case == "mixed":
        p = p or 3
        n, m = n or 2, m or 2
        F = field(p)
        A = build_abelian_restricted(F, [n, m])
        x, y = A.generators()
        try:
            phi = AlgebraMorphism.from_gen_map(A, {"x": x + y.pow(2)})
        except AlgebraError as exc:
            raise HypothesisNotMet(
                f"x ↦ x + y² is not an automorphism of bounds (p^{n}, p^{m}): {exc}")
        fam = PointFamily(A, ext_degree=1)
        pt = fam.point((1, 0))
        fixed = is_isotropy(phi, pt, fam)
        t_img = x.pow(p ** (n - 1))
        V = induce_trivial(A, t_img, label="V")
        V_tw = twist_module(V, phi.invert())
        jt = nilpotent_jordan_type(V_tw.act(t_img))
        report = {"case": case, "p": p, "n": n, "m": m, "applicable": True,
                  "isotropy_fixed_point": fixed,
                  "restriction": str(jt),
                  "intermediate_part": jt.has_part_strictly_between(1, p),
                  "hypothesis_met": fixed and _neither_trivial_nor_free(jt, p)}
        if not report["hypothesis_met"]:
            raise HypothesisNotMet(str(report))
        return report

    if case == "equal2power":
        n = n or 2
        if n < 2:
            raise HypothesisNotMet("need n >= 2 for the equal two-power case")
        F = field(2)
        A = build_abelian_restricted(F, [n, n])
        x, y = A.generators()
        shift = 2 ** n - 2
        phi = AlgebraMorphism.from_gen_map(A, {"x": x + y.pow(shift)})
        fam = PointFamily(A, ext_degree=1)
        pt = fam.point((1, 0))
        fixed = is_isotropy(phi, pt, fam)
        V = induce_trivial(A, x, r=n, label="V")
        V_tw = twist_module(V, phi.invert())
        jt = nilpotent_jordan_type(V_tw.act(x))
        bound = 2 ** n
        report = {"case": case, "p": 2, "n": n, "applicable": True,
                  "isotropy_fixed_point": fixed,
                  "shift_exponent": shift,
                  "restriction": str(jt),
                  "J2_count": jt.multiplicity(2),
                  "exactly_two_J2": jt.multiplicity(2) == 2,
                  "rest_are_J1": all(s in (1, 2) for s in jt.parts),
                  "intermediate_part": jt.has_part_strictly_between(1, bound),
                  "hypothesis_met": fixed and _neither_trivial_nor_free(jt, bound)}
        if not report["hypothesis_met"]:
            raise HypothesisNotMet(str(report))
        return report

    raise RepresentationError(f"unknown case {case!r}")


def hom_from_cyclic_sum_rev(T, M, copies):
    """Hom(T, ⊕ copies of M) stacked from Hom(T, M) via the cyclic dual trick.

    T and M are modules over the same commutative algebra; Hom(T, M) is
    computed generically when small, else through transposed actions
    (the dual of a cyclic module argument).
    """
    from .modules import hom_space
    base = hom_space(T, M)
    F = M.algebra.field
    out = []
    for i in range(copies):
        for f in base:
            m = np.zeros((copies * M.dim, T.dim), dtype=_INT)
            m[i * M.dim:(i + 1) * M.dim, :] = f.a
            out.append(Matrix(F, m, copy=False))
    return out

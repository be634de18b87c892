"""The p = 2 Klein-case toolkit over k[x,y]/(x², y²).

For a point direction s2 = ax + by and a complementary s1, the family
of even dimensional indecomposables V_2n supported only at that point is
realized by the block matrices

    s1 ↦ [[0, I_n], [0, 0]],     s2 ↦ [[0, N_n], [0, 0]],

with N_n the upper triangular nilpotent block.  Every module supported
at a single point splits as ⊕ a_n V_2n ⊕ cP, and the multiplicities are
recovered exactly from Hom dimensions against the V_2m plus the free
rank, an invertible integer linear system solved over the rationals.

Hom spaces out of a V_2m have a direct description through the chain
presentation (s2·u_1 = 0, s2·u_i = s1·u_{i-1}): solutions are computed
by subspace propagation, which keeps the verification of dimension-64
products inside the time budget while the generic intertwiner solver
backs the H table and the property tests.
"""

from fractions import Fraction

import numpy as np

from .algebra import build_truncated_polynomial
from .fields import field, sampling_extension
from .hopf import named_structure
from .matrices import (Matrix, _INT, full_space, image_space, intersect_spaces,
                       nilpotent_jordan_type, preimage_space)
from .modules import (Representation, RepresentationError, direct_sum,
                      free_rank, hom_from_free, hom_space, regular_module,
                      tensor)
from .pipoints import PointFamily, coord_label, nobility, normalize_coords

WANG_STRUCTURES = ("lie_primitive", "wang_Ga2", "wang_Ga1xZp", "wang_ZpZp")


class KleinError(RepresentationError):
    pass


class DegenerateBasis(KleinError):
    pass


class PointNotIgnoble(KleinError):
    pass


class SingularSystem(KleinError):
    pass


class VerificationFailed(KleinError):
    pass


class BadSupport(KleinError):
    pass


class BasevModule:
    """One indecomposable V_2n at a point, with its chosen s1, s2."""

    def __init__(self, coords, label, n, rep, s1, s2):
        self.coords = coords
        self.label = label
        self.n = n
        self.rep = rep
        self.s1 = s1
        self.s2 = s2

    @property
    def dim(self):
        return 2 * self.n

    def __repr__(self):
        return f"V_{2 * self.n}({self.label})"


class MultiplicityVector:
    """Green-ring coordinates: a_n copies of V_2n plus c free summands."""

    def __init__(self, a, c):
        self.a = {int(n): int(m) for n, m in a.items() if m}
        self.c = int(c)

    @property
    def dimension(self):
        return sum(2 * n * m for n, m in self.a.items()) + 4 * self.c

    def __eq__(self, other):
        return isinstance(other, MultiplicityVector) and self.a == other.a and self.c == other.c

    def __repr__(self):
        parts = [f"{m}V{2 * n}" if m > 1 else f"V{2 * n}"
                 for n, m in sorted(self.a.items())]
        if self.c:
            parts.append(f"{self.c}P" if self.c > 1 else "P")
        return " + ".join(parts) if parts else "0"

    def to_json(self):
        return {"a": {str(n): m for n, m in sorted(self.a.items())}, "c": self.c}


class KleinContext:
    """Shared algebra, point family, structures and Hom tables over GF(2^e)."""

    def __init__(self, ext_degree=2, cap=8, seed=0, trials=24):
        self.K = field(2, ext_degree)
        self.A = build_truncated_polynomial(self.K, [2, 2])
        self.family = PointFamily(self.A, ext_degree=ext_degree)
        self.P = regular_module(self.A).relabel("P")
        self.cap = cap
        self.seed = seed
        self.trials = trials
        self._structures = {}
        self._hom_table = None

    def structure(self, name):
        hit = self._structures.get(name)
        if hit is None:
            hit = named_structure(self.A, name)
            self._structures[name] = hit
        return hit

    def structures(self):
        return [self.structure(n) for n in WANG_STRUCTURES]

    # -- the indecomposables ---------------------------------------------------

    def basev(self, coords, n, basis_choice=None):
        A, K = self.A, self.K
        coords = normalize_coords(K, coords)
        a, b = coords
        if basis_choice is None:
            basis_choice = (1, 0) if b else (0, 1)   # s1 = x unless the point is [1:0]
        c, d = (int(v) for v in basis_choice)
        det = K.sub(K.mul(c, b), K.mul(d, a))
        if det == 0:
            raise DegenerateBasis("s1 and s2 are linearly dependent")
        x, y = A.generators()
        s1 = c * x + d * y
        s2 = int(a) * x + int(b) * y
        N = Matrix.jordan_block(K, n)
        S1 = np.zeros((2 * n, 2 * n), dtype=_INT)
        S1[:n, n:] = np.eye(n, dtype=_INT)
        S2 = np.zeros((2 * n, 2 * n), dtype=_INT)
        S2[:n, n:] = N.a
        S1, S2 = Matrix(K, S1, copy=False), Matrix(K, S2, copy=False)
        # solve x = alpha s1 + beta s2, y likewise, from the 2x2 coefficient matrix
        coeff = Matrix(K, [[c, int(a)], [d, int(b)]])
        sol = coeff.inverse()
        act_x = S1.scale(int(sol.a[0, 0])) + S2.scale(int(sol.a[1, 0]))
        act_y = S1.scale(int(sol.a[0, 1])) + S2.scale(int(sol.a[1, 1]))
        label = coord_label(K, coords)
        rep = Representation(A, [act_x, act_y], label=f"V{2 * n}({label})")
        return BasevModule(coords, label, n, rep, s1, s2)

    def point_elements(self, coords):
        """The (s1, s2) pair used by the canonical basis at this point."""
        v = self.basev(coords, 1)
        return v.s1, v.s2

    # -- Hom machinery -----------------------------------------------------------

    def _chain_spaces(self, M, coords, depth):
        """D_1 = M, D_{k+1} = X^{-1}(Y·D_k) plus ker Y, for the chain solver."""
        s1, s2 = self.point_elements(coords)
        X, Y = M.act(s1), M.act(s2)
        D = [full_space(self.K, M.dim)]
        for _ in range(depth - 1):
            D.append(preimage_space(X, image_space(Y, D[-1])))
        return X, Y, Y.nullspace(), D

    def basev_hom_dims(self, M, coords, up_to):
        """dim Hom(V_2m, M) for m = 1..up_to, by subspace propagation."""
        X, Y, ker, D = self._chain_spaces(M, coords, up_to)
        t = [intersect_spaces(ker, Dk).cols for Dk in D]
        out = []
        acc = 0
        for m in range(1, up_to + 1):
            acc += t[m - 1]
            out.append(acc)
        return out

    def basev_hom_basis(self, V, M):
        """Explicit basis of Hom(V_2m, M) from the chain presentation.

        A map is a tuple (w_1..w_m) of images of the generators u_i with
        s2 w_1 = 0 and s2 w_i = s1 w_{i-1}; the images of the l_i are
        then s1 w_i.
        """
        m = V.n
        X, Y, ker, D = self._chain_spaces(M, V.coords, m)
        out = []
        for level in range(1, m + 1):
            W = intersect_spaces(ker, D[m - level])
            if W.cols == 0:
                continue
            # extend every starting vector of this level at once
            chains = [Matrix.zeros(self.K, M.dim, W.cols) for _ in range(level - 1)]
            chains.append(W)
            for j in range(level + 1, m + 1):
                Ej = D[m - j]
                targets = X @ chains[-1]
                cvec = (Y @ Ej).solve(targets)
                if cvec is None:
                    raise KleinError("chain extension failed; propagation bug")
                chains.append(Ej @ cvec)
            ximages = [X @ c for c in chains]
            for col in range(W.cols):
                f = np.zeros((M.dim, 2 * m), dtype=_INT)
                for t in range(m):
                    f[:, t] = ximages[t].a[:, col]          # image of l_{t+1}
                    f[:, m + t] = chains[t].a[:, col]       # image of u_{t+1}
                out.append(Matrix(self.K, f, copy=False))
        return out

    GENERIC_H_CAP = 8

    def hom_table(self, cap=None):
        """H[m][n] = dim Hom(V_2m, V_2n) and h[m] = dim Hom(V_2m, P).

        Values are independent of the point; they are computed at the
        reference point [1:0].  Up to GENERIC_H_CAP both the generic
        intertwiner solver and the chain solver are run and must agree;
        beyond that the chain solver extends the table.
        """
        cap = cap or self.cap
        if self._hom_table and self._hom_table[0] >= cap:
            return self._hom_table[1], self._hom_table[2]
        ref = (1, 0)
        vs = [self.basev(ref, n) for n in range(1, cap + 1)]
        H = {m: {} for m in range(1, cap + 1)}
        for n in range(1, cap + 1):
            col = self.basev_hom_dims(vs[n - 1].rep, ref, cap)
            for m in range(1, cap + 1):
                H[m][n] = col[m - 1]
        hcol = self.basev_hom_dims(self.P, ref, cap)
        h = {m: hcol[m - 1] for m in range(1, cap + 1)}
        gcap = min(cap, self.GENERIC_H_CAP)
        for m in range(1, gcap + 1):
            for n in range(1, gcap + 1):
                generic = len(hom_space(vs[m - 1].rep, vs[n - 1].rep))
                if generic != H[m][n]:
                    raise KleinError(
                        f"Hom solvers disagree at ({m},{n}): {generic} vs {H[m][n]}")
            if len(hom_space(vs[m - 1].rep, self.P)) != h[m]:
                raise KleinError(f"Hom solvers disagree at ({m},P)")
        self._hom_table = (cap, H, h)
        return H, h

    def system_matrix(self, cap):
        """The (cap+1) square integer system: Hom rows plus the dimension row."""
        H, h = self.hom_table(cap)
        rows = []
        for m in range(1, cap + 1):
            rows.append([H[m][n] for n in range(1, cap + 1)] + [h[m]])
        rows.append([2 * n for n in range(1, cap + 1)] + [4])
        return rows

    # -- decomposition ----------------------------------------------------------------

    def decompose(self, M, coords, verify_support=True, witness=True):
        """Multiplicities of ⊕ a_n V_2n(point) ⊕ cP isomorphic to M.

        Solves the Hom-dimension system over the rationals, demands a
        nonnegative integral solution, and certifies the rebuild against
        M with an explicit invertible intertwiner.
        """
        coords = normalize_coords(self.K, coords)
        label = coord_label(self.K, coords)
        if verify_support:
            supp = self.family.support(M)
            if not supp.labels <= {label}:
                raise BadSupport(f"support {supp!r} is not inside {{{label}}}")
        cfree = free_rank(M)
        rest = M.dim - 4 * cfree
        if rest < 0 or rest % 2:
            raise VerificationFailed("dimension bookkeeping is impossible")
        cap = max(1, rest // 2)
        rows = self.system_matrix(cap)
        rhs = self.basev_hom_dims(M, coords, cap) + [M.dim]
        sol = _solve_rational(rows, rhs)
        if sol is None:
            raise SingularSystem(f"Hom system singular at cap {cap}")
        counts = []
        for v in sol:
            if v.denominator != 1 or v < 0:
                raise VerificationFailed(f"non-integral multiplicities {sol}")
            counts.append(int(v))
        mv = MultiplicityVector({n: counts[n - 1] for n in range(1, cap + 1)}, counts[-1])
        if mv.dimension != M.dim:
            raise VerificationFailed("dimension mismatch in solution")
        if witness:
            rebuilt, hom_solver = self.rebuild(coords, mv)
            if rebuilt.dim != M.dim:
                raise VerificationFailed("rebuild dimension mismatch")
            if M.dim and not self._certify(rebuilt, M, hom_solver,
                                           trials=self.trials, seed=self.seed):
                raise VerificationFailed("no invertible intertwiner found for rebuild")
        return mv

    def rebuild(self, coords, mv):
        """(⊕ a_n V_2n ⊕ cP, Hom solver) for the multiplicity vector."""
        parts = []
        solvers = []
        for n, m in sorted(mv.a.items()):
            for _ in range(m):
                v = self.basev(coords, n)
                parts.append(v.rep)
                solvers.append(lambda N, v=v: self.basev_hom_basis(v, N))
        for _ in range(mv.c):
            parts.append(self.P)
            solvers.append(lambda N: hom_from_free(self.P, N))
        if not parts:
            raise VerificationFailed("empty rebuild")
        rep = direct_sum(parts, label=f"rebuild({mv!r})")

        def hom_solver(N):
            out = []
            off = 0
            for part, solver in zip(parts, solvers):
                for f in solver(N):
                    m = np.zeros((N.dim, rep.dim), dtype=_INT)
                    m[:, off:off + part.dim] = f.a
                    out.append(Matrix(self.K, m, copy=False))
                off += part.dim
            return out

        return rep, hom_solver

    def _certify(self, R, M, hom_solver, trials=24, seed=0):
        """Find an invertible intertwiner R -> M from the solver's basis."""
        basis = hom_solver(M)
        if not basis:
            return False
        import random
        Kbig = sampling_extension(self.K, M.dim)
        emb = self.K.embedding(Kbig)
        lifted = np.stack([emb[f.a] for f in basis])   # k x dim x dim
        rng = random.Random(seed)
        for _ in range(trials):
            coeffs = np.array([rng.randrange(Kbig.q) for _ in range(len(basis))],
                              dtype=np.int16)
            terms = Kbig.MUL[coeffs[:, None, None], lifted]
            combo = np.bitwise_xor.reduce(terms, axis=0)
            if Matrix(Kbig, combo, copy=False).rank() == M.dim:
                return True
        return False

    # -- the published product checks ------------------------------------------------

    def expected_product(self, n, m):
        lo = min(n, m)
        return MultiplicityVector({lo: 2}, n * m - lo)

    def check_basev_formula(self, structure_name, coords, n, m):
        """Tensor two indecomposables, decompose, compare with the noble formula."""
        delta = self.structure(structure_name) if isinstance(structure_name, str) \
            else structure_name
        coords = normalize_coords(self.K, coords)
        vn = self.basev(coords, n)
        vm = self.basev(coords, m)
        T = tensor(vn.rep, vm.rep, delta)
        noble = nobility(delta, coords, self.family)
        fr = free_rank(T)
        expected = self.expected_product(n, m)
        report = {
            "structure": delta.name, "point": coord_label(self.K, coords),
            "n": n, "m": m, "noble": noble == "noble",
            "expected": repr(expected),
            "free_rank": fr, "free_rank_expected": n * m - min(n, m),
            "free_rank_match": fr == n * m - min(n, m),
            "s2_annihilates_product": T.act(vn.s2).is_zero(),
        }
        try:
            mv = self.decompose(T, coords)
            report["computed"] = repr(mv)
            report["matches_noble_formula"] = (mv == expected)
        except KleinError as exc:
            report["computed"] = f"error: {exc}"
            report["matches_noble_formula"] = False
        # the published formula is asserted at subalgebra points; elsewhere
        # the free part is still pinned and any formula deviation is flagged
        if report["noble"]:
            report["match"] = report["matches_noble_formula"]
            report["deviation_flagged"] = False
        else:
            report["match"] = report["free_rank_match"]
            report["deviation_flagged"] = not report["matches_noble_formula"]
        return report

    def check_pb_witness(self, structure_name, coords):
        """Certify V(p) ⊗_Δ V(p) ≇ V(p) ⊗̃ V(p) at an ignoble point.

        Deterministic: the Lie product is annihilated by s2, the deformed
        product is not, and s2-annihilation is an isomorphism invariant.
        """
        delta = self.structure(structure_name) if isinstance(structure_name, str) \
            else structure_name
        coords = normalize_coords(self.K, coords)
        noble = nobility(delta, coords, self.family)
        if noble != "ignoble":
            raise PointNotIgnoble(f"{coord_label(self.K, coords)} is noble for {delta.name}")
        v = self.basev(coords, 1)
        T_delta = tensor(v.rep, v.rep, delta)
        T_lie = tensor(v.rep, v.rep, self.structure("lie_primitive"))
        deformed_nonzero = not T_delta.act(v.s2).is_zero()
        lie_zero = T_lie.act(v.s2).is_zero()
        return {
            "structure": delta.name, "point": coord_label(self.K, coords),
            "deformed_s2_action_nonzero": deformed_nonzero,
            "lie_s2_action_zero": lie_zero,
            "witness_found": deformed_nonzero and lie_zero,
        }


def _solve_rational(rows, rhs):
    """Exact solve of a square integer system over Q; None when singular."""
    n = len(rows)
    aug = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]

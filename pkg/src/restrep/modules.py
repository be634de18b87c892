"""Module representations as tuples of generator action matrices.

A representation is verified against the algebra's defining relations at
construction (and tensor products are re-verified), so a bad coproduct
extension or induction table fails immediately instead of corrupting a
scenario downstream.

The isomorphism oracle is randomized with an explicit witness: negative
answers come from deterministic fingerprints (dimension, Jordan type of
each generator action, socle rank, Hom dimensions both ways), positive
answers from an invertible random combination of a Hom-space basis over
an extension field, and the inconclusive case reports the failure bound
(dim/q)^trials.
"""

import random

import numpy as np

from .algebra import AlgebraError, AlgebraMorphism, base_change
from .fields import sampling_extension
from .matrices import Matrix, _INT, nilpotent_jordan_type

HOM_UNKNOWN_LIMIT = 40_000   # max unknown count for the generic intertwiner solve


class RepresentationError(AlgebraError):
    pass


class AlgebraMismatch(RepresentationError):
    pass


class NotFreeBasis(RepresentationError):
    pass


class NoIntegral(RepresentationError):
    pass


class HomTooLarge(RepresentationError):
    pass


class Representation:
    """An algebra module given by one action matrix per generator."""

    def __init__(self, algebra, actions, label="", verify=True, summands=None):
        self.algebra = algebra
        self.actions = list(actions)
        if not self.actions:
            raise RepresentationError("need one action per generator")
        self.dim = self.actions[0].rows
        for m in self.actions:
            if m.shape != (self.dim, self.dim) or m.field != algebra.field:
                raise RepresentationError("action matrices must be square over the base field")
        if len(self.actions) != len(algebra.gen_names):
            raise RepresentationError("one action per generator required")
        self.label = label
        self.summands = summands   # optional list of (Representation, offset)
        self._act_cache = {}
        if verify:
            self.verify_relations()

    def verify_relations(self):
        if self.dim == 0:
            return
        self.algebra.check_relations(
            self.actions,
            mul=lambda a, b: a @ b,
            is_zero=lambda m: m.is_zero(),
            eq=lambda a, b: a == b)

    # -- evaluation -------------------------------------------------------------

    def act_monomial(self, i):
        hit = self._act_cache.get(i)
        if hit is not None:
            return hit
        out = Matrix.identity(self.algebra.field, self.dim)
        for g, e in enumerate(self.algebra.basis_exps[i]):
            if e:
                out = out @ self.actions[g].pow(e)
        self._act_cache[i] = out
        return out

    def act(self, a):
        """Action matrix of an arbitrary algebra element."""
        if a.algebra != self.algebra:
            raise AlgebraMismatch("element belongs to another algebra")
        out = Matrix.zeros(self.algebra.field, self.dim)
        for i in a.support():
            out = out + self.act_monomial(i).scale(int(a.vec[i]))
        return out

    def generator_action(self, name):
        return self.actions[self.algebra.gen_names.index(name)]

    def jordan_of(self, a):
        return nilpotent_jordan_type(self.act(a))

    def __repr__(self):
        return f"Rep({self.label or '?'}, dim={self.dim} over {self.algebra!r})"

    def relabel(self, label):
        self.label = label
        return self

    def to_json(self):
        return {"algebra": self.algebra.to_json(), "dim": self.dim,
                "label": self.label,
                "actions": [m.to_json()["entries"] for m in self.actions]}


# -- constructors -----------------------------------------------------------------


def trivial_module(A):
    """The one dimensional module through the counit (all generators act 0)."""
    z = Matrix.zeros(A.field, 1)
    return Representation(A, [z.copy() for _ in A.gen_names], label="k")


def regular_module(A):
    """A as a left module over itself."""
    return Representation(A, [A.left_mult_matrix(g) for g in A.generators()],
                          label="A")


def jordan_block_module(A, i):
    """The i dimensional module over a one generator algebra k[t]/t^b.

    Basis (t^{i-1}v, ..., tv, v); the generator acts by the upper
    triangular nilpotent block.
    """
    if len(A.gen_names) != 1:
        raise RepresentationError("Jordan block modules need a one generator algebra")
    if not (1 <= i <= A.bounds[0]):
        raise RepresentationError(f"block size {i} out of range 1..{A.bounds[0]}")
    return Representation(A, [Matrix.jordan_block(A.field, i)], label=f"J{i}")


def direct_sum(reps, label=None):
    if not reps:
        raise RepresentationError("empty direct sum")
    A = reps[0].algebra
    F = A.field
    dim = sum(r.dim for r in reps)
    actions = []
    for g in range(len(A.gen_names)):
        m = np.zeros((dim, dim), dtype=_INT)
        off = 0
        for r in reps:
            if r.algebra != A:
                raise AlgebraMismatch("direct sum over mixed algebras")
            m[off:off + r.dim, off:off + r.dim] = r.actions[g].a
            off += r.dim
        actions.append(Matrix(F, m, copy=False))
    offs, off = [], 0
    for r in reps:
        offs.append((r, off))
        off += r.dim
    lab = label or ("+".join(r.label or "?" for r in reps))
    return Representation(A, actions, label=lab, verify=False, summands=offs)


def conjugate(M, S):
    """The same module in a new basis: actions S ρ S⁻¹."""
    Sinv = S.inverse()
    return Representation(M.algebra, [S @ a @ Sinv for a in M.actions],
                          label=f"{M.label}^conj", verify=False)


def base_change_rep(M, big_field):
    B = base_change(M.algebra, big_field)
    return Representation(B, [m.map_field(big_field) for m in M.actions],
                          label=M.label, verify=False)


# -- the tensor, restriction, induction, twist operations ---------------------------


def tensor(M, N, delta, verify=True):
    """M ⊗ N with the action through the comultiplication ``delta``."""
    if M.algebra != N.algebra or delta.algebra != M.algebra:
        raise AlgebraMismatch("tensor factors over different algebras")
    F = M.algebra.field
    dim = M.dim * N.dim
    actions = []
    for g in range(len(M.algebra.gen_names)):
        acc = Matrix.zeros(F, dim)
        for c, i, j in delta.generator_terms(g):
            term = M.act_monomial(i).kron(N.act_monomial(j))
            acc = acc + term.scale(c)
        actions.append(acc)
    return Representation(M.algebra, actions,
                          label=f"({M.label})⊗({N.label})", verify=verify)


def restrict(M, phi):
    """Pull back along an algebra map phi: B -> A; generators of B act by phi images."""
    if phi.target != M.algebra:
        raise AlgebraMismatch("restriction map does not land in the module's algebra")
    actions = [M.act(im) for im in phi.images]
    return Representation(phi.source, actions, label=f"{M.label}↓", verify=True)


def twist_module(M, phi):
    """Base change along an automorphism: g acts by the action of φ⁻¹(g)."""
    phi_inv = phi.invert()
    actions = [M.act(im) for im in phi_inv.images]
    out = Representation(M.algebra, actions, label=f"{M.label}^φ", verify=True)
    if getattr(M, "cyclic_data", None) is not None:
        image, cosets = M.cyclic_data
        out.cyclic_data = (phi_inv.apply(image), [phi_inv.apply(c) for c in cosets])
    return out


_INDUCTION_TABLES = {}


def _induction_table(phi, cosets):
    """Re-expression data g·c_i = Σ c_j φ(b) for an induction, cached.

    Returns, per generator, the r x r array of B-elements (as coefficient
    rows) describing the action on cosets.
    """
    B, A = phi.source, phi.target
    F = A.field
    r, dB = len(cosets), B.dim
    key = (id(A), id(B),
           tuple(im.vec.tobytes() for im in phi.images),
           tuple(c.vec.tobytes() for c in cosets))
    hit = _INDUCTION_TABLES.get(key)
    if hit is not None:
        return hit
    cols = []
    phi_basis = [phi.apply(B.monomial(B.basis_exps[j])) for j in range(dB)]
    for c in cosets:
        for j in range(dB):
            cols.append(A.multiply(c, phi_basis[j]).vec)
    E = Matrix(F, np.array(cols, dtype=_INT).T, copy=False)
    try:
        Einv = E.inverse()
    except Exception as exc:
        raise NotFreeBasis("coset elements do not give a free basis") from exc
    per_gen = []
    for g in range(len(A.gen_names)):
        gen = A.generator(g)
        moved = np.zeros((A.dim, r), dtype=_INT)
        for ci, c in enumerate(cosets):
            moved[:, ci] = A.multiply(gen, c).vec
        w = (Einv @ Matrix(F, moved, copy=False)).a   # (r*dB) x r
        per_gen.append(w.reshape(r, dB, r))           # [cj, b, ci]
    _INDUCTION_TABLES[key] = per_gen
    return per_gen


def induce(M, phi, cosets):
    """A ⊗_B M for an embedding phi: B -> A, free on the given coset elements.

    ``cosets`` are elements of A such that the c_i · φ(b_j) form a basis
    of A; verified by inverting that matrix (NotFreeBasis otherwise).
    Basis of the result: coset-major pairs (c_i, m_k).
    """
    B, A = phi.source, phi.target
    if M.algebra != B:
        raise AlgebraMismatch("module is not over the source of the embedding")
    F = A.field
    r, dB = len(cosets), B.dim
    if r * dB != A.dim:
        raise NotFreeBasis(f"{r} cosets x dim {dB} != dim {A.dim}")
    per_gen = _induction_table(phi, cosets)
    dim = r * M.dim
    actions = []
    for g in range(len(A.gen_names)):
        w = per_gen[g]
        T = np.zeros((dim, dim), dtype=_INT)
        for ci in range(r):
            for cj in range(r):
                if not w[cj, :, ci].any():
                    continue
                blk = M.act(B.element(w[cj, :, ci]))
                T[cj * M.dim:(cj + 1) * M.dim, ci * M.dim:(ci + 1) * M.dim] = blk.a
        actions.append(Matrix(F, T, copy=False))
    return Representation(A, actions, label=f"{M.label}↑", verify=True)


def pbw_cosets(A, image, r=1, prefer=None):
    """Coset monomials making A free over the image of k[t]/t^{p^r}, t ↦ image.

    Tries, in generator order (``prefer`` first if given), the monomials
    with that generator's exponent below bound/p^r; the first choice for
    which the expansion matrix is invertible wins.  NotFreeBasis if none
    works.
    """
    F = A.field
    pr = F.p ** r
    B = _cyclic_algebra(F, pr)
    phi = AlgebraMorphism(B, A, [image])
    order = list(range(len(A.bounds)))
    if prefer is not None:
        if isinstance(prefer, str):
            prefer = A.gen_names.index(prefer)
        order.remove(prefer)
        order.insert(0, prefer)
    for g in order:
        bound = A.bounds[g]
        if bound % pr:
            continue
        cap = bound // pr
        cosets = [A.monomial(e) for e in A.basis_exps if e[g] < cap]
        if len(cosets) * pr != A.dim:
            continue
        cols = []
        phi_basis = [phi.apply(B.monomial(B.basis_exps[j])) for j in range(B.dim)]
        for c in cosets:
            for pb in phi_basis:
                cols.append(A.multiply(c, pb).vec)
        E = Matrix(F, np.array(cols, dtype=_INT).T, copy=False)
        if E.rank() == A.dim:
            return phi, cosets
    raise NotFreeBasis("no PBW complement found for this image")


def _cyclic_algebra(F, bound):
    from .algebra import build_truncated_polynomial
    return build_truncated_polynomial(F, [bound], names=("t",))


def induce_trivial(A, image, r=1, label=None, prefer=None):
    """The induced module of the trivial module along t ↦ image.

    The result is cyclic, generated by the identity coset; the image and
    coset elements are kept (``cyclic_data``) for the closed-form Hom
    description used by the fast iso paths.
    """
    phi, cosets = pbw_cosets(A, image, r, prefer=prefer)
    M = induce(trivial_module(phi.source), phi, cosets)
    if label:
        M.label = label
    M.cyclic_data = (image, cosets)
    return M


def hom_from_cyclic(M, N):
    """Hom(M, N) for a cyclic module M = A·v with annihilator A·image.

    A map is determined by the image w of the generator, subject only to
    image·w = 0; the basis is enumerated from the kernel of the image's
    action on N.
    """
    image, cosets = M.cyclic_data
    ker = N.act(image).nullspace()
    out = []
    for c in range(ker.cols):
        w = Matrix(N.algebra.field, ker.a[:, c].reshape(-1, 1))
        cols = [(N.act(ce) @ w).a[:, 0] for ce in cosets]
        out.append(Matrix(N.algebra.field, np.array(cols, dtype=_INT).T))
    return out


# -- Hom spaces and the isomorphism oracle ---------------------------------------------


def hom_space(M, N, limit=HOM_UNKNOWN_LIMIT):
    """Basis of the intertwiner space {F : F ρ_M(g) = ρ_N(g) F for all g}."""
    if M.algebra != N.algebra:
        raise AlgebraMismatch("Hom between modules over different algebras")
    F = M.algebra.field
    n_unknown = M.dim * N.dim
    if M.dim == 0 or N.dim == 0:
        return []
    if n_unknown > limit:
        raise HomTooLarge(f"{n_unknown} unknowns exceed the generic solver limit")
    blocks = []
    Im = Matrix.identity(F, M.dim)
    In = Matrix.identity(F, N.dim)
    for g in range(len(M.algebra.gen_names)):
        A_g = N.actions[g]
        B_g = M.actions[g]
        blocks.append((A_g.kron(Im) - In.kron(B_g.transpose())).a)
    big = Matrix(F, np.vstack(blocks), copy=False)
    ker = big.nullspace()
    out = []
    for c in range(ker.cols):
        out.append(Matrix(F, ker.a[:, c].reshape(N.dim, M.dim)))
    return out


def dim_hom(M, N, limit=HOM_UNKNOWN_LIMIT):
    return len(hom_space(M, N, limit=limit))


def hom_space_from_sum(parts, N, solver):
    """Hom(⊕ parts, N) assembled blockwise from a per-summand solver."""
    total = sum(r.dim for r in parts)
    F = N.algebra.field
    out = []
    off = 0
    for r in parts:
        for f in solver(r, N):
            m = np.zeros((N.dim, total), dtype=_INT)
            m[:, off:off + r.dim] = f.a
            out.append(Matrix(F, m, copy=False))
        off += r.dim
    return out


def hom_from_free(P, N):
    """Hom(A, N) ≅ N: the map sending 1 to w sends each basis monomial b to b·w."""
    A = N.algebra
    if P.dim != A.dim:
        raise RepresentationError("free summand has wrong dimension")
    out = []
    for w in range(N.dim):
        cols = []
        for i in range(A.dim):
            cols.append(N.act_monomial(i).a[:, w])
        out.append(Matrix(N.algebra.field, np.array(cols, dtype=_INT).T))
    return out


class IsoReport:
    def __init__(self, verdict, witness=None, reason="", fingerprints=None,
                 trials=0, bound=None):
        self.verdict = verdict          # "isomorphic" | "not_isomorphic" | "probably_not"
        self.witness = witness
        self.reason = reason
        self.fingerprints = fingerprints or {}
        self.trials = trials
        self.bound = bound

    def __bool__(self):
        return self.verdict == "isomorphic"

    def __repr__(self):
        extra = f", reason={self.reason}" if self.reason else ""
        return f"IsoReport({self.verdict}{extra})"

    def to_json(self):
        return {"verdict": self.verdict,
                "witness": self.witness.to_json() if self.witness else None,
                "reason": self.reason,
                "fingerprints": {k: str(v) for k, v in self.fingerprints.items()},
                "trials": self.trials,
                "bound": self.bound}


def _fingerprints(M):
    fp = {"dim": M.dim}
    for g, name in enumerate(M.algebra.gen_names):
        fp[f"jordan:{name}"] = nilpotent_jordan_type(M.actions[g])
    fp["socle_rank"] = free_rank(M)
    return fp


def iso_test(M, N, trials=24, ext_field=None, seed=0, hom_fwd=None, hom_rev=None):
    """Randomized isomorphism oracle with deterministic fingerprint pre-pass.

    ``hom_fwd``/``hom_rev`` optionally supply Hom(M,N) and Hom(N,M) bases
    (used for structured modules whose intertwiner spaces have a direct
    description); otherwise the generic solver runs.
    """
    if M.algebra != N.algebra:
        raise AlgebraMismatch("iso test across different algebras")
    if M.dim != N.dim:
        return IsoReport("not_isomorphic", reason="dimension",
                         fingerprints={"dim_M": M.dim, "dim_N": N.dim})
    if M.dim == 0:
        return IsoReport("isomorphic", witness=Matrix.zeros(M.algebra.field, 0, 0))
    fpM, fpN = _fingerprints(M), _fingerprints(N)
    for key in fpM:
        if fpM[key] != fpN[key]:
            return IsoReport("not_isomorphic", reason=f"fingerprint {key}",
                             fingerprints={f"M {key}": fpM[key], f"N {key}": fpN[key]})
    fwd = hom_fwd() if hom_fwd is not None else hom_space(M, N)
    rev = hom_rev() if hom_rev is not None else hom_space(N, M)
    if len(fwd) != len(rev):
        return IsoReport("not_isomorphic", reason="hom dimensions differ",
                         fingerprints={"dim Hom(M,N)": len(fwd), "dim Hom(N,M)": len(rev)})
    if not fwd:
        return IsoReport("not_isomorphic", reason="Hom(M,N) = 0", fingerprints=fpM)
    base = M.algebra.field
    K = ext_field or sampling_extension(base, M.dim)
    lifted = [f.map_field(K) for f in fwd]
    rng = random.Random(seed)
    for t in range(trials):
        combo = Matrix.zeros(K, M.dim, M.dim)
        for f in lifted:
            c = rng.randrange(K.q)
            if c:
                combo = combo + f.scale(c)
        if combo.rank() == M.dim:
            return IsoReport("isomorphic", witness=combo, fingerprints=fpM,
                             trials=t + 1)
    bound = (M.dim / K.q) ** trials
    return IsoReport("probably_not", reason="no invertible combination found",
                     fingerprints=fpM, trials=trials, bound=bound)


def free_rank(M):
    """Multiplicity of the free module among the direct summands of M.

    Equals the rank of the action of the socle integral (the algebra is
    local, so free = projective = injective here).
    """
    A = M.algebra
    if A.integral_index is None:
        raise NoIntegral("algebra has no recorded integral")
    return M.act(A.integral()).rank()


def rep_from_json(data, algebra=None):
    from .algebra import build_truncated_polynomial, build_heisenberg
    from .fields import field_from_json
    if algebra is None:
        adata = data["algebra"]
        F = field_from_json(adata["field"])
        if adata["kind"] == "truncated_poly":
            algebra = build_truncated_polynomial(
                F, [g["bound"] for g in adata["generators"]],
                names=tuple(g["name"] for g in adata["generators"]))
        elif adata["kind"] == "heisenberg":
            algebra = build_heisenberg(F, adata.get("n", 1))
        else:
            raise RepresentationError("unknown algebra kind in JSON")
    F = algebra.field
    actions = []
    for entries in data["actions"]:
        rows = [[F.from_coeffs(cell) for cell in row] for row in entries]
        actions.append(Matrix(F, rows))
    return Representation(algebra, actions, label=data.get("label", ""))

"""Flat points t ↦ a of the algebras, their support theory, and nobility.

A point is a flat map K[t]/t^p -> A_K recorded by the image of t; a
family enumerates representatives of the projective space of top-slice
directions over a chosen extension GF(p^e) (the stand-in for the
algebraic closure; every claim exercised here is rational over e = 2).

Support of a module is the set of family points whose restriction is
not free; equivalence and the automorphism action on points are decided
through singleton-support test modules, the one-module trick that makes
the equivalence relation computable in coordinates.
"""

import numpy as np

from .algebra import (AlgebraError, base_change, morphism_to_field)
from .fields import field
from .matrices import nilpotent_jordan_type
from .modules import base_change_rep, induce_trivial


class PointError(AlgebraError):
    pass


class NotFlat(PointError):
    pass


class BadTestModule(PointError):
    pass


class UnknownStructure(PointError):
    pass


def normalize_coords(F, coords):
    """Scale so the last nonzero coordinate is 1."""
    coords = tuple(int(c) for c in coords)
    last = None
    for i in reversed(range(len(coords))):
        if coords[i]:
            last = i
            break
    if last is None:
        raise PointError("coordinates must not all vanish")
    inv = F.inv(coords[last])
    return tuple(F.mul(inv, c) for c in coords)


def coord_label(F, coords):
    return "[" + ":".join(F.fmt(c) for c in coords) + "]"


class PiPoint:
    """A flat map t ↦ image into the base-changed algebra."""

    def __init__(self, algebra_K, image, coords=None, check_flat=True):
        self.algebra = algebra_K
        self.field = algebra_K.field
        self.image = image
        self.coords = coords
        self.label = coord_label(self.field, coords) if coords is not None else "<custom>"
        if image.counit() != 0:
            raise NotFlat("image must lie in the augmentation ideal")
        p = self.field.p
        if not image.pow(p).is_zero():
            raise NotFlat("image^p != 0")
        if check_flat:
            jt = nilpotent_jordan_type(algebra_K.left_mult_matrix(image))
            if not jt.is_free(p):
                raise NotFlat(f"free module restricts with Jordan type {jt}")

    def restriction_jordan(self, M_K):
        """Jordan type of the module pulled back along this point."""
        return nilpotent_jordan_type(M_K.act(self.image))

    def detects(self, M_K):
        """True when the pullback of M_K is not free (the point supports M)."""
        return not self.restriction_jordan(M_K).is_free(self.field.p)

    def __repr__(self):
        return f"PiPoint({self.label} on {self.algebra!r})"


def top_slice_image(A, coords):
    """Σ c_g · g^(bound_g / p): the canonical direction for given coordinates."""
    p = A.field.p
    out = A.zero()
    for g, c in enumerate(coords):
        if c:
            out = out + int(c) * A.generator(g).pow(A.bounds[g] // p)
    return out


def canonical_pi_point(A, coords, ext=None):
    """The flat point with image the top-slice combination of the coordinates.

    ``ext`` optionally base changes to GF(p^ext) first (coordinates are
    then read in the extension's encoding).
    """
    if A.kind != "truncated_poly":
        raise PointError("canonical points live on truncated polynomial algebras")
    K = A.field if ext is None else field(A.field.p, ext)
    A_K = A if K == A.field else base_change(A, K)
    coords = normalize_coords(K, coords)
    return PiPoint(A_K, top_slice_image(A_K, coords), coords=coords)


class SupportSet:
    """A subset of an enumerated point family, by point labels."""

    def __init__(self, labels, family_desc):
        self.labels = frozenset(labels)
        self.family = family_desc

    def __eq__(self, other):
        return isinstance(other, SupportSet) and self.labels == other.labels

    def __le__(self, other):
        return self.labels <= other.labels

    def __or__(self, other):
        return SupportSet(self.labels | other.labels, self.family)

    def __and__(self, other):
        return SupportSet(self.labels & other.labels, self.family)

    def __len__(self):
        return len(self.labels)

    def __contains__(self, label):
        return label in self.labels

    def sorted(self):
        return sorted(self.labels)

    def __repr__(self):
        return "{" + ", ".join(self.sorted()) + "}"

    def to_json(self):
        return {"family": self.family, "points": self.sorted()}


class PointFamily:
    """All points of the projective coordinate space over GF(p^e).

    Representatives are normalized (last nonzero coordinate 1) and
    enumerated deterministically: [1:0:...:0] style axis points first by
    axis, then the affine charts in increasing encoded order.
    """

    def __init__(self, A, ext_degree=2, check_flat=True):
        self.base_algebra = A
        base = A.field
        if base.e > 1 and ext_degree % base.e:
            raise PointError("extension degree must be a multiple of the base degree")
        self.K = field(base.p, ext_degree) if ext_degree != base.e else base
        self.A_K = A if self.K == base else base_change(A, self.K)
        self.ext_degree = ext_degree
        self.check_flat = check_flat
        self.points = self._enumerate()
        self.by_label = {pt.label: pt for pt in self.points}
        self.desc = f"P^{len(A.gen_names) - 1}(GF({base.p}^{ext_degree}))"
        self._tests = {}
        self._base_changed = {}

    def _enumerate(self):
        A_K, K = self.A_K, self.K
        k = len(A_K.gen_names)
        pts = []
        for last in range(k):
            # coords: free below `last`, 1 at `last`, 0 above
            frees = last
            for combo in np.ndindex(*([K.q] * frees)):
                coords = tuple(int(c) for c in combo) + (1,) + (0,) * (k - last - 1)
                pts.append(PiPoint(A_K, top_slice_image(A_K, coords), coords=coords,
                                   check_flat=self.check_flat))
        return pts

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def point(self, coords):
        return self.by_label[coord_label(self.K, normalize_coords(self.K, coords))]

    def lift(self, M):
        """Base change a module over the base algebra to the family field."""
        if M.algebra == self.A_K:
            return M
        hit = self._base_changed.get(id(M))
        if hit is not None and hit[0] is M:
            return hit[1]
        lifted = base_change_rep(M, self.K)
        # keep M referenced so its id cannot be recycled under the cache
        self._base_changed[id(M)] = (M, lifted)
        return lifted

    def support(self, M):
        M_K = self.lift(M)
        labels = [pt.label for pt in self.points if pt.detects(M_K)]
        return SupportSet(labels, self.desc)

    def test_module(self, label):
        """The induced singleton-support module detecting exactly this point."""
        hit = self._tests.get(label)
        if hit is None:
            pt = self.by_label[label]
            hit = induce_trivial(self.A_K, pt.image, label=f"V({label})")
            self._tests[label] = hit
        return hit

    def class_of_image(self, image_K):
        """Which point class a (possibly non-flat) map detects, by test modules.

        The class of t ↦ image is the unique family point whose test
        module pulls back non-freely along the image.
        """
        det = []
        p = self.K.p
        for pt in self.points:
            T = self.test_module(pt.label)
            jt = nilpotent_jordan_type(T.act(image_K))
            if not jt.is_free(p):
                det.append(pt.label)
        if len(det) != 1:
            raise PointError(f"image detects {det!r}, not a single class")
        return det[0]


def support(M, family):
    return family.support(M)


def equivalent(alpha, beta, test_module, family):
    """Point equivalence through a singleton-support test module.

    Precondition: the test module is supported exactly at the class of
    ``alpha`` (BadTestModule otherwise); the points are then equivalent
    iff ``beta`` also restricts it non-freely.
    """
    supp = family.support(test_module)
    if len(supp) != 1:
        raise BadTestModule(f"test module has support {supp!r}, not a singleton")
    T_K = family.lift(test_module)
    if not alpha.detects(T_K):
        raise BadTestModule("test module is not supported at the first point")
    return beta.detects(T_K)


def aut_action_on_point(phi, point, family):
    """Label of the class of φ ∘ α, by scanning the family's test modules."""
    phi_K = morphism_to_field(phi, family.A_K) if phi.source.field != family.K else phi
    moved = phi_K.apply(point.image)
    return family.class_of_image(moved)


def is_isotropy(phi, point, family):
    return aut_action_on_point(phi, point, family) == point.label


# -- nobility -------------------------------------------------------------------------


def _in_prime_field(F, c):
    return 0 <= int(c) < F.p


def nobility(delta, coords, family=None):
    """"noble" or "ignoble" for the named structure, resolved through twists.

    Data-driven: each library structure carries its set of subalgebra
    directions; a twisted structure pulls the point back along the
    twisting automorphisms.  UnknownStructure for a custom coproduct.
    """
    if delta.nobility_rule is None:
        raise UnknownStructure(f"no nobility data for structure {delta.name!r}")
    A = delta.algebra
    F = family.K if family is not None else A.field
    if delta.twist_chain:
        if family is None:
            family = PointFamily(A, ext_degree=2 if A.field.e == 1 else A.field.e)
            F = family.K
        label = coord_label(F, normalize_coords(F, coords))
        for phi in reversed(delta.twist_chain):
            pt = family.by_label[label]
            label = aut_action_on_point(phi.invert(), pt, family)
        coords = family.by_label[label].coords
    else:
        coords = normalize_coords(F, coords)
    rule = delta.nobility_rule
    if rule == "all":
        return "noble"
    axis = [tuple(1 if i == g else 0 for i in range(len(coords)))
            for g in range(len(coords))]
    if rule == "first_axis":
        return "noble" if coords == axis[0] else "ignoble"
    if rule == "axes":
        return "noble" if coords in axis else "ignoble"
    if rule == "prime_field":
        return "noble" if all(_in_prime_field(F, c) for c in coords) else "ignoble"
    raise UnknownStructure(f"unrecognized nobility rule {rule!r}")

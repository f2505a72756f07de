"""Waldhausen structures from complete hereditary cotorsion pairs.

Given an algebra, a left class C with its cotorsion pair (C, C-perp), and
an acyclicity class Z containing C-perp, the module-category structure
has: cofibrations = injections with cokernel in C; acyclic fibrations =
surjections with kernel in C-perp; acyclic cofibrations = injections with
cokernel in the intersection of Z and C; weak equivalences = composites
of an acyclic cofibration followed by an acyclic fibration.

Everything here is decision procedures and executable checkers: map
classification, the canonical cofibration/acyclic-fibration
factorization, lifting, a three-valued weak-equivalence decision, axiom
checkers (gluing, extension, saturation, properness), and the
resolution-ladder construction that converts a finite resolution by a
subcategory P into one by Z-intersect-P.
"""

import hashlib
import itertools

from .algebra import (
    Morphism,
    ShortExactSequence,
    cokernel,
    direct_sum,
    enumerate_modules,
    hom_basis,
    is_isomorphic,
    kernel,
    pullback,
    pushout,
    zero_module,
    zero_morphism,
)
from .errors import (
    BudgetExceededError,
    HypothesisError,
    InternalInconsistencyError,
    ValidationError,
)
from .homological import (
    ext1,
    induced_on_cokernel,
    injective_dimension_within,
    is_injective,
    is_projective,
)
from .linalg import FieldMatrix, LinearSystem

import numpy as np


# ---------------------------------------------------------------------------
# subcategory specifications
# ---------------------------------------------------------------------------


class SubcategorySpec:
    """A decidable full subcategory of the module category.

    Kinds: "all", "projectives", "injectives", "finite_inj_dim" (with a
    bound on the witnessed injective dimension), "explicit" (membership =
    isomorphic to one of the listed representatives), "intersection".
    """

    def __init__(self, kind, bound=None, members=None, parts=None):
        if kind not in (
            "all",
            "projectives",
            "injectives",
            "finite_inj_dim",
            "explicit",
            "intersection",
        ):
            raise ValidationError("unknown subcategory kind %r" % kind)
        self.kind = kind
        self.bound = bound
        self.members = list(members) if members is not None else None
        self.parts = list(parts) if parts is not None else None
        if kind == "finite_inj_dim" and (bound is None or bound < 0):
            raise ValidationError("finite_inj_dim needs a nonnegative bound")
        if kind == "explicit" and self.members is None:
            raise ValidationError("explicit subcategory needs representatives")
        if kind == "intersection" and not self.parts:
            raise ValidationError("intersection needs at least one part")
        self._cache = {}

    def contains(self, m):
        cached = self._cache.get(m.digest)
        if cached is not None:
            return cached
        if self.kind == "all":
            out = True
        elif self.kind == "projectives":
            out = is_projective(m)
        elif self.kind == "injectives":
            out = is_injective(m)
        elif self.kind == "finite_inj_dim":
            out = injective_dimension_within(m, self.bound) is not None
        elif self.kind == "explicit":
            out = any(is_isomorphic(m, rep) is not None for rep in self.members)
        else:
            out = all(part.contains(m) for part in self.parts)
        self._cache[m.digest] = out
        return out

    def describe(self):
        if self.kind == "finite_inj_dim":
            return "finite_inj_dim<=%d" % self.bound
        if self.kind == "explicit":
            return "explicit[%d reps]" % len(self.members)
        if self.kind == "intersection":
            return "intersection(%s)" % ", ".join(p.describe() for p in self.parts)
        return self.kind


def spec_all():
    return SubcategorySpec("all")


def spec_projectives():
    return SubcategorySpec("projectives")


def spec_injectives():
    return SubcategorySpec("injectives")


def spec_finite_inj_dim(bound):
    return SubcategorySpec("finite_inj_dim", bound=bound)


def spec_explicit(members):
    return SubcategorySpec("explicit", members=members)


def spec_intersection(parts):
    return SubcategorySpec("intersection", parts=parts)


# ---------------------------------------------------------------------------
# the Waldhausen data bundle
# ---------------------------------------------------------------------------


class WaldhausenData:
    """Algebra + class C + acyclics Z + the cotorsion pair for (C, C-perp).

    On construction the hypotheses are verified on every module up to
    ``sample_bound``: C agrees with the pair's left class, C-perp lies
    inside Z, and the intersection of Z and C is closed under extensions
    and under cokernels of injections.  Violations raise HypothesisError.

    The 2-out-of-3 flag for Z-intersect-C may be supplied (trusted) or
    left None, in which case a sampled check fills it in.
    """

    def __init__(
        self,
        algebra,
        c_spec,
        z_spec,
        pair,
        z_two_of_three=None,
        sample_bound=2,
        validate=True,
    ):
        self.algebra = algebra
        self.c_spec = c_spec
        self.z_spec = z_spec
        self.pair = pair
        self.sample_bound = int(sample_bound)
        self.flags = {
            "hereditary_checked": None,
            "complete_checked": None,
            "right_in_z_checked": None,
            "z_two_of_three": z_two_of_three,
            "z_two_of_three_source": "supplied" if z_two_of_three is not None else None,
        }
        if validate:
            self._validate_hypotheses()
        if self.flags["z_two_of_three"] is None:
            ok, witness = check_z_two_of_three(
                algebra, c_spec, z_spec, self.sample_bound
            )
            self.flags["z_two_of_three"] = ok
            self.flags["z_two_of_three_source"] = "sampled<=%d" % self.sample_bound
            self.z23_witness = witness
        else:
            self.z23_witness = None

    def in_c(self, m):
        return self.c_spec.contains(m)

    def in_z(self, m):
        return self.z_spec.contains(m)

    def in_zc(self, m):
        return self.z_spec.contains(m) and self.c_spec.contains(m)

    def _validate_hypotheses(self):
        samples = enumerate_modules(self.algebra, self.sample_bound)
        z = zero_module(self.algebra)
        if not self.c_spec.contains(z) or not self.z_spec.contains(z):
            raise HypothesisError("both C and Z must contain the zero module")
        for m in samples:
            if self.pair.in_left(m) != self.c_spec.contains(m):
                raise HypothesisError(
                    "C disagrees with the pair's left class on a sample module"
                )
            if self.pair.in_right(m) and not self.z_spec.contains(m):
                raise HypothesisError(
                    "right orthogonal class is not contained in Z (sampled)"
                )
        self.flags["right_in_z_checked"] = self.sample_bound
        # completeness: resolutions exist and validate on the samples
        for m in samples:
            right = self.pair.resolve_right(m)
            left = self.pair.resolve_left(m)
            if right.validate() or left.validate():
                raise HypothesisError("completeness resolution failed to validate")
        self.flags["complete_checked"] = self.sample_bound
        # hereditary: kernels of surjections between left-class objects
        zc = [m for m in samples if self.in_zc(m)]
        lefts = [m for m in samples if self.pair.in_left(m)]
        for m in lefts:
            for n in lefts:
                for f in _small_map_sample(m, n):
                    if f.is_epi():
                        ker_mod, _ = kernel(f)
                        if not self.pair.in_left(ker_mod):
                            raise HypothesisError(
                                "left class not closed under kernels of surjections"
                            )
        self.flags["hereditary_checked"] = self.sample_bound
        # Z-intersect-C closed under extensions (all classes of small pairs)
        for c_obj in zc:
            for a_obj in zc:
                if c_obj.dim + a_obj.dim > self.sample_bound + 1:
                    continue
                for cls in ext1(c_obj, a_obj).all_classes():
                    mid = cls.realize().mid
                    if not self.in_zc(mid):
                        raise HypothesisError(
                            "Z-intersect-C not closed under extensions (sampled)"
                        )
        # Z-intersect-C closed under cokernels of injections in C
        for m in zc:
            for n in zc:
                for f in _small_map_sample(m, n):
                    if f.is_mono():
                        cok_mod, _ = cokernel(f)
                        if self.c_spec.contains(cok_mod) and not self.in_zc(cok_mod):
                            raise HypothesisError(
                                "Z-intersect-C not closed under cokernels of injections"
                            )


_SMALL_MAP_CAP = 64


def _small_map_sample(m, n):
    basis = hom_basis(m, n)
    p = m.p
    if not basis:
        return [zero_morphism(m, n)]
    if p ** len(basis) <= _SMALL_MAP_CAP:
        out = []
        for coeffs in itertools.product(range(p), repeat=len(basis)):
            f = zero_morphism(m, n)
            for c_val, b in zip(coeffs, basis):
                for _ in range(c_val):
                    f = f + b
            out.append(f)
        return out
    rng = np.random.default_rng(int(m.digest[:8], 16) ^ int(n.digest[:8], 16))
    out = list(basis)
    for _ in range(16):
        coeffs = rng.integers(0, p, size=len(basis))
        f = zero_morphism(m, n)
        for c_val, b in zip(coeffs, basis):
            for _ in range(int(c_val)):
                f = f + b
        out.append(f)
    return out


def check_z_two_of_three(algebra, c_spec, z_spec, bound):
    """Sampled 2-out-of-3 check for Z-intersect-C over short exact sequences.

    Returns (holds, witness); the witness is a violating (sub, mid, quot)
    dimension triple with digests when the property fails.
    """
    samples = enumerate_modules(algebra, bound)
    in_zc = lambda m: z_spec.contains(m) and c_spec.contains(m)
    in_c = c_spec.contains
    for mid in samples:
        for sub in samples:
            if sub.dim > mid.dim:
                continue
            for f in _small_map_sample(sub, mid):
                if not f.is_mono():
                    continue
                quot, _ = cokernel(f)
                if not (in_c(sub) and in_c(mid) and in_c(quot)):
                    continue
                flags = [in_zc(sub), in_zc(mid), in_zc(quot)]
                if sum(flags) == 2:
                    witness = {
                        "dims": (sub.dim, mid.dim, quot.dim),
                        "in_zc": flags,
                        "digests": (sub.digest, mid.digest, quot.digest),
                    }
                    return False, witness
    return True, None


# ---------------------------------------------------------------------------
# map classification
# ---------------------------------------------------------------------------


class MapClassification:
    def __init__(self, is_admissible_mono, is_admissible_epi, is_cofibration,
                 is_acyclic_cofibration, is_acyclic_fibration):
        self.is_admissible_mono = is_admissible_mono
        self.is_admissible_epi = is_admissible_epi
        self.is_cofibration = is_cofibration
        self.is_acyclic_cofibration = is_acyclic_cofibration
        self.is_acyclic_fibration = is_acyclic_fibration
        if is_acyclic_cofibration and not is_cofibration:
            raise InternalInconsistencyError("acyclic cofibration must be a cofibration")
        if is_acyclic_fibration and not is_admissible_epi:
            raise InternalInconsistencyError("acyclic fibration must be surjective")

    def as_dict(self):
        return {
            "is_admissible_mono": self.is_admissible_mono,
            "is_admissible_epi": self.is_admissible_epi,
            "is_cofibration": self.is_cofibration,
            "is_acyclic_cofibration": self.is_acyclic_cofibration,
            "is_acyclic_fibration": self.is_acyclic_fibration,
        }


def _require_in_c(w, f):
    if not w.in_c(f.dom) or not w.in_c(f.cod):
        raise ValidationError("map endpoints must belong to the class C")


def classify_map(w, f):
    """Compute all structural flags of a map between C-objects."""
    _require_in_c(w, f)
    mono = f.is_mono()
    epi = f.is_epi()
    cofib = False
    acyclic_cofib = False
    if mono:
        cok_mod, _ = cokernel(f)
        cofib = w.in_c(cok_mod)
        acyclic_cofib = cofib and w.in_z(cok_mod)
    acyclic_fib = False
    if epi:
        ker_mod, _ = kernel(f)
        acyclic_fib = w.pair.in_right(ker_mod)
    return MapClassification(mono, epi, cofib, acyclic_cofib, acyclic_fib)


# ---------------------------------------------------------------------------
# factorization and lifting
# ---------------------------------------------------------------------------


class Factorization:
    """f = p o i with i a cofibration and p an acyclic fibration."""

    def __init__(self, i, p, middle, coker_i, ker_p):
        self.i = i
        self.p = p
        self.middle = middle
        self.coker_i = coker_i
        self.ker_p = ker_p


def factor(w, f):
    """Canonical factorization through resolve_right(dom) plus the codomain.

    With 0 -> A -> I -> P -> 0 the middle is I (+) cod f, the injection is
    x |-> (j x, f x), and the projection keeps the second coordinate, so
    the composite is exactly f.
    """
    _require_in_c(w, f)
    res = w.pair.resolve_right(f.dom)
    j = res.mono
    middle, (inj_i, inj_b), (proj_i, proj_b) = _sum_with_maps(j.cod, f.cod)
    i = (inj_i @ j) + (inj_b @ f)
    p = proj_b
    if (p @ i) != f:
        raise InternalInconsistencyError("factorization does not compose to f")
    if not i.is_mono() or not p.is_epi():
        raise InternalInconsistencyError("factorization legs have wrong ranks")
    coker_mod, _ = cokernel(i)
    ker_mod, _ = kernel(p)
    if not w.in_c(coker_mod):
        raise InternalInconsistencyError("cokernel of the injection left C")
    if not w.pair.in_right(ker_mod):
        raise InternalInconsistencyError("kernel of the projection left C-perp")
    return Factorization(i, p, middle, coker_mod, ker_mod)


def _sum_with_maps(m1, m2):
    total, injections, projections = direct_sum([m1, m2])
    return total, injections, projections


def lift(i, p, top, bottom):
    """Diagonal filler h with h o i = top and p o h = bottom.

    The square p o top = bottom o i must commute; under the cotorsion
    lifting property (i a cofibration, p an acyclic fibration) a filler
    exists, so failure to solve is reported as an internal inconsistency.
    """
    if (p @ top) != (bottom @ i):
        raise ValidationError("lifting square does not commute")
    dom_mid = i.cod
    cod_mid = p.dom
    system = LinearSystem(i.p)
    h = system.var("h", cod_mid.dim, dom_mid.dim)
    system.add_equation([(None, h, i.matrix)], top.matrix)
    system.add_equation([(p.matrix, h, None)], bottom.matrix)
    for idx in range(dom_mid.algebra.dim):
        system.add_equation(
            [(None, h, dom_mid.action[idx]), (-cod_mid.action[idx], h, None)],
            FieldMatrix.zeros(i.p, cod_mid.dim, dom_mid.dim),
        )
    sol = system.solve()
    if sol is None:
        raise InternalInconsistencyError(
            "no lift exists; preconditions were not satisfied"
        )
    return Morphism(dom_mid, cod_mid, sol["h"], check=False)


# ---------------------------------------------------------------------------
# weak equivalences
# ---------------------------------------------------------------------------


def is_weak_equivalence(w, f):
    """Three-valued decision: "yes", "no", or "indeterminate".

    The canonical factorization f = p o i always has p an acyclic
    fibration; f is a weak equivalence whenever coker(i) lies in
    Z-intersect-C.  When it does not, "no" is only sound if the weak
    equivalences are saturated, equivalently Z-intersect-C has 2-out-of-3;
    otherwise the verdict is "indeterminate".
    """
    fac = factor(w, f)
    if w.in_zc(fac.coker_i):
        return "yes"
    if w.flags.get("z_two_of_three"):
        return "no"
    return "indeterminate"


def weak_equivalence_oracle(w, f, extra_dim=0, map_budget=100000,
                            enum_budget=None):
    """Exhaustive search for an acyclic-cofibration/acyclic-fibration split.

    Tries every middle object of dimension up to dim(dom) + dim(cod) +
    extra_dim, every injection with cokernel in Z-intersect-C, and every
    surjection with kernel in C-perp, asking for a pair composing to f.
    Returns "yes"/"no"; "no" means no such factorization exists within
    the dimension bound.  The default bound covers the canonical
    factorization whenever the right resolution of the domain has middle
    dimension at most dim(dom) + dim(cod).
    """
    from .homological import _all_maps

    bound = f.dom.dim + f.cod.dim + extra_dim
    p = f.dom.p
    if enum_budget is None:
        middles = enumerate_modules(f.dom.algebra, bound)
    else:
        middles = enumerate_modules(f.dom.algebra, bound, budget=enum_budget)
    for middle in middles:
        if middle.dim < max(f.dom.dim, f.cod.dim):
            continue
        for pair_dims in ((f.dom, middle), (middle, f.cod)):
            if p ** len(hom_basis(*pair_dims)) > map_budget:
                raise BudgetExceededError(
                    "oracle map enumeration exceeds the budget"
                )
        def _is_good_mono(g):
            if not g.is_mono():
                return False
            cok_mod, _ = cokernel(g)
            return w.in_zc(cok_mod)

        good_monos = _all_maps(f.dom, middle, _is_good_mono)
        if not good_monos:
            continue

        def _is_good_epi(g):
            if not g.is_epi():
                return False
            ker_mod, _ = kernel(g)
            return w.pair.in_right(ker_mod)

        good_epis = _all_maps(middle, f.cod, _is_good_epi)
        for g in good_monos:
            for q in good_epis:
                if (q @ g) == f:
                    return "yes"
    return "no"


# ---------------------------------------------------------------------------
# report plumbing
# ---------------------------------------------------------------------------


def instance_digest(*morphisms):
    h = hashlib.sha256()
    for f in morphisms:
        h.update(f.dom.digest.encode())
        h.update(f.cod.digest.encode())
        h.update(f.matrix.a.tobytes())
        h.update(b"|")
    return h.hexdigest()[:16]


def _report(check, digest, verdict, details):
    return {
        "check": check,
        "instance_digest": digest,
        "verdict": verdict,
        "details": details,
    }


# ---------------------------------------------------------------------------
# gluing (axiom W2)
# ---------------------------------------------------------------------------


class GluingInstance:
    """Two cofibration spans joined by three vertical maps.

    Top row: C <-(j)- A -(i)-> B; bottom row primed; verticals va, vb, vc
    with vb o i = i' o va and vc o j = j' o va.
    """

    def __init__(self, i, j, i_primed, j_primed, va, vb, vc):
        if i.dom != j.dom or i_primed.dom != j_primed.dom:
            raise ValidationError("span legs must share their domain")
        if va.dom != i.dom or va.cod != i_primed.dom:
            raise ValidationError("vertical map va must join the span apexes")
        if vb.dom != i.cod or vb.cod != i_primed.cod:
            raise ValidationError("vertical map vb must join the right legs")
        if vc.dom != j.cod or vc.cod != j_primed.cod:
            raise ValidationError("vertical map vc must join the left legs")
        if (vb @ i) != (i_primed @ va) or (vc @ j) != (j_primed @ va):
            raise ValidationError("gluing instance squares do not commute")
        self.i = i
        self.j = j
        self.i_primed = i_primed
        self.j_primed = j_primed
        self.va = va
        self.vb = vb
        self.vc = vc

    def digest(self):
        return instance_digest(
            self.i, self.j, self.i_primed, self.j_primed, self.va, self.vb, self.vc
        )


def _pushout_with_projection(i, j):
    """Pushout of a span plus the quotient epi off the direct sum."""
    summed, (inj_b, inj_c), _ = _sum_with_maps(i.cod, j.cod)
    diff = (inj_b @ i) - (inj_c @ j)
    _, q = cokernel(diff)
    return q, q @ inj_b, q @ inj_c, inj_b, inj_c


def check_gluing(w, inst):
    """Verify that the induced map on pushouts is a weak equivalence."""
    digest = inst.digest()
    if not classify_map(w, inst.i).is_cofibration:
        return _report("gluing", digest, "INAPPLICABLE", {"reason": "top right leg is not a cofibration"})
    if not classify_map(w, inst.i_primed).is_cofibration:
        return _report("gluing", digest, "INAPPLICABLE", {"reason": "bottom right leg is not a cofibration"})
    verdicts = {}
    for name, v in (("va", inst.va), ("vb", inst.vb), ("vc", inst.vc)):
        verdicts[name] = is_weak_equivalence(w, v)
        if verdicts[name] == "indeterminate":
            return _report("gluing", digest, "INAPPLICABLE", {"reason": "vertical map %s is indeterminate" % name})
        if verdicts[name] == "no":
            return _report("gluing", digest, "INAPPLICABLE", {"reason": "vertical map %s is not a weak equivalence" % name})
    q, from_b, from_c, inj_b, inj_c = _pushout_with_projection(inst.i, inst.j)
    q_pr, from_b_pr, from_c_pr, inj_b_pr, inj_c_pr = _pushout_with_projection(
        inst.i_primed, inst.j_primed
    )
    # induced map on pushouts via the universal property
    sum_map = (inj_b_pr @ inst.vb @ _proj_of(inj_b)) + (inj_c_pr @ inst.vc @ _proj_of(inj_c))
    killer = q_pr @ sum_map
    phi = induced_on_cokernel(q, killer)
    if (phi @ from_b) != (from_b_pr @ inst.vb) or (phi @ from_c) != (from_c_pr @ inst.vc):
        raise InternalInconsistencyError("induced pushout map fails naturality")
    verdict = is_weak_equivalence(w, phi)
    details = {
        "vertical_verdicts": verdicts,
        "pushout_dims": (q.cod.dim, q_pr.cod.dim),
        "induced_verdict": verdict,
    }
    if verdict == "yes":
        return _report("gluing", digest, "PASS", details)
    if verdict == "no":
        return _report("gluing", digest, "FAIL", details)
    return _report("gluing", digest, "INAPPLICABLE", details)


def _proj_of(inj):
    """Projection corresponding to a canonical direct-sum injection."""
    return Morphism(inj.cod, inj.dom, inj.matrix.transpose(), check=False)


# ---------------------------------------------------------------------------
# extension axiom
# ---------------------------------------------------------------------------


class ExtensionInstance:
    """Two short exact sequences with commuting verticals (va, vb, vc)."""

    def __init__(self, top, bottom, va, vb, vc):
        if va.dom != top.sub or va.cod != bottom.sub:
            raise ValidationError("va must join the subobjects")
        if vb.dom != top.mid or vb.cod != bottom.mid:
            raise ValidationError("vb must join the middle terms")
        if vc.dom != top.quot or vc.cod != bottom.quot:
            raise ValidationError("vc must join the quotients")
        if (vb @ top.mono) != (bottom.mono @ va):
            raise ValidationError("left square does not commute")
        if (vc @ top.epi) != (bottom.epi @ vb):
            raise ValidationError("right square does not commute")
        self.top = top
        self.bottom = bottom
        self.va = va
        self.vb = vb
        self.vc = vc

    def digest(self):
        return instance_digest(self.top.mono, self.top.epi, self.bottom.mono,
                               self.bottom.epi, self.va, self.vb, self.vc)


def check_extension_axiom(w, inst):
    """If the outer verticals are weak equivalences, so must be the middle."""
    digest = inst.digest()
    for name, ses in (("top", inst.top), ("bottom", inst.bottom)):
        if not classify_map(w, ses.mono).is_cofibration:
            return _report(
                "extension",
                digest,
                "INAPPLICABLE",
                {"reason": "%s sequence is not a cofibration sequence" % name},
            )
    va_v = is_weak_equivalence(w, inst.va)
    vc_v = is_weak_equivalence(w, inst.vc)
    if "indeterminate" in (va_v, vc_v):
        return _report("extension", digest, "INAPPLICABLE", {"reason": "outer vertical indeterminate"})
    if va_v == "no" or vc_v == "no":
        return _report("extension", digest, "INAPPLICABLE", {"reason": "outer vertical is not a weak equivalence"})
    vb_v = is_weak_equivalence(w, inst.vb)
    details = {"va": va_v, "vb": vb_v, "vc": vc_v}
    if vb_v == "yes":
        return _report("extension", digest, "PASS", details)
    if vb_v == "no":
        return _report("extension", digest, "FAIL", details)
    return _report("extension", digest, "INAPPLICABLE", details)


# ---------------------------------------------------------------------------
# saturation
# ---------------------------------------------------------------------------


def check_saturation(w, f, g):
    """Among f, g, g o f: any two weak equivalences force the third.

    Only applicable when the 2-out-of-3 flag for Z-intersect-C is set;
    without it the weak equivalences are not known to be saturated.
    """
    if g.dom != f.cod:
        raise ValidationError("maps are not composable")
    digest = instance_digest(f, g)
    if not w.flags.get("z_two_of_three"):
        return _report(
            "saturation",
            digest,
            "INAPPLICABLE",
            {"reason": "2-out-of-3 for Z-intersect-C not established"},
        )
    composite = g @ f
    verdicts = {
        "f": is_weak_equivalence(w, f),
        "g": is_weak_equivalence(w, g),
        "gf": is_weak_equivalence(w, composite),
    }
    yes_count = sum(1 for v in verdicts.values() if v == "yes")
    details = {"verdicts": verdicts}
    if yes_count == 2:
        return _report("saturation", digest, "FAIL", details)
    return _report("saturation", digest, "PASS", details)


# ---------------------------------------------------------------------------
# properness
# ---------------------------------------------------------------------------


class PropernessInstance:
    """Either a pushout instance (cofibration f, map a sharing its domain)
    or a pullback instance (surjection f, map a sharing its codomain)."""

    def __init__(self, mode, f, a):
        if mode not in ("pushout", "pullback"):
            raise ValidationError("mode must be pushout or pullback")
        if mode == "pushout" and f.dom != a.dom:
            raise ValidationError("pushout instance needs a shared domain")
        if mode == "pullback" and f.cod != a.cod:
            raise ValidationError("pullback instance needs a shared codomain")
        self.mode = mode
        self.f = f
        self.a = a

    def digest(self):
        return instance_digest(self.f, self.a)


def check_properness(w, inst):
    """Weak equivalences are stable under pushout along cofibrations and
    pullback along surjections."""
    digest = inst.digest()
    a_verdict = is_weak_equivalence(w, inst.a)
    if a_verdict != "yes":
        return _report(
            "properness",
            digest,
            "INAPPLICABLE",
            {"reason": "the map being pushed is not a decided weak equivalence",
             "verdict": a_verdict},
        )
    if inst.mode == "pushout":
        if not classify_map(w, inst.f).is_cofibration:
            return _report("properness", digest, "INAPPLICABLE",
                           {"reason": "f is not a cofibration"})
        _, from_b, from_c = pushout(inst.f, inst.a)
        moved = from_b  # the pushout of a along f
    else:
        if not inst.f.is_epi():
            return _report("properness", digest, "INAPPLICABLE",
                           {"reason": "f is not surjective"})
        _, to_b, to_c = pullback(inst.f, inst.a)
        moved = to_b  # the base change of a, living over the domain of f
    verdict = is_weak_equivalence(w, moved)
    details = {"mode": inst.mode, "moved_verdict": verdict}
    if verdict == "yes":
        return _report("properness", digest, "PASS", details)
    if verdict == "no":
        return _report("properness", digest, "FAIL", details)
    return _report("properness", digest, "INAPPLICABLE", details)


# ---------------------------------------------------------------------------
# the resolution ladder
# ---------------------------------------------------------------------------


def build_zp_resolution(w, a, pres, pair_p, sample_bound=2):
    """Convert a finite P-resolution of ``a`` into a Z-intersect-P one.

    ``pres`` lists the short exact sequences of the resolution from the
    bottom up: pres[0] is 0 -> K_1 -> P_0 -> a -> 0, pres[i] is
    0 -> K_{i+1} -> P_i -> K_i -> 0, and the last subobject K_n must lie
    in P itself.  The output is the chained list of sequences
    0 -> Z_n -> Z_{n-1} -> D_{n-1} -> 0, ..., 0 -> D_1 -> Z_0 -> a -> 0
    produced by alternating right resolutions for (P, P-perp) with
    pushouts; all middle objects land in Z-intersect-P.
    """
    if not w.flags.get("z_two_of_three"):
        raise HypothesisError("resolution ladder needs 2-out-of-3 for Z-intersect-C")
    if not w.in_zc(a):
        raise HypothesisError("the resolved object must lie in Z-intersect-C")
    # the right orthogonal is taken inside P, hence the intersection
    for m in enumerate_modules(w.algebra, sample_bound):
        if pair_p.in_right(m) and pair_p.in_left(m) and not w.in_z(m):
            raise HypothesisError("P-perp is not contained in Z (sampled)")
    n = len(pres)
    if n == 0:
        if not pair_p.in_left(a):
            raise HypothesisError("empty resolution requires the object to lie in P")
        return []
    if pres[0].quot != a:
        raise HypothesisError("first sequence must end at the resolved object")
    for idx in range(n):
        if not pair_p.in_left(pres[idx].mid):
            raise HypothesisError("resolution middle at index %d is not in P" % idx)
        if idx + 1 < n and pres[idx].sub != pres[idx + 1].quot:
            raise HypothesisError("resolution sequences do not chain at index %d" % idx)
    if not pair_p.in_left(pres[n - 1].sub):
        raise HypothesisError("top kernel of the resolution is not in P")

    def resolve_mono(m):
        ses = pair_p.resolve_right(m)
        if not pair_p.in_left(ses.mid):
            raise HypothesisError(
                "right resolution middle of dimension %d fell outside P" % ses.mid.dim
            )
        if not w.in_z(ses.mid):
            raise HypothesisError(
                "right resolution middle of dimension %d fell outside Z" % ses.mid.dim
            )
        return ses.mono

    out = []
    top = pres[n - 1]
    mu = resolve_mono(top.sub)  # K_n into Z_n
    # first pushout: Q = Z_n +_{K_n} P_{n-1}, keeping the quotient C_{n-1}
    big, from_z, from_p = pushout(mu, top.mono)
    epi_to_c = _cokernel_epi_matching(from_z, top.epi, from_p)
    if n == 1:
        z0 = big
        final = ShortExactSequence(from_z, epi_to_c)
        _check_ladder_object(w, pair_p, z0, "Z_0")
        return [final]
    mono_into_d = None
    prev_d = None
    for k in range(n - 1, 0, -1):
        # have: 0 -> Z_or_D -> big -> C_k -> 0 with big in P
        if not pair_p.in_left(big):
            raise InternalInconsistencyError("ladder middle fell out of P")
        j = resolve_mono(big)  # big into Z_k
        z_k = j.cod
        _check_ladder_object(w, pair_p, z_k, "Z_%d" % k)
        d_k, from_zk, from_ck = pushout(j, epi_to_c)
        if not w.in_z(d_k):
            raise InternalInconsistencyError("ladder quotient left Z")
        if prev_d is None:
            mono_top = j @ from_z  # Z_n -> Z_{n-1}
        else:
            mono_top = j @ mono_into_d
        out.append(ShortExactSequence(mono_top, from_zk))
        mono_into_d = from_ck  # C_k -> D_k, feeds the next pushout
        prev_d = d_k
        nxt = pres[k - 1]  # 0 -> C_k -> P_{k-1} -> C_{k-1} -> 0
        big, from_d, from_p = pushout(mono_into_d, nxt.mono)
        epi_to_c = _cokernel_epi_matching(from_d, nxt.epi, from_p)
        mono_into_d = from_d  # D_k -> Q_{k-1}
    # final step: Z_0 := D_1 +_{C_1} P_0 (no further resolution)
    z0 = big
    _check_ladder_object(w, pair_p, z0, "Z_0")
    final = ShortExactSequence(mono_into_d, epi_to_c)
    out.append(final)
    _validate_chain(out, a)
    return out


def _cokernel_epi_matching(sub_leg, old_epi, other_leg):
    """Epi off a pushout matching the untouched quotient of the pushed sequence.

    For a pushout of (mono m, mono along) applied to 0 -> A -> B -> C -> 0,
    the new sequence 0 -> M -> pushout -> C -> 0 keeps its quotient; the
    epi is induced by (0, old_epi) on the direct sum.
    """
    q_mod = sub_leg.cod
    # reconstruct the quotient epi: it kills the image of the pushed mono
    system = LinearSystem(sub_leg.p)
    h = system.var("h", old_epi.cod.dim, q_mod.dim)
    system.add_equation([(None, h, other_leg.matrix)], old_epi.matrix)
    system.add_equation(
        [(None, h, sub_leg.matrix)],
        FieldMatrix.zeros(sub_leg.p, old_epi.cod.dim, sub_leg.dom.dim),
    )
    for idx in range(q_mod.algebra.dim):
        system.add_equation(
            [(None, h, q_mod.action[idx]), (-old_epi.cod.action[idx], h, None)],
            FieldMatrix.zeros(sub_leg.p, old_epi.cod.dim, q_mod.dim),
        )
    sol = system.solve()
    if sol is None:
        raise InternalInconsistencyError("pushout quotient map could not be built")
    epi = Morphism(q_mod, old_epi.cod, sol["h"], check=False)
    if not epi.is_epi():
        raise InternalInconsistencyError("pushout quotient map is not surjective")
    return epi


def _check_ladder_object(w, pair_p, m, label):
    if not pair_p.in_left(m):
        raise InternalInconsistencyError("%s is not in P" % label)
    if not w.in_z(m):
        raise InternalInconsistencyError("%s is not in Z" % label)


def _validate_chain(sequences, a):
    for ses in sequences:
        problems = ses.validate()
        if problems:
            raise InternalInconsistencyError("ladder sequence invalid: %s" % problems)
    for first, second in zip(sequences, sequences[1:]):
        if first.quot != second.sub:
            raise InternalInconsistencyError("ladder sequences do not chain")
    if sequences and sequences[-1].quot != a:
        raise InternalInconsistencyError("ladder does not end at the resolved object")

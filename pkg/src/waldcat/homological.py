"""Ext groups, projectivity and injectivity, and cotorsion-pair resolutions.

Ext1 is computed from a length-two free presentation: for a free cover
0 -> K -> F -> c -> 0, the group Ext1(c, a) is Hom(K, a) modulo maps that
extend to F.  Extensions are realised by pushing the kernel inclusion out
along a cocycle.  Projectivity and injectivity are decided by solving for
a section of the free cover, respectively a retraction of an embedding
into a power of the dual regular module.

The module also hosts the two module-level cotorsion pairs used
throughout: (all, injectives) and (projectives, all), each with its
completeness resolutions, plus cosyzygy iteration with injective-summand
stripping for finite-injective-dimension detection.
"""

import itertools

import numpy as np

from .algebra import (
    Module,
    Morphism,
    ShortExactSequence,
    cokernel,
    direct_sum,
    dual_regular_module,
    enumerate_modules,
    hom_basis,
    identity_morphism,
    indecomposable_summands,
    kernel,
    regular_module,
    zero_module,
    zero_morphism,
)
from .errors import (
    HypothesisError,
    InternalInconsistencyError,
    ValidationError,
)
from .linalg import (
    FieldMatrix,
    LinearSystem,
    column_space_basis,
    in_column_space,
    kernel_basis,
    rank,
    solve,
)

DEFAULT_ORACLE_BUDGET = 10**8


# ---------------------------------------------------------------------------
# covers and embeddings
# ---------------------------------------------------------------------------


def _generating_columns(m):
    """Indices of basis vectors that generate m, greedily minimized.

    The submodule generated by a vector v is the column span of all
    action matrices applied to v, so one pass of span updates suffices.
    """
    d = m.algebra.dim
    chosen = []
    span = FieldMatrix.zeros(m.p, m.dim, 0)
    for i in range(m.dim):
        arr = np.zeros((m.dim, 1), dtype=np.int64)
        arr[i, 0] = 1
        e = FieldMatrix(m.p, arr)
        if span.cols and in_column_space(span, e):
            continue
        chosen.append(i)
        new_cols = np.concatenate(
            [span.a] + [m.action[j].a[:, i : i + 1] for j in range(d)], axis=1
        )
        span = column_space_basis(FieldMatrix(m.p, new_cols))
    return chosen


def free_cover(m):
    """Surjection onto m from a free module, one generator per chosen
    basis vector of a greedily minimized generating set."""
    algebra = m.algebra
    if m.dim == 0:
        z = zero_module(algebra)
        return zero_morphism(z, m)
    chosen = _generating_columns(m)
    k = len(chosen)
    reg = regular_module(algebra)
    free, _, _ = direct_sum([reg] * k)
    d = algebra.dim
    cols = np.zeros((m.dim, k * d), dtype=np.int64)
    for copy, gen in enumerate(chosen):
        for j in range(d):
            # algebra basis element e_j in copy `copy` lands on e_j . v_gen
            cols[:, copy * d + j] = m.action[j].a[:, gen]
    cover = Morphism(free, m, cols)
    if not cover.is_epi():
        raise InternalInconsistencyError("free cover failed to be surjective")
    return cover


def injective_embedding(m):
    """Injection of m into a power of the dual regular module.

    Stacks a basis of Hom(m, D(A)); those maps jointly separate points, so
    the stacked map is injective.  The power equals dim m.
    """
    algebra = m.algebra
    da = dual_regular_module(algebra)
    if m.dim == 0:
        z = zero_module(algebra)
        return zero_morphism(m, z)
    maps = hom_basis(m, da)
    if len(maps) != m.dim:
        raise InternalInconsistencyError(
            "hom space into the dual regular module has unexpected dimension"
        )
    # keep only maps that strictly shrink the joint kernel
    kept = []
    stacked = np.zeros((0, m.dim), dtype=np.int64)
    ker_dim = m.dim
    for f in maps:
        cand = np.concatenate([stacked, f.matrix.a], axis=0)
        cand_ker = kernel_basis(FieldMatrix(m.p, cand)).cols
        if cand_ker < ker_dim:
            kept.append(f)
            stacked = cand
            ker_dim = cand_ker
        if ker_dim == 0:
            break
    cosum, injections, _ = direct_sum([da] * len(kept))
    total = zero_morphism(m, cosum)
    for inj, f in zip(injections, kept):
        total = total + (inj @ f)
    if not total.is_mono():
        raise InternalInconsistencyError("stacked functionals failed to embed")
    return total


# ---------------------------------------------------------------------------
# projectivity and injectivity
# ---------------------------------------------------------------------------

_PROJ_CACHE = {}
_INJ_CACHE = {}


def _section_exists(epi):
    """Module-map section s with epi o s = id."""
    if epi.cod.dim == 0:
        return True
    system = LinearSystem(epi.p)
    s = system.var("s", epi.dom.dim, epi.cod.dim)
    system.add_equation([(epi.matrix, s, None)], FieldMatrix.identity(epi.p, epi.cod.dim))
    for i in range(epi.dom.algebra.dim):
        system.add_equation(
            [(None, s, epi.cod.action[i]), (-epi.dom.action[i], s, None)],
            FieldMatrix.zeros(epi.p, epi.dom.dim, epi.cod.dim),
        )
    return system.solve() is not None


def _retraction_exists(mono):
    """Module-map retraction r with r o mono = id."""
    if mono.dom.dim == 0:
        return True
    system = LinearSystem(mono.p)
    r = system.var("r", mono.dom.dim, mono.cod.dim)
    system.add_equation([(None, r, mono.matrix)], FieldMatrix.identity(mono.p, mono.dom.dim))
    for i in range(mono.dom.algebra.dim):
        system.add_equation(
            [(None, r, mono.cod.action[i]), (-mono.dom.action[i], r, None)],
            FieldMatrix.zeros(mono.p, mono.dom.dim, mono.cod.dim),
        )
    return system.solve() is not None


def is_projective(m):
    cached = _PROJ_CACHE.get(m.digest)
    if cached is None:
        cached = _section_exists(free_cover(m))
        _PROJ_CACHE[m.digest] = cached
    return cached


def is_injective(m):
    cached = _INJ_CACHE.get(m.digest)
    if cached is None:
        cached = _retraction_exists(injective_embedding(m))
        _INJ_CACHE[m.digest] = cached
    return cached


# ---------------------------------------------------------------------------
# Ext^1
# ---------------------------------------------------------------------------


class ExtClass:
    """One equivalence class of extensions, as coefficients over a basis."""

    def __init__(self, parent, coefficients):
        self.parent = parent
        self.coefficients = tuple(int(c) % parent.p for c in coefficients)
        if len(self.coefficients) != parent.dimension:
            raise ValidationError("coefficient count must match the Ext dimension")

    @property
    def is_zero(self):
        return not any(self.coefficients)

    def realize(self):
        return self.parent.realize(self.coefficients)


class Ext1Result:
    """Ext^1(c, a) together with the presentation data needed to realise classes."""

    def __init__(self, c, a, kappa, pi, cocycle_reps):
        self.c = c
        self.a = a
        self.p = c.p
        self.kappa = kappa  # K -> F, kernel of the cover
        self.pi = pi  # F -> c, the free cover
        self.cocycle_reps = cocycle_reps  # morphisms K -> a spanning a complement
        self.dimension = len(cocycle_reps)

    def zero_class(self):
        return ExtClass(self, (0,) * self.dimension)

    def all_classes(self):
        return [
            ExtClass(self, coeffs)
            for coeffs in itertools.product(range(self.p), repeat=self.dimension)
        ]

    def class_from_coefficients(self, coeffs):
        return ExtClass(self, coeffs)

    def cocycle(self, coeffs):
        phi = zero_morphism(self.kappa.dom, self.a)
        for c_val, rep in zip(coeffs, self.cocycle_reps):
            for _ in range(int(c_val) % self.p):
                phi = phi + rep
        return phi

    def realize(self, coeffs):
        """Short exact sequence 0 -> a -> E -> c -> 0 for the given class.

        E is the pushout of the kernel inclusion along the chosen cocycle.
        """
        phi = self.cocycle(coeffs)
        summed, (inj_f, inj_a), (proj_f, _) = _sum_with_maps(self.kappa.cod, self.a)
        diff = (inj_f @ self.kappa) - (inj_a @ phi)
        _, q = cokernel(diff)
        mono = q @ inj_a
        killer = self.pi @ proj_f
        epi = induced_on_cokernel(q, killer)
        return ShortExactSequence(mono, epi)


def _sum_with_maps(m1, m2):
    summed, injections, projections = direct_sum([m1, m2])
    return summed, injections, projections


def induced_on_cokernel(proj, killer):
    """Map out of a cokernel induced by one that kills the collapsed image.

    ``proj`` is the quotient epi B -> Q; ``killer`` is defined on B and
    vanishes on the kernel of ``proj``.  Returns the unique map Q -> cod
    through which ``killer`` factors.
    """
    section = solve(proj.matrix, FieldMatrix.identity(proj.p, proj.cod.dim))
    if section is None:
        raise InternalInconsistencyError("quotient map admits no linear section")
    mat = killer.matrix @ section
    induced = Morphism(proj.cod, killer.cod, mat, check=False)
    if (induced @ proj).matrix != killer.matrix:
        raise InternalInconsistencyError("map does not kill the collapsed image")
    return induced


def _complement_indices(inner_vectors, outer_vectors, p):
    """Indices of outer vectors forming a basis modulo the span of inner ones."""
    if not outer_vectors:
        return []
    length = len(outer_vectors[0])
    if inner_vectors:
        rows = np.array(inner_vectors, dtype=np.int64).reshape(len(inner_vectors), length)
    else:
        rows = np.zeros((0, length), dtype=np.int64)
    chosen = []
    current_rank = rank(FieldMatrix(p, rows.T)) if rows.size else 0
    for idx, vec in enumerate(outer_vectors):
        stacked = np.concatenate([rows, np.array([vec], dtype=np.int64)], axis=0)
        new_rank = rank(FieldMatrix(p, stacked.T))
        if new_rank > current_rank:
            chosen.append(idx)
            rows = stacked
            current_rank = new_rank
    return chosen


def ext1(c, a):
    """Ext^1(c, a) from a free presentation of c; see Ext1Result."""
    if c.algebra.digest != a.algebra.digest:
        raise ValidationError("Ext needs both modules over the same algebra")
    pi = free_cover(c)
    ker_mod, kappa = kernel(pi)
    hom_k_a = hom_basis(ker_mod, a)
    hom_f_a = hom_basis(pi.dom, a)
    inner = [(g @ kappa).matrix.a.reshape(-1) for g in hom_f_a]
    outer = [h.matrix.a.reshape(-1) for h in hom_k_a]
    chosen = _complement_indices(inner, outer, c.p)
    reps = [hom_k_a[i] for i in chosen]
    return Ext1Result(c, a, kappa, pi, reps)


def realize_extension(ext_class):
    return ext_class.realize()


# ---------------------------------------------------------------------------
# brute-force oracle: count extension classes by enumeration
# ---------------------------------------------------------------------------


def ext1_class_count_oracle(c, a, budget=DEFAULT_ORACLE_BUDGET):
    """Count equivalence classes of extensions 0 -> a -> E -> c -> 0 directly.

    Enumerates every module E of the right dimension, every exact pair of
    an injection a -> E and a surjection E -> c, and merges sequences
    related by a ladder map fixing a and c (such a map is automatically an
    isomorphism).  The count must equal p**ext1(c, a).dimension.
    """
    algebra = c.algebra
    p = algebra.p
    mid_dim = c.dim + a.dim
    middles = [
        e for e in enumerate_modules(algebra, mid_dim, budget=budget) if e.dim == mid_dim
    ]
    sequences = []
    for e in middles:
        monos = _all_maps(a, e, lambda f: f.is_mono())
        epis = _all_maps(e, c, lambda f: f.is_epi())
        for i_map in monos:
            for p_map in epis:
                if (p_map @ i_map).is_zero():
                    sequences.append((i_map, p_map))
    classes = []
    for seq in sequences:
        if any(_ladder_equivalent(seq, rep) for rep in classes):
            continue
        classes.append(seq)
    return len(classes)


def _all_maps(m, n, keep):
    basis = hom_basis(m, n)
    out = []
    if not basis:
        if keep(zero_morphism(m, n)):
            out.append(zero_morphism(m, n))
        return out
    p = m.p
    for coeffs in itertools.product(range(p), repeat=len(basis)):
        f = zero_morphism(m, n)
        for c_val, b in zip(coeffs, basis):
            for _ in range(c_val):
                f = f + b
        if keep(f):
            out.append(f)
    return out


def _ladder_equivalent(seq1, seq2):
    """Is there a middle map h with h i = i' and p' h = p?

    By the five lemma such an h is an isomorphism, so this is exactly
    equivalence of extensions.
    """
    i1, p1 = seq1
    i2, p2 = seq2
    if i1.cod.dim != i2.cod.dim:
        return False
    system = LinearSystem(i1.p)
    h = system.var("h", i2.cod.dim, i1.cod.dim)
    system.add_equation([(None, h, i1.matrix)], i2.matrix)
    system.add_equation([(p2.matrix, h, None)], p1.matrix)
    mid1, mid2 = i1.cod, i2.cod
    for idx in range(mid1.algebra.dim):
        system.add_equation(
            [(None, h, mid1.action[idx]), (-mid2.action[idx], h, None)],
            FieldMatrix.zeros(i1.p, mid2.dim, mid1.dim),
        )
    return system.solve() is not None


# ---------------------------------------------------------------------------
# cotorsion pairs
# ---------------------------------------------------------------------------


class CotorsionPair:
    """A (left class, right class) pair with completeness resolutions.

    ``kind`` is one of "all_injectives" (left = everything, right =
    injectives) and "projectives_all" (left = projectives, right =
    everything).  The chain-complex analogue lives with the chain module.
    """

    def __init__(self, algebra, kind):
        if kind not in ("all_injectives", "projectives_all"):
            raise ValidationError("unknown cotorsion pair kind %r" % kind)
        self.algebra = algebra
        self.kind = kind

    def in_left(self, m):
        self._check_parent(m)
        if self.kind == "all_injectives":
            return True
        return is_projective(m)

    def in_right(self, m):
        self._check_parent(m)
        if self.kind == "all_injectives":
            return is_injective(m)
        return True

    def resolve_right(self, m):
        """Sequence 0 -> m -> I -> P -> 0 with I right-class and P left-class."""
        self._check_parent(m)
        if self.kind == "all_injectives":
            if is_injective(m):
                z = zero_module(self.algebra)
                return ShortExactSequence(identity_morphism(m), zero_morphism(m, z))
            emb = injective_embedding(m)
            _, q = cokernel(emb)
            return ShortExactSequence(emb, q)
        # (projectives, all): the right class is everything, so m itself works
        z = zero_module(self.algebra)
        return ShortExactSequence(identity_morphism(m), zero_morphism(m, z))

    def resolve_left(self, m):
        """Sequence 0 -> I' -> P' -> m -> 0 with P' left-class and I' right-class."""
        self._check_parent(m)
        if self.kind == "projectives_all":
            cover = free_cover(m)
            _, incl = kernel(cover)
            return ShortExactSequence(incl, cover)
        # (all, injectives): the left class is everything
        z = zero_module(self.algebra)
        return ShortExactSequence(zero_morphism(z, m), identity_morphism(m))

    def _check_parent(self, m):
        if m.algebra.digest != self.algebra.digest:
            raise ValidationError("module belongs to a different algebra")


def all_injectives_pair(algebra):
    return CotorsionPair(algebra, "all_injectives")


def projectives_all_pair(algebra):
    return CotorsionPair(algebra, "projectives_all")


def pair_validate(pair, samples):
    """Check orthogonality and the hereditary closure properties on a sample.

    Reports Ext^1(left, right) != 0 violations, kernels of surjections
    between left-class objects leaving the left class, and cokernels of
    injections between right-class objects leaving the right class.
    """
    left = [m for m in samples if pair.in_left(m)]
    right = [m for m in samples if pair.in_right(m)]
    orth_failures = []
    for c_obj in left:
        for r_obj in right:
            if ext1(c_obj, r_obj).dimension != 0:
                orth_failures.append((c_obj.digest, r_obj.digest))
    left_kernel_failures = []
    checked_epis = 0
    for m in left:
        for n in left:
            for f in _some_maps(m, n):
                if not f.is_epi():
                    continue
                checked_epis += 1
                ker_mod, _ = kernel(f)
                if not pair.in_left(ker_mod):
                    left_kernel_failures.append((m.digest, n.digest))
    right_cokernel_failures = []
    checked_monos = 0
    for m in right:
        for n in right:
            for f in _some_maps(m, n):
                if not f.is_mono():
                    continue
                checked_monos += 1
                cok_mod, _ = cokernel(f)
                if not pair.in_right(cok_mod):
                    right_cokernel_failures.append((m.digest, n.digest))
    return {
        "ok": not (orth_failures or left_kernel_failures or right_cokernel_failures),
        "orthogonality_failures": orth_failures,
        "left_kernel_failures": left_kernel_failures,
        "right_cokernel_failures": right_cokernel_failures,
        "checked": {
            "cross_pairs": len(left) * len(right),
            "epis": checked_epis,
            "monos": checked_monos,
        },
    }


_MAP_SAMPLE_CAP = 256


def _some_maps(m, n):
    """All maps m -> n when the hom space is small, a seeded sample otherwise."""
    basis = hom_basis(m, n)
    p = m.p
    if not basis:
        return [zero_morphism(m, n)]
    if p ** len(basis) <= _MAP_SAMPLE_CAP:
        out = []
        for coeffs in itertools.product(range(p), repeat=len(basis)):
            f = zero_morphism(m, n)
            for c_val, b in zip(coeffs, basis):
                if c_val:
                    for _ in range(c_val):
                        f = f + b
            out.append(f)
        return out
    rng = np.random.default_rng(int(m.digest[:8], 16) ^ int(n.digest[:8], 16))
    out = list(basis)
    for _ in range(32):
        coeffs = rng.integers(0, p, size=len(basis))
        f = zero_morphism(m, n)
        for c_val, b in zip(coeffs, basis):
            for _ in range(int(c_val)):
                f = f + b
        out.append(f)
    return out


# ---------------------------------------------------------------------------
# cosyzygies and injective dimension witnesses
# ---------------------------------------------------------------------------


def cosyzygy(m):
    """Cokernel of an injective embedding of m."""
    emb = injective_embedding(m)
    cok, _ = cokernel(emb)
    return cok


def strip_injective_summands(m):
    """Drop every injective indecomposable summand."""
    if m.dim == 0:
        return m
    pieces = indecomposable_summands(m)
    keep = [piece for piece, _, _ in pieces if not is_injective(piece)]
    if not keep:
        return zero_module(m.algebra)
    if len(keep) == len(pieces):
        return m
    total, _, _ = direct_sum(keep)
    return total


def iterated_cosyzygies(m, steps):
    """Reduced cosyzygy sequence: strip injective summands after each step.

    Returns the list of successive reduced cosyzygies, stopping early once
    the zero module appears.
    """
    out = []
    current = strip_injective_summands(m)
    for _ in range(steps):
        if current.dim == 0:
            break
        current = strip_injective_summands(cosyzygy(current))
        out.append(current)
        if current.dim == 0:
            break
    return out


def injective_dimension_within(m, cutoff):
    """Injective dimension if it is at most cutoff, else None ("not within bound")."""
    if cutoff < 0:
        raise ValidationError("cutoff must be nonnegative")
    current = strip_injective_summands(m)
    for n in range(cutoff + 1):
        if current.dim == 0:
            return n
        current = strip_injective_summands(cosyzygy(current))
    return None

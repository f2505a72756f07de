"""The category of spans over a module category, with its induced pair.

A span is a diagram left <-(g)- apex -(f)-> right.  A complete cotorsion
pair (P, I) on modules induces a pair on spans: the left class consists
of spans with all three components in P whose right leg is a cofibration;
the right class of spans with components in I whose left leg is an
acyclic fibration.  This module provides the span types, membership and
map-class tests, both completeness resolutions (built step by step with
every intermediate membership validated), the canonical factorization,
and lifting.
"""

import hashlib

from .algebra import (
    Morphism,
    ShortExactSequence,
    cokernel,
    corestrict,
    direct_sum,
    identity_morphism,
    kernel,
    pullback,
    zero_module,
    zero_morphism,
)
from .errors import (
    InternalInconsistencyError,
    ValidationError,
)
from .homological import induced_on_cokernel
from .linalg import FieldMatrix, LinearSystem


class SpanObject:
    """A diagram left <- apex -> right of modules over one algebra."""

    def __init__(self, g, f):
        if g.dom != f.dom:
            raise ValidationError("span legs must share their apex")
        self.g = g
        self.f = f
        self.apex = g.dom
        self.left = g.cod
        self.right = f.cod
        h = hashlib.sha256()
        for part in (self.left.digest, self.apex.digest, self.right.digest):
            h.update(part.encode())
        h.update(g.matrix.a.tobytes())
        h.update(f.matrix.a.tobytes())
        self.digest = h.hexdigest()

    def __eq__(self, other):
        return isinstance(other, SpanObject) and self.digest == other.digest

    def __hash__(self):
        return hash(self.digest)

    def __repr__(self):
        return "SpanObject(%d <- %d -> %d)" % (
            self.left.dim,
            self.apex.dim,
            self.right.dim,
        )


def span_zero(algebra):
    z = zero_module(algebra)
    return SpanObject(zero_morphism(z, z), zero_morphism(z, z))


def span_of_module(m):
    """The span 0 <- 0 -> 0 enlarged at one slot is rarely what is wanted;
    this builds m <- m -> m with identity legs."""
    return SpanObject(identity_morphism(m), identity_morphism(m))


class SpanMorphism:
    """Three component maps making both leg squares commute."""

    def __init__(self, dom, cod, left, apex, right, check=True):
        self.dom = dom
        self.cod = cod
        self.left = left
        self.apex = apex
        self.right = right
        if check:
            if left.dom != dom.left or left.cod != cod.left:
                raise ValidationError("left component endpoints do not match")
            if apex.dom != dom.apex or apex.cod != cod.apex:
                raise ValidationError("apex component endpoints do not match")
            if right.dom != dom.right or right.cod != cod.right:
                raise ValidationError("right component endpoints do not match")
            if (left @ dom.g) != (cod.g @ apex):
                raise ValidationError("left naturality square does not commute")
            if (right @ dom.f) != (cod.f @ apex):
                raise ValidationError("right naturality square does not commute")

    def __matmul__(self, other):
        if other.cod != self.dom:
            raise ValidationError("span morphisms are not composable")
        return SpanMorphism(
            other.dom,
            self.cod,
            self.left @ other.left,
            self.apex @ other.apex,
            self.right @ other.right,
            check=False,
        )

    def __eq__(self, other):
        return (
            isinstance(other, SpanMorphism)
            and self.left == other.left
            and self.apex == other.apex
            and self.right == other.right
        )

    def components(self):
        return (self.left, self.apex, self.right)

    def is_mono(self):
        return all(c.is_mono() for c in self.components())

    def is_epi(self):
        return all(c.is_epi() for c in self.components())


def identity_span_morphism(s):
    return SpanMorphism(
        s,
        s,
        identity_morphism(s.left),
        identity_morphism(s.apex),
        identity_morphism(s.right),
        check=False,
    )


def span_direct_sum(s1, s2):
    """Componentwise direct sum with injection and projection span maps."""
    left, (il1, il2), (pl1, pl2) = direct_sum([s1.left, s2.left])
    apex, (ia1, ia2), (pa1, pa2) = direct_sum([s1.apex, s2.apex])
    right, (ir1, ir2), (pr1, pr2) = direct_sum([s1.right, s2.right])
    g = (il1 @ s1.g @ pa1) + (il2 @ s2.g @ pa2)
    f = (ir1 @ s1.f @ pa1) + (ir2 @ s2.f @ pa2)
    total = SpanObject(g, f)
    inj1 = SpanMorphism(s1, total, il1, ia1, ir1)
    inj2 = SpanMorphism(s2, total, il2, ia2, ir2)
    proj1 = SpanMorphism(total, s1, pl1, pa1, pr1)
    proj2 = SpanMorphism(total, s2, pl2, pa2, pr2)
    return total, (inj1, inj2), (proj1, proj2)


class SpanSES:
    """A short exact sequence of spans, validated strand by strand."""

    def __init__(self, mono, epi, check=True):
        self.mono = mono
        self.epi = epi
        self.sub = mono.dom
        self.mid = mono.cod
        self.quot = epi.cod
        if check:
            problems = self.validate()
            if problems:
                raise ValidationError("span sequence is not exact", problems)

    def validate(self):
        problems = []
        if self.mono.cod != self.epi.dom:
            return ["mono and epi do not share the middle span"]
        for name in ("left", "apex", "right"):
            m = getattr(self.mono, name)
            e = getattr(self.epi, name)
            strand = ShortExactSequence(m, e, check=False)
            for issue in strand.validate():
                problems.append("%s strand: %s" % (name, issue))
        return problems

    def strand(self, name):
        return ShortExactSequence(
            getattr(self.mono, name), getattr(self.epi, name), check=False
        )

    def is_split(self):
        """Look for a section of the epi that is a map of spans."""
        return span_section(self.epi) is not None


def span_section(e):
    """A span morphism s with e o s = identity, or None."""
    q = e.cod
    system = LinearSystem(q.apex.p)
    s_left = system.var("left", e.dom.left.dim, q.left.dim)
    s_apex = system.var("apex", e.dom.apex.dim, q.apex.dim)
    s_right = system.var("right", e.dom.right.dim, q.right.dim)
    _add_equivariance(system, s_left, q.left, e.dom.left)
    _add_equivariance(system, s_apex, q.apex, e.dom.apex)
    _add_equivariance(system, s_right, q.right, e.dom.right)
    # naturality of the section
    system.add_equation(
        [(None, s_left, q.g.matrix), (-e.dom.g.matrix, s_apex, None)],
        FieldMatrix.zeros(q.apex.p, e.dom.left.dim, q.apex.dim),
    )
    system.add_equation(
        [(None, s_right, q.f.matrix), (-e.dom.f.matrix, s_apex, None)],
        FieldMatrix.zeros(q.apex.p, e.dom.right.dim, q.apex.dim),
    )
    # e o s = 1
    system.add_equation(
        [(e.left.matrix, s_left, None)], FieldMatrix.identity(q.apex.p, q.left.dim)
    )
    system.add_equation(
        [(e.apex.matrix, s_apex, None)], FieldMatrix.identity(q.apex.p, q.apex.dim)
    )
    system.add_equation(
        [(e.right.matrix, s_right, None)], FieldMatrix.identity(q.apex.p, q.right.dim)
    )
    sol = system.solve()
    if sol is None:
        return None
    return SpanMorphism(
        q,
        e.dom,
        Morphism(q.left, e.dom.left, sol["left"], check=False),
        Morphism(q.apex, e.dom.apex, sol["apex"], check=False),
        Morphism(q.right, e.dom.right, sol["right"], check=False),
    )


def _add_equivariance(system, var, dom_mod, cod_mod):
    p = dom_mod.p
    for idx in range(dom_mod.algebra.dim):
        system.add_equation(
            [(None, var, dom_mod.action[idx]), (-cod_mod.action[idx], var, None)],
            FieldMatrix.zeros(p, cod_mod.dim, dom_mod.dim),
        )


# ---------------------------------------------------------------------------
# induced classes
# ---------------------------------------------------------------------------


def span_in_P(s, pair):
    """All three components in the left class and the right leg a cofibration."""
    for m in (s.left, s.apex, s.right):
        if not pair.in_left(m):
            return False
    if not s.f.is_mono():
        return False
    cok, _ = cokernel(s.f)
    return pair.in_left(cok)


def span_in_I(s, pair):
    """All three components in the right class and the left leg an acyclic
    fibration."""
    for m in (s.left, s.apex, s.right):
        if not pair.in_right(m):
            return False
    if not s.g.is_epi():
        return False
    ker_mod, _ = kernel(s.g)
    return pair.in_right(ker_mod)


def span_cokernel(m):
    """Componentwise cokernel span of an injective span morphism."""
    cok_l, proj_l = cokernel(m.left)
    cok_a, proj_a = cokernel(m.apex)
    cok_r, proj_r = cokernel(m.right)
    g = induced_on_cokernel(proj_a, proj_l @ m.cod.g)
    f = induced_on_cokernel(proj_a, proj_r @ m.cod.f)
    span = SpanObject(g, f)
    proj = SpanMorphism(m.cod, span, proj_l, proj_a, proj_r)
    return span, proj


def span_kernel(m):
    """Componentwise kernel span of a surjective span morphism."""
    ker_l, inc_l = kernel(m.left)
    ker_a, inc_a = kernel(m.apex)
    ker_r, inc_r = kernel(m.right)
    g = corestrict(m.dom.g @ inc_a, inc_l)
    f = corestrict(m.dom.f @ inc_a, inc_r)
    span = SpanObject(g, f)
    inc = SpanMorphism(span, m.dom, inc_l, inc_a, inc_r)
    return span, inc


def span_is_cofibration(m, pair):
    """Componentwise injections between left-class spans whose cokernel span
    is again in the left class."""
    if not span_in_P(m.dom, pair) or not span_in_P(m.cod, pair):
        return False
    if not m.is_mono():
        return False
    cok_span, _ = span_cokernel(m)
    return span_in_P(cok_span, pair)


def span_is_acyclic_fibration(m, pair):
    """Componentwise surjections whose kernel span is in the right class."""
    if not m.is_epi():
        return False
    ker_span, _ = span_kernel(m)
    return span_in_I(ker_span, pair)


# ---------------------------------------------------------------------------
# the two completeness resolutions
# ---------------------------------------------------------------------------


def _lift_through(epi, target):
    """A map l with epi o l = target (exists when the domain of ``target``
    is left-class and the kernel of ``epi`` is right-class)."""
    system = LinearSystem(epi.p)
    l = system.var("l", epi.dom.dim, target.dom.dim)
    _add_equivariance(system, l, target.dom, epi.dom)
    system.add_equation([(epi.matrix, l, None)], target.matrix)
    sol = system.solve()
    if sol is None:
        return None
    return Morphism(target.dom, epi.dom, sol["l"], check=False)


def _extend_through(mono, target):
    """A map e with e o mono = target (exists when the cokernel of ``mono``
    is left-class and the codomain of ``target`` is right-class)."""
    system = LinearSystem(mono.p)
    e = system.var("e", target.cod.dim, mono.cod.dim)
    _add_equivariance(system, e, mono.cod, target.cod)
    system.add_equation([(None, e, mono.matrix)], target.matrix)
    sol = system.solve()
    if sol is None:
        return None
    return Morphism(mono.cod, target.cod, sol["e"], check=False)


def _require(cond, message):
    if not cond:
        raise ValidationError(message)


def span_resolve_right(x, pair):
    """Resolution 0 -> I -> P -> x -> 0 with I right-class, P left-class.

    Follows the constructive completeness proof: resolve the apex and left
    components, lift the left leg through the acyclic fibration of the
    left resolution, repair the induced kernel map by adding an auxiliary
    summand that surjects onto the left kernel object, then factor the
    right-leg lift so its cofibration part becomes the right leg of the
    left-class span.  Every membership is validated and failures name the
    strand.
    """
    a, b, c = x.apex, x.right, x.left
    res_a = pair.resolve_left(a)
    res_c = pair.resolve_left(c)
    i_a, p_a = res_a.sub, res_a.mid
    alpha2, alpha1 = res_a.mono, res_a.epi
    i_c, p_c = res_c.sub, res_c.mid
    gamma2, gamma1 = res_c.mono, res_c.epi
    g1 = _lift_through(gamma1, x.g @ alpha1)
    if g1 is None:
        raise InternalInconsistencyError("left-leg lift through the resolution failed")
    g2 = corestrict(g1 @ alpha2, gamma2)
    # auxiliary resolution making the kernel-strand left map an acyclic fibration
    res_ic = pair.resolve_left(i_c)
    p_ic = res_ic.mid
    h = res_ic.epi
    if not pair.in_right(p_ic):
        raise InternalInconsistencyError(
            "auxiliary cover is not right-class; the right class is not "
            "closed under extensions here"
        )
    ia2_mod, (inj_ia, inj_pic_i), (proj_ia, proj_pic_i) = direct_sum([i_a, p_ic])
    pa2_mod, (inj_pa, inj_pic_p), (proj_pa, proj_pic_p) = direct_sum([p_a, p_ic])
    mono2 = (inj_pa @ alpha2 @ proj_ia) + (inj_pic_p @ proj_pic_i)
    epi2 = alpha1 @ proj_pa
    g_i = (g2 @ proj_ia) + (h @ proj_pic_i)
    g_p = (g1 @ proj_pa) + (gamma2 @ h @ proj_pic_p)
    _require(g_i.is_epi(), "left strand: repaired kernel map is not surjective")
    ker_gi, _ = kernel(g_i)
    _require(
        pair.in_right(ker_gi),
        "left strand: kernel of the repaired map is not right-class",
    )
    # right strand
    res_b = pair.resolve_left(b)
    i_b, p_b = res_b.sub, res_b.mid
    beta2, beta1 = res_b.mono, res_b.epi
    f1 = _lift_through(beta1, x.f @ epi2)
    if f1 is None:
        raise InternalInconsistencyError("right-leg lift through the resolution failed")
    # factor f1 as a cofibration followed by an acyclic fibration
    res_pa2 = pair.resolve_right(pa2_mod)
    j = res_pa2.mono
    pbar_mod, (inj_j, inj_pb), (proj_j, proj_pb) = direct_sum([j.cod, p_b])
    i_map = (inj_j @ j) + (inj_pb @ f1)
    p_map = proj_pb
    _require(i_map.is_mono(), "right strand: factored injection is not injective")
    cok_i, _ = cokernel(i_map)
    _require(
        pair.in_left(cok_i),
        "right strand: cokernel of the factored injection is not left-class",
    )
    epi_b = beta1 @ p_map
    ker_b_mod, incl_b = kernel(epi_b)
    _require(
        pair.in_right(ker_b_mod),
        "right strand: kernel of the composite surjection is not right-class",
    )
    f2 = corestrict(i_map @ mono2, incl_b)
    # assemble
    i_span = SpanObject(g_i, f2)
    p_span = SpanObject(g_p, i_map)
    mono = SpanMorphism(i_span, p_span, gamma2, mono2, incl_b)
    epi = SpanMorphism(p_span, x, gamma1, epi2, epi_b)
    out = SpanSES(mono, epi)
    _require(span_in_I(i_span, pair), "kernel span failed the right-class test")
    _require(span_in_P(p_span, pair), "middle span failed the left-class test")
    return out


def span_resolve_dual(x, pair):
    """Resolution 0 -> x -> I -> P -> 0 with I right-class, P left-class.

    The mirror of span_resolve_right: co-resolve the apex and left
    components, extend the left leg over the apex embedding, repair it
    into an acyclic fibration with the same auxiliary-summand trick, then
    pull the right strand back along the factored cokernel map so the
    quotient span's right leg is a cofibration.
    """
    a, b, c = x.apex, x.right, x.left
    res_a = pair.resolve_right(a)
    alpha = res_a.mono      # a into I_A
    res_c = pair.resolve_right(c)
    gamma = res_c.mono      # c into I_C
    pi_c = res_c.epi
    i_c = gamma.cod
    g1 = _extend_through(alpha, gamma @ x.g)
    if g1 is None:
        raise InternalInconsistencyError("left-leg extension over the embedding failed")
    res_ic = pair.resolve_left(i_c)
    p_ic = res_ic.mid
    h = res_ic.epi
    if not pair.in_right(p_ic):
        raise InternalInconsistencyError(
            "auxiliary cover is not right-class; the right class is not "
            "closed under extensions here"
        )
    ia2_mod, (inj_ia, inj_pic), (proj_ia, proj_pic) = direct_sum([alpha.cod, p_ic])
    mono_a = inj_ia @ alpha                     # a into I_A (+) P_{I_C}
    g_i = (g1 @ proj_ia) + (h @ proj_pic)       # repaired left leg
    _require(g_i.is_epi(), "left strand: repaired left leg is not surjective")
    ker_gi, _ = kernel(g_i)
    _require(
        pair.in_right(ker_gi),
        "left strand: kernel of the repaired left leg is not right-class",
    )
    pa2_mod, pi_a = cokernel(mono_a)
    c_left = induced_on_cokernel(pi_a, pi_c @ g_i)
    _require(pair.in_left(pa2_mod), "apex strand: cokernel is not left-class")
    # right strand
    res_b = pair.resolve_right(b)
    beta = res_b.mono
    pi_b = res_b.epi
    f1 = _extend_through(mono_a, beta @ x.f)
    if f1 is None:
        raise InternalInconsistencyError("right-leg extension over the embedding failed")
    c_right = induced_on_cokernel(pi_a, pi_b @ f1)
    # factor the induced cokernel map as cofibration then acyclic fibration
    res_pa2 = pair.resolve_right(pa2_mod)
    j = res_pa2.mono
    q_mod, (inj_j, inj_pb), (proj_j, proj_pb) = direct_sum([j.cod, pi_b.cod])
    i_c_map = (inj_j @ j) + (inj_pb @ c_right)
    p_c_map = proj_pb
    _require(i_c_map.is_mono(), "right strand: factored injection is not injective")
    cok_ic, _ = cokernel(i_c_map)
    _require(
        pair.in_left(cok_ic),
        "right strand: cokernel of the factored injection is not left-class",
    )
    ker_pc, _ = kernel(p_c_map)
    _require(
        pair.in_right(ker_pc),
        "right strand: kernel of the factored surjection is not right-class",
    )
    # pull the co-resolution of b back along the acyclic fibration
    ib_hat, to_ib, to_q = pullback(pi_b, p_c_map)
    _require(to_q.is_epi(), "right strand: pullback projection is not surjective")
    ker_hat, _ = kernel(to_q)
    # mono b -> pullback induced by (beta, 0)
    mono_b = _pullback_induced(pi_b, p_c_map, to_ib, to_q, beta)
    f_hat = _pullback_induced(pi_b, p_c_map, to_ib, to_q, f1, i_c_map @ pi_a)
    i_span = SpanObject(g_i, f_hat)
    p_span = SpanObject(c_left, i_c_map)
    mono = SpanMorphism(x, i_span, gamma, mono_a, mono_b)
    epi = SpanMorphism(i_span, p_span, pi_c, pi_a, to_q)
    out = SpanSES(mono, epi)
    _require(span_in_I(i_span, pair), "middle span failed the right-class test")
    _require(span_in_P(p_span, pair), "quotient span failed the left-class test")
    return out


def _pullback_induced(f, g, to_b, to_c, leg_b, leg_c=None):
    """Map into the pullback of (f: B -> A, g: C -> A) from compatible legs.

    ``leg_c`` may be omitted when it is the zero map.
    """
    dom = leg_b.dom
    if leg_c is None:
        leg_c = zero_morphism(dom, g.dom)
    if (f @ leg_b) != (g @ leg_c):
        raise InternalInconsistencyError("pullback legs do not agree")
    system = LinearSystem(f.p)
    u = system.var("u", to_b.dom.dim, dom.dim)
    _add_equivariance(system, u, dom, to_b.dom)
    system.add_equation([(to_b.matrix, u, None)], leg_b.matrix)
    system.add_equation([(to_c.matrix, u, None)], leg_c.matrix)
    sol = system.solve()
    if sol is None:
        raise InternalInconsistencyError("pullback factorization failed")
    return Morphism(dom, to_b.dom, sol["u"], check=False)


# ---------------------------------------------------------------------------
# factorization and lifting in spans
# ---------------------------------------------------------------------------


def span_factor(m, pair):
    """Factor a span morphism as a cofibration followed by an acyclic
    fibration, through the dual resolution of the domain summed with the
    codomain.  Returns (i, p); raises with the list of failed conditions
    when the factor legs miss their classes.
    """
    dr = span_resolve_dual(m.dom, pair)
    j = dr.mono                       # dom into the right-class span
    middle, (inj1, inj2), (proj1, proj2) = span_direct_sum(j.cod, m.cod)
    i = SpanMorphism(
        m.dom,
        middle,
        (inj1.left @ j.left) + (inj2.left @ m.left),
        (inj1.apex @ j.apex) + (inj2.apex @ m.apex),
        (inj1.right @ j.right) + (inj2.right @ m.right),
    )
    p = proj2
    if (p @ i) != m:
        raise InternalInconsistencyError("span factorization does not compose")
    failures = []
    if not i.is_mono():
        failures.append("injection leg is not componentwise injective")
    else:
        cok_span, _ = span_cokernel(i)
        if not span_in_P(cok_span, pair):
            failures.append("cokernel span of the injection is not left-class")
    if not p.is_epi():
        failures.append("projection leg is not componentwise surjective")
    else:
        ker_span, _ = span_kernel(p)
        if not span_in_I(ker_span, pair):
            failures.append("kernel span of the projection is not right-class")
    if failures:
        raise ValidationError("span factorization validation failed", failures)
    return i, p


def span_lift(i, p, top, bottom):
    """Diagonal span morphism h with h o i = top and p o h = bottom.

    ``i`` should be a span cofibration and ``p`` a span acyclic fibration;
    the square must commute.  All component, naturality, and triangle
    constraints are solved as one linear system.
    """
    if (p @ top) != (bottom @ i):
        raise ValidationError("span lifting square does not commute")
    dom_s = i.cod
    cod_s = p.dom
    system = LinearSystem(dom_s.apex.p)
    h_left = system.var("left", cod_s.left.dim, dom_s.left.dim)
    h_apex = system.var("apex", cod_s.apex.dim, dom_s.apex.dim)
    h_right = system.var("right", cod_s.right.dim, dom_s.right.dim)
    _add_equivariance(system, h_left, dom_s.left, cod_s.left)
    _add_equivariance(system, h_apex, dom_s.apex, cod_s.apex)
    _add_equivariance(system, h_right, dom_s.right, cod_s.right)
    p_field = dom_s.apex.p
    system.add_equation(
        [(None, h_left, dom_s.g.matrix), (-cod_s.g.matrix, h_apex, None)],
        FieldMatrix.zeros(p_field, cod_s.left.dim, dom_s.apex.dim),
    )
    system.add_equation(
        [(None, h_right, dom_s.f.matrix), (-cod_s.f.matrix, h_apex, None)],
        FieldMatrix.zeros(p_field, cod_s.right.dim, dom_s.apex.dim),
    )
    for var, i_c, top_c in (
        (h_left, i.left, top.left),
        (h_apex, i.apex, top.apex),
        (h_right, i.right, top.right),
    ):
        system.add_equation([(None, var, i_c.matrix)], top_c.matrix)
    for var, p_c, bot_c in (
        (h_left, p.left, bottom.left),
        (h_apex, p.apex, bottom.apex),
        (h_right, p.right, bottom.right),
    ):
        system.add_equation([(p_c.matrix, var, None)], bot_c.matrix)
    sol = system.solve()
    if sol is None:
        raise InternalInconsistencyError(
            "no span lift exists; preconditions were not satisfied"
        )
    return SpanMorphism(
        dom_s,
        cod_s,
        Morphism(dom_s.left, cod_s.left, sol["left"], check=False),
        Morphism(dom_s.apex, cod_s.apex, sol["apex"], check=False),
        Morphism(dom_s.right, cod_s.right, sol["right"], check=False),
    )

"""Seeded random instance generators for the axiom checkers.

All generators take a numpy Generator so runs are reproducible.
Instances are valid by construction: commuting squares are assembled
from block maps (sums with objects of the relevant class, twisted by
random automorphisms), so a correct implementation of the axioms should
report PASS on every generated instance over a structure that satisfies
the construction hypotheses.
"""

from .algebra import (
    Morphism,
    ShortExactSequence,
    cokernel,
    direct_sum,
    enumerate_modules,
    hom_basis,
    identity_morphism,
    zero_morphism,
)
from .chains import (
    ChainComplex,
    ChainMap,
    chain_direct_sum,
    cone,
    identity_chain_map,
)
from .errors import ValidationError
from .linalg import FieldMatrix, LinearSystem
from .spans import SpanMorphism, SpanObject, SpanSES
from .waldhausen import (
    ExtensionInstance,
    GluingInstance,
    PropernessInstance,
)


def random_combination(rng, dom, cod):
    """A random morphism as a coefficient combination of the hom basis."""
    basis = hom_basis(dom, cod)
    f = zero_morphism(dom, cod)
    if not basis:
        return f
    coeffs = rng.integers(0, dom.p, size=len(basis))
    for c_val, b in zip(coeffs, basis):
        for _ in range(int(c_val)):
            f = f + b
    return f


def random_automorphism(rng, m, tries=50):
    """A random invertible endomorphism (falls back to the identity)."""
    for _ in range(tries):
        f = random_combination(rng, m, m)
        if f.is_iso():
            return f
    return identity_morphism(m)


def random_module(rng, algebra, max_dim, nonzero=False):
    mods = enumerate_modules(algebra, max_dim)
    if nonzero:
        mods = [m for m in mods if m.dim > 0]
    return mods[int(rng.integers(0, len(mods)))]


def class_samples(w, max_dim, predicate):
    return [m for m in enumerate_modules(w.algebra, max_dim) if predicate(m)]


def zc_samples(w, max_dim):
    return class_samples(w, max_dim, w.in_zc)


def cperp_samples(w, max_dim):
    return class_samples(w, max_dim, w.pair.in_right)


def _pick(rng, items):
    return items[int(rng.integers(0, len(items)))]


def random_cofibration(w, rng, dom, max_dim=3, tries=200):
    """A random injection out of ``dom`` whose cokernel lies in C."""
    mods = [
        m
        for m in enumerate_modules(w.algebra, max_dim)
        if m.dim >= dom.dim and w.in_c(m)
    ]
    for _ in range(tries):
        cod = _pick(rng, mods)
        f = random_combination(rng, dom, cod)
        if not f.is_mono():
            continue
        cok, _ = cokernel(f)
        if w.in_c(cok):
            return f
    raise ValidationError("no cofibration found within the try budget")


def random_acyclic_cofibration(w, rng, dom, max_dim=2):
    """dom into dom (+) W with W in Z-intersect-C, twisted by an automorphism."""
    wobj = _pick(rng, zc_samples(w, max_dim))
    total, (inj_dom, _), _ = direct_sum([dom, wobj])
    u = random_automorphism(rng, total)
    return u @ inj_dom


def random_acyclic_fibration(w, rng, cod, max_dim=2):
    """cod (+) K onto cod with K right-orthogonal, twisted by an automorphism."""
    kobj = _pick(rng, cperp_samples(w, max_dim))
    total, _, (proj_cod, _) = direct_sum([cod, kobj])
    u = random_automorphism(rng, total)
    return proj_cod @ u


def random_weq_from(w, rng, dom, max_dim=2):
    """A weak equivalence out of ``dom``.

    Built as an acyclic cofibration dom -> dom (+) W (+) K followed by an
    acyclic fibration dropping K; the padding K is taken in the
    intersection of the right-orthogonal class with Z-intersect-C so both
    legs have the required cokernel and kernel classes.  Independent
    automorphism twists keep the composite from collapsing to a block
    inclusion.
    """
    wobj = _pick(rng, zc_samples(w, max_dim))
    kobj = _pick(rng, [m for m in cperp_samples(w, max_dim) if w.in_zc(m)])
    stage, (inj_dom, _), _ = direct_sum([dom, wobj])
    total, (inj_stage, _), (proj_stage, _) = direct_sum([stage, kobj])
    u1 = random_automorphism(rng, total)
    u2 = random_automorphism(rng, total)
    i = u1 @ inj_stage @ inj_dom      # cokernel is W (+) K, in Z-intersect-C
    q = proj_stage @ u2               # kernel is (a twist of) K, right-orthogonal
    return q @ i


def gluing_instance(w, rng, max_dim=2):
    """A commuting pair of spans whose verticals are weak equivalences.

    Mode 0 inflates the bottom row by Z-intersect-C objects (verticals are
    acyclic cofibrations); mode 1 deflates the top row by a
    right-orthogonal object (verticals are acyclic fibrations).
    """
    apex = random_module(rng, w.algebra, max_dim)
    i = random_cofibration(w, rng, apex, max_dim + 1)
    cobj = random_module(rng, w.algebra, max_dim)
    j = random_combination(rng, apex, cobj)
    mode = int(rng.integers(0, 2))
    if mode == 0:
        wb = _pick(rng, zc_samples(w, max_dim))
        wc = _pick(rng, zc_samples(w, max_dim))
        _, (inj_b, _), _ = direct_sum([i.cod, wb])
        _, (inj_c, _), _ = direct_sum([cobj, wc])
        return GluingInstance(
            i, j, inj_b @ i, inj_c @ j, identity_morphism(apex), inj_b, inj_c
        )
    ka = _pick(rng, cperp_samples(w, max_dim))
    _, (inj_a, inj_ka), (proj_a, p2a) = direct_sum([apex, ka])
    _, (inj_b, inj_kb), (proj_b, _) = direct_sum([i.cod, ka])
    _, (inj_c, inj_kc), (proj_c, _) = direct_sum([cobj, ka])
    i_top = (inj_b @ i @ proj_a) + (inj_kb @ p2a)
    j_top = (inj_c @ j @ proj_a) + (inj_kc @ p2a)
    return GluingInstance(i_top, j_top, i, j, proj_a, proj_b, proj_c)


def random_ses(w, rng, max_dim=2, tries=200):
    """A short exact sequence of C-objects whose injection is a cofibration."""
    mods = [m for m in enumerate_modules(w.algebra, max_dim) if w.in_c(m)]
    mids = [m for m in mods if m.dim > 0]
    for _ in range(tries):
        mid = _pick(rng, mids)
        sub = _pick(rng, [m for m in mods if m.dim <= mid.dim])
        f = random_combination(rng, sub, mid)
        if not f.is_mono():
            continue
        quot, q = cokernel(f)
        if w.in_c(quot):
            return ShortExactSequence(f, q)
    raise ValidationError("no short exact sequence found within the try budget")


def extension_instance(w, rng, max_dim=2):
    """Two cofibration sequences with weak-equivalence outer verticals."""
    base = random_ses(w, rng, max_dim)
    mode = int(rng.integers(0, 3))
    if mode == 0:
        # bottom: 0 -> sub (+) W -> mid (+) W -> quot -> 0, inflate verticals
        wobj = _pick(rng, zc_samples(w, max_dim))
        _, (inj_s, _), (p1s, p2s) = direct_sum([base.sub, wobj])
        _, (inj_m, inj_wm), (proj_m, _) = direct_sum([base.mid, wobj])
        bot_mono = (inj_m @ base.mono @ p1s) + (inj_wm @ p2s)
        bot_epi = base.epi @ proj_m
        bottom = ShortExactSequence(bot_mono, bot_epi)
        return ExtensionInstance(
            base, bottom, inj_s, inj_m, identity_morphism(base.quot)
        )
    if mode == 1:
        # bottom: 0 -> sub -> mid (+) W -> quot (+) W -> 0
        wobj = _pick(rng, zc_samples(w, max_dim))
        _, (inj_m, inj_wm), (proj_m, proj_wm) = direct_sum([base.mid, wobj])
        _, (inj_q, inj_wq), _ = direct_sum([base.quot, wobj])
        bot_mono = inj_m @ base.mono
        bot_epi = (inj_q @ base.epi @ proj_m) + (inj_wq @ proj_wm)
        bottom = ShortExactSequence(bot_mono, bot_epi)
        return ExtensionInstance(
            base, bottom, identity_morphism(base.sub), inj_m, inj_q
        )
    # top: 0 -> sub (+) K -> mid (+) K -> quot -> 0, deflate verticals
    kobj = _pick(rng, cperp_samples(w, max_dim))
    _, (inj_s, inj_ks), (p1s, p2s) = direct_sum([base.sub, kobj])
    _, (inj_m, inj_km), (proj_m, _) = direct_sum([base.mid, kobj])
    top_mono = (inj_m @ base.mono @ p1s) + (inj_km @ p2s)
    top_epi = base.epi @ proj_m
    top = ShortExactSequence(top_mono, top_epi)
    return ExtensionInstance(
        top, base, p1s, proj_m, identity_morphism(base.quot)
    )


def saturation_instance(w, rng, max_dim=2):
    """A random composable pair of maps between C-objects."""
    mods = [m for m in enumerate_modules(w.algebra, max_dim) if w.in_c(m)]
    a = _pick(rng, mods)
    b = _pick(rng, mods)
    c = _pick(rng, mods)
    f = random_combination(rng, a, b)
    g = random_combination(rng, b, c)
    return f, g


def properness_instance(w, rng, max_dim=2):
    """A weak equivalence to push along a cofibration or pull along an epi."""
    if int(rng.integers(0, 2)) == 0:
        apex = random_module(rng, w.algebra, max_dim)
        f = random_cofibration(w, rng, apex, max_dim + 1)
        a = random_weq_from(w, rng, apex, max_dim)
        return PropernessInstance("pushout", f, a)
    base = random_module(rng, w.algebra, max_dim)
    extra = random_module(rng, w.algebra, max_dim)
    total, _, (proj_base, _) = direct_sum([base, extra])
    u = random_automorphism(rng, total)
    f = proj_base @ u
    a = random_acyclic_fibration(w, rng, base, max_dim)
    return PropernessInstance("pullback", f, a)


# ---------------------------------------------------------------------------
# span instances
# ---------------------------------------------------------------------------


def _class_modules(rng, algebra, max_dim, predicate, count):
    pool = [m for m in enumerate_modules(algebra, max_dim) if predicate(m)]
    return [_pick(rng, pool) for _ in range(count)]


def random_span(rng, algebra, max_dim=2):
    """A span with random components and random legs."""
    apex = random_module(rng, algebra, max_dim)
    left = random_module(rng, algebra, max_dim)
    right = random_module(rng, algebra, max_dim)
    return SpanObject(
        random_combination(rng, apex, left), random_combination(rng, apex, right)
    )


def random_span_in_P(pair, rng, max_dim=2):
    """A left-class span: left-class components, right leg a block cofibration."""
    apex, extra, left = _class_modules(
        rng, pair.algebra, max_dim, pair.in_left, 3
    )
    right, (inj_a, _), _ = direct_sum([apex, extra])
    u = random_automorphism(rng, right)
    f = u @ inj_a
    g = random_combination(rng, apex, left)
    return SpanObject(g, f)


def random_span_in_I(pair, rng, max_dim=2):
    """A right-class span: right-class components, left leg a block surjection."""
    left, ker_part, right = _class_modules(
        rng, pair.algebra, max_dim, pair.in_right, 3
    )
    apex, _, (proj_l, _) = direct_sum([left, ker_part])
    u = random_automorphism(rng, apex)
    g = proj_l @ u
    f = random_combination(rng, apex, right)
    return SpanObject(g, f)


def random_span_extension(rng, sub, quot):
    """A span extension of ``quot`` by ``sub`` with random corner twists.

    When the strandwise extensions split (which holds whenever one side
    is componentwise orthogonal to the other), every extension of spans
    is isomorphic to this block shape, so sampling the corners covers the
    extension space.
    """
    e_left, (il_s, il_q), (pl_s, pl_q) = direct_sum([sub.left, quot.left])
    e_apex, (ia_s, ia_q), (pa_s, pa_q) = direct_sum([sub.apex, quot.apex])
    e_right, (ir_s, ir_q), (pr_s, pr_q) = direct_sum([sub.right, quot.right])
    twist_g = random_combination(rng, quot.apex, sub.left)
    twist_f = random_combination(rng, quot.apex, sub.right)
    g = (il_s @ sub.g @ pa_s) + (il_s @ twist_g @ pa_q) + (il_q @ quot.g @ pa_q)
    f = (ir_s @ sub.f @ pa_s) + (ir_s @ twist_f @ pa_q) + (ir_q @ quot.f @ pa_q)
    mid = SpanObject(g, f)
    mono = SpanMorphism(sub, mid, il_s, ia_s, ir_s)
    epi = SpanMorphism(mid, quot, pl_q, pa_q, pr_q)
    return SpanSES(mono, epi)


def random_span_morphism(rng, dom, cod):
    """A uniformly random span morphism between two given spans.

    Samples the solution space of the naturality-and-equivariance system,
    so the result can be any morphism, not just a block construction.
    """
    p = dom.apex.p
    system = LinearSystem(p)
    v_left = system.var("left", cod.left.dim, dom.left.dim)
    v_apex = system.var("apex", cod.apex.dim, dom.apex.dim)
    v_right = system.var("right", cod.right.dim, dom.right.dim)
    for var, d_mod, c_mod in (
        (v_left, dom.left, cod.left),
        (v_apex, dom.apex, cod.apex),
        (v_right, dom.right, cod.right),
    ):
        for idx in range(dom.apex.algebra.dim):
            system.add_equation(
                [(None, var, d_mod.action[idx]), (-c_mod.action[idx], var, None)],
                FieldMatrix.zeros(p, c_mod.dim, d_mod.dim),
            )
    system.add_equation(
        [(None, v_left, dom.g.matrix), (-cod.g.matrix, v_apex, None)],
        FieldMatrix.zeros(p, cod.left.dim, dom.apex.dim),
    )
    system.add_equation(
        [(None, v_right, dom.f.matrix), (-cod.f.matrix, v_apex, None)],
        FieldMatrix.zeros(p, cod.right.dim, dom.apex.dim),
    )
    parts = _sample_solution(rng, system)
    return SpanMorphism(
        dom,
        cod,
        Morphism(dom.left, cod.left, parts["left"], check=False),
        Morphism(dom.apex, cod.apex, parts["apex"], check=False),
        Morphism(dom.right, cod.right, parts["right"], check=False),
    )


def _sample_solution(rng, system):
    """A random point of the solution space of a consistent linear system."""
    space = system.solution_space()
    if space is None:
        raise ValidationError("constraint system is inconsistent")
    particular, basis = space
    parts = dict(particular)
    for entry in basis:
        c_val = int(rng.integers(0, system.p))
        if c_val == 0:
            continue
        for name in parts:
            parts[name] = parts[name] + entry[name].scale(c_val)
    return parts


# ---------------------------------------------------------------------------
# chain instances
# ---------------------------------------------------------------------------


def random_chain_complex(rng, algebra, max_len=3, max_dim=3):
    """A random bounded complex, differentials sampled degree by degree
    from the d o d = 0 solution space."""
    length = int(rng.integers(1, max_len + 1))
    objects = [random_module(rng, algebra, max_dim) for _ in range(length)]
    diffs = []
    p = algebra.p
    for k in range(1, length):
        dom, cod = objects[k], objects[k - 1]
        system = LinearSystem(p)
        var = system.var("d", cod.dim, dom.dim)
        for idx in range(algebra.dim):
            system.add_equation(
                [(None, var, dom.action[idx]), (-cod.action[idx], var, None)],
                FieldMatrix.zeros(p, cod.dim, dom.dim),
            )
        if diffs:
            system.add_equation(
                [(diffs[-1].matrix, var, None)],
                FieldMatrix.zeros(p, diffs[-1].cod.dim, dom.dim),
            )
        sol = _sample_solution(rng, system)
        diffs.append(Morphism(dom, cod, sol["d"], check=False))
    return ChainComplex(algebra, 0, objects, diffs)


def random_chain_map(rng, x, y):
    """A random chain map, sampled from the full commutation solution space."""
    p = x.algebra.p
    lo = min(x.lo, y.lo)
    hi = max(x.hi, y.hi)
    system = LinearSystem(p)
    vars_by_degree = {}
    for n in range(lo, hi + 1):
        dom, cod = x.obj(n), y.obj(n)
        if dom.dim == 0 or cod.dim == 0:
            continue
        var = system.var("f%d" % n, cod.dim, dom.dim)
        vars_by_degree[n] = var
        for idx in range(x.algebra.dim):
            system.add_equation(
                [(None, var, dom.action[idx]), (-cod.action[idx], var, None)],
                FieldMatrix.zeros(p, cod.dim, dom.dim),
            )
    for n in range(lo, hi + 1):
        terms = []
        if n in vars_by_degree:
            terms.append((y.diff(n).matrix, vars_by_degree[n], None))
        if (n - 1) in vars_by_degree:
            terms.append((None, vars_by_degree[n - 1], x.diff(n).matrix))
        if terms:
            system.add_equation(
                terms, FieldMatrix.zeros(p, y.obj(n - 1).dim, x.obj(n).dim)
            )
    sol = _sample_solution(rng, system)
    comps = {
        n: Morphism(x.obj(n), y.obj(n), sol["f%d" % n], check=False)
        for n in vars_by_degree
    }
    return ChainMap(x, y, comps)


def random_quasi_iso(rng, x, max_len=2, max_dim=2):
    """A nontrivial quasi-isomorphism out of x.

    Sum x with the cone on the identity of a random complex (which does
    not change homology), then twist the inclusion by a random chain
    homotopy; the result stays a chain map and stays injective on
    homology, but is no longer a block inclusion.
    """
    z = random_chain_complex(rng, x.algebra, max_len, max_dim)
    c = cone(identity_chain_map(z))
    y, (inj_x, _), _ = chain_direct_sum(x, c)
    comps = {}
    lo = min(x.lo, y.lo)
    hi = max(x.hi, y.hi)
    h = {
        n: random_combination(rng, x.obj(n), y.obj(n + 1))
        for n in range(lo - 1, hi + 1)
    }
    for n in range(lo, hi + 1):
        comps[n] = (
            inj_x.component(n)
            + (y.diff(n + 1) @ h[n])
            + (h[n - 1] @ x.diff(n))
        )
    return ChainMap(x, y, comps)


def random_chain_extension(rng, sub, quot):
    """A degreewise-split extension 0 -> sub -> E -> quot -> 0.

    The middle differential is block triangular with a connecting block
    sampled from the d o d = 0 solution space.
    """
    algebra = sub.algebra
    p = algebra.p
    lo = min(sub.lo, quot.lo)
    hi = max(sub.hi, quot.hi)
    system = LinearSystem(p)
    xi = {}
    for n in range(lo, hi + 1):
        dom, cod = quot.obj(n), sub.obj(n - 1)
        if dom.dim == 0 or cod.dim == 0:
            continue
        var = system.var("x%d" % n, cod.dim, dom.dim)
        xi[n] = var
        for idx in range(algebra.dim):
            system.add_equation(
                [(None, var, dom.action[idx]), (-cod.action[idx], var, None)],
                FieldMatrix.zeros(p, cod.dim, dom.dim),
            )
    for n in range(lo, hi + 1):
        terms = []
        if n in xi:
            terms.append((sub.diff(n - 1).matrix, xi[n], None))
        if (n - 1) in xi:
            terms.append((None, xi[n - 1], quot.diff(n).matrix))
        if terms:
            system.add_equation(
                terms,
                FieldMatrix.zeros(p, sub.obj(n - 2).dim, quot.obj(n).dim),
            )
    sol = _sample_solution(rng, system)
    objects = []
    inj_s, inj_q, proj_s, proj_q = {}, {}, {}, {}
    for n in range(lo, hi + 1):
        total, (i1, i2), (p1, p2) = direct_sum([sub.obj(n), quot.obj(n)])
        objects.append(total)
        inj_s[n], inj_q[n], proj_s[n], proj_q[n] = i1, i2, p1, p2
    diffs = []
    for n in range(lo + 1, hi + 1):
        d = (inj_s[n - 1] @ sub.diff(n) @ proj_s[n]) + (
            inj_q[n - 1] @ quot.diff(n) @ proj_q[n]
        )
        if n in xi:
            connect = Morphism(
                quot.obj(n), sub.obj(n - 1), sol["x%d" % n], check=False
            )
            d = d + (inj_s[n - 1] @ connect @ proj_q[n])
        diffs.append(d)
    mid = ChainComplex(algebra, lo, objects, diffs)
    mono = ChainMap(sub, mid, inj_s)
    epi = ChainMap(mid, quot, proj_q)
    return mono, epi, mid

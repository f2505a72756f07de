"""Finite-dimensional algebras over prime fields and their module categories.

An algebra is stored by structure constants: ``c[i][j][k]`` is the
coefficient of basis element ``e_k`` in the product ``e_i * e_j``.  A left
module of dimension ``n`` is stored as one ``n x n`` action matrix per
algebra basis element.  Morphisms are matrices intertwining the actions.

On top of the raw data the module provides the constructions a small
abelian category needs: kernels and cokernels with their induced actions,
direct sums, pushouts, pullbacks, hom spaces, short exact sequences,
submodule enumeration, simple modules, a bounded enumeration of all
isomorphism classes up to a dimension limit, and an isomorphism test that
produces an explicit invertible intertwiner.
"""

import hashlib
import itertools

import numpy as np

from .errors import (
    BudgetExceededError,
    InternalInconsistencyError,
    ValidationError,
)
from .linalg import (
    FieldMatrix,
    LinearSystem,
    column_space_basis,
    kernel_basis,
    rank,
    rref,
    solve,
)

DEFAULT_BUDGET = 10**8

_MAX_QUIVER_PATHS = 20000


def _digest(*parts):
    h = hashlib.sha256()
    for part in parts:
        if isinstance(part, bytes):
            h.update(part)
        else:
            h.update(str(part).encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()


class Algebra:
    """Associative unital algebra over F_p given by structure constants."""

    def __init__(self, p, structure, unit, basis_labels=None):
        self.p = int(p)
        tensor = np.asarray(structure, dtype=np.int64) % self.p
        if tensor.ndim != 3 or len(set(tensor.shape)) != 1:
            raise ValidationError("structure constants must form a cubic tensor")
        self.dim = int(tensor.shape[0])
        self.structure = tensor
        self.structure.setflags(write=False)
        unit_vec = np.asarray(unit, dtype=np.int64) % self.p
        if unit_vec.shape != (self.dim,):
            raise ValidationError("unit vector length must equal the algebra dimension")
        self.unit = unit_vec
        self.unit.setflags(write=False)
        if basis_labels is not None and len(basis_labels) != self.dim:
            raise ValidationError("one basis label per basis element expected")
        self.basis_labels = tuple(basis_labels) if basis_labels is not None else None
        self.digest = _digest(b"algebra", self.p, self.structure.tobytes(), self.unit.tobytes())

    def left_multiplication(self, i):
        """Matrix of left multiplication by basis element e_i on the algebra."""
        # column j of the result holds the coordinates of e_i * e_j
        return FieldMatrix(self.p, self.structure[i].T)

    def right_multiplication(self, i):
        """Matrix of right multiplication by e_i, acting on column vectors."""
        # column j holds the coordinates of e_j * e_i
        return FieldMatrix(self.p, self.structure[:, i, :].T)

    def multiply(self, x, y):
        """Product of two coordinate vectors."""
        x = np.asarray(x, dtype=np.int64) % self.p
        y = np.asarray(y, dtype=np.int64) % self.p
        out = np.einsum("i,j,ijk->k", x, y, self.structure) % self.p
        return out

    def __eq__(self, other):
        return isinstance(other, Algebra) and self.digest == other.digest

    def __hash__(self):
        return hash(self.digest)

    def __repr__(self):
        return "Algebra(p=%d, dim=%d)" % (self.p, self.dim)


def validate_algebra(algebra):
    """Check associativity and the unit law; report every failing index.

    Returns a dict with an overall flag plus the lists of offending
    triples ``(i, j, k)`` where ``(e_i e_j) e_k != e_i (e_j e_k)`` and of
    basis indices where the unit fails to act as identity.
    """
    p = algebra.p
    d = algebra.dim
    c = algebra.structure
    assoc_failures = []
    for i in range(d):
        for j in range(d):
            left = c[i, j]  # coordinates of e_i e_j
            for k in range(d):
                # (e_i e_j) e_k
                lhs = np.einsum("m,mn->n", left, c[:, k, :]) % p
                # e_i (e_j e_k)
                rhs = np.einsum("m,mn->n", c[j, k], c[i, :, :]) % p
                if not np.array_equal(lhs, rhs):
                    assoc_failures.append((i, j, k))
    unit_failures = []
    for i in range(d):
        basis_vec = np.zeros(d, dtype=np.int64)
        basis_vec[i] = 1
        if not np.array_equal(algebra.multiply(algebra.unit, basis_vec), basis_vec):
            unit_failures.append(i)
        elif not np.array_equal(algebra.multiply(basis_vec, algebra.unit), basis_vec):
            unit_failures.append(i)
    return {
        "ok": not assoc_failures and not unit_failures,
        "associativity_failures": assoc_failures,
        "unit_failures": unit_failures,
    }


class QuiverPresentation:
    """Quiver with relations and a nilpotency bound, over a prime field.

    Arrows are (source, target, label) triples.  A relation is a list of
    (coefficient, path) terms where a path lists arrow labels in traversal
    order: the first label is the first arrow walked.  All paths of length
    at least ``nil_bound`` are declared zero.
    """

    def __init__(self, p, vertices, arrows, relations=(), nil_bound=2):
        self.p = int(p)
        self.vertices = int(vertices)
        self.arrows = tuple((int(s), int(t), str(lbl)) for s, t, lbl in arrows)
        self.relations = tuple(
            tuple((int(c), tuple(str(x) for x in path)) for c, path in rel)
            for rel in relations
        )
        self.nil_bound = int(nil_bound)
        if self.vertices < 1:
            raise ValidationError("quiver needs at least one vertex")
        if self.nil_bound < 2:
            raise ValidationError("nilpotency bound must be at least 2")
        labels = [lbl for _, _, lbl in self.arrows]
        if len(labels) != len(set(labels)):
            raise ValidationError("arrow labels must be distinct")
        for s, t, lbl in self.arrows:
            if not (0 <= s < self.vertices and 0 <= t < self.vertices):
                raise ValidationError("arrow %r has an out-of-range endpoint" % lbl)


def algebra_from_quiver(q):
    """Compile a quiver presentation into a structure-constant algebra.

    The basis consists of the paths of length below the nilpotency bound,
    reduced modulo the two-sided ideal generated by the relations; basis
    labels record the surviving paths (arrows joined in traversal order).
    """
    p = q.p
    by_label = {lbl: idx for idx, (_, _, lbl) in enumerate(q.arrows)}

    # paths are (source_vertex, tuple of arrow indices in traversal order)
    def target(path):
        src, steps = path
        return src if not steps else q.arrows[steps[-1]][1]

    paths = [(v, ()) for v in range(q.vertices)]
    frontier = list(paths)
    for _ in range(q.nil_bound - 1):
        nxt = []
        for path in frontier:
            tail = target(path)
            for idx, (s, t, _) in enumerate(q.arrows):
                if s == tail:
                    nxt.append((path[0], path[1] + (idx,)))
        paths.extend(nxt)
        frontier = nxt
        if len(paths) > _MAX_QUIVER_PATHS:
            raise BudgetExceededError("quiver has too many paths below the bound")
    paths.sort(key=lambda pr: (len(pr[1]), pr[1], pr[0]))
    index_of = {path: i for i, path in enumerate(paths)}
    n_paths = len(paths)

    def relation_vector(rel):
        """Relation as a vector in the path space; None when it dies entirely."""
        vec = np.zeros(n_paths, dtype=np.int64)
        endpoints = None
        for coeff, labels in rel:
            if not labels:
                raise ValidationError("relations may not contain trivial paths")
            steps = []
            for lbl in labels:
                if lbl not in by_label:
                    raise ValidationError("unknown arrow label %r in relation" % lbl)
                steps.append(by_label[lbl])
            for a, b in zip(steps, steps[1:]):
                if q.arrows[a][1] != q.arrows[b][0]:
                    raise ValidationError(
                        "relation path %r is not composable" % (labels,)
                    )
            src = q.arrows[steps[0]][0]
            tgt = q.arrows[steps[-1]][1]
            if endpoints is None:
                endpoints = (src, tgt)
            elif endpoints != (src, tgt):
                raise ValidationError("relation mixes paths with different endpoints")
            if len(steps) >= q.nil_bound:
                continue
            vec[index_of[(src, tuple(steps))]] = (
                vec[index_of[(src, tuple(steps))]] + coeff
            ) % p
        return vec, endpoints

    # span of x * r * y over all relations r and path pairs (x, y)
    ideal_rows = []
    for rel in q.relations:
        vec, endpoints = relation_vector(rel)
        if endpoints is None:
            continue
        src, tgt = endpoints
        support = [i for i in range(n_paths) if vec[i]]
        for y in paths:
            if target(y) != src:
                continue
            for x in paths:
                if x[0] != tgt:
                    continue
                row = np.zeros(n_paths, dtype=np.int64)
                alive = False
                for i in support:
                    mid_src, mid_steps = paths[i]
                    steps = y[1] + mid_steps + x[1]
                    if len(steps) >= q.nil_bound:
                        continue
                    j = index_of[(y[0], steps)]
                    row[j] = (row[j] + int(vec[i])) % p
                    alive = True
                if alive and row.any():
                    ideal_rows.append(row)
    if ideal_rows:
        reduced, pivots = rref(FieldMatrix(p, np.array(ideal_rows, dtype=np.int64)))
        red_rows = reduced.a[: len(pivots)]
    else:
        pivots = ()
        red_rows = np.zeros((0, n_paths), dtype=np.int64)
    pivot_set = set(pivots)
    basis_paths = [i for i in range(n_paths) if i not in pivot_set]
    pos = {i: j for j, i in enumerate(basis_paths)}
    n_basis = len(basis_paths)

    def reduce_vec(vec):
        out = vec.copy()
        for r, piv in enumerate(pivots):
            coeff = out[piv] % p
            if coeff:
                out = (out - coeff * red_rows[r]) % p
        return out

    def quotient_coords(vec):
        reduced_vec = reduce_vec(vec)
        return np.array([reduced_vec[i] for i in basis_paths], dtype=np.int64)

    structure = np.zeros((n_basis, n_basis, n_basis), dtype=np.int64)
    for bi, i_path in enumerate(basis_paths):
        for bj, j_path in enumerate(basis_paths):
            left = paths[i_path]
            right = paths[j_path]
            # product left * right applies right first, then left
            if target(right) != left[0]:
                continue
            steps = right[1] + left[1]
            if len(steps) >= q.nil_bound:
                continue
            vec = np.zeros(n_paths, dtype=np.int64)
            vec[index_of[(right[0], steps)]] = 1
            structure[bi, bj, :] = quotient_coords(vec)
    unit = np.zeros(n_basis, dtype=np.int64)
    for v in range(q.vertices):
        trivial_idx = index_of[(v, ())]
        if trivial_idx in pivot_set:
            raise InternalInconsistencyError("trivial path eliminated by relations")
        unit[pos[trivial_idx]] = 1

    def label_for(path_idx):
        src, steps = paths[path_idx]
        if not steps:
            return "e%d" % src
        return "*".join(q.arrows[s][2] for s in steps)

    labels = [label_for(i) for i in basis_paths]
    return Algebra(p, structure, unit, basis_labels=labels)


class Module:
    """Left module over a fixed algebra, given by one matrix per basis element."""

    def __init__(self, algebra, action, check=True):
        self.algebra = algebra
        self.p = algebra.p
        mats = []
        for raw in action:
            m = raw if isinstance(raw, FieldMatrix) else FieldMatrix(algebra.p, raw)
            mats.append(m)
        if len(mats) != algebra.dim:
            raise ValidationError("need one action matrix per algebra basis element")
        dims = {m.shape for m in mats} or {(0, 0)}
        if len(dims) != 1 or any(r != c for r, c in dims):
            raise ValidationError("action matrices must be square and of equal size")
        self.dim = mats[0].shape[0] if mats else 0
        self.action = tuple(mats)
        self.digest = _digest(
            b"module",
            algebra.digest,
            self.dim,
            *[m.a.tobytes() for m in self.action],
        )
        if check:
            problems = self.validate()
            if problems:
                raise ValidationError("module axioms fail", problems)

    def validate(self):
        """Return a list of broken module laws (empty when the data is valid)."""
        p = self.p
        d = self.algebra.dim
        c = self.algebra.structure
        problems = []
        unit_mat = sum(
            (int(self.unit_coeff(i)) * self.action[i].a for i in range(d)),
            np.zeros((self.dim, self.dim), dtype=np.int64),
        ) % p
        if not np.array_equal(unit_mat, np.eye(self.dim, dtype=np.int64)):
            problems.append("unit does not act as the identity")
        for i in range(d):
            for j in range(d):
                lhs = (self.action[i].a @ self.action[j].a) % p
                rhs = sum(
                    (int(c[i, j, k]) * self.action[k].a for k in range(d)),
                    np.zeros((self.dim, self.dim), dtype=np.int64),
                ) % p
                if not np.array_equal(lhs, rhs):
                    problems.append("action not multiplicative at basis pair (%d, %d)" % (i, j))
        return problems

    def unit_coeff(self, i):
        return int(self.algebra.unit[i])

    def act(self, elem_coords, vec):
        """Apply an algebra element (coordinate vector) to a module vector."""
        elem = np.asarray(elem_coords, dtype=np.int64) % self.p
        out = np.zeros(self.dim, dtype=np.int64)
        vec = np.asarray(vec, dtype=np.int64) % self.p
        for i in range(self.algebra.dim):
            if elem[i]:
                out = (out + int(elem[i]) * (self.action[i].a @ vec)) % self.p
        return out

    def __eq__(self, other):
        return isinstance(other, Module) and self.digest == other.digest

    def __hash__(self):
        return hash(self.digest)

    def __repr__(self):
        return "Module(dim=%d over %r)" % (self.dim, self.algebra)


def zero_module(algebra):
    empty = [FieldMatrix.zeros(algebra.p, 0, 0) for _ in range(algebra.dim)]
    return Module(algebra, empty, check=False)


def regular_module(algebra):
    """The algebra acting on itself by left multiplication."""
    return Module(algebra, [algebra.left_multiplication(i) for i in range(algebra.dim)])


def free_module(algebra, k):
    """Direct sum of k copies of the regular module."""
    reg = regular_module(algebra)
    total, _, _ = direct_sum([reg] * k) if k else (zero_module(algebra), [], [])
    return total


def dual_regular_module(algebra):
    """Linear dual of the regular module, a left module via right multiplication.

    A functional f is acted on by (a . f)(x) = f(x a); on coordinates this
    is the transpose of right multiplication.
    """
    mats = [algebra.right_multiplication(i).transpose() for i in range(algebra.dim)]
    return Module(algebra, mats)


class Morphism:
    """Module map, stored as a matrix sending domain coordinates to codomain ones."""

    def __init__(self, dom, cod, matrix, check=True):
        if dom.algebra.digest != cod.algebra.digest:
            raise ValidationError("domain and codomain live over different algebras")
        self.dom = dom
        self.cod = cod
        self.p = dom.p
        m = matrix if isinstance(matrix, FieldMatrix) else FieldMatrix(dom.p, matrix)
        if m.shape != (cod.dim, dom.dim):
            raise ValidationError(
                "matrix shape %r does not match map %d -> %d" % (m.shape, dom.dim, cod.dim)
            )
        self.matrix = m
        if check and not self.is_equivariant():
            raise ValidationError("matrix does not commute with the algebra action")

    def is_equivariant(self):
        for i in range(self.dom.algebra.dim):
            if (self.matrix @ self.dom.action[i]) != (self.cod.action[i] @ self.matrix):
                return False
        return True

    def is_mono(self):
        return rank(self.matrix) == self.dom.dim

    def is_epi(self):
        return rank(self.matrix) == self.cod.dim

    def is_iso(self):
        return self.dom.dim == self.cod.dim and rank(self.matrix) == self.dom.dim

    def is_zero(self):
        return self.matrix.is_zero()

    def __matmul__(self, other):
        """Composition: (g @ f)(x) = g(f(x))."""
        if other.cod.digest != self.dom.digest:
            raise ValidationError("maps are not composable")
        return Morphism(other.dom, self.cod, self.matrix @ other.matrix, check=False)

    def __add__(self, other):
        if self.dom != other.dom or self.cod != other.cod:
            raise ValidationError("can only add parallel maps")
        return Morphism(self.dom, self.cod, self.matrix + other.matrix, check=False)

    def __sub__(self, other):
        if self.dom != other.dom or self.cod != other.cod:
            raise ValidationError("can only subtract parallel maps")
        return Morphism(self.dom, self.cod, self.matrix - other.matrix, check=False)

    def __eq__(self, other):
        return (
            isinstance(other, Morphism)
            and self.dom == other.dom
            and self.cod == other.cod
            and self.matrix == other.matrix
        )

    def __hash__(self):
        return hash((self.dom.digest, self.cod.digest, self.matrix))

    def inverse(self):
        if not self.is_iso():
            raise ValidationError("map is not invertible")
        inv = solve(self.matrix, FieldMatrix.identity(self.p, self.dim_cod()))
        return Morphism(self.cod, self.dom, inv, check=False)

    def dim_cod(self):
        return self.cod.dim

    def digest_pair(self):
        return (self.dom.digest, self.cod.digest)

    def __repr__(self):
        return "Morphism(%d -> %d)" % (self.dom.dim, self.cod.dim)


def identity_morphism(module):
    return Morphism(module, module, FieldMatrix.identity(module.p, module.dim), check=False)


def zero_morphism(dom, cod):
    return Morphism(dom, cod, FieldMatrix.zeros(dom.p, cod.dim, dom.dim), check=False)


# ---------------------------------------------------------------------------
# Hom spaces
# ---------------------------------------------------------------------------

_HOM_CACHE = {}


def hom_basis(dom, cod):
    """Basis of the space of module maps dom -> cod, as a list of morphisms.

    The defining equations F ρ_dom(e_i) = ρ_cod(e_i) F are solved as one
    linear system; results are cached by the digest pair.
    """
    if dom.algebra.digest != cod.algebra.digest:
        raise ValidationError("hom spaces need a common parent algebra")
    key = (dom.digest, cod.digest)
    cached = _HOM_CACHE.get(key)
    if cached is not None:
        return [Morphism(dom, cod, m, check=False) for m in cached]
    system = LinearSystem(dom.p)
    f = system.var("f", cod.dim, dom.dim)
    zero_rhs = FieldMatrix.zeros(dom.p, cod.dim, dom.dim)
    for i in range(dom.algebra.dim):
        system.add_equation(
            [(None, f, dom.action[i]), (-cod.action[i], f, None)], zero_rhs
        )
    _, basis = system.solution_space()
    mats = [entry["f"] for entry in basis]
    _HOM_CACHE[key] = mats
    return [Morphism(dom, cod, m, check=False) for m in mats]


def hom_dim(dom, cod):
    return len(hom_basis(dom, cod))


# ---------------------------------------------------------------------------
# Kernels, cokernels, sums, pushouts, pullbacks
# ---------------------------------------------------------------------------


def kernel(f):
    """Kernel submodule with its inclusion map; returns (module, mono)."""
    cols = kernel_basis(f.matrix)
    k = cols.shape[1]
    if k == 0:
        ker = zero_module(f.dom.algebra)
        return ker, Morphism(ker, f.dom, cols, check=False)
    action = []
    for i in range(f.dom.algebra.dim):
        moved = f.dom.action[i] @ cols
        inside = solve(cols, moved)
        if inside is None:
            raise InternalInconsistencyError("kernel is not an invariant subspace")
        action.append(inside)
    ker = Module(f.dom.algebra, action, check=False)
    return ker, Morphism(ker, f.dom, cols, check=False)


def cokernel(f):
    """Cokernel quotient with its projection map; returns (module, epi).

    Coordinates on the quotient are the non-pivot coordinates of the
    codomain after reducing modulo the image.
    """
    p = f.p
    n = f.cod.dim
    reduced, pivots = rref(f.matrix.transpose())
    red = np.eye(n, dtype=np.int64)
    for row_idx, piv in enumerate(pivots):
        basis_row = reduced.a[row_idx]
        red[:, :] = (red - np.outer(basis_row, _unit_vector(n, piv))) % p
    # after reduction the pivot coordinates vanish, so project onto the rest
    free = [c for c in range(n) if c not in pivots]
    sel = np.zeros((len(free), n), dtype=np.int64)
    for j, c in enumerate(free):
        sel[j, c] = 1
    q_mat = FieldMatrix(p, (sel @ red) % p)
    section = FieldMatrix(p, sel.T)
    action = []
    for i in range(f.cod.algebra.dim):
        action.append(q_mat @ f.cod.action[i] @ section)
    cok = Module(f.cod.algebra, action, check=False)
    return cok, Morphism(f.cod, cok, q_mat, check=False)


def _unit_vector(n, i):
    v = np.zeros(n, dtype=np.int64)
    v[i] = 1
    return v


def image_factorization(f):
    """Split f as (mono) o (epi) through its image; returns (img, epi, mono)."""
    cols = column_space_basis(f.matrix)
    k = cols.shape[1]
    if k == 0:
        img = zero_module(f.dom.algebra)
        return img, zero_morphism(f.dom, img), Morphism(img, f.cod, cols, check=False)
    action = []
    for i in range(f.cod.algebra.dim):
        inside = solve(cols, f.cod.action[i] @ cols)
        if inside is None:
            raise InternalInconsistencyError("image is not an invariant subspace")
        action.append(inside)
    img = Module(f.cod.algebra, action, check=False)
    onto = solve(cols, f.matrix)
    return (
        img,
        Morphism(f.dom, img, onto, check=False),
        Morphism(img, f.cod, cols, check=False),
    )


def corestrict(f, mono):
    """Factor f through a mono with the same codomain: mono o result == f."""
    lifted = solve(mono.matrix, f.matrix)
    if lifted is None:
        raise ValidationError("map does not land inside the given submodule")
    return Morphism(f.dom, mono.dom, lifted, check=False)


def direct_sum(modules):
    """Direct sum with canonical injections and projections."""
    if not modules:
        raise ValidationError("direct sum needs at least one summand")
    algebra = modules[0].algebra
    p = algebra.p
    dims = [m.dim for m in modules]
    total = sum(dims)
    action = []
    for i in range(algebra.dim):
        blocks = np.zeros((total, total), dtype=np.int64)
        offset = 0
        for m in modules:
            blocks[offset : offset + m.dim, offset : offset + m.dim] = m.action[i].a
            offset += m.dim
        action.append(FieldMatrix(p, blocks))
    summed = Module(algebra, action, check=False)
    injections = []
    projections = []
    offset = 0
    for m in modules:
        inj = np.zeros((total, m.dim), dtype=np.int64)
        inj[offset : offset + m.dim, :] = np.eye(m.dim, dtype=np.int64)
        injections.append(Morphism(m, summed, inj, check=False))
        projections.append(Morphism(summed, m, inj.T, check=False))
        offset += m.dim
    return summed, injections, projections


def pushout(f, g):
    """Pushout of f: A -> B and g: A -> C; returns (module, from_B, from_C).

    Computed as the cokernel of (f, -g): A -> B (+) C.
    """
    if f.dom != g.dom:
        raise ValidationError("pushout legs must share a domain")
    summed, (inj_b, inj_c), _ = _sum_pair(f.cod, g.cod)
    diff = (inj_b @ f) - (inj_c @ g)
    _, proj = cokernel(diff)
    return proj.cod, proj @ inj_b, proj @ inj_c


def pullback(f, g):
    """Pullback of f: B -> A and g: C -> A; returns (module, to_B, to_C)."""
    if f.cod != g.cod:
        raise ValidationError("pullback legs must share a codomain")
    summed, _, (proj_b, proj_c) = _sum_pair(f.dom, g.dom)
    diff = (f @ proj_b) - (g @ proj_c)
    ker, incl = kernel(diff)
    return ker, proj_b @ incl, proj_c @ incl


def _sum_pair(m1, m2):
    summed, injections, projections = direct_sum([m1, m2])
    return summed, injections, projections


class ShortExactSequence:
    """Short exact sequence 0 -> sub -> mid -> quot -> 0."""

    def __init__(self, mono, epi, check=True):
        if mono.cod != epi.dom:
            raise ValidationError("the mono's codomain must be the epi's domain")
        self.mono = mono
        self.epi = epi
        self.sub = mono.dom
        self.mid = mono.cod
        self.quot = epi.cod
        if check:
            problems = self.validate()
            if problems:
                raise ValidationError("not a short exact sequence", problems)

    def validate(self):
        problems = []
        if not self.mono.is_mono():
            problems.append("left map is not injective")
        if not self.epi.is_epi():
            problems.append("right map is not surjective")
        if not (self.epi @ self.mono).is_zero():
            problems.append("composite is nonzero")
        if self.sub.dim + self.quot.dim != self.mid.dim:
            problems.append("dimensions are not additive")
        return problems

    def is_split(self):
        """True when the epi admits a module-map section."""
        system = LinearSystem(self.mid.p)
        s = system.var("s", self.mid.dim, self.quot.dim)
        system.add_equation(
            [(self.epi.matrix, s, None)],
            FieldMatrix.identity(self.mid.p, self.quot.dim),
        )
        for i in range(self.mid.algebra.dim):
            system.add_equation(
                [(None, s, self.quot.action[i]), (-self.mid.action[i], s, None)],
                FieldMatrix.zeros(self.mid.p, self.mid.dim, self.quot.dim),
            )
        return system.solve() is not None

    def __repr__(self):
        return "SES(%d -> %d -> %d)" % (self.sub.dim, self.mid.dim, self.quot.dim)


def ses_from_mono(mono):
    cok, proj = cokernel(mono)
    return ShortExactSequence(mono, proj, check=False)


def ses_from_epi(epi):
    ker, incl = kernel(epi)
    return ShortExactSequence(incl, epi, check=False)


# ---------------------------------------------------------------------------
# Submodules and simple modules
# ---------------------------------------------------------------------------


def invariant_subspaces(module, budget=DEFAULT_BUDGET):
    """All submodules, as column matrices in reduced echelon form.

    Enumerates every subspace of the underlying space by echelon shape and
    keeps the action-invariant ones.  Guarded by ``budget`` on the number
    of subspaces inspected.
    """
    p = module.p
    n = module.dim
    found = []
    inspected = 0
    for k in range(n + 1):
        for pivots in itertools.combinations(range(n), k):
            free_slots = []
            for r, piv in enumerate(pivots):
                for c in range(piv + 1, n):
                    if c not in pivots:
                        free_slots.append((r, c))
            for fill in itertools.product(range(p), repeat=len(free_slots)):
                inspected += 1
                if inspected > budget:
                    raise BudgetExceededError(
                        "submodule enumeration exceeded budget %d" % budget
                    )
                rows = np.zeros((k, n), dtype=np.int64)
                for r, piv in enumerate(pivots):
                    rows[r, piv] = 1
                for (r, c), val in zip(free_slots, fill):
                    rows[r, c] = val
                cols = FieldMatrix(p, rows.T)
                if _is_invariant(module, cols):
                    found.append(cols)
    return found


def _is_invariant(module, cols):
    if cols.shape[1] == 0:
        return True
    for i in range(module.algebra.dim):
        if solve(cols, module.action[i] @ cols) is None:
            return False
    return True


def submodule_from_columns(module, cols):
    """Package an invariant column space as a module with its inclusion."""
    k = cols.shape[1]
    if k == 0:
        sub = zero_module(module.algebra)
        return sub, Morphism(sub, module, cols, check=False)
    action = []
    for i in range(module.algebra.dim):
        inside = solve(cols, module.action[i] @ cols)
        if inside is None:
            raise ValidationError("columns do not span an invariant subspace")
        action.append(inside)
    sub = Module(module.algebra, action, check=False)
    return sub, Morphism(sub, module, cols, check=False)


def simple_modules(algebra, budget=DEFAULT_BUDGET):
    """One representative per isomorphism class of simple modules.

    Every simple is a quotient of the regular module by a maximal proper
    submodule, so enumerate those and deduplicate up to isomorphism.
    """
    reg = regular_module(algebra)
    subs = invariant_subspaces(reg, budget=budget)
    proper = [c for c in subs if c.shape[1] < reg.dim]
    maximal = []
    for cand in proper:
        is_max = True
        for other in proper:
            if other.shape[1] <= cand.shape[1]:
                continue
            if solve(other, cand) is not None:
                is_max = False
                break
        if is_max:
            maximal.append(cand)
    simples = []
    for cols in maximal:
        _, incl = submodule_from_columns(reg, cols)
        quot, _ = cokernel(incl)
        if all(is_isomorphic(quot, seen) is None for seen in simples):
            simples.append(quot)
    simples.sort(key=lambda m: (m.dim, m.digest))
    return simples


# ---------------------------------------------------------------------------
# Isomorphism testing
# ---------------------------------------------------------------------------

_FINGERPRINT_CACHE = {}


def fingerprint(module):
    """Cheap isomorphism invariants: dimension plus action-word ranks."""
    cached = _FINGERPRINT_CACHE.get(module.digest)
    if cached is not None:
        return cached
    d = module.algebra.dim
    singles = tuple(rank(module.action[i]) for i in range(d))
    pairs = tuple(
        rank(module.action[i] @ module.action[j]) for i in range(d) for j in range(d)
    )
    fp = (module.dim, singles, pairs)
    _FINGERPRINT_CACHE[module.digest] = fp
    return fp


def _combo(mats, coeffs, p):
    total = np.zeros(mats[0].shape, dtype=np.int64)
    for c, m in zip(coeffs, mats):
        if c:
            total = (total + c * m.a) % p
    return FieldMatrix(p, total)


_ENUMERATION_CAP = 4096
_RANDOM_TRIES = 500


def _find_invertible_combination(basis, p, dim):
    """Search the span of hom-basis matrices for an invertible one."""
    if dim == 0:
        return FieldMatrix.zeros(p, 0, 0)
    mats = [b.matrix for b in basis]
    if not mats:
        return None
    if p ** len(mats) <= _ENUMERATION_CAP:
        for coeffs in itertools.product(range(p), repeat=len(mats)):
            if not any(coeffs):
                continue
            cand = _combo(mats, coeffs, p)
            if rank(cand) == dim:
                return cand
        return None
    for m in mats:
        if rank(m) == dim:
            return m
    seed = int(_digest("invcombo", *(b.matrix.a.tobytes() for b in basis))[:8], 16)
    rng = np.random.default_rng(seed)
    for _ in range(_RANDOM_TRIES):
        coeffs = rng.integers(0, p, size=len(mats))
        cand = _combo(mats, [int(c) for c in coeffs], p)
        if rank(cand) == dim:
            return cand
    return None


def is_isomorphic(m1, m2):
    """Explicit isomorphism m1 -> m2, or None when none exists.

    Fast dimension/fingerprint rejection first; then a search for an
    invertible element of Hom(m1, m2), falling back to matching
    indecomposable summands when the hom space is too large to scan.
    """
    if m1.algebra.digest != m2.algebra.digest or m1.dim != m2.dim:
        return None
    if m1.digest == m2.digest:
        return Morphism(m1, m2, FieldMatrix.identity(m1.p, m1.dim), check=False)
    if fingerprint(m1) != fingerprint(m2):
        return None
    basis = hom_basis(m1, m2)
    if not basis and m1.dim > 0:
        return None
    if m1.p ** len(basis) <= _ENUMERATION_CAP:
        mat = _find_invertible_combination(basis, m1.p, m1.dim)
        if mat is None:
            return None
        return Morphism(m1, m2, mat, check=False)
    mat = _find_invertible_combination(basis, m1.p, m1.dim)
    if mat is not None:
        return Morphism(m1, m2, mat, check=False)
    return _isomorphism_by_decomposition(m1, m2)


def _isomorphism_by_decomposition(m1, m2):
    pieces1 = indecomposable_summands(m1)
    pieces2 = indecomposable_summands(m2)
    if len(pieces1) != len(pieces2):
        return None
    used = [False] * len(pieces2)
    piece_isos = []
    for mod1, incl1, proj1 in pieces1:
        matched = None
        for idx, (mod2, incl2, proj2) in enumerate(pieces2):
            if used[idx] or mod2.dim != mod1.dim:
                continue
            if fingerprint(mod1) != fingerprint(mod2):
                continue
            small_basis = hom_basis(mod1, mod2)
            mat = _find_invertible_combination(small_basis, mod1.p, mod1.dim)
            if mat is not None:
                used[idx] = True
                matched = (idx, Morphism(mod1, mod2, mat, check=False))
                break
        if matched is None:
            return None
        piece_isos.append((matched[0], matched[1]))
    total = FieldMatrix.zeros(m1.p, m2.dim, m1.dim)
    acc = total.a.copy()
    for (idx, iso), (mod1, incl1, proj1) in zip(piece_isos, pieces1):
        mod2, incl2, proj2 = pieces2[idx]
        acc = (acc + incl2.matrix.a @ iso.matrix.a @ proj1.matrix.a) % m1.p
    candidate = Morphism(m1, m2, acc, check=False)
    if not candidate.is_iso() or not candidate.is_equivariant():
        return None
    return candidate


def indecomposable_summands(module):
    """Decompose into indecomposables; list of (piece, inclusion, projection).

    Inclusions and projections compose to the identity of the original
    module when summed, so the pieces witness an internal direct sum.
    Uses powers of endomorphisms to split off kernel/image pairs.
    """
    if module.dim == 0:
        return []
    splitting = _find_splitting_endo(module)
    if splitting is None:
        return [
            (
                module,
                identity_morphism(module),
                identity_morphism(module),
            )
        ]
    ker_cols, im_cols = splitting
    return _split_and_recurse(module, ker_cols, im_cols)


def _split_and_recurse(module, ker_cols, im_cols):
    p = module.p
    sub_k, incl_k = submodule_from_columns(module, ker_cols)
    sub_i, incl_i = submodule_from_columns(module, im_cols)
    stacked = np.concatenate([ker_cols.a, im_cols.a], axis=1)
    full = FieldMatrix(p, stacked)
    inv = solve(full, FieldMatrix.identity(p, module.dim))
    if inv is None:
        raise InternalInconsistencyError("splitting pieces do not span")
    proj_k = Morphism(module, sub_k, inv.a[: sub_k.dim, :], check=False)
    proj_i = Morphism(module, sub_i, inv.a[sub_k.dim :, :], check=False)
    pieces = []
    for sub, incl, proj in ((sub_k, incl_k, proj_k), (sub_i, incl_i, proj_i)):
        for piece, p_incl, p_proj in indecomposable_summands(sub):
            pieces.append((piece, incl @ p_incl, p_proj @ proj))
    return pieces


def _find_splitting_endo(module):
    """Look for an endomorphism whose stable kernel/image split the module."""
    p = module.p
    dim = module.dim
    basis = hom_basis(module, module)
    mats = [b.matrix for b in basis]

    def check(mat):
        power = mat
        for _ in range(max(1, dim.bit_length())):
            power = power @ power
        r = rank(power)
        if 0 < r < dim:
            ker_cols = kernel_basis(power)
            im_cols = column_space_basis(power)
            return ker_cols, im_cols
        return None

    if p ** len(mats) <= _ENUMERATION_CAP:
        for coeffs in itertools.product(range(p), repeat=len(mats)):
            if not any(coeffs):
                continue
            res = check(_combo(mats, coeffs, p))
            if res is not None:
                return res
        return None
    for m in mats:
        res = check(m)
        if res is not None:
            return res
    for m1, m2 in itertools.combinations(mats, 2):
        res = check(m1 + m2)
        if res is not None:
            return res
    seed = int(_digest("splitter", module.digest)[:8], 16)
    rng = np.random.default_rng(seed)
    for _ in range(_RANDOM_TRIES):
        coeffs = [int(c) for c in rng.integers(0, p, size=len(mats))]
        if not any(coeffs):
            continue
        res = check(_combo(mats, coeffs, p))
        if res is not None:
            return res
    return None


# ---------------------------------------------------------------------------
# Enumeration of all modules up to a dimension bound
# ---------------------------------------------------------------------------

_ENUM_CACHE = {}


def enumerate_modules(algebra, max_dim, budget=DEFAULT_BUDGET):
    """All isomorphism classes of modules of dimension <= max_dim.

    Builds the list in layers: simples first, then for each dimension all
    extensions of previously found modules by simples, realised from
    cocycle data and deduplicated up to isomorphism.  Every module has a
    simple submodule, so each class of dimension m extends a class of
    smaller dimension by a simple and the sweep is exhaustive.

    The budget guards p**(max_dim**2), the nominal size of the raw search
    space the layering replaces.
    """
    key = (algebra.digest, int(max_dim), int(budget))
    if key in _ENUM_CACHE:
        return list(_ENUM_CACHE[key])
    if algebra.p ** (max_dim * max_dim) > budget:
        raise BudgetExceededError(
            "module enumeration for dimension %d exceeds budget %d" % (max_dim, budget)
        )
    simples = simple_modules(algebra, budget=budget)
    by_dim = {0: [zero_module(algebra)]}
    for m in range(1, max_dim + 1):
        layer = []
        for s in simples:
            if s.dim > m:
                continue
            for base in by_dim.get(m - s.dim, []):
                for cand in _extension_candidates(s, base):
                    if all(is_isomorphic(cand, seen) is None for seen in layer):
                        layer.append(cand)
        layer.sort(key=lambda mod: (fingerprint(mod), mod.digest))
        by_dim[m] = layer
    result = []
    for m in range(0, max_dim + 1):
        result.extend(by_dim.get(m, []))
    result.sort(key=lambda mod: (mod.dim, fingerprint(mod), mod.digest))
    _ENUM_CACHE[key] = list(result)
    return result


def _extension_candidates(sub, quot):
    """Modules arising as extensions of ``quot`` by ``sub`` (sub at the bottom).

    Solves the cocycle equations for upper-triangular block actions
    [[rho_sub, tau], [0, rho_quot]] and walks one representative per class
    modulo coboundaries, so the split extension is always included.
    """
    algebra = sub.algebra
    p = algebra.p
    d = algebra.dim
    if quot.dim == 0:
        return [sub]
    if sub.dim == 0:
        return [quot]
    system = LinearSystem(p)
    taus = [system.var("t%d" % i, sub.dim, quot.dim) for i in range(d)]
    c = algebra.structure
    for i in range(d):
        for j in range(d):
            terms = [
                (sub.action[i], taus[j], None),
                (None, taus[i], quot.action[j]),
            ]
            for k in range(d):
                coeff = int(c[i, j, k])
                if coeff:
                    scaled = FieldMatrix(p, -coeff * np.eye(sub.dim, dtype=np.int64))
                    terms.append((scaled, taus[k], None))
            system.add_equation(terms, FieldMatrix.zeros(p, sub.dim, quot.dim))
    unit_terms = []
    for i in range(d):
        u = int(algebra.unit[i])
        if u:
            scaled = FieldMatrix(p, u * np.eye(sub.dim, dtype=np.int64))
            unit_terms.append((scaled, taus[i], None))
    if unit_terms:
        system.add_equation(unit_terms, FieldMatrix.zeros(p, sub.dim, quot.dim))
    _, cocycle_basis = system.solution_space()

    # coboundaries: tau_k = rho_sub(e_k) u - u rho_quot(e_k) for linear u
    cob_vectors = []
    for a in range(sub.dim):
        for b in range(quot.dim):
            u = np.zeros((sub.dim, quot.dim), dtype=np.int64)
            u[a, b] = 1
            entry = {}
            for k in range(d):
                entry["t%d" % k] = FieldMatrix(
                    p, (sub.action[k].a @ u - u @ quot.action[k].a) % p
                )
            cob_vectors.append(entry)

    def flatten(entry):
        return np.concatenate([entry["t%d" % k].a.reshape(-1) for k in range(d)])

    cocycle_flat = [flatten(e) for e in cocycle_basis]
    cob_flat = [flatten(e) for e in cob_vectors]
    reps_coeffs = _complement_representatives(cob_flat, cocycle_flat, p)

    out = []
    for coeffs in reps_coeffs:
        tau_mats = []
        for k in range(d):
            acc = np.zeros((sub.dim, quot.dim), dtype=np.int64)
            for c_val, entry in zip(coeffs, cocycle_basis):
                if c_val:
                    acc = (acc + c_val * entry["t%d" % k].a) % p
            tau_mats.append(acc)
        action = []
        for k in range(d):
            block = np.zeros((sub.dim + quot.dim, sub.dim + quot.dim), dtype=np.int64)
            block[: sub.dim, : sub.dim] = sub.action[k].a
            block[: sub.dim, sub.dim :] = tau_mats[k]
            block[sub.dim :, sub.dim :] = quot.action[k].a
            action.append(FieldMatrix(p, block))
        out.append(Module(algebra, action, check=False))
    return out


def _complement_representatives(inner_flat, outer_basis_flat, p):
    """Coefficient tuples over a complement of span(inner) inside span(outer).

    Returns, for the basis ``outer_basis_flat``, all coefficient vectors
    ranging over a set of coset representatives of the inner span.  The
    zero tuple is always included.
    """
    if not outer_basis_flat:
        return [()]
    length = len(outer_basis_flat[0])
    inner_rows = np.array(inner_flat, dtype=np.int64).reshape(len(inner_flat), length) if inner_flat else np.zeros((0, length), dtype=np.int64)
    free_indices = []
    for idx, vec in enumerate(outer_basis_flat):
        stacked = np.concatenate([inner_rows, np.array([vec], dtype=np.int64)], axis=0)
        if rank(FieldMatrix(p, stacked.T)) > rank(FieldMatrix(p, inner_rows.T)):
            free_indices.append(idx)
            inner_rows = stacked
    combos = []
    for assignment in itertools.product(range(p), repeat=len(free_indices)):
        coeffs = [0] * len(outer_basis_flat)
        for pos, val in zip(free_indices, assignment):
            coeffs[pos] = val
        combos.append(tuple(coeffs))
    return combos

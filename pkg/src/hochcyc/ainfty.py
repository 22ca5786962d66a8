"""Curved A-infinity structures as sparse multilinear families.

Provides the coderivation (hat) extension of the operations to the tensor
coalgebra, the structure-relation residual mu-hat o mu-hat, strict-unit
validation, the boundary/interior operation families q_{k,l} with their
deformation sums, and a small library of built-in algebras.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .scalars import (
    INFINITY,
    Cap,
    Context,
    FormalVarSpec,
    PiGroup,
    Scalar,
    TRIVIAL_CONTEXT,
)
from .graded import (
    ChainComplex,
    Element,
    GradedModule,
    Word,
    shifted_parity,
    split_enum,
    word_from_factors,
)


class AInfty:
    """A curved A-infinity algebra given by sparse structure constants.

    ``ops[k]`` maps length-k generator tuples to Elements; arity 0 holds the
    curvature as the value on the empty tuple.  Operations not listed are
    zero.  Each mu_k raises the total shifted degree by one, equivalently the
    unshifted degree by ``2 - k``.
    """

    def __init__(self, module: GradedModule, ops, unit: str | None = None,
                 name: str = ""):
        self.module = module
        self.ops: dict[int, dict[tuple, Element]] = {}
        for k, table in ops.items():
            clean = {}
            for tup, el in table.items():
                tup = tuple(tup)
                if len(tup) != k:
                    raise ValueError(f"arity mismatch at {tup!r}")
                if not el.is_zero():
                    clean[tup] = el
            if clean:
                self.ops[k] = clean
        self.unit = unit
        self.name = name
        # per-instance caches of the coderivation and Hochschild differential
        # on basis tuples (uncapped; truncation happens on combination)
        self._hat_cache: dict[tuple, list] = {}
        self._diff_cache: dict[tuple, list] = {}
        self.validate()

    # -- structure lookup ----------------------------------------------------

    def mu(self, tup) -> Element:
        """mu_k on a basis tuple (k = len(tup))."""
        tup = tuple(tup)
        el = self.ops.get(len(tup), {}).get(tup)
        return el if el is not None else Element.zero(self.module)

    def mu0(self) -> Element:
        """The curvature mu_0(1)."""
        return self.mu(())

    def arities(self):
        return sorted(self.ops)

    # -- validation ----------------------------------------------------------

    def validate(self):
        """Degree law (+1 on shifted degrees) and valuation guards."""
        mod = self.module
        for k, table in self.ops.items():
            for tup, el in table.items():
                want = sum(mod.degree(g) for g in tup) + 2 - k
                for g, s in el.items():
                    if mod.degree(g) + s.degree() != want:
                        raise ValueError(
                            f"mu_{k}{tup!r} is not homogeneous of degree {want}"
                        )
                val = min(
                    (s.valuation() for _, s in el.items()), default=INFINITY
                )
                if val < 0:
                    raise ValueError(f"mu_{k}{tup!r} has negative valuation")
        mu0 = self.mu0()
        if not mu0.is_zero():
            val = min(s.valuation() for _, s in mu0.items())
            if val <= 0:
                raise ValueError("curvature must have positive valuation")
        if self.unit is not None and self.unit not in mod.basis:
            raise ValueError(f"unit {self.unit!r} is not a generator")


# ---------------------------------------------------------------------------
# the hat extension and the structure residual
# ---------------------------------------------------------------------------


def hat_basis(A: AInfty, tup) -> list:
    """The coderivation on one basis tuple, as (output tuple, scalar) pairs:
    sum over all 3-splittings l = l1 o l2 o l3 of
    (-1)^{||l1||} l1 (x) mu(l2) (x) l3, image coefficients commuted to the
    front.  Cached on the algebra."""
    cached = A._hat_cache.get(tup)
    if cached is not None:
        return cached
    mod = A.module
    ctx = mod.ctx
    # prefix shifted-parity sums: sp[i] = ||tup[:i]|| mod 2
    sp = [0]
    for g in tup:
        sp.append((sp[-1] + mod.degree(g) + 1) % 2)
    k = len(tup)
    acc: dict[tuple, dict] = {}
    for i in range(k + 1):
        for j in range(i, k + 1):
            table = A.ops.get(j - i)
            if table is None:
                continue
            img = table.get(tup[i:j])
            if img is None:
                continue
            head, tail = tup[:i], tup[j:]
            for g, s in img.items():
                # operator front sign plus the coefficient crossing l1
                sgn = (sp[i] * (1 + s.degree_parity())) % 2
                otup = head + (g,) + tail
                bucket = acc.get(otup)
                if bucket is None:
                    bucket = acc[otup] = {}
                for m, c in s.terms.items():
                    bucket[m] = bucket.get(m, 0) + (-c if sgn else c)
    out = []
    for t, b in acc.items():
        b = {m: c for m, c in b.items() if c}
        if b:
            out.append((t, Scalar._raw(ctx, b)))
    A._hat_cache[tup] = out
    return out


def combine_basis_images(module, w: Word, image_of, cap: Cap | None) -> Word:
    """Apply an odd operator given by per-tuple images to a word: multiply
    front coefficients, pass the operator with (-1)^{|c|}, cap-filter."""
    ctx = module.ctx
    mul = ctx.mono_mul
    val_of = ctx.mono_valuation
    energy = cap.energy if cap is not None else None
    var_total = cap.var_total if cap is not None else None
    acc: dict[tuple, dict] = {}
    for tup, c in w.items():
        neg = c.degree_parity()
        cterms = c.terms
        for otup, s in image_of(tup):
            bucket = acc.get(otup)
            if bucket is None:
                bucket = acc[otup] = {}
            for m2, c2 in s.terms.items():
                for m1, c1 in cterms.items():
                    hit = mul(m1, m2)
                    if hit is None:
                        continue
                    mono, sign = hit
                    if energy is not None and (
                            val_of(mono) > energy
                            or sum(mono[1]) > var_total):
                        continue
                    v = c1 * c2
                    if (sign + neg) % 2:
                        v = -v
                    bucket[mono] = bucket.get(mono, 0) + v
    out = {}
    for t, b in acc.items():
        b = {m: q for m, q in b.items() if q}
        if b:
            out[t] = Scalar._raw(ctx, b)
    return Word._raw(module, out)


def hat_extension(A: AInfty, w: Word, cap: Cap | None = None) -> Word:
    """Extend the operations to an odd coderivation of the tensor coalgebra,
    with (-1)^{|c|} for passing the operator over a front coefficient of
    degree |c|."""
    return combine_basis_images(A.module, w, lambda tup: hat_basis(A, tup),
                                cap)


@dataclass
class ResidualReport:
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def ainfty_residual(A: AInfty, cap: Cap) -> ResidualReport:
    """mu-hat o mu-hat on every basis word up to the weight cap."""
    import itertools

    report = ResidualReport()
    for w in range(0, cap.weight + 1):
        for tup in itertools.product(A.module.basis, repeat=w):
            word = Word.basis_word(A.module, tup)
            res = hat_extension(A, hat_extension(A, word, cap), cap)
            report.checked += 1
            if not res.is_zero():
                report.failures.append({"word": tup, "residual": repr(res)})
    return report


def unit_check(A: AInfty) -> ResidualReport:
    """Strict-unit axioms: the unit has degree 0 (shifted degree -1), the two
    binary unit laws hold for every generator, and every operation of arity
    other than 2 vanishes on tuples containing the unit (scanned over all
    tuples in arities where structure constants exist)."""
    import itertools

    if A.unit is None:
        raise ValueError("no unit designated")
    report = ResidualReport()
    mod = A.module
    e = A.unit

    report.checked += 1
    if mod.degree(e) != 0:
        report.failures.append({"axiom": "unit-degree", "got": mod.degree(e)})

    one = Scalar.one(mod.ctx)
    for x in mod.basis:
        report.checked += 2
        left = A.mu((e, x))
        if left != Element(mod, {x: one}):
            report.failures.append({"axiom": "mu2(e,x)=x", "x": x,
                                    "got": repr(left)})
        right = A.mu((x, e))
        want = Element(mod, {x: one if mod.degree(x) % 2 == 0 else -one})
        if right != want:
            report.failures.append({"axiom": "mu2(x,e)=(-1)^{|x|}x", "x": x,
                                    "got": repr(right)})

    for k in A.arities():
        if k == 2 or k == 0:
            continue
        for tup in itertools.product(mod.basis, repeat=k):
            if e not in tup:
                continue
            report.checked += 1
            if not A.mu(tup).is_zero():
                report.failures.append({"axiom": f"mu_{k} vanishes on unit",
                                        "tuple": tup})
    return report


# ---------------------------------------------------------------------------
# interior algebras and q-families
# ---------------------------------------------------------------------------


@dataclass
class InteriorAlgebra:
    """Target-space algebra supplying interior inputs: a chain complex with a
    distinguished closed degree-2 element of positive valuation and a
    degree-0 'one'."""

    complex: ChainComplex
    gamma: Element
    one: str

    def __post_init__(self):
        mod = self.complex.module
        if self.one not in mod.basis or mod.degree(self.one) != 0:
            raise ValueError("'one' must be a degree-0 generator")
        if not self.gamma.is_zero():
            if self.gamma.degree() != 2:
                raise ValueError("gamma must have degree 2")
            if min(s.valuation() for _, s in self.gamma.items()) <= 0:
                raise ValueError("gamma must have positive valuation")
            if not self.complex.d(self.gamma).is_zero():
                raise ValueError("gamma must be closed")

    @property
    def module(self) -> GradedModule:
        return self.complex.module


class QFamily:
    """Operations q_{k,l} with k boundary and l interior inputs, valued in the
    boundary module; sparse structure constants on pairs of basis tuples.

    The slice q_{*,0} is a curved A-infinity structure.  Flags record the
    geometric special cases: the zero-area part of q_{1,0} is the boundary
    differential and the zero-area part of q_{0,0} vanishes.
    """

    def __init__(self, module: GradedModule, interior: InteriorAlgebra | None,
                 ops, q10_zero_area_is_d: bool = True,
                 q00_zero_area_vanishes: bool = True):
        self.module = module
        self.interior = interior
        self.q10_zero_area_is_d = q10_zero_area_is_d
        self.q00_zero_area_vanishes = q00_zero_area_vanishes
        self.ops: dict[tuple[int, int], dict[tuple, Element]] = {}
        for (k, l), table in ops.items():
            clean = {}
            for (btup, itup), el in table.items():
                btup, itup = tuple(btup), tuple(itup)
                if len(btup) != k or len(itup) != l:
                    raise ValueError("slot-count mismatch in q table")
                if not el.is_zero():
                    clean[(btup, itup)] = el
            if clean:
                self.ops[(k, l)] = clean

    def q(self, btup, itup) -> Element:
        btup, itup = tuple(btup), tuple(itup)
        el = self.ops.get((len(btup), len(itup)), {}).get((btup, itup))
        return el if el is not None else Element.zero(self.module)

    def boundary_slice(self, unit=None, name="q-slice") -> AInfty:
        """The l = 0 part as a curved A-infinity algebra."""
        ops: dict[int, dict] = {}
        for (k, l), table in self.ops.items():
            if l != 0:
                continue
            ops[k] = {btup: el for (btup, _), el in table.items()}
        return AInfty(self.module, ops, unit=unit, name=name)


def ainfty_to_qfamily(A: AInfty, interior: InteriorAlgebra | None = None) -> QFamily:
    ops = {}
    for k, table in A.ops.items():
        ops[(k, 0)] = {(tup, ()): el for tup, el in table.items()}
    return QFamily(A.module, interior, ops)


def _insertion_patterns(k: int, s: int):
    """Weak compositions of s over the k+1 gaps around k boundary slots."""
    import itertools

    for cuts in itertools.combinations(range(s + k), k):
        counts = []
        prev = -1
        for c in cuts:
            counts.append(c - prev - 1)
            prev = c
        counts.append(s + k - 1 - prev)
        yield tuple(counts)


class DeformedQ:
    """The deformed family q^{b,gamma}: b (odd boundary element of positive
    valuation) inserted into all gaps between boundary inputs, interior slots
    padded with copies of gamma weighted by 1/(t-l)!.

    Since |b| = 1 its shifted degree is even and no insertion signs occur;
    gamma has even degree so interior padding is sign-free as well.
    """

    def __init__(self, Q: QFamily, b: Element, gamma: Element, cap: Cap):
        if not b.is_zero():
            if b.degree() != 1:
                raise ValueError("deformation element b must have degree 1")
            if min(s.valuation() for _, s in b.items()) <= 0:
                raise ValueError("b must have positive valuation")
        if not gamma.is_zero():
            if gamma.degree() != 2:
                raise ValueError("interior deformation must have degree 2")
            if min(s.valuation() for _, s in gamma.items()) <= 0:
                raise ValueError("gamma must have positive valuation")
        self.Q = Q
        self.b = b
        self.gamma = gamma
        self.cap = cap
        self.b_val = (min(s.valuation() for _, s in b.items())
                      if not b.is_zero() else INFINITY)
        self.g_val = (min(s.valuation() for _, s in gamma.items())
                      if not gamma.is_zero() else INFINITY)

    def _max_insert(self, val) -> int:
        if val == INFINITY:
            return 0
        return int(math.floor(Fraction(self.cap.energy) / val))

    def apply(self, btup, itups=()) -> Element:
        """Evaluate q^{b,gamma}_{k,l} on basis boundary inputs and Element
        interior inputs."""
        btup = tuple(btup)
        k = len(btup)
        l = len(itups)
        cap = self.cap
        out = Element.zero(self.Q.module)
        s_max = self._max_insert(self.b_val)
        t_extra_max = self._max_insert(self.g_val)
        for s in range(0, s_max + 1):
            if s and self.b.is_zero():
                break
            for pattern in _insertion_patterns(k, s):
                factors = []
                for i in range(k):
                    factors.extend([self.b] * pattern[i])
                    factors.append(btup[i])
                factors.extend([self.b] * pattern[k])
                bword = word_from_factors(self.Q.module, factors,
                                          shifted=True, cap=cap)
                for extra in range(0, t_extra_max + 1):
                    if extra and self.gamma.is_zero():
                        break
                    coeff = Fraction(1, math.factorial(extra))
                    interior = list(itups) + [self.gamma] * extra
                    out = out + _q_multi(self.Q, bword, interior,
                                         cap).scale(coeff)
        return out.truncate(cap)


def _q_multi(Q: QFamily, bword: Word, interior, cap: Cap | None) -> Element:
    """Multilinear evaluation: boundary inputs a Word (basis tuples with
    front coefficients), interior inputs a list of Elements (even degrees
    assumed; interior expansion via unshifted, sign-free multilinearity)."""
    imod = Q.interior.module if Q.interior is not None else None
    iterms = [((), Scalar.one(Q.module.ctx))]
    for el in interior:
        new = []
        for itup, c in iterms:
            for g, s in el.items():
                from .scalars import scalar_mul

                new.append((itup + (g,), scalar_mul(c, s, cap)))
        iterms = new
    out = Element.zero(Q.module)
    for btup, bc in bword.items():
        for itup, ic in iterms:
            el = Q.q(btup, itup)
            if el.is_zero():
                continue
            from .scalars import scalar_mul

            coeff = scalar_mul(bc, ic, cap)
            out = out + el.scalar_left(coeff, cap)
    return out.truncate(cap)


def deform_q(Q: QFamily, b: Element, gamma: Element, cap: Cap) -> DeformedQ:
    """The deformed family; finiteness of the double insertion sum follows
    from the positive valuations of b and gamma together with the energy cap."""
    return DeformedQ(Q, b, gamma, cap)


# ---------------------------------------------------------------------------
# built-in algebras
# ---------------------------------------------------------------------------


def _mu2_from_products(module: GradedModule, products) -> dict:
    """Binary operation mu_2(x, y) = (-1)^{|x|} x . y from an associative
    product table mapping generator pairs to Elements."""
    table = {}
    for (x, y), el in products.items():
        if el.is_zero():
            continue
        table[(x, y)] = -el if module.degree(x) % 2 else el
    return table


def _ground_field() -> AInfty:
    mod = GradedModule("ground_field", ("e",), (0,), TRIVIAL_CONTEXT)
    e = Element.generator(mod, "e")
    return AInfty(mod, {2: _mu2_from_products(mod, {("e", "e"): e})},
                  unit="e", name="ground_field")


def _dual_numbers() -> AInfty:
    mod = GradedModule("dual_numbers", ("e", "eps"), (0, 1), TRIVIAL_CONTEXT)
    e = Element.generator(mod, "e")
    eps = Element.generator(mod, "eps")
    prod = {
        ("e", "e"): e, ("e", "eps"): eps, ("eps", "e"): eps,
        ("eps", "eps"): Element.zero(mod),
    }
    return AInfty(mod, {2: _mu2_from_products(mod, prod)},
                  unit="e", name="dual_numbers")


def _exterior(r: int) -> AInfty:
    """Exterior algebra on r degree-1 generators; basis indexed by subsets."""
    import itertools

    names = {}
    degs = []
    basis = []
    for size in range(r + 1):
        for subset in itertools.combinations(range(r), size):
            nm = "e" if not subset else "a" + "".join(str(i + 1) for i in subset)
            names[subset] = nm
            basis.append(nm)
            degs.append(size)
    mod = GradedModule(f"exterior_{r}", tuple(basis), tuple(degs),
                       TRIVIAL_CONTEXT)
    prod = {}
    for s1, n1 in names.items():
        for s2, n2 in names.items():
            if set(s1) & set(s2):
                prod[(n1, n2)] = Element.zero(mod)
                continue
            merged = tuple(sorted(s1 + s2))
            # sign of sorting the concatenation of two increasing runs of
            # odd generators
            inv = sum(1 for a in s1 for b in s2 if a > b)
            prod[(n1, n2)] = Element.generator(mod, names[merged],
                                               -1 if inv % 2 else 1)
    return AInfty(mod, {2: _mu2_from_products(mod, prod)},
                  unit="e", name=f"exterior_{r}")


def _curved_matrix() -> AInfty:
    """Curved differential graded algebra of 2x2 matrices: I, K diagonal in
    degree 0, F (degree 1) and G (degree -1) off-diagonal, differential the
    commutator with x = F + T G, curvature x^2 = T I."""
    ctx = Context(PiGroup(1, (Fraction(1),), (2,)), FormalVarSpec(()))
    mod = GradedModule("curved_matrix", ("I", "K", "F", "G"), (0, 0, 1, -1),
                       ctx)
    one = Scalar.one(ctx)
    T = Scalar.monomial(ctx, 1, (1,), ())
    half = Scalar.rational(ctx, Fraction(1, 2))

    def el(pairs):
        return Element(mod, dict(pairs))

    zero = Element.zero(mod)
    prod = {
        ("I", "I"): el([("I", one)]), ("I", "K"): el([("K", one)]),
        ("I", "F"): el([("F", one)]), ("I", "G"): el([("G", one)]),
        ("K", "I"): el([("K", one)]), ("F", "I"): el([("F", one)]),
        ("G", "I"): el([("G", one)]),
        ("K", "K"): el([("I", one)]),
        ("K", "F"): el([("F", one)]), ("F", "K"): el([("F", -one)]),
        ("K", "G"): el([("G", -one)]), ("G", "K"): el([("G", one)]),
        ("F", "G"): el([("I", half), ("K", half)]),
        ("G", "F"): el([("I", half), ("K", -half)]),
        ("F", "F"): zero, ("G", "G"): zero,
    }
    mu1 = {
        ("K",): el([("F", -one - one), ("G", T + T)]),
        ("F",): el([("I", T)]),
        ("G",): el([("I", one)]),
    }
    mu0 = {(): el([("I", T)])}
    return AInfty(mod, {0: mu0, 1: mu1, 2: _mu2_from_products(mod, prod)},
                  unit="I", name="curved_matrix")


_EXTERIOR_RE = re.compile(r"exterior\((\d+)\)")

BUILTIN_NAMES = ("ground_field", "dual_numbers", "exterior(2)",
                 "curved_matrix")


def builtin_algebras(name: str) -> AInfty:
    if name == "ground_field":
        return _ground_field()
    if name == "dual_numbers":
        return _dual_numbers()
    if name == "curved_matrix":
        return _curved_matrix()
    m = _EXTERIOR_RE.fullmatch(name)
    if m:
        return _exterior(int(m.group(1)))
    raise ValueError(f"unknown builtin algebra {name!r}")

"""Hochschild differential, cyclic rotation operator, and the six chain
complex variants (Hochschild, normalized Hochschild, cyclic quotient, reduced
cyclic, and the two extended variants with a weight-zero generator).

Quotients are realized by canonicalization: every cyclic class is stored via
its signed lexicographically-minimal rotation, and classes whose stabilizer
acts by -1 are zero over the rationals.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .scalars import Cap, Scalar
from .graded import (
    Element,
    GradedModule,
    Word,
    rotate,
    shifted_parity,
    split_enum,
    word_from_factors,
)
from .ainfty import AInfty, hat_extension


class Variant(enum.Enum):
    HOCHSCHILD = "hochschild"
    NORMALIZED_HOCHSCHILD = "normalized_hochschild"
    CONNES = "connes"
    REDUCED_CONNES = "reduced_connes"
    EXTENDED_CONNES = "extended_connes"
    EXTENDED_REDUCED_CONNES = "extended_reduced_connes"


CYCLIC_VARIANTS = frozenset({
    Variant.CONNES, Variant.REDUCED_CONNES,
    Variant.EXTENDED_CONNES, Variant.EXTENDED_REDUCED_CONNES,
})
EXTENDED_VARIANTS = frozenset({
    Variant.EXTENDED_CONNES, Variant.EXTENDED_REDUCED_CONNES,
})
UNIT_KILLING_VARIANTS = frozenset({
    Variant.NORMALIZED_HOCHSCHILD, Variant.REDUCED_CONNES,
    Variant.EXTENDED_REDUCED_CONNES,
})


@dataclass
class ChainElt:
    """A chain: an underlying word plus the variant it lives in.  For
    quotient variants the word is kept in canonical form.  The weight-zero
    generator of the extended variants is the empty tuple."""

    word: Word
    variant: Variant

    def is_zero(self):
        return self.word.is_zero()

    def __eq__(self, other):
        return (isinstance(other, ChainElt) and self.variant == other.variant
                and self.word == other.word)


# ---------------------------------------------------------------------------
# cyclic operator and canonical representatives
# ---------------------------------------------------------------------------


def _degs(module: GradedModule, tup):
    # rotate() derives the shifted sign s1 from unshifted degrees itself
    return [module.degree(g) for g in tup]


def t_word(w: Word) -> Word:
    """The cyclic rotation moving the last tensor factor to the front, with
    the Koszul sign on shifted degrees; identity on weights 0 and 1."""
    mod = w.module
    out = {}
    for tup, c in w.items():
        k = len(tup)
        if k <= 1:
            out[tup] = out.get(tup, Scalar.zero(mod.ctx)) + c
            continue
        rot, _, s1 = rotate(tup, _degs(mod, tup), k - 1)
        val = -c if s1 else c
        out[rot] = out.get(rot, Scalar.zero(mod.ctx)) + val
    return Word(mod, out)


def t_op(c: ChainElt) -> ChainElt:
    return ChainElt(t_word(c.word), c.variant)


def _canonical_rotation(module: GradedModule, tup):
    """Signed-lex-minimal rotation of a basis tuple.

    Returns ``(rotated_tuple, sign_exponent)`` or ``None`` when the minimal
    tuple is reached by rotations of both signs (the class is then zero)."""
    k = len(tup)
    if k <= 1:
        return tup, 0
    degs = _degs(module, tup)
    key = None
    best = None
    signs = set()
    for j in range(k):
        rot, _, s1 = rotate(tup, degs, j)
        rkey = tuple(module.index(g) for g in rot)
        if key is None or rkey < key:
            key, best, signs = rkey, rot, {s1}
        elif rkey == key:
            signs.add(s1)
    if len(signs) == 2:
        return None
    return best, signs.pop()


def connes_canonical(w: Word) -> Word:
    """Canonical representative of the class of ``w`` modulo the image of
    1 - t: each term is rotated to its signed-lex-minimal position; terms
    fixed (up to rotation) with sign -1 are zero."""
    mod = w.module
    out = {}
    for tup, c in w.items():
        can = _canonical_rotation(mod, tup)
        if can is None:
            continue
        rot, sgn = can
        val = -c if sgn else c
        out[rot] = out.get(rot, Scalar.zero(mod.ctx)) + val
    return Word(mod, out)


def connes_preimage(w: Word) -> Word:
    """A word u with connes_canonical(w) - w = (1 - t)(u), witnessing the
    quotient relation term by term.

    For a term reaching its canonical rotation after m steps the telescoping
    t^m(u) - u = -(1 - t)(u + t(u) + ... + t^{m-1}(u)) applies; for a
    class-zero term (t^N(u) = -u for some N) one has
    -u = -(1 - t)((u + ... + t^{N-1}(u)) / 2)."""
    mod = w.module
    acc = Word.zero(mod)
    for tup, c in w.items():
        term = Word(mod, {tup: c})
        k = len(tup)
        partial = Word.zero(mod)
        cur = term
        for _ in range(2 * max(k, 1)):
            can = _canonical_rotation(mod, next(iter(cur.terms)))
            if can is not None and can[0] == next(iter(cur.terms)):
                acc = acc - partial
                break
            if cur == -term:
                acc = acc - partial.scale(Fraction(1, 2))
                break
            partial = partial + cur
            cur = t_word(cur)
        else:
            raise AssertionError("rotation orbit did not close")
    return acc


def degenerate_project(A: AInfty, w: Word, variant: Variant) -> Word:
    """Kill terms containing the unit in quotient-killed slots: slots >= 2
    for the normalized Hochschild complex, any slot for reduced cyclic
    variants."""
    if variant not in UNIT_KILLING_VARIANTS:
        return w
    if A.unit is None:
        raise ValueError(f"variant {variant.value} requires a unital algebra")
    e = A.unit
    out = {}
    for tup, c in w.items():
        if variant is Variant.NORMALIZED_HOCHSCHILD:
            if e in tup[1:]:
                continue
        else:
            if e in tup:
                continue
        out[tup] = c
    return Word(w.module, out)


def project(A: AInfty, w: Word, variant: Variant) -> Word:
    """Full canonicalization for the variant."""
    if variant in CYCLIC_VARIANTS:
        w = connes_canonical(w)
    w = degenerate_project(A, w, variant)
    if variant in CYCLIC_VARIANTS:
        w = connes_canonical(w)
    return w


def is_canonical_tuple(A: AInfty, tup, variant: Variant) -> bool:
    """Whether a basis tuple is its own canonical representative and survives
    the variant's quotients (weight-0 only in extended variants)."""
    if len(tup) == 0:
        return variant in EXTENDED_VARIANTS
    w = Word.basis_word(A.module, tup)
    p = project(A, w, variant)
    return p.terms == w.terms


# ---------------------------------------------------------------------------
# the Hochschild differential
# ---------------------------------------------------------------------------


def diff_basis(A: AInfty, tup) -> list:
    """Raw Hochschild differential on one basis tuple, as (output tuple,
    scalar) pairs.  Cached on the algebra.

    On x (x) l it is (-1)^{||x||} x (x) mu-hat(l) plus the wrap-around sum
    over 3-splittings of l:
    (-1)^{||l3||(||x|| + ||l1|| + ||l2||)} mu(l3 (x) x (x) l1) (x) l2.
    On the weight-0 generator it is the curvature."""
    cached = A._diff_cache.get(tup)
    if cached is not None:
        return cached
    mod = A.module
    ctx = mod.ctx
    acc: dict[tuple, dict] = {}

    def add(otup, scalar, sgn):
        bucket = acc.get(otup)
        if bucket is None:
            bucket = acc[otup] = {}
        for m, c in scalar.terms.items():
            bucket[m] = bucket.get(m, 0) + (-c if sgn else c)

    k = len(tup)
    if k == 0:
        for g, s in A.mu0().items():
            add((g,), s, 0)
    else:
        # sp[i] = ||tup[:i]|| mod 2
        sp = [0]
        for g in tup:
            sp.append((sp[-1] + mod.degree(g) + 1) % 2)
        for a in range(1, k + 1):        # straight: l2 = tup[a:b]
            for b in range(a, k + 1):
                table = A.ops.get(b - a)
                if table is None:
                    continue
                img = table.get(tup[a:b])
                if img is None:
                    continue
                head, tail = tup[:a], tup[b:]
                for g, s in img.items():
                    sgn = (sp[a] * (1 + s.degree_parity())) % 2
                    add(head + (g,) + tail, s, sgn)
        for b in range(1, k + 1):        # wrap: mu(l3 (x) x (x) l1) (x) l2
            for a in range(1, b + 1):    # l1 = tup[1:a], l2 = tup[a:b]
                table = A.ops.get(k - b + a)
                if table is None:
                    continue
                img = table.get(tup[b:] + tup[:a])
                if img is None:
                    continue
                n3 = (sp[k] + sp[b]) % 2
                sgn = (n3 * sp[b]) % 2
                for g, s in img.items():
                    add((g,) + tup[a:b], s, sgn)
    out = []
    for t, b in acc.items():
        b = {m: c for m, c in b.items() if c}
        if b:
            out.append((t, Scalar._raw(ctx, b)))
    A._diff_cache[tup] = out
    return out


def hoch_diff_word(A: AInfty, w: Word, cap: Cap | None = None,
                   extended: bool = False) -> Word:
    """Raw Hochschild differential, prior to any variant projection; the
    operator passes a front coefficient of degree |c| with (-1)^{|c|}."""
    from .ainfty import combine_basis_images

    for tup in w.terms:
        if len(tup) == 0 and not extended:
            raise ValueError("weight-0 chain in a non-extended variant")
    return combine_basis_images(A.module, w, lambda tup: diff_basis(A, tup),
                                cap)


def hoch_diff(A: AInfty, c: ChainElt, cap: Cap | None = None) -> ChainElt:
    """Variant differential: raw differential followed by the variant's
    canonical projection."""
    raw = hoch_diff_word(A, c.word, cap,
                         extended=c.variant in EXTENDED_VARIANTS)
    return ChainElt(project(A, raw, c.variant), c.variant)


# ---------------------------------------------------------------------------
# verification sweeps
# ---------------------------------------------------------------------------


@dataclass
class SweepReport:
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def dsquare_sweep(A: AInfty, variant: Variant, cap: Cap) -> SweepReport:
    """d-squared on every canonical basis chain up to the weight cap;
    outputs are energy-capped but never weight-capped, so the vanishing is
    exact, not an artifact of truncation."""
    report = SweepReport()
    weights = range(0, cap.weight + 1)
    for w in weights:
        for tup in itertools.product(A.module.basis, repeat=w):
            if not is_canonical_tuple(A, tup, variant):
                continue
            chain = ChainElt(Word.basis_word(A.module, tup), variant)
            res = hoch_diff(A, hoch_diff(A, chain, cap), cap)
            report.checked += 1
            if not res.is_zero():
                report.failures.append({"tuple": tup,
                                        "residual": repr(res.word)})
    return report


def random_word(A: AInfty, rng: random.Random, max_weight: int,
                min_weight: int = 1, terms: int = 2) -> Word:
    """A small random linear combination of basis words, for property
    sweeps."""
    out = Word.zero(A.module)
    for _ in range(terms):
        k = rng.randint(min_weight, max_weight)
        tup = tuple(rng.choice(A.module.basis) for _ in range(k))
        coeff = rng.choice((-2, -1, 1, 2, 3))
        out = out + Word.basis_word(A.module, tup, coeff)
    return out


def t_lemma_check(A: AInfty, cap: Cap, trials: int,
                  seed: int = 0) -> SweepReport:
    """The intertwining identity d_hoch o (1 - t) = (1 - t) o mu-hat on
    random words of weight >= 1."""
    rng = random.Random(seed)
    report = SweepReport()
    for _ in range(trials):
        w = random_word(A, rng, cap.weight)
        lhs = hoch_diff_word(A, w - t_word(w), cap)
        mh = hat_extension(A, w, cap)
        rhs = mh - t_word(mh)
        report.checked += 1
        if lhs != rhs:
            report.failures.append({"word": repr(w)})
    return report


def extended_dsquare_raw(A: AInfty, cap: Cap | None = None) -> Word:
    """d-squared on the weight-0 generator without the cyclic quotient:
    d(mu_0(1)), which equals -mu_0(1) (x) mu_0(1) and is nonzero for curved
    algebras — the reason the extension lives in the cyclic complex."""
    one = Word.basis_word(A.module, ())
    return hoch_diff_word(A, hoch_diff_word(A, one, cap, extended=True), cap)

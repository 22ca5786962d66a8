"""Graded modules, shifted tensor words, splitting/rotation combinatorics,
and the sign calculus (eps, eps', eps'', eps_p, s_sigma, s_sigma^[1], shuffle
signs).

Degrees are stored unshifted; the shift is a view.  All sign functions return
exponents mod 2, never +-1 scalars, so that sign chases compose in the
exponent.  Note on the shift: the sign calculus only consumes parities, and
``|x| + 1`` and ``|x| - 1`` agree mod 2.  For *absolute* degree bookkeeping
(the differential raising chain degree by exactly one, the unit sitting in
shifted degree -1) the consistent choice is ``shifted = |x| - 1``, which is
what :func:`shifted_degree` returns.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .scalars import Cap, Context, Scalar, scalar_mul

# ---------------------------------------------------------------------------
# modules, elements, words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GradedModule:
    """Finite-basis graded module; generators are named, degrees unshifted."""

    name: str
    basis: tuple[str, ...]
    degrees: tuple[int, ...]
    ctx: Context

    def __post_init__(self):
        if len(set(self.basis)) != len(self.basis):
            raise ValueError("generator names must be unique")
        if len(self.degrees) != len(self.basis):
            raise ValueError("one degree per generator")

    def index(self, gen: str) -> int:
        return self.basis.index(gen)

    def degree(self, gen: str) -> int:
        return self.degrees[self.basis.index(gen)]


def shifted_degree(module: GradedModule, gen: str) -> int:
    """Degree of a generator viewed in the shifted module."""
    return module.degree(gen) - 1


def shifted_parity(module: GradedModule, gens) -> int:
    """Parity of the total shifted degree of a list of generators."""
    return sum(module.degree(g) + 1 for g in gens) % 2


def unshifted_parity(module: GradedModule, gens) -> int:
    return sum(module.degree(g) for g in gens) % 2


class Element:
    """Finite scalar combination of generators of one module."""

    __slots__ = ("module", "coeffs")

    def __init__(self, module: GradedModule, coeffs=None):
        self.module = module
        clean = {}
        for g, s in (coeffs or {}).items():
            if g not in module.basis:
                raise ValueError(f"unknown generator {g!r}")
            if s.is_zero():
                continue
            clean[g] = clean.get(g, Scalar.zero(module.ctx)) + s
        self.coeffs = {g: s for g, s in clean.items() if not s.is_zero()}

    @classmethod
    def zero(cls, module):
        return cls(module)

    @classmethod
    def generator(cls, module, gen, coeff=1):
        return cls(module, {gen: Scalar.rational(module.ctx, coeff)})

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, Element)
            and self.module == other.module
            and self.coeffs == other.coeffs
        )

    def __add__(self, other):
        out = dict(self.coeffs)
        for g, s in other.coeffs.items():
            out[g] = out.get(g, Scalar.zero(self.module.ctx)) + s
        return Element(self.module, out)

    def __neg__(self):
        return Element(self.module, {g: -s for g, s in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Element":
        return Element(self.module, {g: s.scale(c) for g, s in self.coeffs.items()})

    def scalar_left(self, s: Scalar, cap: Cap | None = None) -> "Element":
        """Multiply by a scalar on the left (no sign: scalars sit in front)."""
        return Element(
            self.module,
            {g: scalar_mul(s, t, cap) for g, t in self.coeffs.items()},
        )

    def truncate(self, cap: Cap | None) -> "Element":
        return Element(
            self.module, {g: s.truncate(cap) for g, s in self.coeffs.items()}
        )

    def degree(self) -> int:
        degs = {
            self.module.degree(g) + s.degree() for g, s in self.coeffs.items()
        }
        if len(degs) != 1:
            raise ValueError("degree of a zero or non-homogeneous element")
        return degs.pop()

    def degree_parity(self) -> int:
        if not self.coeffs:
            return 0
        pars = {
            (self.module.degree(g) + s.degree_parity()) % 2
            for g, s in self.coeffs.items()
        }
        if len(pars) != 1:
            raise ValueError("parity of a non-homogeneous element")
        return pars.pop()

    def items(self):
        return self.coeffs.items()

    def __repr__(self):
        if not self.coeffs:
            return "Element(0)"
        body = " + ".join(f"({s!r})*{g}" for g, s in sorted(self.coeffs.items()))
        return f"Element({body})"


class Word:
    """Element of the (shifted) tensor algebra: finite sum of basis tensors.

    Terms map generator tuples to scalars; the empty tuple is the weight-zero
    generator ``1_R``.  The scalar coefficient of every term is kept at the
    far left of the tensor, so Koszul commutation happens exactly once, when a
    coefficient is produced in the middle of a tensor and moved out.
    """

    __slots__ = ("module", "terms")

    def __init__(self, module: GradedModule, terms=None):
        self.module = module
        clean = {}
        for tup, s in (terms or {}).items():
            tup = tuple(tup)
            if s.is_zero():
                continue
            clean[tup] = clean.get(tup, Scalar.zero(module.ctx)) + s
        self.terms = {t: s for t, s in clean.items() if not s.is_zero()}

    @classmethod
    def _raw(cls, module, terms: dict) -> "Word":
        """Internal fast path: wrap an already-clean term dict (tuple keys,
        nonzero Scalars) without re-accumulation."""
        w = object.__new__(cls)
        w.module = module
        w.terms = terms
        return w

    @classmethod
    def zero(cls, module):
        return cls._raw(module, {})

    @classmethod
    def basis_word(cls, module, tup, coeff=1):
        return cls(module, {tuple(tup): Scalar.rational(module.ctx, coeff)})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return (
            isinstance(other, Word)
            and self.module == other.module
            and self.terms == other.terms
        )

    def __add__(self, other):
        out = dict(self.terms)
        for t, s in other.terms.items():
            out[t] = out.get(t, Scalar.zero(self.module.ctx)) + s
        return Word(self.module, out)

    def __neg__(self):
        return Word(self.module, {t: -s for t, s in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return Word(self.module, {t: s.scale(c) for t, s in self.terms.items()})

    def truncate(self, cap: Cap | None, weight: bool = False) -> "Word":
        """Drop monomials beyond the energy/variable cap; optionally also drop
        whole terms beyond the weight cap."""
        if cap is None:
            return self
        out = {}
        for tup, s in self.terms.items():
            if weight and len(tup) > cap.weight:
                continue
            out[tup] = s.truncate(cap)
        return Word(self.module, out)

    def weights(self):
        return sorted({len(t) for t in self.terms})

    def term_degree(self, tup, s: Scalar) -> int:
        return s.degree() + sum(self.module.degree(g) - 1 for g in tup)

    def items(self):
        return self.terms.items()

    def __repr__(self):
        if not self.terms:
            return "Word(0)"
        body = " + ".join(
            f"({s!r})*{'(x)'.join(t) if t else '1'}"
            for t, s in sorted(self.terms.items())
        )
        return f"Word({body})"


def word_from_factors(module, factors, coeff: Scalar | None = None,
                      shifted: bool = True, cap: Cap | None = None) -> Word:
    """Tensor together generators and elements, commuting every scalar that
    appears in the middle out to the front with the appropriate Koszul sign.

    ``factors`` is a list whose entries are generator names or Elements.  With
    ``shifted`` the crossings are weighted by shifted parities (boundary-type
    slots); otherwise by unshifted parities (interior-type slots).
    """

    ctx = module.ctx
    shift = 1 if shifted else 0
    terms = {(): coeff if coeff is not None else Scalar.one(ctx)}
    for f in factors:
        new = {}
        if isinstance(f, str):
            for tup, c in terms.items():
                key = tup + (f,)
                new[key] = new.get(key, Scalar.zero(ctx)) + c
        else:
            for tup, c in terms.items():
                par = sum(module.degree(g) + shift for g in tup) % 2
                for g, s in f.items():
                    sgn = (s.degree_parity() * par) % 2
                    val = scalar_mul(c, s, cap)
                    if sgn:
                        val = -val
                    key = tup + (g,)
                    new[key] = new.get(key, Scalar.zero(ctx)) + val
        terms = {t: s for t, s in new.items() if not s.is_zero()}
        if not terms:
            break
    return Word(module, terms)


class ChainComplex:
    """A graded module with a differential given on generators."""

    def __init__(self, module: GradedModule, diff: dict[str, Element]):
        self.module = module
        self.diff = {g: e for g, e in diff.items() if not e.is_zero()}
        for g, e in self.diff.items():
            if e.degree() != module.degree(g) + 1:
                raise ValueError(f"differential is not of degree +1 on {g!r}")

    def d(self, el: Element) -> Element:
        """Differential on an element; odd operator, scalars pass with a sign."""
        out = Element.zero(self.module)
        for g, s in el.items():
            img = self.diff.get(g)
            if img is None:
                continue
            sgn = s.degree_parity()
            part = img.scalar_left(s)
            out = out + (-part if sgn else part)
        return out

    def check_d_squared(self):
        for g in self.module.basis:
            r = self.d(self.d(Element.generator(self.module, g)))
            if not r.is_zero():
                raise ValueError(f"d^2 != 0 on generator {g!r}")


# ---------------------------------------------------------------------------
# splittings and rotations
# ---------------------------------------------------------------------------


def split_enum(tup, r: int):
    """All splittings of a tuple into ``r`` consecutive, possibly empty blocks,
    in lexicographic order of the cut positions."""
    if r < 1:
        raise ValueError("need at least one block")
    tup = tuple(tup)
    k = len(tup)
    out = []
    for cuts in itertools.combinations_with_replacement(range(k + 1), r - 1):
        bounds = (0,) + cuts + (k,)
        out.append(tuple(tup[bounds[i]: bounds[i + 1]] for i in range(r)))
    return out


def rotation_perm(k: int, j: int):
    """The cyclic permutation sending position i to i + j (0-based image list)."""
    return [(i + j) % k for i in range(k)]


def s_perm(degrees, perm) -> int:
    """Weighted permutation sign exponent (mod 2) of the reordering a -> a^sigma.

    ``perm[i]`` is the original index of the element landing in slot i.
    """
    k = len(perm)
    s = 0
    for i in range(k):
        for j in range(i + 1, k):
            if perm[i] > perm[j]:
                s += degrees[perm[i]] * degrees[perm[j]]
    return s % 2


def rotate(tup, degrees, j: int):
    """Rotate a tuple by ``j`` (element j comes first); returns the rotated
    tuple with both sign exponents ``(s_sigma, s_sigma^[1])``."""
    tup = tuple(tup)
    k = len(tup)
    if k == 0:
        return tup, 0, 0
    j %= k
    perm = rotation_perm(k, j)
    rot = tuple(tup[p] for p in perm)
    s = s_perm(list(degrees), perm)
    s1 = s_perm([d + 1 for d in degrees], perm)
    return rot, s, s1


def shuffle_sign(degrees, I, J) -> int:
    """Sign exponent of the shuffle reordering the concatenation I o J into
    ascending order; I, J are disjoint 0-based index collections."""
    I = sorted(I)
    J = sorted(J)
    if set(I) & set(J):
        raise ValueError("I and J overlap")
    if set(I) | set(J) != set(range(len(degrees))):
        raise ValueError("I and J must partition the index set")
    perm = I + J
    return s_perm(list(degrees), perm)


# ---------------------------------------------------------------------------
# the eps-family of sign exponents
# ---------------------------------------------------------------------------


def eps_prime(k: int) -> int:
    return (k * (k + 1) // 2 + 1) % 2


def eps_dprime(degrees) -> int:
    return sum((j + 1) * d for j, d in enumerate(degrees)) % 2


def eps(degrees) -> int:
    return (1 + sum((j + 1) * (d + 1) for j, d in enumerate(degrees))) % 2


def eps_p_prime(k: int, n: int) -> int:
    return (k * n + k * (k + 1) // 2) % 2


def eps_p_dprime(degrees, n: int) -> int:
    total = sum(degrees)
    return (n * total + sum((j + 1) * d for j, d in enumerate(degrees))) % 2


def eps_p(degrees, n: int) -> int:
    return sum((n + j + 1) * (d + 1) for j, d in enumerate(degrees)) % 2


# ---------------------------------------------------------------------------
# the sign-lemma suite
# ---------------------------------------------------------------------------


@dataclass
class SignLemmaReport:
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, name, data, lhs, rhs):
        self.checked += 1
        if lhs % 2 != rhs % 2:
            self.failures.append({"identity": name, "input": data,
                                  "lhs": lhs % 2, "rhs": rhs % 2})


def _check_rotation_identity(report, degrees, n):
    k = len(degrees)
    for j in range(k):
        perm = rotation_perm(k, j)
        rot = [degrees[p] for p in perm]
        rhs = 0
        for a in range(k):
            for b in range(a + 1, k):
                if perm[a] > perm[b]:
                    rhs += degrees[perm[b]] - degrees[perm[a]]
        # the paper's convention sums (|a_{sigma(i)}| - |a_{sigma(j)}|) over
        # inversions j < i with sigma(j) > sigma(i); mod 2 the orientation of
        # the difference is immaterial
        report.record("rotation-eps_p", (tuple(degrees), j),
                      eps_p(rot, n) - eps_p(degrees, n), rhs)
        report.record("rotation-eps", (tuple(degrees), j),
                      eps(rot) - eps(degrees), rhs)


def _check_splitting_identities(report, degrees, gamma_j, n):
    k = len(degrees)
    total = sum(degrees) % 2
    for k2 in range(0, k + 1):
        k1 = k + 1 - k2
        report.record(
            "split-eps'", (k, k2),
            eps_prime(k1) + eps_prime(k2),
            eps_prime(k) + k + k1 * k2,
        )
        report.record(
            "split-eps_p'", (k, k2, n),
            eps_p_prime(k1, n) + eps_prime(k2),
            eps_p_prime(k, n) + k + k1 * k2 + k2 * n + n,
        )
        for i in range(1, k - k2 + 2):  # 1-based start of the middle block
            a1 = degrees[: i - 1]
            a2 = degrees[i - 1: i - 1 + k2]
            a3 = degrees[i - 1 + k2:]
            merged = list(a1) + [(sum(a2) + gamma_j + k2) % 2] + list(a3)
            d1 = sum(a1) % 2
            d2 = sum(a2) % 2
            d3 = sum(a3) % 2
            report.record(
                "split-eps''", (tuple(degrees), i, k2, gamma_j),
                eps_dprime(merged) + eps_dprime(a2),
                eps_dprime(degrees) + i * k2 + k2 * d3 + total + d1
                + i * gamma_j,
            )
            report.record(
                "split-eps", (tuple(degrees), i, k2, gamma_j),
                eps(merged) + eps(a2),
                eps(degrees) + total + k + d1 + i * gamma_j + k2 * d3
                + k1 * k2 + i * k2,
            )
            report.record(
                "split-eps_p''", (tuple(degrees), i, k2, gamma_j, n),
                eps_p_dprime(merged, n) + eps_dprime(a2),
                eps_p_dprime(degrees, n) + (i + n) * k2 + k2 * d3 + total
                + d1 + (i + n) * gamma_j,
            )
            report.record(
                "split-eps_p", (tuple(degrees), i, k2, gamma_j, n),
                eps_p(merged, n) + eps(a2),
                eps_p(degrees, n) + total + k + d1 + (i + n) * gamma_j
                + k2 * d3 + k1 * k2 + i * k2 + n,
            )


def lemma_sign_suite(k: int, n: int, trials: int = 0, seed: int = 0) -> SignLemmaReport:
    """Exhaustively check the rotation and splitting sign congruences for all
    parity vectors up to length ``k``, plus optional random degree draws from
    {-2, ..., 3} (the identities only see parities; the range is recorded for
    reproducibility)."""

    report = SignLemmaReport()
    for length in range(0, k + 1):
        for parities in itertools.product((0, 1), repeat=length):
            _check_rotation_identity(report, list(parities), n)
            for gamma_j in (0, 1):
                _check_splitting_identities(report, list(parities), gamma_j, n)
    rng = random.Random(seed)
    for _ in range(trials):
        length = rng.randint(1, max(k, 1))
        degrees = [rng.randint(-2, 3) for _ in range(length)]
        _check_rotation_identity(report, degrees, n)
        for gamma_j in (0, 1):
            _check_splitting_identities(report, degrees, gamma_j, n)
    return report

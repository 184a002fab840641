"""Multi-parameter Iwahori-Hecke algebra arithmetic.

Elements are finite linear combinations of the renormalised basis {T_w}
indexed by canonical words.  The defining relation for a generator s with
parameter q_s > 0 is

    T_s T_w = T_{sw}                     if |sw| > |w|
    T_s T_w = T_{sw} + p_s T_w           if |sw| < |w|,   p_s = (q_s - 1)/sqrt(q_s)

so q = 1 collapses to the group algebra.  Any positive parameter vector is
admissible here: in the right-angled case no two distinct generators are
conjugate, hence no compatibility constraints between the q_s arise.

The canonical trace reads off the coefficient at the identity; the T_w are
an orthonormal basis for the induced inner product, which the tests use
heavily.  Coefficients are complex floats by default, with support pruning
at 1e-12; exact Fraction coefficients are kept unpruned (see
MultiParameter(exact=True), restricted to parameters with rational square
root) so algebraic identities can be checked without rounding.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Mapping

from .coxeter import CoxeterGraph, NormalWord, inverse, left_mul_gen

PRUNE_TOL = 1e-12


def _exact_sqrt(q: Fraction) -> Fraction:
    num = math.isqrt(q.numerator)
    den = math.isqrt(q.denominator)
    if num * num != q.numerator or den * den != q.denominator:
        raise ValueError(f"exact mode needs a rational square root; {q} has none")
    return Fraction(num, den)


class MultiParameter:
    """A positive Hecke parameter q_s per generator.

    ``values[s]`` is q_s; ``p(s)`` is the renormalised structure constant
    (q_s - 1)/sqrt(q_s).  With ``exact=True`` the values are Fractions with
    rational square roots and p(s) stays a Fraction.
    """

    __slots__ = ("graph", "values", "_p", "exact")

    def __init__(self, graph: CoxeterGraph, values, exact: bool = False):
        values = tuple(values)
        if len(values) != graph.n:
            raise ValueError(f"expected {graph.n} parameters, got {len(values)}")
        if exact:
            values = tuple(Fraction(v) for v in values)
            if any(v <= 0 for v in values):
                raise ValueError("Hecke parameters must be positive")
            p = tuple((v - 1) / _exact_sqrt(v) for v in values)
        else:
            values = tuple(float(v) for v in values)
            if any(not v > 0 for v in values):
                raise ValueError("Hecke parameters must be positive")
            p = tuple((v - 1.0) / math.sqrt(v) for v in values)
        self.graph = graph
        self.values = values
        self.exact = exact
        self._p = p

    @classmethod
    def uniform(cls, graph: CoxeterGraph, q, exact: bool = False) -> "MultiParameter":
        return cls(graph, (q,) * graph.n, exact=exact)

    @classmethod
    def one(cls, graph: CoxeterGraph) -> "MultiParameter":
        return cls.uniform(graph, 1.0)

    @classmethod
    def from_spec(cls, graph: CoxeterGraph, text: str, exact: bool = False) -> "MultiParameter":
        """Parse "s=1.5,t=2" or "all=1.2" against the graph's generators."""
        text = text.strip()
        if not text:
            raise ValueError("empty parameter spec")
        assignments: dict[str, str] = {}
        for part in text.split(","):
            if "=" not in part:
                raise ValueError(f"bad parameter assignment {part!r}")
            name, _, raw = part.partition("=")
            name = name.strip()
            raw = raw.strip()
            if name in assignments:
                raise ValueError(f"generator {name!r} assigned twice")
            assignments[name] = raw
        def parse_value(raw: str):
            try:
                return Fraction(raw) if exact else float(raw)
            except ValueError as exc:
                raise ValueError(f"bad parameter value {raw!r}") from exc
        if "all" in assignments:
            if len(assignments) > 1:
                raise ValueError("'all=' cannot be combined with per-generator values")
            return cls.uniform(graph, parse_value(assignments["all"]), exact=exact)
        values = []
        for name in graph.names:
            if name not in assignments:
                raise ValueError(f"missing parameter for generator {name!r}")
            values.append(parse_value(assignments.pop(name)))
        if assignments:
            unknown = ", ".join(sorted(assignments))
            raise ValueError(f"unknown generator(s) in parameter spec: {unknown}")
        return cls(graph, values, exact=exact)

    def p(self, s: int):
        return self._p[s]

    def q_word(self, w: NormalWord):
        """q_w, the product of q_s over any reduced word for w."""
        out = Fraction(1) if self.exact else 1.0
        for s in w.letters:
            out = out * self.values[s]
        return out

    def is_one(self) -> bool:
        return all(v == 1 for v in self.values)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultiParameter)
            and self.graph == other.graph
            and self.values == other.values
        )

    def __hash__(self) -> int:
        return hash((self.graph, self.values))

    def __repr__(self) -> str:
        vals = ",".join(f"{n}={v}" for n, v in zip(self.graph.names, self.values))
        return f"MultiParameter({vals})"


def _zero(c) -> bool:
    if isinstance(c, Fraction):
        return c == 0
    return abs(c) <= PRUNE_TOL


class HeckeElement:
    """A finitely supported T-basis combination at a fixed parameter.

    The coefficient map never stores zeros (floats are pruned at 1e-12,
    Fractions exactly).  Treat instances as immutable.
    """

    __slots__ = ("q", "coeffs")

    def __init__(self, q: MultiParameter, coeffs: Mapping[NormalWord, complex]):
        self.q = q
        self.coeffs = {w: c for w, c in coeffs.items() if not _zero(c)}

    @property
    def graph(self) -> CoxeterGraph:
        return self.q.graph

    @classmethod
    def zero(cls, q: MultiParameter) -> "HeckeElement":
        return cls(q, {})

    @classmethod
    def one(cls, q: MultiParameter) -> "HeckeElement":
        return cls(q, {q.graph.identity: 1})

    @classmethod
    def basis(cls, q: MultiParameter, w: NormalWord) -> "HeckeElement":
        return cls(q, {w: 1})

    def coeff(self, w: NormalWord):
        return self.coeffs.get(w, 0)

    @property
    def degree(self) -> int:
        """Max word length in the support; 0 for the zero element."""
        if not self.coeffs:
            return 0
        return max(len(w) for w in self.coeffs)

    def support(self) -> list[NormalWord]:
        return sorted(self.coeffs)

    def __add__(self, other: "HeckeElement") -> "HeckeElement":
        self._check(other)
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) + c
        return HeckeElement(self.q, out)

    def __sub__(self, other: "HeckeElement") -> "HeckeElement":
        self._check(other)
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) - c
        return HeckeElement(self.q, out)

    def __neg__(self) -> "HeckeElement":
        return HeckeElement(self.q, {w: -c for w, c in self.coeffs.items()})

    def scaled(self, scalar) -> "HeckeElement":
        return HeckeElement(self.q, {w: c * scalar for w, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, HeckeElement):
            return multiply(self, other)
        return self.scaled(other)

    def __rmul__(self, scalar):
        return self.scaled(scalar)

    def _check(self, other: "HeckeElement") -> None:
        if self.q != other.q:
            raise ValueError("elements live at different Hecke parameters")

    def star(self) -> "HeckeElement":
        """The *-involution: (T_w)* = T_{w^-1} with conjugated coefficients."""
        return HeckeElement(
            self.q, {inverse(w): c.conjugate() for w, c in self.coeffs.items()}
        )

    def length_component(self, n: int) -> "HeckeElement":
        """Projection onto words of length exactly n."""
        return HeckeElement(self.q, {w: c for w, c in self.coeffs.items() if len(w) == n})

    def truncate(self, n: int) -> "HeckeElement":
        """Projection onto words of length at most n."""
        return HeckeElement(self.q, {w: c for w, c in self.coeffs.items() if len(w) <= n})

    def reparametrize(self, q2: MultiParameter) -> "HeckeElement":
        """Same coefficient map read at another parameter."""
        if q2.graph != self.graph:
            raise ValueError("target parameter lives on a different graph")
        return HeckeElement(q2, dict(self.coeffs))

    def display(self) -> str:
        if not self.coeffs:
            return "0"
        chunks: list[str] = []
        for w in sorted(self.coeffs):
            c = self.coeffs[w]
            if isinstance(c, complex) and c.imag == 0:
                c = c.real
            negative = not isinstance(c, complex) and c < 0
            term = f"{-c if negative else c}*{w.display()}"
            if not chunks:
                chunks.append(f"-{term}" if negative else term)
            else:
                chunks.append(f"- {term}" if negative else f"+ {term}")
        return " ".join(chunks)

    def __repr__(self) -> str:
        return f"HeckeElement({self.display()})"


def left_mul_generator(s: int, x: HeckeElement) -> HeckeElement:
    """T_s * x via the quadratic relation, exactly (then pruned)."""
    q = x.q
    if not 0 <= s < q.graph.n:
        raise ValueError(f"generator index {s} out of range")
    p = q.p(s)
    out: dict[NormalWord, complex] = {}
    for w, c in x.coeffs.items():
        sw, longer = left_mul_gen(s, w)
        out[sw] = out.get(sw, 0) + c
        if not longer and p != 0:
            out[w] = out.get(w, 0) + p * c
    return HeckeElement(q, out)


def _basis_times(q: MultiParameter, w: NormalWord, x: HeckeElement) -> HeckeElement:
    # T_w x, applying generators of a reduced word right to left
    acc = x
    for s in reversed(w.letters):
        acc = left_mul_generator(s, acc)
    return acc


def multiply(x: HeckeElement, y: HeckeElement) -> HeckeElement:
    """Algebra product, linear in x over T-basis left multiplications."""
    x._check(y)
    out: dict[NormalWord, complex] = {}
    for w, c in x.coeffs.items():
        term = _basis_times(x.q, w, y)
        for v, d in term.coeffs.items():
            out[v] = out.get(v, 0) + c * d
    return HeckeElement(x.q, out)


def trace(x: HeckeElement):
    """The canonical trace, the coefficient at the identity."""
    return x.coeff(x.graph.identity)


def l2_norm(x: HeckeElement) -> float:
    """GNS norm ||x delta_e||_2 = sqrt(sum |x(w)|^2)."""
    return math.sqrt(sum(abs(c) ** 2 for c in x.coeffs.values()))


_TERM = re.compile(r"([+-])?\s*([^+\-\s]+)")


def parse_element(text: str, q: MultiParameter) -> HeckeElement:
    """Parse an element literal like "1.0*e + 0.5*st - 2*us".

    Each term is [coefficient*]word; words concatenate generator names and
    "e" is the identity.  Unicode minus is accepted.  Words are normalised,
    so literals may use any spelling of a group element.
    """
    graph = q.graph
    cleaned = text.replace("−", "-").strip()
    if not cleaned:
        raise ValueError("empty element literal")
    coeffs: dict[NormalWord, complex] = {}
    pos = 0
    first = True
    while pos < len(cleaned):
        m = _TERM.match(cleaned, pos)
        if m is None or (m.group(1) is None and not first and cleaned[pos] not in "+-"):
            raise ValueError(f"cannot parse element literal at {cleaned[pos:]!r}")
        if m.group(1) is None and not first:
            raise ValueError(f"missing +/- before {m.group(2)!r}")
        sign = -1 if m.group(1) == "-" else 1
        body = m.group(2)
        if "*" in body:
            raw, _, word_text = body.rpartition("*")
            try:
                coeff = complex(raw)
            except ValueError as exc:
                raise ValueError(f"bad coefficient {raw!r}") from exc
        else:
            coeff, word_text = complex(1), body
        from .coxeter import normalize

        w = normalize(graph.parse_letters(word_text), graph)
        coeffs[w] = coeffs.get(w, 0) + sign * coeff
        pos = m.end()
        while pos < len(cleaned) and cleaned[pos] == " ":
            pos += 1
        first = False
    out = HeckeElement(q, coeffs)
    # keep purely real coefficient maps real for cleaner reports
    if all(isinstance(c, complex) and c.imag == 0 for c in out.coeffs.values()):
        out = HeckeElement(q, {w: c.real for w, c in out.coeffs.items()})
    return out


def random_homogeneous(
    q: MultiParameter, length: int, rng, words: Iterable[NormalWord]
) -> HeckeElement:
    """Unit-l2 complex Gaussian coefficients on the given length-n words."""
    pool = [w for w in words if len(w) == length]
    if not pool:
        raise ValueError(f"no words of length {length} supplied")
    re_part = rng.standard_normal(len(pool))
    im_part = rng.standard_normal(len(pool))
    coeffs = {w: complex(a, b) for w, a, b in zip(pool, re_part, im_part)}
    x = HeckeElement(q, coeffs)
    norm = l2_norm(x)
    return x.scaled(1.0 / norm)

"""Creation/annihilation/diagonal decomposition of Hecke basis operators.

On the GNS space, a generator splits as

    T_s = creation(s) + annihilation(s) + p_s Q_s

where creation maps delta_w to delta_{sw} when s does not shorten w,
annihilation does the same when it does, and Q_s projects onto words with
s below them in the right weak order.  A general T_w is a finite sum of
products (creation block) * (clique diagonal) * (annihilation block),
indexed by a clique gamma0, a split (l, k) of the word, a pair of disjoint
cliques (gamma1, gamma2) in the link of gamma0, and one rearrangement
sigma of the canonical word per index, when a rearrangement compatible
with all the boundary conditions exists.  The search for sigma is a plain
brute force over the commutation class, which is the point: it is the
independent, visibly-correct route the fast operator evaluation is tested
against.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .coxeter import (
    BallBasis,
    NormalWord,
    ball,
    cliques,
    comm_pairs,
    link,
    mul_word,
    normalize,
    reduced_expressions,
    starts_with,
)
from .gns import TruncatedOperator
from .hecke import MultiParameter

LADDER_KINDS = ("creation", "annihilation", "diagonal")


def q_projection(u: NormalWord, basis: BallBasis) -> TruncatedOperator:
    """Diagonal projection onto basis words lying above u in right weak order."""
    diag = np.array([1.0 if starts_with(u, v) else 0.0 for v in basis.words])
    return TruncatedOperator(basis, basis, np.diag(diag).astype(complex))


def ladder(s: int, kind: str, q: MultiParameter, basis: BallBasis) -> TruncatedOperator:
    """One ladder factor for generator s on the given ball.

    creation: delta_w -> delta_{sw} when s lengthens w (codomain radius
    grows by one so no component is lost); annihilation: delta_w ->
    delta_{sw} when s shortens w; diagonal: p_s Q_s.  Creation and
    annihilation do not depend on q.
    """
    graph = basis.graph
    if not 0 <= s < graph.n:
        raise ValueError(f"generator index {s} out of range")
    if kind not in LADDER_KINDS:
        raise ValueError(f"kind must be one of {LADDER_KINDS}, got {kind!r}")
    if q.graph != graph:
        raise ValueError("parameter and basis live on different graphs")
    from .coxeter import left_mul_gen

    if kind == "creation":
        cod = ball(graph, basis.radius + 1)
        entries = np.zeros((len(cod), len(basis)), dtype=complex)
        for j, w in enumerate(basis.words):
            sw, longer = left_mul_gen(s, w)
            if longer:
                entries[cod.index[sw], j] = 1.0
        return TruncatedOperator(basis, cod, entries)
    entries = np.zeros((len(basis), len(basis)), dtype=complex)
    if kind == "annihilation":
        for j, w in enumerate(basis.words):
            sw, longer = left_mul_gen(s, w)
            if not longer:
                entries[basis.index[sw], j] = 1.0
    else:
        p = complex(q.p(s))
        for j, w in enumerate(basis.words):
            _, longer = left_mul_gen(s, w)
            if not longer:
                entries[j, j] = p
    return TruncatedOperator(basis, basis, entries)


@dataclass(frozen=True)
class SigmaWitness:
    """A rearrangement certificate for one summand of the decomposition.

    ``sigma[i]`` is the position in the canonical word of the letter sent
    to position i of the rearranged word; ``prefix``/``clique``/``suffix``
    are the creation, diagonal and annihilation letter blocks.
    """

    word: NormalWord
    l: int
    k: int
    gamma0: tuple[int, ...]
    gamma1: tuple[int, ...]
    gamma2: tuple[int, ...]
    sigma: tuple[int, ...]
    prefix: tuple[int, ...]
    clique: tuple[int, ...]
    suffix: tuple[int, ...]


@lru_cache(maxsize=4096)
def _expressions(w: NormalWord) -> tuple[tuple[int, ...], ...]:
    return tuple(reduced_expressions(w))


def _stable_sigma(original: tuple[int, ...], rearranged: tuple[int, ...]) -> tuple[int, ...]:
    # equal letters keep their relative order, which pins sigma uniquely
    queues: dict[int, list[int]] = {}
    for pos, letter in enumerate(original):
        queues.setdefault(letter, []).append(pos)
    heads = {letter: 0 for letter in queues}
    sigma = []
    for letter in rearranged:
        sigma.append(queues[letter][heads[letter]])
        heads[letter] += 1
    return tuple(sigma)


def _validate_params(
    w: NormalWord,
    l: int,
    k: int,
    gamma0: tuple[int, ...],
    gamma1: tuple[int, ...],
    gamma2: tuple[int, ...],
) -> None:
    graph = w.graph
    n = len(w)
    if not 0 <= l <= n:
        raise ValueError(f"l={l} out of range for |w|={n}")
    if not 0 <= k <= n - l:
        raise ValueError(f"k={k} out of range for |w|={n}, l={l}")
    for g in (gamma0, gamma1, gamma2):
        if list(g) != sorted(set(g)):
            raise ValueError(f"clique {g} must be a sorted tuple of distinct vertices")
        for a in g:
            for b in g:
                if a < b and not graph.commute(a, b):
                    raise ValueError(f"{g} is not a clique")
    if len(gamma0) != l:
        raise ValueError(f"gamma0 has size {len(gamma0)}, expected l={l}")
    inside = set(link(graph, gamma0))
    if not (set(gamma1) <= inside and set(gamma2) <= inside):
        raise ValueError("gamma1, gamma2 must lie in the link of gamma0")
    if set(gamma1) & set(gamma2):
        raise ValueError("gamma1 and gamma2 must be disjoint")


def sigma_witnesses(
    w: NormalWord,
    l: int,
    k: int,
    gamma0: tuple[int, ...],
    gamma1: tuple[int, ...],
    gamma2: tuple[int, ...],
) -> list[SigmaWitness]:
    """Every rearrangement of w's canonical word meeting the split conditions.

    The rearranged word splits as prefix (k letters), clique block
    (l letters, exactly gamma0 in canonical order) and suffix; prefix and
    suffix must themselves be canonical words, the prefix's right descents
    within link(gamma0) must be exactly gamma1, the suffix's left descents
    within link(gamma0) exactly gamma2.  A correct decomposition admits at
    most one witness per index; callers assert that, not this function.
    """
    _validate_params(w, l, k, gamma0, gamma1, gamma2)
    graph = w.graph
    n = len(w)
    target_clique = tuple(sorted(gamma0))
    lk = link(graph, gamma0)
    out = []
    for rexp in _expressions(w):
        prefix, clique, suffix = rexp[:k], rexp[k : k + l], rexp[k + l :]
        if clique != target_clique:
            continue
        if normalize(prefix, graph).letters != prefix:
            continue
        if normalize(suffix, graph).letters != suffix:
            continue
        a = graph.word(prefix)
        c = graph.word(suffix)
        ok = True
        for t in lk:
            gen = graph.generator(t)
            # right descents of the prefix: exactly gamma1
            if (len(mul_word(a, gen)) < k) != (t in gamma1):
                ok = False
                break
            # left descents of the suffix: exactly gamma2
            if (len(mul_word(gen, c)) < n - k - l) != (t in gamma2):
                ok = False
                break
        if not ok:
            continue
        out.append(
            SigmaWitness(
                word=w,
                l=l,
                k=k,
                gamma0=target_clique,
                gamma1=tuple(gamma1),
                gamma2=tuple(gamma2),
                sigma=_stable_sigma(w.letters, rexp),
                prefix=prefix,
                clique=clique,
                suffix=suffix,
            )
        )
    return out


def find_sigma(
    w: NormalWord,
    l: int,
    k: int,
    gamma0: tuple[int, ...],
    gamma1: tuple[int, ...],
    gamma2: tuple[int, ...],
) -> SigmaWitness | None:
    """The witness for one index of the decomposition, or None."""
    found = sigma_witnesses(w, l, k, gamma0, gamma1, gamma2)
    return found[0] if found else None


def sigma_census(w: NormalWord) -> list[SigmaWitness]:
    """All witnesses over the full index grid (l, k, gamma0, gamma1, gamma2)."""
    graph = w.graph
    n = len(w)
    out = []
    for gamma0 in cliques(graph):
        l = len(gamma0)
        if l > n:
            continue
        pairs = comm_pairs(graph, gamma0)
        for k in range(0, n - l + 1):
            for gamma1, gamma2 in pairs:
                out.extend(sigma_witnesses(w, l, k, gamma0, gamma1, gamma2))
    return out


def decompose(w: NormalWord, q: MultiParameter, radius: int) -> TruncatedOperator:
    """Sum of ladder-product summands for T_w, compressed to ball(radius).

    Each witness contributes (creation letters of the prefix) * (product
    of p_t over the clique block, gated by its projection) * (annihilation
    letters of the suffix).  Annihilations never leave the ball and
    creations only lengthen, so rows of length <= radius are exact; the
    square compression is the honest comparison target for matrix_of at
    the same radius.
    """
    if q.graph != w.graph:
        raise ValueError("parameter and word live on different graphs")
    basis = ball(w.graph, radius)
    target, longer = basis.action_tables()
    B = len(basis)
    entries = np.zeros((B, B), dtype=complex)
    cols = np.arange(B)
    for witness in sigma_census(w):
        alive = np.ones(B, dtype=bool)
        idx = cols.copy()
        for s in reversed(witness.suffix):
            alive &= ~longer[s, idx]
            idx = np.where(alive, target[s, idx], 0)
        probe = idx.copy()
        for t in witness.clique:
            alive &= ~longer[t, probe]
            probe = np.where(alive, target[t, probe], 0)
        coeff = complex(1)
        for t in witness.clique:
            coeff *= complex(q.p(t))
        for s in reversed(witness.prefix):
            alive &= longer[s, idx]
            nxt = target[s, idx]
            alive &= nxt >= 0
            idx = np.where(alive, nxt, 0)
        if coeff != 0 and alive.any():
            entries[idx[alive], cols[alive]] += coeff
    return TruncatedOperator(basis, basis, entries)

"""Right-angled Coxeter combinatorics.

A right-angled Coxeter system is encoded by a finite simple graph: vertices
are the generators, an edge means the two generators commute (m = 2), a
non-edge means the product has infinite order.  Every element has a
canonical normal form, the lexicographically least reduced word in its
commutation class, which makes words usable as dict keys and basis labels.

Lengths, the right weak order, balls in the word metric, clique data and a
four-point hyperbolicity defect all live here; everything upstream (Hecke
arithmetic, truncated operators) sits on top of this module.
"""

from __future__ import annotations

import hashlib
import json
from typing import Iterable, Iterator, Sequence

import numpy as np

BALL_GUARD = 2_000_000
QUADRUPLE_GUARD = 10_000_000
CLASS_GUARD = 100_000


class ResourceGuardExceeded(RuntimeError):
    """An enumeration would exceed its configured resource cap."""


class CoxeterGraph:
    """Commutation graph of a right-angled Coxeter system.

    Generators are indexed 0..n-1 and carry display names.  Arbitrary
    letter tuples index into ``names``; ``masks[s]`` is the bitmask of
    generators commuting with ``s`` (never including ``s`` itself).
    """

    __slots__ = ("names", "n", "pairs", "masks", "_hash", "_words", "_act", "_balls")

    def __init__(self, names: Sequence[str], commuting_pairs: Iterable[tuple[str, str]]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        if not names:
            raise ValueError("need at least one generator")
        for name in names:
            if not name or any(ch in name for ch in " \t\n*+-,="):
                raise ValueError(f"bad generator name {name!r}")
        self.names = names
        self.n = len(names)
        pos = {name: i for i, name in enumerate(names)}
        pairs = set()
        for a, b in commuting_pairs:
            if a not in pos or b not in pos:
                raise ValueError(f"commuting pair ({a!r}, {b!r}) uses unknown generator")
            if a == b:
                raise ValueError(f"generator {a!r} paired with itself")
            i, j = pos[a], pos[b]
            pairs.add((min(i, j), max(i, j)))
        self.pairs = frozenset(pairs)
        masks = [0] * self.n
        for i, j in pairs:
            masks[i] |= 1 << j
            masks[j] |= 1 << i
        self.masks = tuple(masks)
        self._hash = hash((self.names, self.pairs))
        self._words: dict[tuple[int, ...], NormalWord] = {}
        self._act: dict[tuple[int, tuple[int, ...]], tuple[NormalWord, bool]] = {}
        self._balls: dict[int, BallBasis] = {}

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, CoxeterGraph)
            and self.names == other.names
            and self.pairs == other.pairs
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"CoxeterGraph(names={self.names!r}, edges={len(self.pairs)})"

    def commute(self, s: int, t: int) -> bool:
        return bool(self.masks[s] >> t & 1)

    def neighbors(self, s: int) -> tuple[int, ...]:
        return tuple(t for t in range(self.n) if self.masks[s] >> t & 1)

    def word(self, letters: tuple[int, ...]) -> "NormalWord":
        """Intern an already-canonical letter tuple."""
        w = self._words.get(letters)
        if w is None:
            w = NormalWord(letters, self)
            self._words[letters] = w
        return w

    @property
    def identity(self) -> "NormalWord":
        return self.word(())

    def generator(self, s: int) -> "NormalWord":
        return self.word((s,))

    def parse_letters(self, text: str) -> tuple[int, ...]:
        """Greedy longest-match parse of a concatenated-names word.

        "e" denotes the identity.  Raises ValueError on anything that is
        not a concatenation of generator names.
        """
        if text == "e":
            return ()
        by_length = sorted(self.names, key=len, reverse=True)
        pos_of = {name: i for i, name in enumerate(self.names)}
        out = []
        i = 0
        while i < len(text):
            for name in by_length:
                if text.startswith(name, i):
                    out.append(pos_of[name])
                    i += len(name)
                    break
            else:
                raise ValueError(f"cannot parse word {text!r} at position {i}")
        return tuple(out)

    def to_dict(self) -> dict:
        return {
            "generators": list(self.names),
            "commuting_pairs": sorted([self.names[i], self.names[j]] for i, j in self.pairs),
        }


class NormalWord:
    """A group element, stored as its canonical reduced word.

    Instances are interned per graph via :func:`normalize`; do not call the
    constructor with non-canonical letters.
    """

    __slots__ = ("letters", "graph", "_hash", "_inv")

    def __init__(self, letters: tuple[int, ...], graph: CoxeterGraph):
        self.letters = letters
        self.graph = graph
        self._hash = hash((letters, graph._hash))
        self._inv: NormalWord | None = None

    def __len__(self) -> int:
        return len(self.letters)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, NormalWord)
            and self.letters == other.letters
            and self.graph == other.graph
        )

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "NormalWord") -> bool:
        # ball order: by length, then lexicographically
        return (len(self.letters), self.letters) < (len(other.letters), other.letters)

    def __repr__(self) -> str:
        return f"<{self.display()}>"

    def display(self) -> str:
        if not self.letters:
            return "e"
        return "".join(self.graph.names[s] for s in self.letters)


def _delete_pairs(word: list[int], masks: Sequence[int]) -> list[int]:
    # repeatedly remove (s ... s) where everything between commutes with s
    changed = True
    while changed:
        changed = False
        n = len(word)
        for i in range(n):
            si = word[i]
            blocker = ~masks[si]
            between = 0
            for j in range(i + 1, n):
                sj = word[j]
                if sj == si and between & blocker == 0:
                    del word[j]
                    del word[i]
                    changed = True
                    break
                between |= 1 << sj
            if changed:
                break
    return word


def _lex_least(word: list[int], masks: Sequence[int]) -> tuple[int, ...]:
    # repeatedly pull the least letter whose left neighbours all commute with it
    out: list[int] = []
    rem = list(word)
    while rem:
        before = 0
        best_g = -1
        best_i = -1
        for i, g in enumerate(rem):
            if before & ~masks[g] == 0 and (best_i < 0 or g < best_g):
                best_g, best_i = g, i
            before |= 1 << g
        out.append(best_g)
        del rem[best_i]
    return tuple(out)


def normalize(letters: Sequence[int], graph: CoxeterGraph) -> NormalWord:
    """Canonical normal form of an arbitrary word in the generators.

    Deletion (drop an equal pair separated only by letters commuting with
    it) is applied to exhaustion, which leaves a reduced word; the result
    is then rotated to the lexicographic minimum of its commutation class.
    """
    for s in letters:
        if not 0 <= s < graph.n:
            raise ValueError(f"letter {s} out of range")
    reduced = _delete_pairs(list(letters), graph.masks)
    return graph.word(_lex_least(reduced, graph.masks))


def left_mul_gen(s: int, w: NormalWord) -> tuple[NormalWord, bool]:
    """(s*w, lengthened?) with per-graph memoisation."""
    graph = w.graph
    key = (s, w.letters)
    hit = graph._act.get(key)
    if hit is None:
        sw = normalize((s,) + w.letters, graph)
        hit = (sw, len(sw) > len(w))
        graph._act[key] = hit
    return hit


def mul_word(a: NormalWord, b: NormalWord) -> NormalWord:
    if a.graph != b.graph:
        raise ValueError("words from different graphs")
    if not a.letters:
        return b
    if not b.letters:
        return a
    return normalize(a.letters + b.letters, a.graph)


def inverse(w: NormalWord) -> NormalWord:
    if w._inv is None:
        inv = normalize(w.letters[::-1], w.graph)
        w._inv = inv
        inv._inv = w
    return w._inv


def starts_with(v: NormalWord, w: NormalWord) -> bool:
    """Right weak order test: v <= w, i.e. |v^-1 w| = |w| - |v|."""
    if v.graph != w.graph:
        raise ValueError("words from different graphs")
    if len(v) > len(w):
        return False
    return len(mul_word(inverse(v), w)) == len(w) - len(v)


def weak_prefixes(w: NormalWord) -> tuple[tuple[NormalWord, ...], ...]:
    """All v <= w in right weak order, grouped by length.

    Entry k lists the length-k prefixes in sorted order; entry 0 is the
    identity and entry |w| is (w,).
    """
    graph = w.graph
    levels = [ (graph.identity,) ]
    level = {graph.identity}
    for _ in range(len(w)):
        nxt = set()
        for v in level:
            rest = mul_word(inverse(v), w)
            for s in range(graph.n):
                if len(left_mul_gen(s, rest)[0]) < len(rest):
                    nxt.add(mul_word(v, graph.generator(s)))
        level = nxt
        levels.append(tuple(sorted(level)))
    return tuple(levels)


class BallBasis:
    """Orthonormal basis labels for the ball of a given radius.

    Words are sorted by (length, letters), so the ball of a smaller radius
    is always a prefix.  Distance matrices and single-generator action
    tables are built lazily and cached; they back the vectorised operator
    paths.
    """

    __slots__ = (
        "graph",
        "radius",
        "words",
        "index",
        "lengths",
        "_length_start",
        "_dist_left",
        "_dist_right",
        "_action",
    )

    def __init__(self, graph: CoxeterGraph, radius: int, words: Sequence[NormalWord]):
        self.graph = graph
        self.radius = radius
        self.words = tuple(words)
        self.index = {w: i for i, w in enumerate(self.words)}
        self.lengths = np.array([len(w) for w in self.words], dtype=np.int32)
        starts = [0] * (radius + 2)
        for w in self.words:
            starts[len(w) + 1] += 1
        for r in range(1, radius + 2):
            starts[r] += starts[r - 1]
        self._length_start = tuple(starts)
        self._dist_left: np.ndarray | None = None
        self._dist_right: np.ndarray | None = None
        self._action: tuple[np.ndarray, np.ndarray] | None = None

    def __len__(self) -> int:
        return len(self.words)

    def size_at(self, length: int) -> int:
        if not 0 <= length <= self.radius:
            return 0
        return self._length_start[length + 1] - self._length_start[length]

    def slice_of_length(self, length: int) -> slice:
        if not 0 <= length <= self.radius:
            return slice(0, 0)
        return slice(self._length_start[length], self._length_start[length + 1])

    def prefix(self, radius: int) -> "BallBasis":
        """The sub-ball of a smaller radius (shares word objects)."""
        if radius > self.radius:
            raise ValueError("prefix radius exceeds ball radius")
        return ball(self.graph, radius)

    def dist_left(self) -> np.ndarray:
        """d[i, j] = |w_i^-1 w_j| (the left-invariant word metric)."""
        if self._dist_left is None:
            self._dist_left = self._distances(lambda a, b: mul_word(inverse(a), b))
        return self._dist_left

    def dist_right(self) -> np.ndarray:
        """d[i, j] = |w_i w_j^-1| (kernel distances for Schur multipliers)."""
        if self._dist_right is None:
            self._dist_right = self._distances(lambda a, b: mul_word(a, inverse(b)))
        return self._dist_right

    def _distances(self, prod) -> np.ndarray:
        B = len(self.words)
        out = np.zeros((B, B), dtype=np.int16)
        for i, a in enumerate(self.words):
            row = out[i]
            for j, b in enumerate(self.words):
                if j < i:
                    continue
                d = len(prod(a, b))
                row[j] = d
        iu = np.triu_indices(B, k=1)
        # |a^-1 b| = |b^-1 a| and |a b^-1| = |b a^-1|, so fill symmetrically
        out[(iu[1], iu[0])] = out[iu]
        return out

    def action_tables(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-generator left action on the ball.

        Returns (target, longer): ``target[s, i]`` is the index of
        s * w_i, or -1 when the product leaves the ball; ``longer[s, i]``
        says whether s lengthens w_i.
        """
        if self._action is None:
            B = len(self.words)
            target = np.full((self.graph.n, B), -1, dtype=np.int32)
            longer = np.zeros((self.graph.n, B), dtype=bool)
            for i, w in enumerate(self.words):
                for s in range(self.graph.n):
                    sw, up = left_mul_gen(s, w)
                    longer[s, i] = up
                    j = self.index.get(sw)
                    if j is not None:
                        target[s, i] = j
            self._action = (target, longer)
        return self._action


def ball(graph: CoxeterGraph, radius: int, max_elements: int = BALL_GUARD) -> BallBasis:
    """All group elements of length <= radius, sorted by (length, word).

    Grows length layers by multiplying the previous sphere by every
    generator; raises ResourceGuardExceeded instead of truncating when the
    ball would exceed ``max_elements``.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    cached = graph._balls.get(radius)
    if cached is not None:
        return cached
    words: list[NormalWord] = [graph.identity]
    frontier = [graph.identity]
    for n in range(1, radius + 1):
        nxt = set()
        for w in frontier:
            for s in range(graph.n):
                sw, up = left_mul_gen(s, w)
                if up:
                    nxt.add(sw)
        frontier = sorted(nxt)
        words.extend(frontier)
        if len(words) > max_elements:
            raise ResourceGuardExceeded(
                f"ball({radius}) exceeds {max_elements} elements at length {n}"
            )
    basis = BallBasis(graph, radius, words)
    graph._balls[radius] = basis
    return basis


def reduced_expressions(w: NormalWord, max_size: int = CLASS_GUARD) -> list[tuple[int, ...]]:
    """Every reduced word for w (the commutation class of its normal form)."""
    graph = w.graph
    masks = graph.masks
    seen = {w.letters}
    queue = [w.letters]
    while queue:
        word = queue.pop()
        for i in range(len(word) - 1):
            a, b = word[i], word[i + 1]
            if masks[a] >> b & 1:
                swapped = word[:i] + (b, a) + word[i + 2 :]
                if swapped not in seen:
                    if len(seen) >= max_size:
                        raise ResourceGuardExceeded(
                            f"commutation class of {w.display()} exceeds {max_size}"
                        )
                    seen.add(swapped)
                    queue.append(swapped)
    return sorted(seen)


class GraphAnalysis:
    """Outcome of the induced-square search."""

    __slots__ = ("graph", "hyperbolic", "square")

    def __init__(self, graph: CoxeterGraph, square: tuple[int, int, int, int] | None):
        self.graph = graph
        self.square = square
        self.hyperbolic = square is None

    def square_names(self) -> tuple[str, str, str, str] | None:
        if self.square is None:
            return None
        return tuple(self.graph.names[i] for i in self.square)  # type: ignore[return-value]

    def __repr__(self) -> str:
        tag = "hyperbolic" if self.hyperbolic else f"square={self.square_names()}"
        return f"GraphAnalysis({tag})"


def graph_analysis(graph: CoxeterGraph) -> GraphAnalysis:
    """Word-hyperbolicity test: hyperbolic iff no induced 4-cycle.

    The witness, if any, is returned in cycle order (a, b, c, d) with
    edges ab, bc, cd, da present and diagonals ac, bd absent; the first
    witness in lexicographic scan order is reported, which makes the
    output deterministic.
    """
    masks = graph.masks
    for a in range(graph.n):
        for c in range(a + 1, graph.n):
            if masks[a] >> c & 1:
                continue
            common = [v for v in range(graph.n) if masks[a] >> v & 1 and masks[c] >> v & 1]
            for x in range(len(common)):
                for y in range(x + 1, len(common)):
                    b, d = common[x], common[y]
                    if not masks[b] >> d & 1:
                        return GraphAnalysis(graph, (a, b, c, d))
    return GraphAnalysis(graph, None)


def cliques(graph: CoxeterGraph, size: int | None = None) -> list[tuple[int, ...]]:
    """All cliques of the graph as sorted vertex tuples, empty set included.

    Ordered by (size, vertices); with ``size`` given, only that layer.
    """
    layers: list[list[tuple[int, ...]]] = [[()]]
    current = [(v,) for v in range(graph.n)]
    while current:
        layers.append(current)
        nxt = []
        for c in current:
            last = c[-1]
            for v in range(last + 1, graph.n):
                if all(graph.masks[u] >> v & 1 for u in c):
                    nxt.append(c + (v,))
        current = nxt
    if size is not None:
        if size < 0:
            raise ValueError("clique size must be >= 0")
        return layers[size] if size < len(layers) else []
    return [c for layer in layers for c in layer]


def link(graph: CoxeterGraph, vertices: Sequence[int]) -> tuple[int, ...]:
    """Common neighbourhood; the empty set's link is every vertex."""
    if not vertices:
        return tuple(range(graph.n))
    mask = ~0
    for v in vertices:
        mask &= graph.masks[v]
    return tuple(v for v in range(graph.n) if mask >> v & 1)


def comm_pairs(
    graph: CoxeterGraph, gamma0: Sequence[int]
) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Ordered pairs of disjoint cliques inside the link of gamma0."""
    inside = set(link(graph, tuple(gamma0)))
    candidates = [c for c in cliques(graph) if set(c) <= inside]
    out = []
    for g1 in candidates:
        s1 = set(g1)
        for g2 in candidates:
            if s1.isdisjoint(g2):
                out.append((g1, g2))
    return out


def four_point_delta(
    basis: BallBasis,
    max_quadruples: int = QUADRUPLE_GUARD,
    sample: int | None = None,
    seed: int | None = None,
    workers: int = 1,
) -> float:
    """Worst four-point hyperbolicity defect over quadruples from the ball.

    defect(w1..w4) = d(w1,w2) + d(w3,w4)
                     - max(d(w1,w3) + d(w2,w4), d(w1,w4) + d(w2,w3))
    with d the word metric; the result is max(0, max defect).  Exhaustive
    evaluation is quartic in the ball size and guarded by
    ``max_quadruples``; pass ``sample`` to fall back to seeded random
    quadruples (a lower bound, flagged by the caller's choice, never a
    silent truncation).
    """
    D = basis.dist_left().astype(np.int32)
    B = len(basis)
    if sample is not None:
        if sample <= 0:
            raise ValueError("sample count must be positive")
        rng = np.random.default_rng(seed)
        best = 0
        remaining = sample
        while remaining > 0:
            chunk = min(remaining, 1_000_000)
            idx = rng.integers(0, B, size=(4, chunk))
            i1, i2, i3, i4 = idx
            lhs = D[i1, i2] + D[i3, i4]
            rhs = np.maximum(D[i1, i3] + D[i2, i4], D[i1, i4] + D[i2, i3])
            best = max(best, int((lhs - rhs).max()))
            remaining -= chunk
        return float(max(0, best))
    if B**4 > max_quadruples:
        raise ResourceGuardExceeded(
            f"{B}^4 quadruples exceed the cap {max_quadruples}; "
            "raise max_quadruples or pass sample="
        )

    def scan_rows(rows: range) -> int:
        best = 0
        for i1 in rows:
            lhs = D[i1][:, None, None] + D[None, :, :]
            rhs = np.maximum(
                D[i1][None, :, None] + D[:, None, :],
                D[i1][None, None, :] + D[:, :, None],
            )
            best = max(best, int((lhs - rhs).max()))
        return best

    if workers > 1 and B >= 2 * workers:
        from concurrent.futures import ThreadPoolExecutor

        bounds = np.linspace(0, B, workers + 1, dtype=int)
        chunks = [range(bounds[k], bounds[k + 1]) for k in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            best = max(pool.map(scan_rows, chunks))
    else:
        best = scan_rows(range(B))
    return float(max(0, best))


# graph IO ------------------------------------------------------------------

BUILTIN_GRAPHS = ("dihedral", "square", "pentagon")


def builtin_graph(name: str) -> CoxeterGraph:
    if name == "dihedral":
        return CoxeterGraph(("s", "t"), ())
    if name == "square":
        return CoxeterGraph(("u", "v", "s", "t"), (("u", "s"), ("u", "t"), ("v", "s"), ("v", "t")))
    if name == "pentagon":
        return CoxeterGraph(
            ("a", "b", "c", "d", "e"),
            (("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")),
        )
    raise ValueError(f"unknown builtin graph {name!r}; have {', '.join(BUILTIN_GRAPHS)}")


def graph_from_dict(data: dict) -> CoxeterGraph:
    if not isinstance(data, dict):
        raise ValueError("graph document must be a JSON object")
    try:
        generators = data["generators"]
        pairs = data["commuting_pairs"]
    except KeyError as exc:
        raise ValueError(f"graph document missing key {exc}") from exc
    if not isinstance(generators, list) or not all(isinstance(g, str) for g in generators):
        raise ValueError("generators must be a list of strings")
    if not isinstance(pairs, list):
        raise ValueError("commuting_pairs must be a list of 2-element lists")
    parsed = []
    for pair in pairs:
        if not isinstance(pair, list) or len(pair) != 2:
            raise ValueError(f"bad commuting pair {pair!r}")
        parsed.append((pair[0], pair[1]))
    return CoxeterGraph(generators, parsed)


def load_graph(path: str) -> CoxeterGraph:
    """Load a graph from JSON, or resolve a builtin name."""
    if path in BUILTIN_GRAPHS:
        return builtin_graph(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    except OSError as exc:
        raise ValueError(f"cannot read graph file {path}: {exc}") from exc
    return graph_from_dict(data)


def graph_hash(graph: CoxeterGraph) -> str:
    payload = json.dumps(graph.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def save_ball_cache(basis: BallBasis, path: str) -> None:
    doc = {
        "schema": 1,
        "graph_hash": graph_hash(basis.graph),
        "radius": basis.radius,
        "words": [list(w.letters) for w in basis.words],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, separators=(",", ":"))


def load_ball_cache(graph: CoxeterGraph, radius: int, path: str) -> BallBasis:
    """Rebuild a ball from a cache file, validating hash, radius and order."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema") != 1:
        raise ValueError(f"{path}: unsupported ball cache schema {doc.get('schema')!r}")
    if doc.get("graph_hash") != graph_hash(graph):
        raise ValueError(f"{path}: ball cache was built for a different graph")
    if doc.get("radius") != radius:
        raise ValueError(f"{path}: cache radius {doc.get('radius')} != requested {radius}")
    words = [graph.word(tuple(letters)) for letters in doc["words"]]
    for prev, cur in zip(words, words[1:]):
        if not prev < cur:
            raise ValueError(f"{path}: cache words out of order")
    basis = BallBasis(graph, radius, words)
    graph._balls.setdefault(radius, basis)
    return basis


def sphere(graph: CoxeterGraph, radius: int) -> tuple[NormalWord, ...]:
    """Words of length exactly ``radius``."""
    b = ball(graph, radius)
    return b.words[b.slice_of_length(radius)]

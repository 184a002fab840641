"""Truncated GNS operators on l2 of the group.

An element x acts by left multiplication on the GNS space of the canonical
trace; delta_w corresponds to T_w.  Compressing to the ball of radius N
gives a finite matrix whose column at u is the exact coefficient vector of
x * T_u, so no truncation error enters columns as long as the codomain
radius is at least N + degree(x).  Smaller codomain radii are allowed and
simply drop rows (an exact row compression, useful when the full codomain
ball would be enormous).

Operator norms are largest singular values, computed from a symmetric
eigensolve of the Gram matrix on the smaller side; this is deterministic
for a fixed platform and accurate to far better than the documented 1e-9.
"""

from __future__ import annotations

import math
from typing import IO, Sequence

import numpy as np

from .coxeter import BallBasis, CoxeterGraph, NormalWord, ball
from .hecke import HeckeElement, multiply

NORM_RTOL = 1e-9


class WordSelection:
    """An ordered subfamily of basis words, used for block rows/columns."""

    __slots__ = ("graph", "words", "index", "lengths")

    def __init__(self, graph: CoxeterGraph, words: Sequence[NormalWord]):
        self.graph = graph
        self.words = tuple(words)
        self.index = {w: i for i, w in enumerate(self.words)}
        self.lengths = np.array([len(w) for w in self.words], dtype=np.int32)

    def __len__(self) -> int:
        return len(self.words)


Side = BallBasis | WordSelection


class TruncatedOperator:
    """A dense matrix block of an operator, with labelled sides.

    ``entries[i, j]`` is the coefficient of ``codomain.words[i]`` in the
    image of ``domain.words[j]``, i.e. <x delta_u, delta_v> at
    v = codomain word i, u = domain word j.
    """

    __slots__ = ("domain", "codomain", "entries")

    def __init__(self, domain: Side, codomain: Side, entries: np.ndarray):
        entries = np.asarray(entries, dtype=complex)
        if entries.shape != (len(codomain.words), len(domain.words)):
            raise ValueError(
                f"entries shape {entries.shape} does not match bases "
                f"({len(codomain.words)}, {len(domain.words)})"
            )
        if entries.size and not np.isfinite(entries).all():
            raise ValueError("operator entries must be finite")
        self.domain = domain
        self.codomain = codomain
        self.entries = entries

    def entry(self, v: NormalWord, u: NormalWord) -> complex:
        i = self.codomain.index.get(v)
        j = self.domain.index.get(u)
        if i is None or j is None:
            raise KeyError("word outside the operator's bases")
        return complex(self.entries[i, j])

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape  # type: ignore[return-value]

    def __repr__(self) -> str:
        return f"TruncatedOperator(shape={self.shape})"


def apply_to_basis(x: HeckeElement, u: NormalWord) -> dict[NormalWord, complex]:
    """Coefficient map of x * T_u (the GNS image of delta_u)."""
    return multiply(x, HeckeElement.basis(x.q, u)).coeffs


def matrix_of(x: HeckeElement, radius: int, codomain_radius: int | None = None) -> TruncatedOperator:
    """The GNS action of x on ball(radius).

    The default codomain radius ``radius + degree(x)`` keeps every column
    exact.  An explicit smaller codomain drops rows only; rows that are
    kept stay exact.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if codomain_radius is None:
        codomain_radius = radius + x.degree
    graph = x.graph
    dom = ball(graph, radius)
    cod = ball(graph, codomain_radius)
    entries = np.zeros((len(cod), len(dom)), dtype=complex)
    for j, u in enumerate(dom.words):
        for w, c in apply_to_basis(x, u).items():
            i = cod.index.get(w)
            if i is not None:
                entries[i, j] = complex(c)
    return TruncatedOperator(dom, cod, entries)


def compress_block(op: TruncatedOperator, i: int, j: int) -> TruncatedOperator:
    """P_i op P_j: rows of codomain length i, columns of domain length j.

    Requires ball-shaped sides (blocks of blocks are not needed anywhere).
    Out-of-range lengths give an empty side and a norm-0 block.
    """
    if not isinstance(op.domain, BallBasis) or not isinstance(op.codomain, BallBasis):
        raise ValueError("compress_block needs ball-shaped operator sides")
    if i < 0 or j < 0:
        raise ValueError("block lengths must be >= 0")
    rows = op.codomain.slice_of_length(i)
    cols = op.domain.slice_of_length(j)
    return TruncatedOperator(
        WordSelection(op.domain.graph, op.domain.words[cols]),
        WordSelection(op.codomain.graph, op.codomain.words[rows]),
        op.entries[rows, cols],
    )


def operator_norm(op: TruncatedOperator | np.ndarray) -> float:
    """Largest singular value via eigvalsh of the smaller Gram matrix."""
    A = op.entries if isinstance(op, TruncatedOperator) else np.asarray(op, dtype=complex)
    if A.size == 0:
        return 0.0
    m, n = A.shape
    G = A @ A.conj().T if m <= n else A.conj().T @ A
    top = np.linalg.eigvalsh(G)[-1]
    return math.sqrt(max(float(top.real), 0.0))


def dirac_commutator_matrix(
    x: HeckeElement, radius: int, codomain_radius: int | None = None
) -> TruncatedOperator:
    """[D, x] on the ball, D the word-length Dirac operator.

    Entrywise this is (|v| - |u|) <x delta_u, delta_v>, a band matrix that
    vanishes beyond band width degree(x).
    """
    m = matrix_of(x, radius, codomain_radius)
    gaps = m.codomain.lengths[:, None] - m.domain.lengths[None, :]
    return TruncatedOperator(m.domain, m.codomain, m.entries * gaps)


def commutator_l2(x: HeckeElement) -> float:
    """||[D, x] delta_e||_2 = sqrt(sum |w|^2 |x(w)|^2), exact in the coefficients."""
    return math.sqrt(sum((len(w) ** 2) * abs(c) ** 2 for w, c in x.coeffs.items()))


def lip_lower_bound(x: HeckeElement, radius: int) -> float:
    """Norm of the ball-compressed Dirac commutator.

    A certified lower bound for the Lipschitz seminorm ||[D, x]||, and
    monotone nondecreasing in the radius (larger balls contain smaller
    compressions as corners).  Never an upper bound; label it accordingly.
    """
    return operator_norm(dirac_commutator_matrix(x, radius, codomain_radius=radius))


def embed_codomain(op: TruncatedOperator, codomain: Side) -> TruncatedOperator:
    """Re-express op with a larger codomain by placing rows at word indices."""
    entries = np.zeros((len(codomain.words), len(op.domain.words)), dtype=complex)
    for i, w in enumerate(op.codomain.words):
        k = codomain.index.get(w)
        if k is None:
            if np.any(op.entries[i]):
                raise ValueError(f"codomain does not contain {w.display()}")
            continue
        entries[k] = op.entries[i]
    return TruncatedOperator(op.domain, codomain, entries)


def format_number(z: complex) -> str:
    """12 significant digits; imaginary part only when present."""
    if isinstance(z, complex):
        if z.imag == 0:
            return f"{z.real:.12g}"
        return f"{z.real:.12g}{z.imag:+.12g}j"
    return f"{z:.12g}"


def to_csv(op: TruncatedOperator, fh: IO[str]) -> None:
    """Dump a block as CSV with basis words on the header row and column."""
    header = ["word"] + [w.display() for w in op.domain.words]
    fh.write(",".join(header) + "\n")
    for i, v in enumerate(op.codomain.words):
        cells = [v.display()] + [format_number(z) for z in op.entries[i]]
        fh.write(",".join(cells) + "\n")

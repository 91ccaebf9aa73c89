"""Symmetric-group combinatorics on word spaces.

Words of length ``n`` over the alphabet ``{1..N}`` index the tensor basis of
the level-``n`` slice of the Fock space.  A permutation ``p`` acts on a word
by position shuffle, ``w -> (w[p(1)], ..., w[p(n)])``, and the inversion-number
generating sum ``sum_{p in S_n} q^inv(p) * action(p)`` is the fundamental
object here: it is simultaneously the level-``n`` Gram matrix of the deformed
inner product and the projection-defining element of the group algebra.

Indexing convention: a word ``(w_1, ..., w_n)`` has integer index
``sum_t (w_t - 1) * N**(t-1)`` (first letter = least significant digit), fixed
globally so matrix layouts are reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, MAX_PERM_LENGTH, check_dim

__all__ = [
    "Permutation",
    "WordMatrix",
    "inversions",
    "cycle_perm",
    "perm_action",
    "pq_direct",
    "mn_matrix",
    "pq_recursive",
    "mn_inverse",
    "mn_inverse_readings",
]


@dataclass(frozen=True)
class Permutation:
    """A permutation of ``{1..n}`` in one-line notation (images[i-1] = p(i))."""

    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if sorted(self.images) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {self.images}")

    def __len__(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def inverse(self) -> "Permutation":
        out = [0] * len(self.images)
        for i, v in enumerate(self.images):
            out[v - 1] = i + 1
        return Permutation(tuple(out))

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(1, n + 1)))


@dataclass(frozen=True)
class WordMatrix:
    """Dense square matrix over the length-``n`` word basis (dimension N**n)."""

    n: int
    N: int
    entries: np.ndarray

    def __post_init__(self):
        d = self.N**self.n
        if self.entries.shape != (d, d):
            raise ValueError(
                f"entries shape {self.entries.shape} does not match N^n = {d}"
            )


def inversions(p: Permutation) -> int:
    """Number of pairs i < j with p(i) > p(j)."""
    im = p.images
    n = len(im)
    return sum(1 for i in range(n) for j in range(i + 1, n) if im[i] > im[j])


def cycle_perm(k: int, l: int, n: int) -> Permutation:
    """The cycle (k -> l): sends k+i to k+i+1 for 0 <= i <= l-k-1 and l to k.

    Identity outside [k, l]; (k -> k) is the identity.
    """
    if not (1 <= k <= l <= n):
        raise ValueError(f"need 1 <= k <= l <= n, got k={k}, l={l}, n={n}")
    images = list(range(1, n + 1))
    for i in range(l - k):
        images[k + i - 1] = k + i + 1
    if l > k:
        images[l - 1] = k
    return Permutation(tuple(images))


def _letters(n: int, N: int) -> np.ndarray:
    """(N**n, n) array; row i holds the 0-based letters of the word with index i."""
    idx = np.arange(N**n)
    return np.stack([(idx // N**t) % N for t in range(n)], axis=1)


def perm_action(p: Permutation, ctx) -> WordMatrix:
    """0/1 matrix of the position shuffle w -> (w[p(1)], ..., w[p(n)]).

    Note the action is contravariant: the matrix of ``p`` followed by ``s``
    composes as ``action(s @ p)`` with arguments swapped, which is why sums
    over the whole group (with inversion-invariant weights) are insensitive
    to the convention but products of individual elements are not.
    """
    n = len(p)
    N = ctx.N
    if n > ctx.L:
        raise ValueError(f"permutation length {n} exceeds truncation level {ctx.L}")
    d = N**n
    check_dim(d, f"word matrix at level {n}")
    letters = _letters(n, N)
    powers = N ** np.arange(n)
    tgt = letters[:, [p(t + 1) - 1 for t in range(n)]] @ powers
    M = np.zeros((d, d))
    M[tgt, np.arange(d)] = 1.0
    return WordMatrix(n, N, M)


def pq_direct(n: int, ctx) -> WordMatrix:
    """Sum over all of S_n of q^inversions(p) times the word action of p."""
    N, q = ctx.N, ctx.q
    d = N**n
    check_dim(d, f"word matrix at level {n}")
    if n > MAX_PERM_LENGTH:
        raise CapacityError(
            f"direct S_n sum needs n! = {math.factorial(n)} terms; "
            f"n = {n} exceeds the cap {MAX_PERM_LENGTH}"
        )
    letters = _letters(n, N)
    powers = N ** np.arange(n)
    M = np.zeros((d, d))
    src = np.arange(d)
    import itertools

    for images in itertools.permutations(range(1, n + 1)):
        inv = sum(
            1
            for i in range(n)
            for j in range(i + 1, n)
            if images[i] > images[j]
        )
        tgt = letters[:, [images[t] - 1 for t in range(n)]] @ powers
        M[tgt, src] += q**inv
    return WordMatrix(n, N, M)


def mn_matrix(n: int, ctx) -> WordMatrix:
    """sum_{k=1..n} q^(k-1) * action of the cycle (1 -> k)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    N, q = ctx.N, ctx.q
    d = N**n
    M = np.zeros((d, d))
    for k in range(1, n + 1):
        M += q ** (k - 1) * perm_action(cycle_perm(1, k, n), ctx).entries
    return WordMatrix(n, N, M)


def _embed_tail(prev: np.ndarray, N: int) -> np.ndarray:
    # permutations acting on positions 2..n leave the least significant digit
    # (position 1) alone, so the embedded matrix is kron(prev, I_N)
    return np.kron(prev, np.eye(N))


def pq_recursive(n: int, ctx) -> WordMatrix:
    """The inversion-weighted S_n sum built level by level.

    Group-algebra identity: the S_n sum factors as (embedded S_{n-1} sum,
    acting on positions 2..n) times mn_matrix(n).  Because the word action is
    contravariant, the two factors multiply in swapped order at matrix level.
    """
    N = ctx.N
    check_dim(N**n, f"word matrix at level {n}")
    P = np.ones((1, 1))
    for m in range(1, n + 1):
        P = mn_matrix(m, ctx).entries @ _embed_tail(P, N)
    return WordMatrix(n, N, P)


def _cycle_factor(coef: float, k: int, l: int, n: int, ctx) -> np.ndarray:
    return np.eye(ctx.N**n) - coef * perm_action(cycle_perm(k, l, n), ctx).entries


def _mn_inverse_factorwise(n: int, ctx) -> np.ndarray:
    """Product formula for mn_matrix(n)**-1, factor-wise inverses.

    In the group algebra the inverse is
    ``[prod_{j=n-1..1} (1 - q^j (1->j+1))] * [prod_{j=n-2..0} (1 - q^{n-j} (2->n-j))^{-1}]``
    with the inverse applied to each factor of the second product.  The matrix
    version below runs both products in ascending j and in swapped order,
    again because the word action is contravariant.
    """
    q = ctx.q
    d = ctx.N**n
    left = np.eye(d)
    for j in range(0, n - 1):
        left = left @ np.linalg.inv(_cycle_factor(q ** (n - j), 2, n - j, n, ctx))
    right = np.eye(d)
    for j in range(1, n):
        right = right @ _cycle_factor(q**j, 1, j + 1, n, ctx)
    return left @ right


def mn_inverse(n: int, ctx) -> WordMatrix:
    """Inverse of mn_matrix(n), via the validated product formula.

    The product formula is used as an accelerator and its output is always
    residual-checked against ``mn_matrix(n) @ result = I``; on residual above
    1e-8 the direct linear solve is returned instead.
    """
    if not (-1.0 < ctx.q < 1.0):
        raise ValueError(f"|q| must be < 1, got q = {ctx.q}")
    N = ctx.N
    d = N**n
    check_dim(d, f"word matrix at level {n}")
    Mn = mn_matrix(n, ctx).entries
    inv = _mn_inverse_factorwise(n, ctx)
    residual = np.abs(Mn @ inv - np.eye(d)).max()
    if residual > 1e-8:
        import warnings

        warnings.warn(
            f"product-formula inverse left residual {residual:.3e} at n={n}, "
            f"q={ctx.q}; falling back to direct inversion"
        )
        inv = np.linalg.solve(Mn, np.eye(d))
    return WordMatrix(n, N, inv)


def mn_inverse_readings(n: int, ctx) -> dict[str, float]:
    """Residuals of the candidate parenthesizations of the inverse formula.

    The printed formula has unbalanced parentheses; two readings make sense:
    ``factorwise`` inverts each factor of the second product, ``wholeprod``
    inverts the second product as a single matrix.  Returns
    ``max |mn_matrix @ candidate - I|`` for each.
    """
    q = ctx.q
    d = ctx.N**n
    Mn = mn_matrix(n, ctx).entries
    eye = np.eye(d)

    factorwise = _mn_inverse_factorwise(n, ctx)

    whole = np.eye(d)
    for j in range(0, n - 1):
        whole = whole @ _cycle_factor(q ** (n - j), 2, n - j, n, ctx)
    right = np.eye(d)
    for j in range(1, n):
        right = right @ _cycle_factor(q**j, 1, j + 1, n, ctx)
    wholeprod = np.linalg.inv(whole) @ right

    return {
        "factorwise": float(np.abs(Mn @ factorwise - eye).max()),
        "wholeprod": float(np.abs(Mn @ wholeprod - eye).max()),
    }

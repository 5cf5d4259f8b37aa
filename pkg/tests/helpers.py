import itertools
import random
from fractions import Fraction
from math import isqrt

from hypothesis import strategies as st

from niemeier import linalg
from niemeier.lattice import IntegerLattice, from_gram


def random_gram(rng: random.Random, n: int, spread: int = 4) -> list[list[int]]:
    """Random positive definite integer Gram matrix with entries in [-spread, spread].

    Rows are added one at a time; the new diagonal entry is drawn above the
    Schur-complement bound v·G⁻¹·vᵀ so every leading minor stays positive.
    """
    g: list[list[int]] = []
    while len(g) < n:
        k = len(g)
        v = [rng.randint(-spread, spread) for _ in range(k)]
        q = linalg.dot(linalg.vecmat(v, linalg.inverse(g)), v) if k else Fraction(0)
        low = int(q) + 1
        if low > spread:
            continue
        d = rng.randint(max(low, 1), spread)
        for row, x in zip(g, v):
            row.append(x)
        g.append(v + [d])
    return g


def random_unimodular(rng: random.Random, n: int, steps: int = 20) -> list[list[int]]:
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            u[0] = [-x for x in u[0]]
            continue
        s = rng.choice((-1, 1))
        u[i] = [a + s * b for a, b in zip(u[i], u[j])]
    return u


def scramble(L: IntegerLattice, seed: int = 0, steps: int = 20) -> tuple[IntegerLattice, list[list[int]]]:
    """Same lattice with basis U·B for a recorded random unimodular U."""
    u = random_unimodular(random.Random(seed), L.rank, steps)
    return IntegerLattice.from_basis(linalg.matmul(u, [list(r) for r in L.basis]), L.name), u


@st.composite
def gram_matrices(draw, max_rank: int = 5, spread: int = 4):
    n = draw(st.integers(1, max_rank))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_gram(random.Random(seed), n, spread)


@st.composite
def small_lattices(draw, max_rank: int = 5, spread: int = 4):
    return from_gram(draw(gram_matrices(max_rank, spread)))


def brute_force(gram, bound):
    """All ± representatives of norm ≤ bound inside the box |x_i| ≤ sqrt(bound·(G⁻¹)_ii)."""
    n = len(gram)
    inv = linalg.inverse(gram)
    radii = []
    for i in range(n):
        r2 = bound * inv[i][i]
        r = isqrt(r2.numerator // r2.denominator)
        while (r + 1) ** 2 <= r2:
            r += 1
        radii.append(r)
    out = set()
    for x in itertools.product(*[range(-r, r + 1) for r in radii]):
        if not any(x):
            continue
        m = linalg.dot(linalg.vecmat(x, gram), x)
        if m <= bound:
            lead = next(c for c in x if c)
            out.add((tuple(x) if lead > 0 else tuple(-c for c in x), m))
    return out


# criterion number -> (passed, detail), filled by the acceptance suite
ACCEPTANCE: dict[int, tuple[bool, str]] = {}

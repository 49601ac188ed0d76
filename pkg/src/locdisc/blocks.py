"""Block-diagonal form of permutation- and PT-invariant operators on N qubits.

Spins are stored doubled (``two_j``, ``two_m``) so half-integers stay exact.
Inside a spin-j block rows and columns run over ``m = j, j-1, ..., -j``;
qubit ``|0>`` is ``m = +1/2``.

A PT-invariant symmetric operator is fixed by the numbers ``E[q, r]``
(``0 <= r <= q <= N``): the matrix element between bit strings ``x`` (row) and
``y`` (column) equals ``E[q, r]`` with ``r = |x & y|`` and ``q = |x | y|``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, ResourceError
from .qubit import StatePair

DENSE_MAX_N = 12
SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class SpinLabel:
    two_j: int
    two_m: int

    def __post_init__(self):
        if self.two_j < 0:
            raise DomainError(f"two_j={self.two_j} must be >= 0")
        if abs(self.two_m) > self.two_j or (self.two_j - self.two_m) % 2:
            raise DomainError(f"two_m={self.two_m} incompatible with two_j={self.two_j}")

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def m(self) -> float:
        return self.two_m / 2


def spins(n: int) -> list[int]:
    """Doubled total spins present in N spin-1/2s, largest first."""
    return list(range(n, -1, -2))


def m_values(two_j: int) -> list[int]:
    """Doubled magnetic numbers in block order (descending)."""
    return list(range(two_j, -two_j - 1, -2))


def _check_spin(n: int, two_j: int) -> None:
    if n < 1:
        raise DomainError(f"N={n} must be >= 1")
    if two_j < 0 or two_j > n or (n - two_j) % 2:
        raise DomainError(f"j={two_j}/2 not a total spin of N={n} qubits")


# ---------------------------------------------------------------- parameters

def n_params(n: int) -> int:
    return (n + 1) * (n + 2) // 2


def param_index(q: int, r: int) -> int:
    return q * (q + 1) // 2 + r


@dataclass(frozen=True)
class ParamVector:
    n_copies: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (n_params(self.n_copies),):
            raise DomainError(
                f"expected {n_params(self.n_copies)} parameters for N={self.n_copies}, "
                f"got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("parameter values must be finite")
        object.__setattr__(self, "values", values)

    def __getitem__(self, qr: tuple[int, int]) -> float:
        q, r = qr
        if not 0 <= r <= q <= self.n_copies:
            raise IndexError(qr)
        return float(self.values[param_index(q, r)])

    @classmethod
    def from_function(cls, n: int, fn) -> "ParamVector":
        values = np.zeros(n_params(n))
        for q in range(n + 1):
            for r in range(q + 1):
                values[param_index(q, r)] = fn(q, r)
        return cls(n, values)

    @classmethod
    def identity(cls, n: int, scale: float = 1.0) -> "ParamVector":
        return cls.from_function(n, lambda q, r: scale if q == r else 0.0)


# ------------------------------------------------------------- coefficients

def delta_coeff(two_j: int, two_m: int, two_mp: int, k: int) -> float:
    """Wigner-type coefficient [Delta^(j)_k]^{m'}_m; zero outside the factorial range."""
    jm = (two_j - two_m) // 2          # j - m
    jpm = (two_j + two_m) // 2         # j + m
    jmp = (two_j - two_mp) // 2        # j - m'
    jpmp = (two_j + two_mp) // 2       # j + m'
    dm = (two_m - two_mp) // 2         # m - m'
    args = (jm - k, jpmp - k, dm + k, k)
    if min(args) < 0 or min(jm, jpm, jmp, jpmp) < 0:
        return 0.0
    num = (math.factorial(jm) * math.factorial(jpm)
           * math.factorial(jmp) * math.factorial(jpmp))
    den = 1
    for a in args:
        den *= math.factorial(a)
    return math.sqrt(Fraction(num, den * den))


def _k_range(two_j: int, two_m: int, two_mp: int) -> range:
    jm = (two_j - two_m) // 2
    jpmp = (two_j + two_mp) // 2
    dm = (two_m - two_mp) // 2
    return range(max(0, -dm), min(jm, jpmp) + 1)


def degeneracy(n: int, two_j: int) -> int:
    """Multiplicity n_j of spin j among N spin-1/2s (exact integer)."""
    n, two_j = int(n), int(two_j)
    _check_spin(n, two_j)
    num = math.comb(n, (n - two_j) // 2) * (two_j + 1)
    den = (n + two_j) // 2 + 1
    q, rem = divmod(num, den)
    assert rem == 0
    return q


@lru_cache(maxsize=None)
def _mmap_cached(n: int, two_j: int) -> np.ndarray:
    d = two_j + 1
    half_gap = (n - two_j) // 2        # N/2 - j
    out = np.zeros((d, d, n_params(n)))
    ms = m_values(two_j)
    for i, two_m in enumerate(ms):
        for ip, two_mp in enumerate(ms):
            for k in _k_range(two_j, two_m, two_mp):
                dk = delta_coeff(two_j, two_m, two_mp, k)
                for l in range(half_gap + 1):
                    r = (n - two_m) // 2 - k - l
                    q = (n - two_mp) // 2 + k + l
                    out[i, ip, param_index(q, r)] += dk * math.comb(half_gap, l) * (-1) ** l
    out.setflags(write=False)
    return out


def mmap(n: int, two_j: int) -> np.ndarray:
    """Linear map from parameters to the spin-j block.

    Returns ``M`` with shape ``(2j+1, 2j+1, n_params(N))`` such that
    ``E^(j)[a, b] = M[a, b] @ params``. The array is cached and read-only.
    """
    _check_spin(n, two_j)
    return _mmap_cached(int(n), int(two_j))


def assemble_block(params: ParamVector, two_j: int) -> np.ndarray:
    block = mmap(params.n_copies, two_j) @ params.values
    asym = np.max(np.abs(block - block.T)) if block.size else 0.0
    assert asym <= SYMMETRY_TOL * max(1.0, np.max(np.abs(block))), asym
    return (block + block.T) / 2


def assemble_blocks(params: ParamVector) -> dict[int, np.ndarray]:
    return {tj: assemble_block(params, tj) for tj in spins(params.n_copies)}


@lru_cache(maxsize=None)
def _delta_table(two_j: int):
    """Nonzero Delta terms of spin j as flat arrays (row, col, k, m-m', value)."""
    rows, cols, ks, dms, vals = [], [], [], [], []
    ms = m_values(two_j)
    for i, two_m in enumerate(ms):
        for ip, two_mp in enumerate(ms):
            for k in _k_range(two_j, two_m, two_mp):
                rows.append(i)
                cols.append(ip)
                ks.append(k)
                dms.append((two_m - two_mp) // 2)
                vals.append(delta_coeff(two_j, two_m, two_mp, k))
    table = tuple(np.array(a, dtype=int) for a in (rows, cols, ks, dms))
    return table + (np.array(vals, dtype=float),)


def _product_block(two_j: int, a: float, b: float, c: float, sign: float) -> np.ndarray:
    """sum_k Delta_k * sign^(m-m'+k) * a^(m-m'+2k) * b^(j+m'-k) * c^(j-m-k)."""
    rows, cols, ks, dms, vals = _delta_table(two_j)
    ms = np.array(m_values(two_j))
    jm = (two_j - ms[rows]) // 2 - ks
    jpmp = (two_j + ms[cols]) // 2 - ks
    terms = (vals * sign ** (dms + ks) * float(a) ** (dms + 2 * ks)
             * float(b) ** jpmp * float(c) ** jm)
    out = np.zeros((two_j + 1, two_j + 1))
    np.add.at(out, (rows, cols), terms)
    return out


def sigma_block(pair: StatePair, which: int, n: int, two_j: int) -> np.ndarray:
    """Spin-j block of rho_a^{(x)N} (identical for each of the n_j copies)."""
    n, two_j = int(n), int(two_j)
    _check_spin(n, two_j)
    r = pair.purity(which)
    sn = (-1) ** which * r * math.sin(pair.theta / 2)
    up = 1 + r * math.cos(pair.theta / 2)
    dn = 1 - r * math.cos(pair.theta / 2)
    pref = (1 - r * r) ** ((n - two_j) // 2) / 2.0 ** n
    if pref == 0.0:
        return np.zeros((two_j + 1, two_j + 1))
    out = pref * _product_block(two_j, sn, up, dn, 1.0)
    return (out + out.T) / 2


@dataclass(frozen=True)
class BlockOperator:
    n_copies: int
    blocks: dict[int, np.ndarray] = field(repr=False)
    degeneracies: dict[int, int] = field(repr=False)

    def trace(self) -> float:
        return float(sum(self.degeneracies[tj] * np.trace(b) for tj, b in self.blocks.items()))


def sigma_blocks(pair: StatePair, which: int, n: int) -> BlockOperator:
    tjs = spins(n)
    return BlockOperator(
        n,
        {tj: sigma_block(pair, which, n, tj) for tj in tjs},
        {tj: degeneracy(n, tj) for tj in tjs},
    )


def wigner_d(two_j: int, beta: float) -> np.ndarray:
    """Wigner small-d matrix d^(j)(beta), rows m and columns m' descending."""
    c, s = math.cos(beta / 2), math.sin(beta / 2)
    return _product_block(int(two_j), s, c, c, -1.0)


# ------------------------------------------------------------ dense oracles

def cg_coeff(n: int, two_j: int, two_m: int, bits) -> float:
    """<bits | j, m> in the coupled basis |psi->^{(N/2-j)} (x) |j, m>_sym.

    ``bits`` is the computational-basis string (sequence of 0/1, length N).
    The first N-2j qubits must form singlet-compatible pairs ``01`` (sigma) or
    ``10`` (mu); the coefficient is zero otherwise or if the magnetic numbers
    do not add up to m.
    """
    _check_spin(n, two_j)
    bits = tuple(int(b) for b in bits)
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise DomainError(f"config {bits!r} is not a bit string of length {n}")
    if abs(two_m) > two_j or (two_j - two_m) % 2:
        raise DomainError(f"m={two_m}/2 incompatible with j={two_j}/2")
    n_pairs = (n - two_j) // 2
    p = 0
    for a, b in zip(bits[0:2 * n_pairs:2], bits[1:2 * n_pairs:2]):
        if a == b:
            return 0.0
        p += a          # '10' is a mu pair
    sym = bits[2 * n_pairs:]
    # each 0 contributes +1/2, each 1 contributes -1/2
    if len(sym) - 2 * sum(sym) != two_m:
        return 0.0
    return (-1) ** p * 2.0 ** (-n_pairs / 2) / math.sqrt(math.comb(two_j, (two_j + two_m) // 2))


def _bit_strings(n: int) -> np.ndarray:
    idx = np.arange(2 ** n)
    # most significant bit is qubit 1
    return (idx[:, None] >> np.arange(n - 1, -1, -1)) & 1


def coupled_vectors(n: int, two_j: int) -> np.ndarray:
    """Columns |j, m>, m descending, for one representative copy of spin j."""
    if n > DENSE_MAX_N:
        raise ResourceError(f"dense path limited to N <= {DENSE_MAX_N}")
    strings = _bit_strings(n)
    cols = []
    for two_m in m_values(two_j):
        cols.append([cg_coeff(n, two_j, two_m, s) for s in strings])
    return np.array(cols).T


def reconstruct_dense(params: ParamVector) -> np.ndarray:
    """The 2^N x 2^N operator whose independent components are ``params``."""
    n = params.n_copies
    if n > DENSE_MAX_N:
        raise ResourceError(f"dense reconstruction limited to N <= {DENSE_MAX_N}")
    idx = np.arange(2 ** n)
    pop = np.array([bin(i).count("1") for i in idx])
    r = pop[idx[:, None] & idx[None, :]]
    q = pop[idx[:, None] | idx[None, :]]
    return params.values[q * (q + 1) // 2 + r]


def sigma_dense(pair: StatePair, which: int, n: int) -> np.ndarray:
    if n > DENSE_MAX_N:
        raise ResourceError(f"dense product state limited to N <= {DENSE_MAX_N}")
    out = np.ones((1, 1))
    for _ in range(n):
        out = np.kron(out, pair.rho(which))
    return out


def project_block(dense: np.ndarray, n: int, two_j: int) -> np.ndarray:
    """<j, m| X |j, m'> using the explicit coupled basis."""
    v = coupled_vectors(n, two_j)
    return v.T @ dense @ v


def partial_transpose(dense: np.ndarray, n: int, subset) -> np.ndarray:
    """Transpose the qubits in ``subset`` (0-based, qubit 0 most significant)."""
    t = dense.reshape((2,) * (2 * n))
    axes = list(range(2 * n))
    for q in subset:
        axes[q], axes[n + q] = axes[n + q], axes[q]
    return t.transpose(axes).reshape(2 ** n, 2 ** n)


def random_params(n: int, rng: np.random.Generator) -> ParamVector:
    return ParamVector(n, rng.standard_normal(n_params(n)))


def permutation_orbits_check(dense: np.ndarray, n: int) -> bool:
    """True if ``dense`` is invariant under every qubit permutation."""
    t = dense.reshape((2,) * (2 * n))
    for perm in itertools.permutations(range(n)):
        axes = list(perm) + [n + p for p in perm]
        if not np.array_equal(t.transpose(axes), t):
            return False
    return True

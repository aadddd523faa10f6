"""Complex dense linear algebra, the unitary DFT operator, and seeded sampling.

Everything downstream (media generation, coincidence chains, the phase
optimizer) is built on the handful of primitives in this module.  All arrays
are complex128; matrices returned by the cached constructors are marked
read-only so they can be shared freely across threads.
"""

from __future__ import annotations

import functools

import numpy as np

__all__ = [
    "DimensionError",
    "PowerIterationError",
    "RngStream",
    "dft",
    "matmul",
    "largest_singular_value_sq",
    "sample_standard_complex_gaussian",
]

# Seed of the fixed start vector used by the power iteration.  Any value works;
# it is pinned so repeated calls (and reruns) are bit-identical.
_POWER_START_SEED = 271828182845


class DimensionError(ValueError):
    """Matrix dimensions do not conform."""


class PowerIterationError(RuntimeError):
    """Power iteration failed to converge within the iteration cap."""

    def __init__(self, message: str, last_estimate: float, iterations: int):
        super().__init__(message)
        self.last_estimate = last_estimate
        self.iterations = iterations


class RngStream:
    """Deterministic random substream identified by (master_seed, stream_id).

    Two streams created with the same identity produce the same draw sequence
    regardless of platform, thread count, or what other streams drew in the
    meantime.  A stream is single-owner: parallel work must allocate disjoint
    stream ids (or `substream` children), never share one.
    """

    def __init__(self, master_seed: int, stream_id: int = 0, _key: tuple[int, ...] | None = None):
        self.master_seed = int(master_seed)
        self.key = (int(stream_id),) if _key is None else _key
        self._gen = np.random.default_rng(
            np.random.SeedSequence(self.master_seed, spawn_key=self.key)
        )

    @property
    def stream_id(self) -> int:
        return self.key[0]

    def substream(self, index: int) -> "RngStream":
        """Child stream with an independent, reproducible draw sequence."""
        return RngStream(self.master_seed, _key=self.key + (int(index),))

    def uniform(self, size=None) -> np.ndarray:
        """Uniform draws on [0, 1)."""
        return self._gen.random(size)

    def uniform_phases(self, count: int) -> np.ndarray:
        """Uniform phases on [0, 2*pi)."""
        return 2.0 * np.pi * self._gen.random(count)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"RngStream(master_seed={self.master_seed}, key={self.key})"


def sample_standard_complex_gaussian(rng: RngStream, count: int) -> np.ndarray:
    """Circular complex Gaussian draws with E[|z|^2] = 1.

    Box-Muller on the uniform stream: modulus sqrt(-log(1-u1)), phase 2*pi*u2,
    so real and imaginary parts are independent N(0, 1/2).
    """
    u = rng.uniform((2, count))
    radius = np.sqrt(-np.log1p(-u[0]))
    return radius * np.exp(2j * np.pi * u[1])


@functools.lru_cache(maxsize=16)
def dft(n: int) -> np.ndarray:
    """Unitary symmetric DFT matrix f_jk = exp(-2i*pi*j*k/n) / sqrt(n).

    The square of this matrix is the index-flip permutation delta_{j,(-k) mod n}
    and its fourth power is the identity.  The returned array is cached and
    read-only.
    """
    if n < 1:
        raise DimensionError(f"DFT size must be >= 1, got {n}")
    j = np.arange(n)
    # Reduce j*k mod n before the complex exponential: keeps the arguments
    # small so f is exactly symmetric and |f_jk| uniform to the last ulp.
    jk = np.outer(j, j) % n
    f = np.exp(-2j * np.pi * jk / n) / np.sqrt(n)
    f.setflags(write=False)
    return f


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Checked complex matrix product.

    Dimension mismatches raise instead of broadcasting, and non-finite entries
    in the result raise immediately rather than propagating silently.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionError(f"matmul expects 2-d operands, got {a.ndim}-d and {b.ndim}-d")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"inner dimensions do not conform: {a.shape} @ {b.shape}")
    out = a @ b
    if not np.all(np.isfinite(out.view(np.float64) if np.iscomplexobj(out) else out)):
        raise FloatingPointError("matmul produced non-finite entries")
    return out


def largest_singular_value_sq(
    m: np.ndarray, tol: float = 1e-10, max_iterations: int = 10_000
) -> float:
    """Squared largest singular value of a square complex matrix.

    Power iteration on m^H m (two matvecs per step, m^H m is never formed),
    stopping when the Rayleigh quotient's relative change is <= tol.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = m.shape[0]
    mh = m.conj().T
    v = sample_standard_complex_gaussian(RngStream(_POWER_START_SEED), n)
    v /= np.linalg.norm(v)
    estimate = np.inf
    for iteration in range(max_iterations):
        w = mh @ (m @ v)
        new_estimate = float(np.real(np.vdot(v, w)))
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        if abs(new_estimate - estimate) <= tol * max(abs(new_estimate), np.finfo(float).tiny):
            return new_estimate
        estimate = new_estimate
    raise PowerIterationError(
        f"power iteration did not converge in {max_iterations} iterations "
        f"(last estimate {estimate!r})",
        last_estimate=estimate,
        iterations=max_iterations,
    )

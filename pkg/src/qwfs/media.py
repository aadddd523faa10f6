"""Transmission-matrix models of the scattering medium.

Three models are supported:

* ``"unitary"`` -- Haar-random unitary matrix (lossless medium with strong
  mode mixing),
* ``"gaussian"`` -- i.i.d. circular complex Gaussian entries with variance
  1/n, so each column carries unit power in expectation (lossy sub-block of
  a strongly scattering medium),
* ``"thin"`` -- diagonal unit-modulus matrix exp(i*phi_j) (thin diffuser).

A generated matrix is immutable and caches the derived products that appear
in every amplitude evaluation: J = T T^t (symmetrized), T~ = F T and
T' = F T T^t.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass

import numpy as np

from .numerics import DimensionError, RngStream, dft, sample_standard_complex_gaussian

__all__ = [
    "MEDIUM_KINDS",
    "MediumModel",
    "TransmissionMatrix",
    "generate",
    "haar_unitary",
    "total_transmission",
    "save_matrix",
    "load_matrix",
]

MEDIUM_KINDS = ("unitary", "gaussian", "thin")


@dataclass(frozen=True)
class MediumModel:
    """Identity of one disorder realization: model kind, size and seed."""

    kind: str
    n: int
    seed: int
    stream_key: tuple[int, ...] = (0,)

    def __post_init__(self):
        if self.kind not in MEDIUM_KINDS:
            raise ValueError(f"unknown medium kind {self.kind!r}, expected one of {MEDIUM_KINDS}")
        if self.n < 1:
            raise DimensionError(f"mode count must be >= 1, got {self.n}")
        object.__setattr__(self, "stream_key", tuple(int(k) for k in self.stream_key))

    def rng(self) -> RngStream:
        return RngStream(self.seed, _key=self.stream_key)


class TransmissionMatrix:
    """An immutable medium matrix together with its cached derived products."""

    def __init__(self, model: MediumModel, matrix: np.ndarray):
        matrix = np.ascontiguousarray(matrix, dtype=np.complex128)
        if matrix.shape != (model.n, model.n):
            raise DimensionError(f"matrix shape {matrix.shape} does not match n={model.n}")
        if not np.all(np.isfinite(matrix.view(np.float64))):
            raise FloatingPointError("transmission matrix contains non-finite entries")
        matrix.setflags(write=False)
        self.model = model
        self.matrix = matrix

    @property
    def n(self) -> int:
        return self.model.n

    @functools.cached_property
    def j(self) -> np.ndarray:
        """J = T T^t, symmetrized so J == J^t holds exactly."""
        j = self.matrix @ self.matrix.T
        j = 0.5 * (j + j.T)
        j.setflags(write=False)
        return j

    @functools.cached_property
    def t_tilde(self) -> np.ndarray:
        """T~ = F T (propagation to the far field)."""
        out = dft(self.n) @ self.matrix
        out.setflags(write=False)
        return out

    @functools.cached_property
    def t_prime(self) -> np.ndarray:
        """T' = F T T^t = F J (double pass seen from the far field)."""
        out = dft(self.n) @ self.j
        out.setflags(write=False)
        return out


def haar_unitary(n: int, rng: RngStream) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix.

    The columns of Q are rephased with the conjugated R-diagonal phases so the
    output is exactly Haar, not merely unitary.  A (practically unreachable)
    degenerate R diagonal triggers a resample from the next stream draws.
    """
    if n < 1:
        raise DimensionError(f"mode count must be >= 1, got {n}")
    while True:
        z = sample_standard_complex_gaussian(rng, n * n).reshape(n, n)
        q, r = np.linalg.qr(z)
        d = np.diagonal(r)
        if np.min(np.abs(d)) < 1e-300:
            continue
        return q * np.conj(d / np.abs(d))


def generate(model: MediumModel) -> TransmissionMatrix:
    """Draw the transmission matrix of one disorder realization.

    Deterministic in (kind, n, seed): the same model always yields the same
    matrix, bit for bit.
    """
    rng = model.rng()
    n = model.n
    if model.kind == "unitary":
        matrix = haar_unitary(n, rng)
    elif model.kind == "gaussian":
        # Variance 1/n per complex entry: column power is 1 in expectation.
        matrix = sample_standard_complex_gaussian(rng, n * n).reshape(n, n) / np.sqrt(n)
    else:  # thin
        matrix = np.diag(np.exp(1j * rng.uniform_phases(n)))
    return TransmissionMatrix(model, matrix)


def total_transmission(t: TransmissionMatrix) -> float:
    """Mean column power tau = (1/n) * sum_mn |t_mn|^2."""
    return float(np.sum(np.abs(t.matrix) ** 2)) / t.n


# ---------------------------------------------------------------------------
# Matrix dump format: one UTF-8 JSON header line, then the row-major matrix as
# interleaved (re, im) little-endian float64 pairs.  Used by `qwfs gen-matrix`
# so external tools can cross-check generated media.

def save_matrix(t: TransmissionMatrix, path) -> None:
    header = {
        "kind": t.model.kind,
        "n": t.model.n,
        "seed": t.model.seed,
        "stream_key": list(t.model.stream_key),
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(np.ascontiguousarray(t.matrix, dtype="<c16").tobytes())


def load_matrix(path) -> TransmissionMatrix:
    with open(path, "rb") as fh:
        header_line = fh.readline()
        payload = fh.read()
    header = json.loads(header_line.decode("utf-8"))
    n = int(header["n"])
    expected = n * n * 16
    if len(payload) != expected:
        raise ValueError(f"matrix payload has {len(payload)} bytes, expected {expected}")
    matrix = np.frombuffer(payload, dtype="<c16").reshape(n, n).astype(np.complex128)
    model = MediumModel(
        kind=header["kind"],
        n=n,
        seed=int(header["seed"]),
        stream_key=tuple(header.get("stream_key", (0,))),
    )
    return TransmissionMatrix(model, matrix)

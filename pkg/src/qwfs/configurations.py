"""Coincidence amplitudes and probabilities for the four SLM/detector layouts.

Layouts (names follow the CLI vocabulary):

* ``"1p-s"``            amplitude (F T T^t S F)_{beta,alpha}
* ``"2p-is"``           amplitude (F T S S T^t F)_{beta,alpha}
* ``"2p-is-displaced"`` amplitude (F T S F S T^t F)_{beta,alpha}
* ``"2p-ds"``           amplitude (F S T T^t S F)_{beta,alpha}

with S the diagonal SLM matrix and F the unitary DFT.  The coincidence
probability is |amplitude|^2 / (2N).  Amplitudes are evaluated as
matrix-vector chains from the basis vector e_alpha, never as full N x N
products, because the optimizer calls them in a loop.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .media import TransmissionMatrix
from .numerics import DimensionError, dft

__all__ = [
    "LAYOUTS",
    "MacroPixelMap",
    "PhaseMask",
    "ShapingConfiguration",
    "CoincidenceMap",
    "slm_diagonal",
    "coincidence_amplitude",
    "coincidence_probability",
    "coincidence_map",
    "total_coincidence",
    "mirror_plane_field",
]

LAYOUTS = ("1p-s", "2p-is", "2p-is-displaced", "2p-ds")

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class MacroPixelMap:
    """Contiguous-block grouping of N modes into M macro-pixels.

    When M divides N every macro-pixel covers m = N/M modes (mode i*m + j
    belongs to macro-pixel i).  Other M are mapped to contiguous blocks of
    near-equal size (the leading N mod M blocks get one extra mode), which is
    what degrees of control like 3/4 require.  The degree of control is
    DOC = M/N.
    """

    n: int
    macro_count: int

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError(f"mode count must be >= 1, got {self.n}")
        if not (1 <= self.macro_count <= self.n):
            raise ValueError(f"macro_count must be in [1, {self.n}], got {self.macro_count}")

    @property
    def modes_per_macro(self) -> int:
        """Block size m = N/M; only defined for the divisor case."""
        if self.n % self.macro_count != 0:
            raise ValueError(
                f"blocks are unequal for macro_count {self.macro_count}, n {self.n}"
            )
        return self.n // self.macro_count

    @property
    def doc(self) -> float:
        return self.macro_count / self.n

    @property
    def full_control(self) -> bool:
        return self.macro_count == self.n

    @functools.cached_property
    def block_sizes(self) -> np.ndarray:
        base, extra = divmod(self.n, self.macro_count)
        sizes = np.full(self.macro_count, base, dtype=np.int64)
        sizes[:extra] += 1
        sizes.setflags(write=False)
        return sizes

    @functools.cached_property
    def _block_offsets(self) -> np.ndarray:
        offsets = np.zeros(self.macro_count, dtype=np.int64)
        np.cumsum(self.block_sizes[:-1], out=offsets[1:])
        offsets.setflags(write=False)
        return offsets

    def assignment(self) -> np.ndarray:
        """Macro-pixel index of every mode."""
        return np.repeat(np.arange(self.macro_count), self.block_sizes)

    def expand(self, per_macro: np.ndarray) -> np.ndarray:
        """Broadcast one value per macro-pixel onto all N modes."""
        per_macro = np.asarray(per_macro)
        if per_macro.shape != (self.macro_count,):
            raise DimensionError(
                f"expected {self.macro_count} macro values, got shape {per_macro.shape}"
            )
        if self.full_control:
            return per_macro
        return np.repeat(per_macro, self.block_sizes)

    def block_sums(self, per_mode: np.ndarray) -> np.ndarray:
        """Sum a per-mode array over each macro-pixel block."""
        per_mode = np.asarray(per_mode)
        if per_mode.shape != (self.n,):
            raise DimensionError(f"expected {self.n} mode values, got shape {per_mode.shape}")
        if self.full_control:
            return per_mode
        return np.add.reduceat(per_mode, self._block_offsets)


def full_control(n: int) -> MacroPixelMap:
    return MacroPixelMap(n, n)


@dataclass(frozen=True)
class PhaseMask:
    """M SLM phases plus their macro-pixel mapping onto N modes."""

    phases: np.ndarray
    control: MacroPixelMap

    def __post_init__(self):
        phases = np.asarray(self.phases, dtype=np.float64)
        if phases.shape != (self.control.macro_count,):
            raise DimensionError(
                f"expected {self.control.macro_count} phases, got shape {phases.shape}"
            )
        phases = np.mod(phases, TWO_PI)
        phases.setflags(write=False)
        object.__setattr__(self, "phases", phases)

    @property
    def n(self) -> int:
        return self.control.n

    def phasors(self) -> np.ndarray:
        """Per-mode unit phasors exp(i*Phi_{assignment(mode)})."""
        return np.exp(1j * self.control.expand(self.phases))

    @staticmethod
    def flat(n: int) -> "PhaseMask":
        """The do-nothing mask (S = I) at full control."""
        return PhaseMask(np.zeros(n), full_control(n))


@dataclass(frozen=True)
class ShapingConfiguration:
    """Optical layout plus the detected output pair (alpha, beta)."""

    layout: str
    alpha: int
    beta: int

    def __post_init__(self):
        if self.layout not in LAYOUTS:
            raise ValueError(f"unknown layout {self.layout!r}, expected one of {LAYOUTS}")

    @property
    def symmetric(self) -> bool:
        """True for the OPC case: both photons detected in the same mode."""
        return self.alpha == self.beta

    def check_modes(self, n: int) -> None:
        if not (0 <= self.alpha < n and 0 <= self.beta < n):
            raise DimensionError(
                f"detector modes ({self.alpha}, {self.beta}) out of range for n={n}"
            )


@dataclass(frozen=True)
class CoincidenceMap:
    """All N coincidence probabilities P_{alpha,beta} for a fixed alpha."""

    alpha: int
    values: np.ndarray = field(repr=False)

    def total(self) -> float:
        return float(np.sum(self.values))


def slm_diagonal(mask: PhaseMask) -> np.ndarray:
    """Dense N x N diagonal SLM matrix (macro-pixels expanded onto modes)."""
    return np.diag(mask.phasors())


def _check(config: ShapingConfiguration, t: TransmissionMatrix, mask: PhaseMask) -> None:
    if mask.n != t.n:
        raise DimensionError(f"mask is over {mask.n} modes but the medium has {t.n}")
    config.check_modes(t.n)


def _chain_from_alpha(
    layout: str, t: TransmissionMatrix, s: np.ndarray, alpha: int
) -> np.ndarray:
    """Apply the layout chain (without the final DFT) to e_alpha."""
    f = dft(t.n)
    v = f[:, alpha]
    if layout == "1p-s":
        return t.j @ (s * v)
    if layout == "2p-is":
        return t.matrix @ (s * s * (t.matrix.T @ v))
    if layout == "2p-is-displaced":
        return t.matrix @ (s * (f @ (s * (t.matrix.T @ v))))
    if layout == "2p-ds":
        return s * (t.j @ (s * v))
    raise ValueError(f"unknown layout {layout!r}")


def coincidence_amplitude(
    config: ShapingConfiguration, t: TransmissionMatrix, mask: PhaseMask
) -> complex:
    """The (beta, alpha) matrix element of the layout chain."""
    _check(config, t, mask)
    v = _chain_from_alpha(config.layout, t, mask.phasors(), config.alpha)
    return complex(dft(t.n)[config.beta] @ v)


def coincidence_probability(
    config: ShapingConfiguration, t: TransmissionMatrix, mask: PhaseMask
) -> float:
    """P_{alpha,beta} = |amplitude|^2 / (2N)."""
    amp = coincidence_amplitude(config, t, mask)
    return abs(amp) ** 2 / (2.0 * t.n)


def coincidence_map(
    config: ShapingConfiguration, t: TransmissionMatrix, mask: PhaseMask
) -> CoincidenceMap:
    """P_{alpha,beta} for every beta at fixed alpha (one chain evaluation)."""
    _check(config, t, mask)
    v = _chain_from_alpha(config.layout, t, mask.phasors(), config.alpha)
    w = dft(t.n) @ v
    values = np.abs(w) ** 2 / (2.0 * t.n)
    values.setflags(write=False)
    return CoincidenceMap(alpha=config.alpha, values=values)


def total_coincidence(
    config: ShapingConfiguration, t: TransmissionMatrix, mask: PhaseMask
) -> float:
    """Sum of P_{alpha,beta} over beta.

    The final DFT is unitary and drops out of the norm, so this costs one
    chain evaluation without the last matvec.
    """
    _check(config, t, mask)
    v = _chain_from_alpha(config.layout, t, mask.phasors(), config.alpha)
    return float(np.vdot(v, v).real) / (2.0 * t.n)


def mirror_plane_field(t: TransmissionMatrix, mask: PhaseMask, alpha: int) -> np.ndarray:
    """Advanced-wave field u = T^t S F e_alpha at the crystal/mirror plane.

    This is the 2p-ds diagnostic: for an optimized symmetric (alpha = beta)
    mask the phases of u cluster around two values separated by pi.
    """
    if mask.n != t.n:
        raise DimensionError(f"mask is over {mask.n} modes but the medium has {t.n}")
    if not (0 <= alpha < t.n):
        raise DimensionError(f"detector mode {alpha} out of range for n={t.n}")
    return t.matrix.T @ (mask.phasors() * dft(t.n)[:, alpha])

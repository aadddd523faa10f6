"""Optimal phase masks: closed-form conjugation solutions and a numerical
optimizer for the self-consistent quadratic-form landscapes.

The 1p-s and 2p-is amplitudes are linear in the per-pixel phasors (with a
doubled phase in the 2p-is case), so aligning all terms in phase is globally
optimal and gives a closed-form mask for any medium and any degree of
control.  The 2p-ds and displaced 2p-is amplitudes are genuine complex
quadratic forms Amp = sum_nm a_nm s_n s_m over unit-modulus phasors; those
are maximized numerically by a restarted quasi-Newton (L-BFGS) ascent with a
backtracking Armijo line search and analytic gradients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .configurations import (
    TWO_PI,
    MacroPixelMap,
    PhaseMask,
    ShapingConfiguration,
    coincidence_amplitude,
    coincidence_probability,
    full_control,
)
from .media import TransmissionMatrix
from .numerics import DimensionError, RngStream, dft

__all__ = [
    "ALGORITHMS",
    "LayoutError",
    "OptimizerFailure",
    "OptimizerSpec",
    "OptimizationResult",
    "QuadraticKernel",
    "ValidationRecord",
    "analytic_phases_1ps",
    "analytic_phases_2pis",
    "analytic_phases_thin_displaced",
    "build_kernel",
    "objective_and_gradient",
    "optimize",
    "validate_against_analytic",
]

ALGORITHMS = ("quasi-newton", "momentum")

# Seed for the deterministic mask used to verify a kernel against its chain.
_KERNEL_CHECK_SEED = 161803398874


class LayoutError(ValueError):
    """The requested operation is not defined for this optical layout."""


class OptimizerFailure(RuntimeError):
    """Every restart diverged; carries the per-restart traces."""

    def __init__(self, message: str, traces: list[list[float]]):
        super().__init__(message)
        self.traces = traces


@dataclass(frozen=True)
class OptimizerSpec:
    """Parameters of the numerical phase optimization."""

    algorithm: str = "quasi-newton"
    restarts: int = 8
    max_iterations: int = 500
    gradient_tolerance: float = 1e-10
    objective_tolerance: float = 1e-12
    history_size: int = 10

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}, expected one of {ALGORITHMS}")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.gradient_tolerance <= 0 or self.objective_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if self.history_size < 1:
            raise ValueError("history_size must be >= 1")


@dataclass(frozen=True)
class OptimizationResult:
    """Best-of-restarts local maximum of the coincidence probability."""

    mask: PhaseMask
    objective: float
    trace: tuple[float, ...]
    converged: bool
    restart_index: int
    gradient_norm_final: float

    @property
    def iterations(self) -> int:
        return len(self.trace) - 1


class QuadraticKernel:
    """Coupling matrix of the amplitude Amp = sum_nm a_nm s_n s_m.

    For the 2p-ds layout a_nm = f_{beta,n} J_nm f_{m,alpha} with J = T T^t;
    the displaced 2p-is layout has the same structure with T~ rows around the
    central DFT, and the imaged 2p-is layout reduces to a diagonal kernel in
    the doubled phasors s_n^2.  Only the symmetrized b = a + a^t enters the
    objective and gradient, because s_n s_m is symmetric in (n, m).
    """

    def __init__(self, layout: str, alpha: int, beta: int, a: np.ndarray):
        self.layout = layout
        self.alpha = alpha
        self.beta = beta
        self.a = a
        self.b = a + a.T
        self.n = a.shape[0]
        self.a.setflags(write=False)
        self.b.setflags(write=False)

    def amplitude(self, phasors: np.ndarray) -> complex:
        return complex(0.5 * (phasors @ (self.b @ phasors)))


def build_kernel(t: TransmissionMatrix, config: ShapingConfiguration) -> QuadraticKernel:
    """Quadratic-form kernel of a layout whose amplitude is quadratic in s.

    Defined for the 2p-ds, displaced 2p-is and imaged 2p-is layouts; the 1p-s
    amplitude is linear in the mask and has no quadratic kernel.  The built
    kernel is verified against the matrix-vector chain on a deterministic
    random mask before being returned.
    """
    config.check_modes(t.n)
    f = dft(t.n)
    if config.layout == "2p-ds":
        a = f[:, config.beta][:, None] * t.j * f[:, config.alpha][None, :]
    elif config.layout == "2p-is-displaced":
        a = t.t_tilde[config.beta][:, None] * f * t.t_tilde[config.alpha][None, :]
    elif config.layout == "2p-is":
        a = np.diag(t.t_tilde[config.beta] * t.t_tilde[config.alpha])
    else:
        raise LayoutError(
            f"layout {config.layout!r} has no quadratic kernel (1p-s is linear in the mask)"
        )
    kernel = QuadraticKernel(config.layout, config.alpha, config.beta, a)
    _verify_kernel(kernel, t, config)
    return kernel


def _verify_kernel(
    kernel: QuadraticKernel, t: TransmissionMatrix, config: ShapingConfiguration
) -> None:
    mask = PhaseMask(RngStream(_KERNEL_CHECK_SEED).uniform_phases(t.n), full_control(t.n))
    via_kernel = kernel.amplitude(mask.phasors())
    via_chain = coincidence_amplitude(config, t, mask)
    scale = max(abs(via_chain), abs(via_kernel), 1e-30)
    if abs(via_kernel - via_chain) > 1e-10 * scale:
        raise ArithmeticError(
            f"kernel amplitude {via_kernel!r} disagrees with chain {via_chain!r}"
        )


class QuadraticPhaseObjective:
    """P(phases) = |sum_nm a_nm s_n s_m|^2 / (2N) and its exact gradient.

    One symmetrized matvec w = (a + a^t) s per evaluation gives both the
    amplitude (0.5 * s.w) and the gradient
    dP/dPhi_k = (1/N) Re(conj(Amp) * i * sum_{n in block k} s_n w_n).
    """

    def __init__(self, kernel: QuadraticKernel, control: MacroPixelMap):
        if control.n != kernel.n:
            raise DimensionError(f"control is over {control.n} modes, kernel over {kernel.n}")
        self.kernel = kernel
        self.control = control

    def value_and_gradient(self, phases: np.ndarray) -> tuple[float, np.ndarray]:
        s = np.exp(1j * self.control.expand(phases))
        w = self.kernel.b @ s
        amp = 0.5 * np.dot(s, w)
        n = self.kernel.n
        value = (amp.real * amp.real + amp.imag * amp.imag) / (2.0 * n)
        blocks = self.control.block_sums(s * w)
        grad = (-1.0 / n) * np.imag(np.conj(amp) * blocks)
        return float(value), grad


class LinearPhaseObjective:
    """P(phases) = |sum_m c_m s_m|^2 / (2N) for the linear (1p-s) chain."""

    def __init__(self, coefficients: np.ndarray, control: MacroPixelMap):
        if coefficients.shape != (control.n,):
            raise DimensionError(
                f"expected {control.n} coefficients, got shape {coefficients.shape}"
            )
        self.control = control
        self.n = control.n
        # Modes of one macro-pixel share a phasor, so only block sums matter.
        self._block_coeffs = control.block_sums(coefficients)

    def value_and_gradient(self, phases: np.ndarray) -> tuple[float, np.ndarray]:
        terms = self._block_coeffs * np.exp(1j * phases)
        amp = np.sum(terms)
        value = (amp.real * amp.real + amp.imag * amp.imag) / (2.0 * self.n)
        grad = (-1.0 / self.n) * np.imag(np.conj(amp) * terms)
        return float(value), grad


def objective_and_gradient(
    kernel: QuadraticKernel, mask: PhaseMask
) -> tuple[float, np.ndarray]:
    """Objective P = |Amp|^2/(2N) and dP/dPhi for a mask on this kernel."""
    return QuadraticPhaseObjective(kernel, mask.control).value_and_gradient(mask.phases)


# ---------------------------------------------------------------------------
# Closed-form solutions


def analytic_phases_1ps(
    t: TransmissionMatrix, alpha: int, beta: int, control: MacroPixelMap | None = None
) -> PhaseMask:
    """Globally optimal 1p-s mask: align every term of the linear amplitude.

    With T' = F T T^t the amplitude is sum_m f_{alpha,m} t'_{beta,m} s_m, so
    Phi_k = -arg(sum of the block-k coefficients) makes all contributions add
    in phase; the optimized amplitude is real and nonnegative.  Zero-modulus
    coefficients get phase 0.
    """
    control = control or full_control(t.n)
    coeffs = dft(t.n)[alpha] * t.t_prime[beta]
    return PhaseMask(-np.angle(control.block_sums(coeffs)), control)


def analytic_phases_2pis(
    t: TransmissionMatrix, alpha: int, beta: int, control: MacroPixelMap | None = None
) -> PhaseMask:
    """Globally optimal 2p-is mask (both photons pick up the phase twice).

    The amplitude is sum_n t~_{alpha,n} t~_{beta,n} exp(2i*Phi_n); halving the
    aligning phases compensates the double pass.  For alpha = beta this is the
    phase-conjugating solution Phi_n = -arg(t~_{alpha,n}) mod pi.
    """
    control = control or full_control(t.n)
    coeffs = t.t_tilde[alpha] * t.t_tilde[beta]
    return PhaseMask(-0.5 * np.angle(control.block_sums(coeffs)), control)


def analytic_phases_thin_displaced(
    t: TransmissionMatrix, alpha: int, beta: int
) -> PhaseMask:
    """Exact full-control optimum of the displaced 2p-is layout on a diagonal
    medium: a quadratic chirp whose DFT is flat in modulus.

    Writing D = S T, the amplitude (F D F D F)_{beta,alpha} reaches unit
    modulus when D is a Gauss chirp shifted so that 2*shift = alpha + beta
    (mod N).  For even N this requires alpha + beta even; odd N always works.
    The construction is re-verified numerically before returning.
    """
    n = t.n
    diag = np.diagonal(t.matrix)
    if not np.allclose(t.matrix, np.diag(diag), atol=1e-12):
        raise LayoutError("the chirp construction is only valid for diagonal media")
    j = np.arange(n, dtype=np.int64)
    if n % 2 == 0:
        if (alpha + beta) % 2 != 0:
            raise ValueError(
                f"no exact chirp solution: alpha + beta = {alpha + beta} is odd for even n = {n}"
            )
        shift = (alpha + beta) // 2
        chirp = np.pi * ((j * j) % (2 * n)) / n
    else:
        half = (n + 1) // 2
        shift = (half * (alpha + beta)) % n
        chirp = TWO_PI * ((half * j * j) % n) / n
    phases = chirp + TWO_PI * ((j * shift) % n) / n - np.angle(diag)
    mask = PhaseMask(phases, full_control(n))
    config = ShapingConfiguration("2p-is-displaced", alpha, beta)
    achieved = 2.0 * n * coincidence_probability(config, t, mask)
    if abs(achieved - 1.0) > 1e-9:
        raise ArithmeticError(f"chirp mask reached 2N*P = {achieved!r}, expected 1")
    return mask


# ---------------------------------------------------------------------------
# Numerical optimizer


@dataclass
class _RestartOutcome:
    phases: np.ndarray
    objective: float
    trace: list[float]
    converged: bool
    gradient_norm: float


def _two_loop_direction(grad, s_hist, y_hist, rho_hist):
    """L-BFGS two-loop recursion: returns H*grad for the implicit inverse
    Hessian approximation (gamma-scaled identity seed)."""
    q = grad.copy()
    alphas = []
    for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
        a = rho * np.dot(s, q)
        alphas.append(a)
        q -= a * y
    gamma = np.dot(s_hist[-1], y_hist[-1]) / np.dot(y_hist[-1], y_hist[-1])
    q *= gamma
    for (s, y, rho), a in zip(zip(s_hist, y_hist, rho_hist), reversed(alphas)):
        b = rho * np.dot(y, q)
        q += (a - b) * s
    return q


def _quasi_newton_restart(objective, x0: np.ndarray, spec: OptimizerSpec) -> _RestartOutcome:
    armijo = 1e-4
    tiny = np.finfo(float).tiny
    x = np.asarray(x0, dtype=np.float64).copy()
    value, grad_p = objective.value_and_gradient(x)
    f = -value
    grad = -grad_p  # gradient of the minimized f = -P
    trace = [value]
    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    rho_hist: list[float] = []
    converged = False

    for _ in range(spec.max_iterations):
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= spec.gradient_tolerance:
            converged = True
            break

        fresh = not s_hist
        if fresh:
            # No curvature information yet: unit-length steepest descent, the
            # expansion below finds the step scale.
            direction = -grad / max(grad_norm, tiny)
        else:
            direction = -_two_loop_direction(grad, s_hist, y_hist, rho_hist)
        slope = float(np.dot(direction, grad))
        if slope >= 0.0:
            s_hist.clear()
            y_hist.clear()
            rho_hist.clear()
            fresh = True
            direction = -grad / max(grad_norm, tiny)
            slope = float(np.dot(direction, grad))

        # Backtracking Armijo line search on f.
        step = 1.0
        accepted = False
        for _bt in range(40):
            x_new = x + step * direction
            value_new, grad_p_new = objective.value_and_gradient(x_new)
            f_new = -value_new
            if np.isfinite(f_new) and f_new <= f + armijo * step * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            if s_hist:
                # Stale curvature: drop it and retry along steepest descent.
                s_hist.clear()
                y_hist.clear()
                rho_hist.clear()
                continue
            # Even steepest descent cannot improve: numerically stationary.
            converged = True
            break

        if fresh and step == 1.0:
            # Greedy doubling while the larger step still improves strictly
            # and satisfies Armijo; gives steepest descent a usable scale.
            while step < 2.0**20:
                step_try = 2.0 * step
                x_try = x + step_try * direction
                value_try, grad_p_try = objective.value_and_gradient(x_try)
                f_try = -value_try
                if (
                    np.isfinite(f_try)
                    and f_try <= f + armijo * step_try * slope
                    and f_try < f_new
                ):
                    step = step_try
                    x_new, value_new, grad_p_new, f_new = x_try, value_try, grad_p_try, f_try
                else:
                    break

        grad_new = -grad_p_new
        s_vec = x_new - x
        y_vec = grad_new - grad
        sy = float(np.dot(s_vec, y_vec))
        if sy > 1e-12 * np.linalg.norm(s_vec) * np.linalg.norm(y_vec):
            s_hist.append(s_vec)
            y_hist.append(y_vec)
            rho_hist.append(1.0 / sy)
            if len(s_hist) > spec.history_size:
                s_hist.pop(0)
                y_hist.pop(0)
                rho_hist.pop(0)

        stalled = abs(f_new - f) <= spec.objective_tolerance * max(abs(f_new), tiny)
        x, f, grad, value = x_new, f_new, grad_new, value_new
        trace.append(value)
        if stalled:
            converged = True
            break

    return _RestartOutcome(
        phases=x,
        objective=value,
        trace=trace,
        converged=converged,
        gradient_norm=float(np.linalg.norm(grad)),
    )


def _momentum_restart(objective, x0: np.ndarray, spec: OptimizerSpec) -> _RestartOutcome:
    """Heavy-ball ascent with step-halving on rejection; accepted steps only
    ever increase the objective, so the trace stays monotone."""
    tiny = np.finfo(float).tiny
    momentum = 0.9
    learning_rate = 0.5
    x = np.asarray(x0, dtype=np.float64).copy()
    value, grad = objective.value_and_gradient(x)
    velocity = np.zeros_like(x)
    trace = [value]
    converged = False
    for _ in range(spec.max_iterations):
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= spec.gradient_tolerance:
            converged = True
            break
        velocity_new = momentum * velocity + learning_rate * grad
        x_new = x + velocity_new
        value_new, grad_new = objective.value_and_gradient(x_new)
        if np.isfinite(value_new) and value_new > value:
            stalled = abs(value_new - value) <= spec.objective_tolerance * max(value_new, tiny)
            x, value, grad, velocity = x_new, value_new, grad_new, velocity_new
            trace.append(value)
            learning_rate = min(learning_rate * 1.05, 100.0)
            if stalled:
                converged = True
                break
        else:
            velocity = np.zeros_like(x)
            learning_rate *= 0.5
            if learning_rate < 1e-15:
                converged = True
                break
    return _RestartOutcome(
        phases=x,
        objective=value,
        trace=trace,
        converged=converged,
        gradient_norm=float(np.linalg.norm(grad)),
    )


def optimize_objective(
    objective, control: MacroPixelMap, spec: OptimizerSpec, rng: RngStream
) -> OptimizationResult:
    """Best-of-restarts maximization of a phase objective.

    Restart r draws its initial i.i.d. uniform phases from substream r of the
    given stream, so the outcome is independent of evaluation order; exact
    ties go to the lowest restart index.
    """
    runner = _quasi_newton_restart if spec.algorithm == "quasi-newton" else _momentum_restart
    best: _RestartOutcome | None = None
    best_index = -1
    traces: list[list[float]] = []
    for index in range(spec.restarts):
        x0 = rng.substream(index).uniform_phases(control.macro_count)
        outcome = runner(objective, x0, spec)
        traces.append(outcome.trace)
        if not np.isfinite(outcome.objective):
            continue
        if best is None or outcome.objective > best.objective:
            best = outcome
            best_index = index
    if best is None:
        raise OptimizerFailure("all restarts produced non-finite objectives", traces)
    return OptimizationResult(
        mask=PhaseMask(best.phases, control),
        objective=best.objective,
        trace=tuple(best.trace),
        converged=best.converged,
        restart_index=best_index,
        gradient_norm_final=best.gradient_norm,
    )


def optimize(
    kernel: QuadraticKernel, control: MacroPixelMap, spec: OptimizerSpec, rng: RngStream
) -> OptimizationResult:
    """Maximize the quadratic-form coincidence probability over SLM phases."""
    return optimize_objective(QuadraticPhaseObjective(kernel, control), control, spec, rng)


def linear_objective_1ps(
    t: TransmissionMatrix, alpha: int, beta: int, control: MacroPixelMap | None = None
) -> LinearPhaseObjective:
    """The 1p-s amplitude as a linear phase objective (for the optimizer)."""
    control = control or full_control(t.n)
    return LinearPhaseObjective(dft(t.n)[alpha] * t.t_prime[beta], control)


# ---------------------------------------------------------------------------
# Optimizer validation against the closed forms


@dataclass(frozen=True)
class ValidationRecord:
    """Numerical optimizer vs closed-form solution on the same landscape."""

    layout: str
    alpha: int
    beta: int
    analytic_objective: float
    numeric_objective: float
    objective_ratio: float
    phase_residual_rms: float


def _phase_residual_rms(numeric: np.ndarray, analytic: np.ndarray, period: float) -> float:
    """RMS of the numeric-analytic phase difference modulo a global shift.

    The 2p-is mask enters as exp(2i*Phi), so its phases are compared with
    period pi instead of 2*pi.
    """
    k = TWO_PI / period
    delta = numeric - analytic
    shift = np.angle(np.mean(np.exp(1j * k * delta))) / k
    residual = np.angle(np.exp(1j * k * (delta - shift))) / k
    return float(np.sqrt(np.mean(residual**2)))


def validate_against_analytic(
    t: TransmissionMatrix,
    config: ShapingConfiguration,
    spec: OptimizerSpec,
    rng: RngStream,
    control: MacroPixelMap | None = None,
) -> ValidationRecord:
    """Run the numerical optimizer on a closed-form-solvable landscape.

    Only the 1p-s and 2p-is layouts have closed forms; the record reports the
    numeric/analytic objective ratio and the RMS phase residual modulo a
    global phase shift.
    """
    control = control or full_control(t.n)
    config.check_modes(t.n)
    if config.layout == "1p-s":
        analytic_mask = analytic_phases_1ps(t, config.alpha, config.beta, control)
        objective = linear_objective_1ps(t, config.alpha, config.beta, control)
        period = TWO_PI
    elif config.layout == "2p-is":
        analytic_mask = analytic_phases_2pis(t, config.alpha, config.beta, control)
        objective = QuadraticPhaseObjective(build_kernel(t, config), control)
        period = np.pi
    else:
        raise LayoutError(f"layout {config.layout!r} has no closed-form solution")
    analytic_objective = coincidence_probability(config, t, analytic_mask)
    result = optimize_objective(objective, control, spec, rng)
    numeric_objective = coincidence_probability(config, t, result.mask)
    return ValidationRecord(
        layout=config.layout,
        alpha=config.alpha,
        beta=config.beta,
        analytic_objective=analytic_objective,
        numeric_objective=numeric_objective,
        objective_ratio=numeric_objective / analytic_objective,
        phase_residual_rms=_phase_residual_rms(
            result.mask.phases, analytic_mask.phases, period
        ),
    )

"""Physical parameters, bearing geometry and the roughness coefficient.

Everything here is dimensionless.  Four numbers describe the lubricant and
its interaction with the moving wall:

* ``N``     -- coupling number in (0, 1); N^2 measures how strongly the
  microrotation field feeds back into the momentum balance.
* ``R_c``   -- microrotation length parameter (> 0).
* ``alpha`` -- wall coefficient linking the microrotation to the rotation
  of the velocity on the moving surface (> 0).
* ``beta``  -- wall-slippage control coefficient (>= 0); ``beta = 0``
  switches off the slip source entirely.

An equivalent parameterization via the boundary-viscosity ratio
``nu_b_bar = (1 - alpha*N^2) / (1 - N^2)`` and ``delta = R_c / (2*N^2*beta)``
is common in the bearing literature and supported through
:meth:`ModelParams.from_boundary_viscosity`.

The rough upper surface enters the effective momentum equations through a
single scalar, the roughness coefficient

    M = integral over one period of (dh2/dX)^2,

where ``h2`` is the fast-scale periodic profile with zero average.  The
vertical operator of the effective model keeps a coercivity margin of
``1 - M/2``, so ``M < 2`` is required throughout.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

# The coercivity margin (1 - M/2) closes at M = 2.  Values above the soft
# limit still run but are outside the regime explored by the simulations.
ROUGHNESS_LIMIT = 2.0
ROUGHNESS_SOFT_LIMIT = 1.5

_AVERAGE_TOL = 1e-8


def check_roughness_coefficient(M: float) -> float:
    """Validate a roughness coefficient against the stability domain [0, 2)."""
    M = float(M)
    if not math.isfinite(M) or M < 0.0:
        raise ValueError(f"roughness coefficient must be finite and >= 0, got {M}")
    if M >= ROUGHNESS_LIMIT:
        raise ValueError(
            f"roughness coefficient M={M:g} is outside the stability domain "
            f"[0, {ROUGHNESS_LIMIT:g}): the coercivity margin 1 - M/2 vanishes"
        )
    if M > ROUGHNESS_SOFT_LIMIT:
        warnings.warn(
            f"roughness coefficient M={M:g} exceeds {ROUGHNESS_SOFT_LIMIT}; the "
            "iteration is close to the edge of its stability domain",
            UserWarning,
            stacklevel=3,
        )
    return M


@dataclass(frozen=True)
class DerivedParams:
    """Boundary-viscosity form (nu_b_bar, delta) of the wall coefficients."""

    nu_b_bar: float
    delta: float


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless physical parameters of the micropolar film model.

    Parameters
    ----------
    N : float
        Coupling number, 0 < N < 1.
    R_c : float
        Microrotation length parameter, > 0.
    alpha : float
        Wall microrotation coefficient, > 0.
    beta : float
        Wall slippage coefficient, >= 0.
    s1 : float
        Dimensionless horizontal wall velocity.
    M : float
        Roughness coefficient, 0 <= M < 2.
    """

    N: float
    R_c: float
    alpha: float
    beta: float
    s1: float = 1.0
    M: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.N < 1.0:
            raise ValueError(f"coupling number N must lie in (0, 1), got {self.N}")
        if self.R_c <= 0.0:
            raise ValueError(f"R_c must be positive, got {self.R_c}")
        if self.alpha <= 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.beta < 0.0:
            raise ValueError(f"beta must be nonnegative, got {self.beta}")
        check_roughness_coefficient(self.M)

    @classmethod
    def from_boundary_viscosity(
        cls,
        N: float,
        R_c: float,
        nu_b_bar: float,
        delta: float,
        s1: float = 1.0,
        M: float = 0.0,
    ) -> "ModelParams":
        """Build parameters from the (nu_b_bar, delta) parameterization."""
        if delta <= 0.0:
            raise ValueError(f"delta must be positive, got {delta}")
        alpha = (1.0 - nu_b_bar * (1.0 - N**2)) / N**2
        beta = R_c / (2.0 * N**2 * delta)
        return cls(N=N, R_c=R_c, alpha=alpha, beta=beta, s1=s1, M=M)

    @property
    def derived(self) -> DerivedParams:
        """Return the (nu_b_bar, delta) view of (alpha, beta).

        ``beta = 0`` maps to ``delta = inf`` (no slippage control).
        """
        nu_b_bar = (1.0 - self.alpha * self.N**2) / (1.0 - self.N**2)
        if self.beta == 0.0:
            delta = math.inf
        else:
            delta = self.R_c / (2.0 * self.N**2 * self.beta)
        return DerivedParams(nu_b_bar=nu_b_bar, delta=delta)

    def with_roughness(self, M: float) -> "ModelParams":
        return replace(self, M=M)


class RoughnessProfile:
    """Fast-scale roughness profile: periodic with period 1, zero average.

    A profile is backed either by a closed-form evaluator (optionally with
    its derivative) or by samples on a uniform periodic grid.  Sampled
    profiles are differentiated spectrally.
    """

    def __init__(self, evaluator=None, derivative=None, samples=None):
        if (evaluator is None) == (samples is None):
            raise ValueError("provide exactly one of evaluator or samples")
        if samples is not None:
            samples = np.asarray(samples, dtype=float)
            if samples.ndim != 1 or samples.size < 2:
                raise ValueError("samples must be a 1D array with at least 2 entries")
        self.evaluator = evaluator
        self.derivative = derivative
        self.samples = samples

    @classmethod
    def from_callable(cls, fn: Callable, derivative: Callable | None = None):
        return cls(evaluator=fn, derivative=derivative)

    @classmethod
    def from_samples(cls, values) -> "RoughnessProfile":
        return cls(samples=values)

    @classmethod
    def sine(cls, amplitude: float, frequency: int = 1, phase: float = 0.0):
        """a*sin(2*pi*k*X + phase); its coefficient is 2*pi^2*k^2*a^2."""
        a, k = float(amplitude), int(frequency)

        def fn(X):
            return a * np.sin(2.0 * np.pi * k * np.asarray(X) + phase)

        def dfn(X):
            return 2.0 * np.pi * k * a * np.cos(2.0 * np.pi * k * np.asarray(X) + phase)

        return cls(evaluator=fn, derivative=dfn)

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        if self.evaluator is not None:
            return self.evaluator(X)
        # periodic linear interpolation of the samples
        n = self.samples.size
        grid = np.arange(n + 1) / n
        vals = np.concatenate([self.samples, self.samples[:1]])
        return np.interp(np.mod(X, 1.0), grid, vals)

    def sample(self, num_nodes: int) -> np.ndarray:
        if self.samples is not None and self.samples.size == num_nodes:
            return self.samples
        return np.asarray(self(np.arange(num_nodes) / num_nodes), dtype=float)

    def average(self, num_nodes: int = 1024) -> float:
        """Mean over one period (periodic trapezoid = plain mean of samples)."""
        if self.samples is not None:
            return float(np.mean(self.samples))
        return float(np.mean(self.sample(num_nodes)))


def _spectral_gradient_mean_square(samples: np.ndarray) -> float:
    """Mean of (dh/dX)^2 over one period via the spectral derivative."""
    n = samples.size
    coeff = np.fft.rfft(samples)
    k = np.arange(coeff.size, dtype=float)
    if n % 2 == 0:
        k[-1] = 0.0  # Nyquist mode has no well-defined odd derivative
    dsamples = np.fft.irfft(2j * np.pi * k * coeff, n)
    return float(np.mean(dsamples**2))


def compute_roughness_coefficient(
    h2,
    num_nodes: int = 1024,
    average_tol: float = _AVERAGE_TOL,
) -> float:
    """Roughness coefficient M of a periodic profile.

    M is the period average of (dh2/dX)^2.  For a surface that varies only
    along the sliding direction, the general torus average of the squared
    fast gradient reduces to exactly this one-dimensional integral, which
    is the only form the library implements.  For profiles given in closed
    form with a derivative, the integral is the periodic trapezoid rule on
    ``num_nodes`` uniform nodes (spectrally accurate for smooth periodic
    integrands).  Otherwise the profile is sampled and differentiated
    spectrally; both routes agree on band-limited profiles.

    Parameters
    ----------
    h2 : RoughnessProfile, callable or array_like
        The profile, a closed-form evaluator, or uniform periodic samples.
    num_nodes : int
        Quadrature/sampling node count, >= 2.
    average_tol : float
        Largest admissible magnitude of the period average.

    Returns
    -------
    float
        The coefficient M, validated against the stability domain [0, 2).
    """
    if num_nodes < 2:
        raise ValueError("quadrature node count must be at least 2")
    if isinstance(h2, RoughnessProfile):
        profile = h2
    elif callable(h2):
        profile = RoughnessProfile.from_callable(h2)
    else:
        profile = RoughnessProfile.from_samples(h2)

    avg = profile.average(num_nodes)
    if abs(avg) > average_tol:
        raise ValueError(
            f"roughness profile must have zero average; got {avg:.3e} "
            f"(tolerance {average_tol:.1e})"
        )

    if profile.derivative is not None:
        X = np.arange(num_nodes) / num_nodes
        M = float(np.mean(np.asarray(profile.derivative(X), dtype=float) ** 2))
    elif profile.samples is not None:
        # sampled profiles are differentiated at their native resolution
        M = _spectral_gradient_mean_square(profile.samples)
    else:
        M = _spectral_gradient_mean_square(profile.sample(num_nodes))
    return check_roughness_coefficient(M)


@dataclass(frozen=True)
class BearingGeometry:
    """Gap geometry of the linear slider: h1(x1) = 1 + m*x1 plus roughness.

    A custom leading-order profile can be supplied through ``h1_profile``;
    it must stay positive on [0, 1].
    """

    slope_m: float = -0.5
    roughness: RoughnessProfile | None = None
    h1_profile: Callable | None = None

    def __post_init__(self):
        x = np.linspace(0.0, 1.0, 2049)
        if np.min(self.h1(x)) <= 0.0:
            raise ValueError("leading-order gap h1 must be positive on [0, 1]")
        if self.roughness is not None:
            avg = self.roughness.average()
            if abs(avg) > _AVERAGE_TOL:
                raise ValueError(
                    f"roughness profile must have zero average, got {avg:.3e}"
                )

    def h1(self, x1):
        """Leading-order gap profile evaluated at x1 (scalar or array)."""
        if self.h1_profile is not None:
            return self.h1_profile(x1)
        return 1.0 + self.slope_m * np.asarray(x1, dtype=float)


def gap_function(geometry: BearingGeometry, eps: float, x1):
    """Physical gap eps*h1(x1) + eps^2*h2(x1/eps^2) (diagnostic only).

    The solver itself works in the rescaled variables and never calls this.
    """
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    x1 = np.asarray(x1, dtype=float)
    if np.any(x1 < 0.0) or np.any(x1 > 1.0):
        raise ValueError("x1 must lie in [0, 1]")
    gap = eps * geometry.h1(x1)
    if geometry.roughness is not None:
        gap = gap + eps**2 * geometry.roughness(x1 / eps**2)
    return gap if gap.ndim else float(gap)

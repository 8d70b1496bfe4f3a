"""Closed-form spectral solution of a high-order linear smoothing PDE.

The evolution  du/dt = sum_j (-1)^(j+1) d_j laplacian^j u + eps (X - u)
diagonalizes over the transform of the initial field X: each bin evolves
independently, and at time t the bin gain is

    L(w^2) = exp(-(P + eps) t) + eps/(P + eps) * (1 - exp(-(P + eps) t)),
    P = sum_{j=1..m} d_j (w^2)^j,

with the second term read as its limit 0 when eps = 0. L(0) = 1 for every
eps >= 0, so the field mean is preserved, and L is nonincreasing in w^2
whenever all d_j >= 0, which is what makes this a low pass.

Unit bookkeeping: w carries rad per length unit, so d_j t carries
(length)^(2j). Propagation times are therefore pure knob values tied to
the wavenumber convention and the grid spacing; the same nominal t
smooths far more aggressively on a coarse grid than published figures
produced under per-sample frequency conventions. d_j stays configurable
for exactly that reason (see the README note on reproducing
monotonicity sweeps, which use d_m = spacing^(2m)).

Exponent evaluation is clamped at 745 (exp(-745) is the float64 denormal
floor); beyond it the decay factor is exactly 0. The high-order symbol
(w^2)^m at Nyquist with large t exceeds that long before any float
overflows, so the clamp is the honest limit value, not a fudge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cft import MultivectorField3, cft3_forward, cft3_inverse
from .grids import ScalarField3, SpectralGrid

# exp(-x) stays a normal double up to x ~ 708.4; past that the gain is
# indistinguishable from zero, so clamp there and avoid underflow flags
_EXP_CLAMP = 708.0

DEFAULT_HALF_ORDER = 6  # PDE order 2m = 12


def default_coefficients(m: int = DEFAULT_HALF_ORDER) -> tuple[float, ...]:
    """Single highest-order term: d_j = 0 for j < m, d_m = 1."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return (0.0,) * (m - 1) + (1.0,)


@dataclass(frozen=True)
class FilterParams:
    """Half-order m (PDE order 2m), coefficients d_1..d_m, fidelity eps, time t."""

    m: int
    d: tuple[float, ...]
    epsilon: float
    t: float

    def __post_init__(self):
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "d", tuple(float(v) for v in self.d))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "t", float(self.t))
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if len(self.d) != self.m:
            raise ValueError(f"need m={self.m} coefficients, got {len(self.d)}")
        if any(v < 0 or not np.isfinite(v) for v in self.d):
            raise ValueError(f"coefficients must be finite and >= 0, got {self.d}")
        if not any(v > 0 for v in self.d):
            raise ValueError("at least one diffusion coefficient must be positive")
        if self.epsilon < 0 or not np.isfinite(self.epsilon):
            raise ValueError(f"epsilon must be finite and >= 0, got {self.epsilon}")
        if not (self.t > 0 and np.isfinite(self.t)):
            raise ValueError(f"t must be positive and finite, got {self.t}")

    @classmethod
    def single_term(
        cls,
        t: float,
        m: int = DEFAULT_HALF_ORDER,
        d_m: float = 1.0,
        epsilon: float = 0.0,
    ) -> "FilterParams":
        d = list(default_coefficients(m))
        d[-1] = float(d_m)
        return cls(m=m, d=tuple(d), epsilon=epsilon, t=t)


def _symbol_poly(params: FilterParams, w2: np.ndarray) -> np.ndarray:
    # Horner over P(w2) = d_1 w2 + d_2 w2^2 + ... + d_m w2^m
    p = np.zeros_like(w2)
    for dj in reversed(params.d):
        p = (p + dj) * w2
    return p


def frequency_response(params: FilterParams, w2) -> np.ndarray | float:
    """Bin gain L at squared angular wavenumber w2 (scalar or array), in (0, 1].

    Exactly 1 at w2 = 0; nonincreasing in w2; for eps = 0 it is the pure
    decay exp(-P t) and composes multiplicatively over t (semigroup). For
    eps > 0 the response floors at eps/(P + eps) instead of reaching 0,
    and the semigroup identity genuinely fails.
    """
    w2_arr = np.asarray(w2, dtype=np.float64)
    if np.any(w2_arr < 0):
        raise ValueError("w2 must be nonnegative")
    p = _symbol_poly(params, w2_arr)
    exponent = (p + params.epsilon) * params.t
    decay = np.where(
        exponent > _EXP_CLAMP, 0.0, np.exp(-np.minimum(exponent, _EXP_CLAMP))
    )
    if params.epsilon > 0:
        resp = decay + params.epsilon / (p + params.epsilon) * (1.0 - decay)
        resp = np.where(w2_arr == 0.0, 1.0, resp)  # exact limit at DC
    else:
        resp = decay
    if np.isscalar(w2) or w2_arr.ndim == 0:
        return float(resp)
    return resp


def _require_finite(X: ScalarField3):
    if not X.is_finite():
        raise ValueError("field contains NaN or Inf")


def lowpass_apply(X: ScalarField3, params: FilterParams) -> ScalarField3:
    """Filter a periodic scalar field: transform, scale every bin by L, invert.

    The field enters the transform embedded in the scalar channel of a
    multivector field. The mean (DC bin) is preserved exactly up to
    rounding because L(0) = 1.
    """
    _require_finite(X)
    spectrum = cft3_forward(MultivectorField3.from_scalar_field(X))
    return lowpass_from_spectrum(spectrum, params)


def lowpass_from_spectrum(
    spectrum: MultivectorField3, params: FilterParams
) -> ScalarField3:
    """Apply the bin gains to an already-computed forward spectrum.

    Sweeping many propagation times over one input only needs the forward
    transform once; this entry point is bit-identical to lowpass_apply on
    the original field because it performs the same operations on the
    same spectrum values.
    """
    sgrid = SpectralGrid.from_grid(spectrum.grid)
    gain = frequency_response(params, sgrid.w2())
    filtered = MultivectorField3(spectrum.grid, spectrum.data * gain[..., None])
    return cft3_inverse(filtered).scalar_part()


@dataclass(frozen=True)
class ModeDecomposition:
    """Low-pass modes plus the final residue of the peel-off recursion.

    modes[k] is the low pass of the k-th residue; the next residue is the
    input minus all modes extracted so far. Summing every mode and the
    final residue reconstructs the input (the recursion telescopes).
    """

    modes: tuple[ScalarField3, ...]
    final_residue: ScalarField3
    params: tuple[FilterParams, ...]

    def reconstruct(self) -> ScalarField3:
        total = self.final_residue.values.copy()
        for mode in self.modes:
            total = total + mode.values
        return ScalarField3(self.final_residue.grid, total)


def mode_decompose(
    X: ScalarField3,
    passes: int,
    params: FilterParams | Sequence[FilterParams],
) -> ModeDecomposition:
    """Extract `passes` low-pass modes, each from the residue of the last.

    params may be a single FilterParams (reused each pass) or one per pass.
    """
    K = int(passes)
    if K < 1:
        raise ValueError(f"passes must be >= 1, got {passes}")
    if isinstance(params, FilterParams):
        per_pass = (params,) * K
    else:
        per_pass = tuple(params)
        if len(per_pass) != K:
            raise ValueError(f"need {K} parameter sets, got {len(per_pass)}")
    _require_finite(X)
    modes = []
    residue = X
    for p in per_pass:
        mode = lowpass_apply(residue, p)
        modes.append(mode)
        residue = ScalarField3(X.grid, residue.values - mode.values)
    return ModeDecomposition(
        modes=tuple(modes), final_residue=residue, params=per_pass
    )


def highband_energy(X: ScalarField3, w2_threshold: float) -> float:
    """Spectral energy above a squared-wavenumber threshold.

    Sum of |X_hat|^2 over bins with w^2 > w2_threshold, under the
    unnormalized forward transform. A scalar field only populates the
    scalar channel, so this is the plain FFT energy of the values.
    Useful as a smoothness diagnostic: filtering with growing t drives
    it down monotonically.
    """
    if not w2_threshold > 0:
        raise ValueError(f"w2_threshold must be positive, got {w2_threshold}")
    _require_finite(X)
    sgrid = SpectralGrid.from_grid(X.grid)
    spectrum = np.fft.fftn(X.values)
    band = sgrid.w2() > w2_threshold
    return float(np.sum(np.abs(spectrum[band]) ** 2))

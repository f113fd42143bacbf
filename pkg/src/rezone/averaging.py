"""Resonance detection, degeneracy order, averaged coefficients by quadrature,
resonance classification, Hamiltonian identity checks, and the reduction of
harmonic cases to zone parameters.

Conventions: the unperturbed angle is theta, the forcing phase is phi, both
2*pi-periodic. At a (p, q) resonance the slow angle is v = theta - q*phi/p and
the averaged coefficient functions of v have common period 2*pi/p.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import DegeneracyOrderError, HarmonicReductionError
from .zone_model import TWO_PI, ZoneParameters


@dataclass(frozen=True)
class FrequencyProfile:
    """Unperturbed frequency omega(I) on a closed action interval, with the
    forcing frequency nu."""

    omega: Callable[[float], float]
    i_range: tuple[float, float]
    nu: float

    def __post_init__(self):
        if self.nu <= 0:
            raise ValueError("nu must be positive")
        lo, hi = self.i_range
        if not lo < hi:
            raise ValueError("i_range must be a nondegenerate interval")


@dataclass(frozen=True)
class ResonanceSpec:
    """A detected resonance level with its degeneracy data.

    s = 1/(1+j) is the zone-width exponent; bj, bj1 are the leading Taylor
    coefficients omega^(k)(I_pq)/k! for k = j, j+1.
    """

    p: int
    q: int
    i_pq: float
    j: int
    bj: float
    bj1: float

    def __post_init__(self):
        if math.gcd(self.p, self.q) != 1:
            raise ValueError("p and q must be co-prime")
        if self.j < 1:
            raise ValueError("degeneracy order must be >= 1")

    @property
    def s(self) -> float:
        return 1.0 / (1.0 + self.j)


@dataclass(frozen=True)
class PerturbationSpec:
    """Perturbation components in action-angle form.

    f and g map (I, theta, phi) to the action and angle forcing terms; both
    must be 2*pi-periodic in theta and phi.
    """

    f: Callable[[float, np.ndarray, np.ndarray], np.ndarray]
    g: Callable[[float, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class AveragedCoefficients:
    """Sampled averaged coefficient functions on one period of the slow angle.

    a0 = a0_tilde + b0 pointwise, p0 = p0_tilde + b1; the tilde parts have
    zero grid mean.
    """

    v_grid: np.ndarray
    a0: np.ndarray
    p0: np.ndarray
    q0: np.ndarray
    b0: float
    b1: float
    a0_tilde: np.ndarray
    p0_tilde: np.ndarray
    p: int

    def __post_init__(self):
        for name, tilde in (("a0_tilde", self.a0_tilde), ("p0_tilde", self.p0_tilde)):
            mean = abs(float(np.mean(tilde)))
            if mean > 1e-12:
                raise ValueError(f"{name} mean {mean:.2e} exceeds 1e-12")
        if not np.allclose(self.a0, self.a0_tilde + self.b0, rtol=0, atol=1e-12):
            raise ValueError("a0 != a0_tilde + b0")


class ResonanceClass(Enum):
    PASSABLE = "PASSABLE"
    PARTIALLY_PASSABLE = "PARTIALLY_PASSABLE"
    NON_PASSABLE = "NON_PASSABLE"
    AMBIGUOUS = "AMBIGUOUS"


@dataclass(frozen=True)
class IdentityReport:
    """Residuals of the Hamiltonian-perturbation identities."""

    max_identity_residual: float
    b0_abs: float
    b1_abs: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return (
            self.max_identity_residual < self.tolerance
            and self.b0_abs < self.tolerance
            and self.b1_abs < self.tolerance
        )


@dataclass(frozen=True)
class HarmonicReduction:
    """Zone parameters produced by the single-harmonic reduction, together
    with the extracted harmonic amplitudes."""

    zone: ZoneParameters
    a_p1: float
    c_p1: float
    d_p1: float


# --- resonance levels ---------------------------------------------------------

def _coprime_pairs(p_max: int, q_max: int) -> list[tuple[int, int]]:
    return [
        (p, q)
        for p in range(1, p_max + 1)
        for q in range(1, q_max + 1)
        if math.gcd(p, q) == 1
    ]


def _bisect(f, lo: float, hi: float, flo: float, iterations: int = 200) -> float:
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if flo * fm <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
        if hi - lo <= 1e-16 * max(1.0, abs(lo)):
            break
    return 0.5 * (lo + hi)


def _refine_extremum(f, lo: float, hi: float, iterations: int = 200) -> float:
    """Golden-section refinement of a local extremum of |f|."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = abs(f(x1)), abs(f(x2))
    for _ in range(iterations):
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = abs(f(x1))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = abs(f(x2))
        if hi - lo <= 1e-15 * max(1.0, abs(lo)):
            break
    return 0.5 * (lo + hi)


def find_resonance_levels(
    profile: FrequencyProfile,
    p_max: int,
    q_max: int,
    *,
    scan_points: int = 2048,
    residual_tol: float = 1e-12,
    deriv_tol: float = 1e-6,
) -> list[ResonanceSpec]:
    """Locate all resonance levels omega(I) = (q/p)*nu for co-prime (p, q).

    Roots are found by sign-change bisection on a scan grid; tangential roots
    (no sign change) are recovered by refining local minima of the residual
    and accepting those below ``residual_tol``. Each root carries the
    degeneracy data from :func:`degeneracy_order`; roots where that fails at
    scan resolution are reported with j taken from the failure (skipped with
    a warning entry would hide them, so the error propagates).
    """
    if p_max < 1 or q_max < 1:
        raise ValueError("p_max and q_max must be >= 1")
    lo, hi = profile.i_range
    grid = np.linspace(lo, hi, scan_points + 1)
    found: list[ResonanceSpec] = []
    for p, q in _coprime_pairs(p_max, q_max):
        target = q * profile.nu / p

        def g(i: float) -> float:
            return profile.omega(i) - target

        vals = np.array([g(i) for i in grid])
        roots: list[float] = []
        for i in range(scan_points):
            if vals[i] == 0.0:
                roots.append(float(grid[i]))
            elif vals[i] * vals[i + 1] < 0.0:
                roots.append(_bisect(g, float(grid[i]), float(grid[i + 1]), float(vals[i])))
        if vals[-1] == 0.0:
            roots.append(float(grid[-1]))
        # tangential roots: interior local minima of |g| that reach ~0.
        # |g|-minimization only localizes a double root to sqrt(tol), so the
        # candidate is polished by bisecting the derivative's sign change.
        absvals = np.abs(vals)
        spacing_scan = (hi - lo) / scan_points
        for i in range(1, scan_points):
            if absvals[i] <= absvals[i - 1] and absvals[i] <= absvals[i + 1]:
                if vals[i - 1] * vals[i + 1] > 0.0 and absvals[i] < math.sqrt(residual_tol):
                    root = _refine_extremum(g, float(grid[i - 1]), float(grid[i + 1]))
                    step = 1e-6 * max(1.0, abs(root))

                    def dg(x: float) -> float:
                        return (g(x + step) - g(x - step)) / (2.0 * step)

                    blo, bhi = root - spacing_scan, root + spacing_scan
                    dlo = dg(blo)
                    if dlo * dg(bhi) < 0.0:
                        root = _bisect(dg, blo, bhi, dlo)
                    if abs(g(root)) < residual_tol:
                        roots.append(root)
        spacing = (hi - lo) / scan_points
        cleaned: list[float] = []
        for r in sorted(roots):
            if abs(g(r)) > residual_tol:
                continue
            if cleaned and abs(r - cleaned[-1]) < 0.5 * spacing:
                continue
            cleaned.append(r)
        for r in cleaned:
            try:
                j, bj, bj1 = degeneracy_order(profile, r, deriv_tol=deriv_tol)
            except (ValueError, DegeneracyOrderError) as exc:
                warnings.warn(
                    f"resonance ({p},{q}) at I = {r}: degeneracy order not certified ({exc})",
                    stacklevel=2,
                )
                continue
            found.append(ResonanceSpec(p=p, q=q, i_pq=r, j=j, bj=bj, bj1=bj1))
    return found


# --- degeneracy order ---------------------------------------------------------

_CENTRAL_STENCILS: dict[int, tuple[list[float], list[float], float]] = {
    # order: (offsets, weights, h power)
    1: ([-1, 1], [-0.5, 0.5], 1),
    2: ([-1, 0, 1], [1.0, -2.0, 1.0], 2),
    3: ([-2, -1, 1, 2], [-0.5, 1.0, -1.0, 0.5], 3),
    4: ([-2, -1, 0, 1, 2], [1.0, -4.0, 6.0, -4.0, 1.0], 4),
    5: ([-3, -2, -1, 1, 2, 3], [-0.5, 2.0, -2.5, 2.5, -2.0, 0.5], 5),
}


def _central_derivative(f, x0: float, order: int, h: float) -> float:
    offsets, weights, power = _CENTRAL_STENCILS[order]
    acc = 0.0
    for o, w in zip(offsets, weights):
        acc += w * f(x0 + o * h)
    return acc / h**power


def _richardson_derivative(f, x0: float, order: int, h: float, levels: int = 3) -> float:
    """Central finite difference with Richardson extrapolation (error O(h^2)
    per level, the central stencils being even in h)."""
    table = [_central_derivative(f, x0, order, h / 2**k) for k in range(levels)]
    factor = 4.0
    while len(table) > 1:
        table = [
            (factor * table[i + 1] - table[i]) / (factor - 1.0)
            for i in range(len(table) - 1)
        ]
        factor *= 4.0
    return table[0]


def degeneracy_order(
    profile: FrequencyProfile,
    i0: float,
    *,
    deriv_tol: float = 1e-6,
    h: float | None = None,
    max_order: int = 4,
) -> tuple[int, float, float]:
    """Degeneracy order j at a resonance level and the Taylor coefficients
    (bj, bj1) = (omega^(j)/j!, omega^(j+1)/(j+1)!).

    j is the smallest order whose derivative exceeds ``deriv_tol`` while all
    lower ones fall below it. Derivatives are central differences with
    Richardson extrapolation.

    Raises
    ------
    DegeneracyOrderError
        If no j <= ``max_order`` qualifies (finite differencing is unreliable
        beyond that); the message reports the tolerance used.
    """
    lo, hi = profile.i_range
    if not lo < i0 < hi:
        raise ValueError("i0 must be interior to the action range")
    if h is None:
        # large enough that the k-th difference quotient sits far above its
        # roundoff floor eps/h^k for every k <= 5
        h = 5e-2 * max(1.0, abs(i0))
        # widest stencil reaches 3h: shrink near interval ends
        h = min(h, (i0 - lo) / 3.5, (hi - i0) / 3.5)
        if h < 1e-7 * max(1.0, abs(i0)):
            raise DegeneracyOrderError(
                f"I = {i0} is too close to the interval boundary for finite differencing"
            )
    derivs = {
        k: _richardson_derivative(profile.omega, i0, k, h) for k in range(1, max_order + 2)
    }
    for j in range(1, max_order + 1):
        if all(abs(derivs[k]) < deriv_tol for k in range(1, j)) and abs(derivs[j]) >= deriv_tol:
            bj = derivs[j] / math.factorial(j)
            bj1 = derivs[j + 1] / math.factorial(j + 1)
            return j, bj, bj1
    raise DegeneracyOrderError(
        f"no degeneracy order j <= {max_order} at I = {i0} (deriv_tol = {deriv_tol})"
    )


# --- averaged coefficients ----------------------------------------------------

def compute_averaged_coefficients(
    pert: PerturbationSpec,
    spec: ResonanceSpec,
    n_nodes: int,
    *,
    v_points: int = 256,
    di_step: float | None = None,
) -> AveragedCoefficients:
    """Averaged coefficient functions by composite trapezoid quadrature.

    Each value averages the perturbation over the forcing phase along the
    resonant combination theta = v + q*phi/p, phi in [0, 2*pi*p]. Trapezoid
    quadrature on the periodic integrand converges spectrally. The action
    derivative inside the second coefficient is a central finite difference
    with step 1e-5 * max(1, |I_pq|) (overridable via ``di_step``).

    Raises
    ------
    ValueError
        If n_nodes < 64 or odd, or a perturbation value is non-finite.
    """
    if n_nodes < 64 or n_nodes % 2 != 0:
        raise ValueError("n_nodes must be an even integer >= 64")
    p, q, i_pq = spec.p, spec.q, spec.i_pq
    if di_step is None:
        di_step = 1e-5 * max(1.0, abs(i_pq))
    v_grid = np.linspace(0.0, TWO_PI / p, v_points, endpoint=False)
    # periodic trapezoid = uniform mean over [0, 2*pi*p)
    phi = np.linspace(0.0, TWO_PI * p, n_nodes, endpoint=False)
    theta = v_grid[:, None] + q * phi[None, :] / p

    f_vals = np.asarray(pert.f(i_pq, theta, phi[None, :]), dtype=float)
    g_vals = np.asarray(pert.g(i_pq, theta, phi[None, :]), dtype=float)
    f_plus = np.asarray(pert.f(i_pq + di_step, theta, phi[None, :]), dtype=float)
    f_minus = np.asarray(pert.f(i_pq - di_step, theta, phi[None, :]), dtype=float)
    for name, arr in (("f", f_vals), ("g", g_vals), ("df", f_plus), ("df", f_minus)):
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"perturbation component {name} is non-finite at a quadrature node")

    a0 = f_vals.mean(axis=1)
    p0 = ((f_plus - f_minus) / (2.0 * di_step)).mean(axis=1)
    q0 = g_vals.mean(axis=1)
    b0 = float(a0.mean())
    b1 = float(p0.mean())
    return AveragedCoefficients(
        v_grid=v_grid,
        a0=a0,
        p0=p0,
        q0=q0,
        b0=b0,
        b1=b1,
        a0_tilde=a0 - b0,
        p0_tilde=p0 - b1,
        p=p,
    )


def _trig_interpolator(samples: np.ndarray, period: float) -> Callable[[np.ndarray], np.ndarray]:
    """Band-limited interpolant of uniform periodic samples."""
    n = len(samples)
    coeffs = np.fft.rfft(samples) / n

    def eval_at(x):
        x = np.asarray(x, dtype=float)
        omega = TWO_PI / period
        acc = np.full(x.shape, coeffs[0].real)
        for k in range(1, len(coeffs)):
            scale = 1.0 if (2 * k == n) else 2.0
            acc = acc + scale * (
                coeffs[k].real * np.cos(k * omega * x)
                - coeffs[k].imag * np.sin(k * omega * x)
            )
        return acc

    return eval_at


def classify_resonance(
    coeffs: AveragedCoefficients,
    *,
    b0_tol: float = 1e-8,
    refine_factor: int = 8,
    root_tol: float = 1e-12,
) -> ResonanceClass:
    """Classify the resonance by the roots and mean of the averaged function.

    PASSABLE when the function has no zero (strictly one sign on a refined
    grid), NON_PASSABLE when its mean is below ``b0_tol``, PARTIALLY_PASSABLE
    when it changes sign through simple roots with a nonzero mean, and
    AMBIGUOUS when a root is non-simple at grid resolution.
    """
    period = TWO_PI / coeffs.p
    interp = _trig_interpolator(coeffs.a0, period)
    fine = np.linspace(0.0, period, refine_factor * len(coeffs.v_grid), endpoint=False)
    vals = interp(fine)
    scale = float(np.max(np.abs(vals))) if len(vals) else 0.0
    zero_tol = 1e-10 * max(scale, 1e-300)
    if np.min(vals) > zero_tol or np.max(vals) < -zero_tol:
        return ResonanceClass.PASSABLE
    if abs(coeffs.b0) < b0_tol:
        return ResonanceClass.NON_PASSABLE
    # locate zeros by scan + bisection and test simplicity; grazing minima
    # (|values| within the zero band without a sign change) are tangencies
    n = len(fine)
    deriv_scale = scale / period
    xs = np.append(fine, period)
    fs = np.append(vals, vals[0])  # periodic wrap

    def slope_at(x: float) -> float:
        step = period / (1024.0 * refine_factor)
        left = float(interp(np.array([x - step]))[0])
        right = float(interp(np.array([x + step]))[0])
        return (right - left) / (2.0 * step)

    found_sign_change = False
    for i in range(n):
        x0, x1 = float(xs[i]), float(xs[i + 1])
        f0, f1 = float(fs[i]), float(fs[i + 1])
        if f0 == 0.0 or f0 * f1 < 0.0:
            found_sign_change = True
            root = _bisect(lambda x: float(interp(np.array([x]))[0]), x0, x1, f0)
            if abs(slope_at(root)) < 1e-6 * max(1.0, deriv_scale):
                return ResonanceClass.AMBIGUOUS
        elif abs(f0) <= zero_tol:
            return ResonanceClass.AMBIGUOUS
    if not found_sign_change:
        # the function grazes the zero band without crossing it
        return ResonanceClass.AMBIGUOUS
    return ResonanceClass.PARTIALLY_PASSABLE


def verify_hamiltonian_identities(
    coeffs: AveragedCoefficients, *, tolerance: float = 1e-8
) -> IdentityReport:
    """Residuals of the identities satisfied by Hamiltonian perturbations:
    the second coefficient plus the v-derivative of the third vanishes, and
    both grid means vanish. The derivative is spectral on the periodic grid.
    """
    n = len(coeffs.v_grid)
    period = TWO_PI / coeffs.p
    k = np.fft.rfftfreq(n, d=period / n) * TWO_PI  # angular wavenumbers
    dq0 = np.fft.irfft(1j * k * np.fft.rfft(coeffs.q0), n=n)
    residual = float(np.max(np.abs(coeffs.p0 + dq0)))
    return IdentityReport(
        max_identity_residual=residual,
        b0_abs=abs(coeffs.b0),
        b1_abs=abs(coeffs.b1),
        tolerance=tolerance,
    )


def _mode_amplitudes(samples: np.ndarray, p: int) -> tuple[float, float, float]:
    """(sin, cos, residual) amplitudes of the pv-mode on one period grid.

    The grid covers one period 2*pi/p, so the pv-mode is the fundamental."""
    n = len(samples)
    spec = np.fft.rfft(samples) / n
    if len(spec) < 2:
        return 0.0, 0.0, float(np.max(np.abs(samples))) if n else 0.0
    sin_amp = -2.0 * spec[1].imag
    cos_amp = 2.0 * spec[1].real
    rest = spec.copy()
    rest[1] = 0.0
    # residual leaves the mean in place; callers remove means beforehand
    recon = np.fft.irfft(rest * n, n=n)
    return float(sin_amp), float(cos_amp), float(np.max(np.abs(recon)))


def harmonic_reduction(
    coeffs: AveragedCoefficients,
    spec: ResonanceSpec,
    epsilon: float,
    *,
    deformation_b1: float = 0.0,
    mode_tol: float = 1e-8,
    identity_tol: float = 1e-8,
) -> HarmonicReduction:
    """Reduce single-harmonic averaged coefficients to zone parameters.

    Extracts the sin/cos amplitudes of the pv-mode by discrete Fourier
    projection, enforces the Hamiltonian relation c = p*d, and assembles
    the zone parameter set: a = a_p1, b = bj, mu1 = epsilon^(1/3)*c_p1,
    mu2 = caller-supplied deformation, b3 = epsilon^(1/3)*bj1.

    Raises
    ------
    HarmonicReductionError
        If q != 1, j != 2, a coefficient function is not dominated by the
        single pv-mode, or c != p*d beyond tolerance.
    """
    if spec.q != 1:
        raise HarmonicReductionError(f"harmonic reduction requires q = 1, got q = {spec.q}")
    if spec.j != 2:
        raise HarmonicReductionError(f"harmonic reduction requires j = 2, got j = {spec.j}")
    p = spec.p

    def dominant(samples: np.ndarray, want: str, name: str) -> float:
        if float(np.max(np.abs(samples))) < 1e-12:
            return 0.0
        sin_amp, cos_amp, rest = _mode_amplitudes(samples, p)
        main = sin_amp if want == "sin" else cos_amp
        off = cos_amp if want == "sin" else sin_amp
        if max(abs(off), rest) > mode_tol * max(abs(main), 1e-300):
            raise HarmonicReductionError(
                f"{name} is not a single {want}(p v) harmonic "
                f"(main {main:.3e}, off {off:.3e}, residual {rest:.3e})"
            )
        return main

    a_p1 = dominant(coeffs.a0_tilde, "sin", "first averaged coefficient")
    c_p1 = dominant(coeffs.p0_tilde, "sin", "second averaged coefficient")
    d_p1 = dominant(coeffs.q0 - float(np.mean(coeffs.q0)), "cos", "third averaged coefficient")
    if abs(c_p1 - p * d_p1) > identity_tol * max(1.0, abs(c_p1)):
        raise HarmonicReductionError(
            f"harmonic amplitudes violate c = p*d: c = {c_p1:.6e}, p*d = {p * d_p1:.6e}"
        )
    scale = epsilon ** (1.0 / 3.0)
    # a next-order coefficient below the vanishing threshold used by the
    # degeneracy classification is finite-difference noise, not a cubic term
    bj1 = spec.bj1 if abs(spec.bj1) > 1e-7 * max(1.0, abs(spec.bj)) else 0.0
    zone = ZoneParameters(
        a=a_p1,
        b=spec.bj,
        p=p,
        mu1=scale * c_p1,
        mu2=deformation_b1,
        b3=scale * bj1,
    )
    return HarmonicReduction(zone=zone, a_p1=a_p1, c_p1=c_p1, d_p1=d_p1)

"""Resolvent estimate on a flat torus, checked with a Fourier solve.

On ``R = [0, l] x [0, a]`` with periodic boundary conditions we solve
``(Delta - lam**2) w = f + d/dx g`` where ``Delta = -(d_xx + d_yy)`` is the
nonnegative Laplacian, then compare ``||w||**2`` with
``||f||**2 + ||g||**2 + ||w||**2`` restricted to the band ``[0, l] x omega_y``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ResonanceSingular(ArithmeticError):
    pass


@dataclass
class ConstantEstimate:
    lam: float
    ratio: float
    norm_w: float
    norm_f: float
    norm_g: float
    norm_w_omega: float
    kernel_norm: float      # size of the data component on resonant modes
    n: int


def band_weights(n: int, a: float, omega_y) -> np.ndarray:
    """Fraction of each of ``n`` equal y-cells of ``[0, a)`` lying inside ``omega_y``.

    Cells are centred on the grid points ``j*a/n``.
    """
    lo, hi = omega_y
    dy = a / n
    centres = np.arange(n) * dy
    left = centres - dy / 2
    right = centres + dy / 2
    w = np.zeros(n)
    for shift in (-a, 0.0, a):
        w += np.clip(np.minimum(right, hi + shift) - np.maximum(left, lo + shift), 0, None)
    return w / dy


def estimate_ratio(w, f, g, l: float, a: float, omega_y) -> float:
    """Empirical constant ``||w||^2 / (||f||^2 + ||g||^2 + ||w||^2_omega)`` from grid samples."""
    w, f, g = (np.asarray(x) for x in (w, f, g))
    ny = w.shape[1]
    cell = (l / w.shape[0]) * (a / ny)
    nw = float(np.sum(np.abs(w) ** 2)) * cell
    nf = float(np.sum(np.abs(f) ** 2)) * cell
    ng = float(np.sum(np.abs(g) ** 2)) * cell
    wy = band_weights(ny, a, omega_y)
    nwo = float(np.sum(np.abs(w) ** 2 * wy[None, :])) * cell
    den = nf + ng + nwo
    if den == 0:
        return math.inf if nw > 0 else 0.0
    return nw / den


def _wavenumbers(n: int, length: float) -> np.ndarray:
    return 2 * math.pi * np.fft.fftfreq(n, d=length / n)


def solve_torus(f, g, l: float, a: float, lam: float, on_resonance: str = "complement",
                rel_tol: float = 1e-12):
    """Periodic solution of ``(Delta - lam^2) w = f + d_x g``.

    Modes with ``|k|^2 == lam^2`` (to ``rel_tol``) form the kernel.  With
    ``on_resonance="complement"`` they are dropped and the size of the data
    on them is returned; ``"raise"`` raises :class:`ResonanceSingular` if the
    data has a nonzero component there.  Returns ``(w, kernel_norm)``.
    """
    f = np.asarray(f, float)
    g = np.asarray(g, float)
    nx, ny = f.shape
    kx = _wavenumbers(nx, l)[:, None]
    ky = _wavenumbers(ny, a)[None, :]
    rhs = np.fft.fft2(f) + 1j * kx * np.fft.fft2(g)
    sym = kx ** 2 + ky ** 2 - lam ** 2
    kernel = np.abs(sym) <= rel_tol * max(lam ** 2, 1.0)
    kernel_norm = 0.0
    if kernel.any():
        kernel_norm = float(np.sqrt(np.sum(np.abs(rhs[kernel]) ** 2) * l * a) / (nx * ny))
        data_norm = float(np.sqrt(np.sum(np.abs(rhs) ** 2) * l * a) / (nx * ny))
        # FFT roundoff leaves ~1e-16 relative residue on modes the data misses
        if kernel_norm <= 1e-12 * data_norm:
            kernel_norm = 0.0
        if on_resonance == "raise" and kernel_norm > 0:
            raise ResonanceSingular(f"lambda^2 = {lam ** 2} hits {int(kernel.sum())} torus modes")
    safe = np.where(kernel, 1.0, sym)
    what = np.where(kernel, 0.0, rhs / safe)
    w = np.real(np.fft.ifft2(what))
    return w, kernel_norm


def bz_estimate_check(l: float, a: float, lam: float, f, g, omega_y,
                      on_resonance: str = "complement") -> ConstantEstimate:
    """Solve on the torus and report the empirical constant for this instance."""
    w, kn = solve_torus(f, g, l, a, lam, on_resonance)
    f = np.asarray(f, float)
    g = np.asarray(g, float)
    n = f.shape[0]
    cell = (l / f.shape[0]) * (a / f.shape[1])
    wy = band_weights(f.shape[1], a, omega_y)
    return ConstantEstimate(
        lam=float(lam),
        ratio=estimate_ratio(w, f, g, l, a, omega_y),
        norm_w=math.sqrt(float(np.sum(w ** 2)) * cell),
        norm_f=math.sqrt(float(np.sum(f ** 2)) * cell),
        norm_g=math.sqrt(float(np.sum(g ** 2)) * cell),
        norm_w_omega=math.sqrt(float(np.sum(w ** 2 * wy[None, :])) * cell),
        kernel_norm=kn,
        n=n,
    )


def random_band_limited(n: int, l: float, a: float, rng, k_max: int = 32) -> np.ndarray:
    """Real trigonometric polynomial with random coefficients up to frequency ``k_max``.

    The same generator state gives the same function at any grid size
    ``n > 2*k_max``, so refinement studies see identical data.
    """
    if n <= 2 * k_max:
        raise ValueError("grid too coarse for the requested band")
    m = np.arange(-k_max, k_max + 1)
    coef = (rng.standard_normal((len(m), len(m))) + 1j * rng.standard_normal((len(m), len(m))))
    coef /= (1 + m[:, None] ** 2 + m[None, :] ** 2)
    x = np.arange(n) * l / n
    y = np.arange(n) * a / n
    ex = np.exp(2j * math.pi * np.outer(x, m) / l)
    ey = np.exp(2j * math.pi * np.outer(m, y) / a)
    return np.real(ex @ coef @ ey)


def sweep(l: float, a: float, lambdas, omega_y, n: int, seed: int = 0, k_max: int = 32,
          workers: int = 1) -> list[ConstantEstimate]:
    """Run the check for each ``lam`` with fresh seeded data per instance."""
    root = np.random.default_rng(seed)
    seeds = root.integers(0, 2 ** 63 - 1, size=(len(lambdas), 2))

    def one(i):
        f = random_band_limited(n, l, a, np.random.default_rng(int(seeds[i, 0])), k_max)
        g = random_band_limited(n, l, a, np.random.default_rng(int(seeds[i, 1])), k_max)
        return bz_estimate_check(l, a, float(lambdas[i]), f, g, omega_y)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, range(len(lambdas))))
    return [one(i) for i in range(len(lambdas))]

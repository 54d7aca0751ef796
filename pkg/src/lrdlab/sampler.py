"""Exact Gaussian path synthesis by circulant embedding of the ACVF.

The Toeplitz covariance of lags 0..N-1 embeds in a circulant matrix of
size 2(N-1) whose eigenvalues are the FFT of its first row; a draw is one
inverse FFT of independent complex normals weighted by the eigenvalue
square roots.  The generator is counter-based, so identical (spec, seed,
N) reproduce bit-for-bit and batch seeds expand deterministically into
per-path seeds.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .covariance_engine import AcvfTable, acvf
from .errors import ConvergenceError, DomainError
from .kernel_special import Tolerance
from .process_model import ProcessSpec

__all__ = ["SamplePath", "sample", "sample_many", "empirical_acvf"]

_LOG = logging.getLogger(__name__)

_SEED_BOUND = 2**64

# Eigenvalues at or above -NEGLIGIBLE * max are rounded up silently;
# padding retries trigger below that, and anything still below
# -SEVERE * max afterwards is an error rather than a silent clip.
_NEGLIGIBLE = 1e-10
_SEVERE = 1e-4
_MAX_RETRIES = 3


def _check_seed(seed) -> int:
    s = int(seed)
    if s != seed or not (0 <= s < _SEED_BOUND):
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return s


@dataclass(frozen=True)
class SamplePath:
    """One exact zero-mean Gaussian draw of a spec's covariance."""

    spec: ProcessSpec
    seed: int
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "seed", _check_seed(self.seed))

    @property
    def n(self) -> int:
        return len(self.values)


def _first_row(table: AcvfTable, m: int) -> np.ndarray:
    half = table.values[: m // 2 + 1]
    return np.concatenate([half, half[-2:0:-1]])


def _embedding(table: AcvfTable, tol: Tolerance) -> tuple[np.ndarray, int]:
    # Eigenvalues of the circulant embedding, padding to powers of two
    # while the spectrum has meaningfully negative entries.
    m = max(2, 2 * table.n_max)
    attempt = 0
    while True:
        table.extend(m // 2)
        lam = np.fft.rfft(_first_row(table, m)).real
        top = float(lam.max())
        worst = float(lam.min())
        if worst >= -_NEGLIGIBLE * top:
            return np.maximum(lam, 0.0), m
        if attempt < _MAX_RETRIES:
            attempt += 1
            m = 1 << m.bit_length()
            continue
        if worst < -_SEVERE * top:
            raise ConvergenceError(
                f"embedding spectrum stays negative (min {worst:.3e} against max "
                f"{top:.3e}) after padding to {m}; a larger sample length may embed cleanly"
            )
        _LOG.warning(
            "clipping negative embedding eigenvalues (min %.3e of max %.3e) at size %d",
            worst,
            top,
            m,
        )
        return np.maximum(lam, 0.0), m


def _draw(lam: np.ndarray, m: int, n: int, seed: int) -> np.ndarray:
    # Hermitian half-spectrum with E|W_k|^2 = lam_k; the draw consumes
    # exactly m normals in a fixed layout, so it is reproducible.
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    z = rng.standard_normal(m)
    k = m // 2
    root = np.sqrt(lam)
    w = np.empty(k + 1, dtype=np.complex128)
    w[0] = root[0] * z[0]
    w[k] = root[k] * z[1]
    w[1:k] = (math.sqrt(0.5) * root[1:k]) * (z[2::2] + 1j * z[3::2])
    return np.fft.irfft(w, n=m)[:n] * math.sqrt(m)


def sample(spec: ProcessSpec, N: int, seed, *, tol: Tolerance = Tolerance()) -> SamplePath:
    """Draw one zero-mean Gaussian path with covariance gamma(0..N-1).

    The embedding uses size max(2, 2(N-1)); a spectrum with negative
    entries beyond the rounding scale is padded to the next power of two
    (up to three times), then mildly negative leftovers are clipped with a
    logged warning and strongly negative ones raise.
    """
    n = int(N)
    if n != N or n < 2:
        raise DomainError(f"N must be an integer >= 2, got {N!r}")
    s = _check_seed(seed)
    lam, m = _embedding(acvf(spec, n - 1, tol), tol)
    return SamplePath(spec=spec, seed=s, values=_draw(lam, m, n, s))


def _worker_count(count: int) -> int:
    env = os.environ.get("LRD_LAB_THREADS")
    if env is not None:
        try:
            cap = int(env)
        except ValueError as exc:
            raise DomainError(f"LRD_LAB_THREADS must be an integer, got {env!r}") from exc
        if cap < 1:
            raise DomainError(f"LRD_LAB_THREADS must be positive, got {cap}")
    else:
        cap = min(4, os.cpu_count() or 1)
    return max(1, min(cap, count))


def sample_many(
    spec: ProcessSpec, N: int, seed, count: int, *, tol: Tolerance = Tolerance()
) -> list[SamplePath]:
    """Draw independent paths; the batch seed expands into per-path seeds.

    Path i uses the i-th state of the seed sequence spawned from ``seed``,
    so results do not depend on scheduling and each returned path equals
    sample(spec, N, path.seed) bit-for-bit.  Parallelism is capped by the
    LRD_LAB_THREADS environment variable.
    """
    c = int(count)
    if c != count or c < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    n = int(N)
    if n != N or n < 2:
        raise DomainError(f"N must be an integer >= 2, got {N!r}")
    seeds = np.random.SeedSequence(_check_seed(seed)).generate_state(c, np.uint64)
    lam, m = _embedding(acvf(spec, n - 1, tol), tol)

    def one(i: int) -> SamplePath:
        s = int(seeds[i])
        return SamplePath(spec=spec, seed=s, values=_draw(lam, m, n, s))

    workers = _worker_count(c)
    if workers == 1:
        return [one(i) for i in range(c)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(c)))


def empirical_acvf(paths, lags) -> tuple[np.ndarray, np.ndarray]:
    """Cross-path mean and standard error of the unbiased ACVF estimator.

    Uses the known zero mean: gamma_hat(k) = sum_t x_t x_(t+k) / (N - k)
    per path; the standard error is the cross-path sample deviation of
    those estimates divided by sqrt(number of paths).
    """
    arr = np.stack([p.values for p in paths])
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise DomainError("need at least two paths")
    n = arr.shape[1]
    means = []
    errors = []
    for lag in lags:
        k = int(lag)
        if k != lag or not (0 <= k < n):
            raise DomainError(f"lag must be an integer in [0, {n}), got {lag!r}")
        per_path = np.einsum("ij,ij->i", arr[:, : n - k], arr[:, k:]) / (n - k)
        means.append(float(per_path.mean()))
        errors.append(float(per_path.std(ddof=1) / math.sqrt(arr.shape[0])))
    return np.array(means), np.array(errors)

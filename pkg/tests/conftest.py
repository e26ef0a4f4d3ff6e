"""Shared independent oracles used across the test suite.

Everything here deliberately avoids the package's own computation paths:
distances are haversine on the sphere or dense double loops, statistics are
evaluated from dense weight matrices with the general (not symmetry-reduced)
formulas.
"""

from __future__ import annotations

import math

import numpy as np

from esmspots import GeoPoint

EARTH_RADIUS_M = 6_371_000.0


def haversine_m(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters."""
    phi1 = math.radians(a.lat)
    phi2 = math.radians(b.lat)
    dphi = math.radians(b.lat - a.lat)
    dlam = math.radians(b.lon - a.lon)
    s = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(math.sqrt(s))


def brute_radius_ids(coords: np.ndarray, i: int, r: float) -> np.ndarray:
    """Exhaustive scan version of a radius query (ids sorted)."""
    dx = coords[:, 0] - coords[i, 0]
    dy = coords[:, 1] - coords[i, 1]
    return np.nonzero(dx * dx + dy * dy <= r * r)[0]


def brute_nn_distances(coords: np.ndarray) -> np.ndarray:
    """O(n^2) nearest-neighbor distances."""
    n = coords.shape[0]
    out = np.empty(n)
    for i in range(n):
        d2 = ((coords - coords[i]) ** 2).sum(axis=1)
        d2[i] = np.inf
        out[i] = math.sqrt(d2.min())
    return out


def dense_band_weights(coords: np.ndarray, band: float, include_self: bool) -> np.ndarray:
    """Dense binary weight matrix for a fixed distance band."""
    n = coords.shape[0]
    dx = coords[:, None, 0] - coords[None, :, 0]
    dy = coords[:, None, 1] - coords[None, :, 1]
    w = (dx * dx + dy * dy <= band * band).astype(float)
    if not include_self:
        np.fill_diagonal(w, 0.0)
    return w


def moran_oracle(values: np.ndarray, w: np.ndarray) -> tuple[float, float, float]:
    """(I, E[I], Var_randomization[I]) from a dense weight matrix, using the
    general S1/S2 definitions rather than binary-symmetric shortcuts."""
    x = np.asarray(values, dtype=float)
    n = x.size
    z = x - x.mean()
    s0 = w.sum()
    i_value = n / s0 * float(z @ w @ z) / float(z @ z)
    s1 = 0.5 * float(((w + w.T) ** 2).sum())
    s2 = float(((w.sum(axis=1) + w.sum(axis=0)) ** 2).sum())
    b2 = n * float((z**4).sum()) / float((z**2).sum()) ** 2
    ei = -1.0 / (n - 1)
    a = n * ((n * n - 3 * n + 3) * s1 - n * s2 + 3 * s0 * s0)
    b = b2 * ((n * n - n) * s1 - 2 * n * s2 + 6 * s0 * s0)
    var = (a - b) / ((n - 1) * (n - 2) * (n - 3) * s0 * s0) - ei * ei
    return i_value, ei, var


def moran_permutation_sims(
    values: np.ndarray, w: np.ndarray, n_perm: int, rng: np.random.Generator
) -> np.ndarray:
    """Moran's I under random relabeling of the values over the points."""
    x = np.asarray(values, dtype=float)
    n = x.size
    z = x - x.mean()
    s0 = w.sum()
    denom = float(z @ z)
    tiles = rng.permuted(np.tile(z, (n_perm, 1)), axis=1)
    return n / s0 * ((tiles @ w) * tiles).sum(axis=1) / denom


def gi_star_oracle(values: np.ndarray, coords: np.ndarray, band: float) -> np.ndarray:
    """Index-free Gi* z-scores: dense distances, literal textbook formula."""
    x = np.asarray(values, dtype=float)
    n = x.size
    xbar = x.mean()
    s = math.sqrt(float((x**2).mean()) - xbar**2)
    z = np.empty(n)
    for i in range(n):
        d2 = ((coords - coords[i]) ** 2).sum(axis=1)
        w = (d2 <= band * band).astype(float)
        wi = w.sum()
        den = s * math.sqrt((n * wi - wi * wi) / (n - 1))
        z[i] = 0.0 if den == 0 else (float((w * x).sum()) - xbar * wi) / den
    return z


def random_geopoints(rng: np.random.Generator, n: int, span_deg: float = 0.1) -> list[GeoPoint]:
    """Random points in a small mid-latitude window (city-scale extents)."""
    lats = 50.0 + rng.uniform(-span_deg, span_deg, n)
    lons = 8.0 + rng.uniform(-span_deg, span_deg, n)
    return [GeoPoint(float(a), float(b)) for a, b in zip(lats, lons)]

"""Planar Poisson point process geometry for the network model.

The leader sits at the origin.  Followers live in a disk around it,
jammers in an annulus, both as homogeneous PPPs.  Radial sampling uses
inverse-CDF transforms so that area elements are uniform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DiskRegion",
    "AnnulusRegion",
    "Deployment",
    "sample_ppp",
    "uniform_disk_points",
    "disk_radii",
    "annulus_radii",
    "link_distances",
    "distance_pdf",
]


@dataclass(frozen=True)
class DiskRegion:
    """Disk of given radius centered on the origin."""

    radius: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.radius) and self.radius > 0.0):
            raise ValueError(f"disk radius must be positive and finite, got {self.radius}")

    @property
    def area(self) -> float:
        return math.pi * self.radius * self.radius


@dataclass(frozen=True)
class AnnulusRegion:
    """Annulus z1 <= r < z2 centered on the origin (z1 may be 0)."""

    inner: float
    outer: float

    def __post_init__(self) -> None:
        ok = (
            math.isfinite(self.inner)
            and math.isfinite(self.outer)
            and 0.0 <= self.inner < self.outer
        )
        if not ok:
            raise ValueError(
                f"annulus needs 0 <= inner < outer, got ({self.inner}, {self.outer})"
            )

    @property
    def area(self) -> float:
        return math.pi * (self.outer * self.outer - self.inner * self.inner)


def disk_radii(region: DiskRegion, n: int, rng: np.random.Generator) -> np.ndarray:
    """Radii of n points uniform over the disk (sqrt transform)."""
    return region.radius * np.sqrt(rng.random(n))


def annulus_radii(region: AnnulusRegion, n: int, rng: np.random.Generator) -> np.ndarray:
    """Radii of n points uniform over the annulus."""
    lo2 = region.inner * region.inner
    hi2 = region.outer * region.outer
    return np.sqrt(lo2 + rng.random(n) * (hi2 - lo2))


def _attach_angles(r: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    theta = rng.uniform(0.0, 2.0 * math.pi, r.size)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def sample_ppp(
    intensity: float,
    region: DiskRegion | AnnulusRegion,
    rng: np.random.Generator,
) -> np.ndarray:
    """One realization of a homogeneous PPP on the region.

    Returns an (n, 2) array of planar points; n is Poisson with mean
    intensity * area and may be zero.
    """
    if not isinstance(region, (DiskRegion, AnnulusRegion)):
        raise TypeError(f"unsupported region type {type(region).__name__}")
    if not (math.isfinite(intensity) and intensity >= 0.0):
        raise ValueError(f"intensity must be >= 0 and finite, got {intensity}")
    n = int(rng.poisson(intensity * region.area))
    if n == 0:
        return np.empty((0, 2))
    if isinstance(region, DiskRegion):
        r = disk_radii(region, n, rng)
    else:
        r = annulus_radii(region, n, rng)
    return _attach_angles(r, rng)


def uniform_disk_points(n: int, region: DiskRegion, rng: np.random.Generator) -> np.ndarray:
    """Exactly n points uniform on the disk (a PPP conditioned on count)."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return _attach_angles(disk_radii(region, n, rng), rng)


def link_distances(rho_t: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Distances of the typical follower from the leader, density
    2*pi*rho_t*r*exp(-pi*rho_t*r^2), i.e. Rayleigh with sigma^2 = 1/(2*pi*rho_t)."""
    if not (math.isfinite(rho_t) and rho_t > 0.0):
        raise ValueError(f"rho_t must be positive and finite, got {rho_t}")
    return rng.rayleigh(scale=1.0 / math.sqrt(2.0 * math.pi * rho_t), size=n)


def distance_pdf(r, rho_t: float):
    """Density of the typical leader-follower distance at r (scalar or array)."""
    if not (math.isfinite(rho_t) and rho_t > 0.0):
        raise ValueError(f"rho_t must be positive and finite, got {rho_t}")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0):
        raise ValueError("distance must be >= 0")
    out = 2.0 * math.pi * rho_t * r * np.exp(-rho_t * math.pi * r * r)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Deployment:
    """A sampled network layout: leader at the origin, follower and
    jammer point sets with the regions they were drawn from."""

    followers: np.ndarray
    jammers: np.ndarray
    disk: DiskRegion
    annulus: AnnulusRegion
    leader: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self) -> None:
        for name, pts in (("followers", self.followers), ("jammers", self.jammers)):
            if pts.ndim != 2 or pts.shape[1] != 2:
                raise ValueError(f"{name} must be an (n, 2) array, got shape {pts.shape}")
        tol = 1e-9
        fr = np.hypot(self.followers[:, 0], self.followers[:, 1])
        if fr.size and fr.max() > self.disk.radius * (1.0 + tol):
            raise ValueError("follower outside the deployment disk")
        jr = np.hypot(self.jammers[:, 0], self.jammers[:, 1])
        if jr.size and (jr.min() < self.annulus.inner * (1.0 - tol) or jr.max() > self.annulus.outer * (1.0 + tol)):
            raise ValueError("jammer outside the jamming annulus")

    @classmethod
    def sample(
        cls,
        rho_t: float,
        rho_j: float,
        disk: DiskRegion,
        annulus: AnnulusRegion,
        rng: np.random.Generator,
    ) -> "Deployment":
        return cls(
            followers=sample_ppp(rho_t, disk, rng),
            jammers=sample_ppp(rho_j, annulus, rng),
            disk=disk,
            annulus=annulus,
        )

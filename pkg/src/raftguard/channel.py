"""Radio link model: transmit powers, pathloss, Rayleigh fading, SIR.

All powers are configured in dBm and converted to linear milliwatts
internally; only power ratios ever matter to the results.  The network
is interference limited, so thermal noise is not modeled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from raftguard.geometry import AnnulusRegion, DiskRegion

__all__ = [
    "NetworkParams",
    "db_to_linear",
    "linear_to_db",
    "pathloss_db",
    "sample_fading",
    "sir_dl",
    "sir_ul",
]

# Table of defaults: leader 30 dBm, follower 20 dBm, jammer 10 dBm,
# pathloss exponent 3, 15 expected followers in a 500 m disk.
_DEFAULT_RHO = 15.0 / (math.pi * 500.0 * 500.0)


def db_to_linear(x_db: float) -> float:
    """dB (or dBm) value to linear ratio (or mW)."""
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0.0:
        raise ValueError(f"linear value must be positive, got {x}")
    return 10.0 * math.log10(x)


def pathloss_db(distance, alpha: float):
    """Large-scale pathloss fingerprint 10*alpha*log10(d) in dB.

    Accepts scalars or arrays; distances must be strictly positive
    (d < 1 m legitimately gives a negative dB value).
    """
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise ValueError(f"alpha must be positive and finite, got {alpha}")
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0.0):
        raise ValueError("distance must be > 0")
    out = 10.0 * alpha * np.log10(d)
    return float(out) if out.ndim == 0 else out


def sample_fading(rng: np.random.Generator, size=None):
    """Rayleigh fading power gains |h|^2, i.e. unit-mean exponentials."""
    return rng.exponential(1.0, size)


@dataclass(frozen=True)
class NetworkParams:
    """Static network configuration shared by the closed forms and the
    Monte Carlo engines."""

    p_leader_dbm: float = 30.0
    p_follower_dbm: float = 20.0
    p_jammer_dbm: float = 10.0
    alpha: float = 3.0
    beta_dl_db: float = -20.0
    beta_ul_db: float = -20.0
    rho_t: float = _DEFAULT_RHO
    rho_j: float = _DEFAULT_RHO
    disk: DiskRegion = field(default_factory=lambda: DiskRegion(500.0))
    annulus: AnnulusRegion = field(default_factory=lambda: AnnulusRegion(0.0, 300.0))

    def __post_init__(self) -> None:
        for name in ("p_leader_dbm", "p_follower_dbm", "p_jammer_dbm", "beta_dl_db", "beta_ul_db"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not (math.isfinite(self.alpha) and self.alpha > 2.0):
            raise ValueError(f"alpha must be > 2 for the coverage integrals, got {self.alpha}")
        if not (math.isfinite(self.rho_t) and self.rho_t > 0.0):
            raise ValueError(f"rho_t must be positive, got {self.rho_t}")
        if not (math.isfinite(self.rho_j) and self.rho_j >= 0.0):
            raise ValueError(f"rho_j must be >= 0, got {self.rho_j}")

    # linear-scale accessors
    @property
    def p_leader(self) -> float:
        return db_to_linear(self.p_leader_dbm)

    @property
    def p_follower(self) -> float:
        return db_to_linear(self.p_follower_dbm)

    @property
    def p_jammer(self) -> float:
        return db_to_linear(self.p_jammer_dbm)

    @property
    def beta_dl(self) -> float:
        return db_to_linear(self.beta_dl_db)

    @property
    def beta_ul(self) -> float:
        return db_to_linear(self.beta_ul_db)

    @property
    def gamma_dl(self) -> float:
        """Jammer-to-leader power ratio seen by the downlink."""
        return db_to_linear(self.p_jammer_dbm - self.p_leader_dbm)

    @property
    def gamma_ul(self) -> float:
        """Jammer-to-follower power ratio seen by the uplink."""
        return db_to_linear(self.p_jammer_dbm - self.p_follower_dbm)


def _sir(
    tx_power: float,
    link_distance: float,
    jammer_power: float,
    jammer_xy: np.ndarray,
    h_signal: float,
    h_jammers: np.ndarray,
    alpha: float,
) -> float:
    if link_distance <= 0.0:
        raise ValueError("link distance must be > 0")
    h_jammers = np.asarray(h_jammers, dtype=float)
    jammer_xy = np.asarray(jammer_xy, dtype=float).reshape(-1, 2)
    if h_jammers.size != jammer_xy.shape[0]:
        raise ValueError("one fading gain per jammer is required")
    signal = tx_power * h_signal * link_distance ** (-alpha)
    if jammer_xy.shape[0] == 0:
        return math.inf
    d = np.hypot(jammer_xy[:, 0], jammer_xy[:, 1])
    if np.any(d <= 0.0):
        raise ValueError("jammer at zero distance")
    interference = float(np.sum(jammer_power * h_jammers * d ** (-alpha)))
    if interference == 0.0:
        return math.inf
    return signal / interference


def sir_dl(
    follower_xy,
    jammer_xy,
    h_signal: float,
    h_jammers,
    params: NetworkParams,
) -> float:
    """Downlink SIR at a follower: leader signal over aggregate jammer
    interference, distances measured from the origin.  Returns +inf when
    the jammer set is empty (interference-limited model, no noise)."""
    follower_xy = np.asarray(follower_xy, dtype=float)
    r = float(np.hypot(follower_xy[0], follower_xy[1]))
    return _sir(params.p_leader, r, params.p_jammer, jammer_xy, h_signal, h_jammers, params.alpha)


def sir_ul(
    follower_xy,
    jammer_xy,
    h_signal: float,
    h_jammers,
    params: NetworkParams,
) -> float:
    """Uplink SIR at the leader for a transmission from the follower."""
    follower_xy = np.asarray(follower_xy, dtype=float)
    r = float(np.hypot(follower_xy[0], follower_xy[1]))
    return _sir(params.p_follower, r, params.p_jammer, jammer_xy, h_signal, h_jammers, params.alpha)

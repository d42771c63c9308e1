"""
Constant-velocity Kalman filter over rotated boxes.

State:       [cx, cy, s, r, theta, vcx, vcy, vs]
Measurement: [cx, cy, s, r, theta]  (s = w*h, r = w/h)

theta is observed but not propagated (no angular velocity).
"""

import math
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from xentrack.errors import FilterError
from xentrack.geometry.types import HALF_PI, RotatedBox, wrap_angle

STATE_DIM = 8
MEASUREMENT_DIM = 5
# Floor applied to area and aspect after every step
MIN_POSITIVE = 1e-6

CX, CY, S, R, THETA, VCX, VCY, VS = range(STATE_DIM)


class FilterConfig(BaseModel):
    """Noise model of the per-track filter. Scale-dependent terms are multiplied by the current area s."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    init_position_factor: float = Field(2.0, ge=0.0, description="Initial position sigma as a multiple of sqrt(s).")
    init_velocity_factor: float = Field(10.0, ge=0.0, description="Initial velocity sigma as a multiple of the matching position sigma.")

    q_position: float = Field(1.0, ge=0.0, description="Process variance of cx and cy (px^2).")
    q_area_factor: float = Field(0.01, ge=0.0, description="Process sigma of s as a fraction of s.")
    q_aspect: float = Field(1e-4, ge=0.0, description="Process variance of the aspect ratio.")
    q_angle: float = Field(0.01, ge=0.0, description="Process sigma of theta (rad).")
    q_velocity: float = Field(0.25, ge=0.0, description="Process variance of vcx and vcy ((px/frame)^2).")
    q_area_velocity_factor: float = Field(0.001, ge=0.0, description="Process sigma of vs as a fraction of s.")

    r_position: float = Field(1.0, ge=0.0, description="Measurement variance of cx and cy (px^2).")
    r_area_factor: float = Field(0.05, ge=0.0, description="Measurement sigma of s as a fraction of s.")
    r_aspect: float = Field(1e-2, ge=0.0, description="Measurement variance of the aspect ratio.")
    r_angle: float = Field(0.02, ge=0.0, description="Measurement sigma of theta (rad).")


DEFAULT_FILTER = FilterConfig()


@dataclass(frozen=True, eq=False)
class KalmanState:
    """Gaussian belief of one track. Arrays are read-only copies."""
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=np.float64).reshape(STATE_DIM)
        cov = np.array(self.covariance, dtype=np.float64).reshape(STATE_DIM, STATE_DIM)
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)


def _transition() -> np.ndarray:
    f = np.eye(STATE_DIM)
    f[CX, VCX] = 1.0
    f[CY, VCY] = 1.0
    f[S, VS] = 1.0
    return f


_F = _transition()


def _measurement_matrix(track_angle: bool) -> np.ndarray:
    dim = MEASUREMENT_DIM if track_angle else MEASUREMENT_DIM - 1
    return np.eye(dim, STATE_DIM)


def _process_noise(s: float, cfg: FilterConfig) -> np.ndarray:
    return np.diag([
        cfg.q_position,
        cfg.q_position,
        (cfg.q_area_factor * s) ** 2,
        cfg.q_aspect,
        cfg.q_angle ** 2,
        cfg.q_velocity,
        cfg.q_velocity,
        (cfg.q_area_velocity_factor * s) ** 2,
    ])


def _measurement_noise(s: float, cfg: FilterConfig, track_angle: bool) -> np.ndarray:
    diag = [cfg.r_position, cfg.r_position, (cfg.r_area_factor * s) ** 2, cfg.r_aspect]
    if track_angle:
        diag.append(cfg.r_angle ** 2)
    return np.diag(diag)


def _clamp(mean: np.ndarray) -> np.ndarray:
    mean[S] = max(mean[S], MIN_POSITIVE)
    mean[R] = max(mean[R], MIN_POSITIVE)
    mean[THETA] = wrap_angle(float(mean[THETA]))
    return mean


def measurement_from_box(b: RotatedBox) -> np.ndarray:
    return np.array([b.cx, b.cy, b.w * b.h, b.w / b.h, b.theta], dtype=np.float64)


def aligned_measurement(obs: RotatedBox, theta: float) -> np.ndarray:
    """
    Measurement of `obs` labeled to follow the angle `theta`.
    (w, h, t) and (h, w, t + pi/2) are the same rectangle; the one whose angle is
    closer to `theta` is used, so a near-square box whose sides trade places
    does not read as a quarter-turn.
    """
    z = measurement_from_box(obs)
    turned = wrap_angle(obs.theta + HALF_PI)
    if abs(wrap_angle(turned - theta)) < abs(wrap_angle(obs.theta - theta)):
        z[R] = 1.0 / z[R]
        z[THETA] = turned
    return z


def initiate(b: RotatedBox, cfg: FilterConfig = DEFAULT_FILTER) -> KalmanState:
    """Start a track at the box with zero velocity."""
    z = measurement_from_box(b)
    mean = np.concatenate([z, np.zeros(3)])

    s = z[2]
    pos_sigma = cfg.init_position_factor * math.sqrt(s)
    area_sigma = cfg.r_area_factor * s
    vel_factor = cfg.init_velocity_factor
    cov = np.diag([
        pos_sigma ** 2,
        pos_sigma ** 2,
        area_sigma ** 2,
        cfg.r_aspect,
        cfg.r_angle ** 2,
        (vel_factor * pos_sigma) ** 2,
        (vel_factor * pos_sigma) ** 2,
        (vel_factor * area_sigma) ** 2,
    ])
    return KalmanState(mean, cov)


def predict(st: KalmanState, cfg: FilterConfig = DEFAULT_FILTER) -> KalmanState:
    """One constant-velocity step."""
    mean = _clamp(_F @ st.mean)
    cov = _F @ st.covariance @ _F.T + _process_noise(float(mean[S]), cfg)
    cov = (cov + cov.T) / 2.0
    return KalmanState(mean, cov)


def update(
    st: KalmanState,
    obs: RotatedBox,
    cfg: FilterConfig = DEFAULT_FILTER,
    track_angle: bool = True,
) -> KalmanState:
    """
    Measurement update (Joseph form).
    The observation is relabeled to the side order closest to the predicted angle and
    the angle residual is wrapped into [-pi/2, pi/2); with track_angle off,
    theta is taken from the observation instead of being filtered.
    """
    h = _measurement_matrix(track_angle)
    x, p = st.mean, st.covariance
    z = aligned_measurement(obs, float(x[THETA])) if track_angle else measurement_from_box(obs)
    z = z[: h.shape[0]]

    innovation = z - h @ x
    if track_angle:
        innovation[THETA] = wrap_angle(float(innovation[THETA]))

    r = _measurement_noise(float(x[S]), cfg, track_angle)
    s_mat = h @ p @ h.T + r
    gain = np.linalg.solve(s_mat, h @ p).T

    mean = x + gain @ innovation
    i_kh = np.eye(STATE_DIM) - gain @ h
    cov = i_kh @ p @ i_kh.T + gain @ r @ gain.T
    cov = (cov + cov.T) / 2.0

    if not track_angle:
        mean[THETA] = obs.theta
    return KalmanState(_clamp(mean), cov)


def state_to_box(st: KalmanState) -> RotatedBox:
    """Canonical box of the current mean; w = sqrt(s*r), h = sqrt(s/r) before canonicalization."""
    s, r = float(st.mean[S]), float(st.mean[R])
    if s <= 0 or r <= 0 or not math.isfinite(s * r):
        raise FilterError(f"degenerate state: s={s}, r={r}")
    return RotatedBox.canonical(
        float(st.mean[CX]),
        float(st.mean[CY]),
        math.sqrt(s * r),
        math.sqrt(s / r),
        float(st.mean[THETA]),
    )

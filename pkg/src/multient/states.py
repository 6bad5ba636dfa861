"""
Pure Gaussian states of three concurrent-parametric-process sources.

Each state is produced from its Bloch-Messiah form: independent single-mode
squeezers followed by a passive mixer U_B.  A squeeze parameter r > 0
squeezes Y (<dY^2> = exp(-2r), <dX^2> = exp(2r)).

Mode labels
-----------
tripartite: the shared mode 0 and its partners 1, 2 are stored as modes
1, 2, 3.

four-mode: storage modes 1..4 are the rows of U_B.  In these labels the
linear chain couples 1-2 with g1 and 2-3, 4-1 with g2 (modes 1, 2 shared);
the square chain couples 1-2 with g1, 3-4 with g2 and 2-3, 4-1 with g1 + g2.
Modes {1, 3} are the two signal modes, so {1,3} x {2,4} is the
signal-idler cut.

Coupling phases are removed by local phase rotations before the
decomposition; they do not change any entanglement property.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .gaussian import Covariance, passive_symplectic

GOLDEN_RATIO = (1 + math.sqrt(5)) / 2
UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class BlochMessiahSpec:
    u_b: np.ndarray
    squeeze: np.ndarray

    def __post_init__(self):
        u = np.array(self.u_b, dtype=complex)
        r = np.array(self.squeeze, dtype=float).reshape(-1)
        if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] != r.size:
            raise ValueError(f"U_B shape {u.shape} incompatible with {r.size} squeeze parameters")
        u.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "u_b", u)
        object.__setattr__(self, "squeeze", r)

    @property
    def n_modes(self) -> int:
        return self.squeeze.size

    def unitarity_defect(self) -> float:
        u = self.u_b
        return float(np.max(np.abs(u @ u.conj().T - np.eye(self.n_modes))))


def covariance_from_bm(spec: BlochMessiahSpec) -> Covariance:
    """
    Covariance S_B V_sq S_B^T of squeezed vacua mixed by U_B.

    The returned object carries the factor S_B V_sq^(1/2).
    """
    defect = spec.unitarity_defect()
    if defect > UNITARITY_TOL:
        raise ValueError(f"U_B is not unitary (max |U U^dagger - I| = {defect:.3e})")
    r = spec.squeeze
    s_b = passive_symplectic(spec.u_b)
    return Covariance.from_factor(s_b * np.r_[np.exp(r), np.exp(-r)][None, :])


def _mag(g) -> float:
    return abs(complex(g))


@dataclass(frozen=True)
class TripartiteParams:
    """Couplings of the shared mode to its two partners, and medium length."""

    g1: complex
    g2: complex
    z: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "g1", complex(self.g1))
        object.__setattr__(self, "g2", complex(self.g2))
        object.__setattr__(self, "z", float(self.z))
        if self.g1 == 0 and self.g2 == 0:
            raise ValueError("at least one of g1, g2 must be nonzero")
        if self.z < 0:
            raise ValueError(f"propagation length must be >= 0, got {self.z}")

    @classmethod
    def from_angle(cls, theta: float, gbar_z: float) -> "TripartiteParams":
        """Real couplings with tan(theta) = g2/g1 and gbar*z = gbar_z (z = 1)."""
        return cls(gbar_z * math.cos(theta), gbar_z * math.sin(theta), 1.0)

    @classmethod
    def from_ratio(cls, x: float, gbar_z: float) -> "TripartiteParams":
        return cls.from_angle(math.atan(x), gbar_z)

    @property
    def theta(self) -> float:
        return math.atan2(_mag(self.g2), _mag(self.g1))

    @property
    def gbar(self) -> float:
        return math.hypot(_mag(self.g1), _mag(self.g2))

    @property
    def gbar_z(self) -> float:
        return self.gbar * self.z

    @property
    def ratio(self) -> float:
        """|g2/g1| (inf when g1 = 0)."""
        return _mag(self.g2) / _mag(self.g1) if self.g1 != 0 else math.inf


def tripartite_bm(p: TripartiteParams) -> BlochMessiahSpec:
    c, s = math.cos(p.theta), math.sin(p.theta)
    r2 = math.sqrt(2.0)
    u = np.array([[1.0, 1.0, 0.0], [c, -c, -r2 * s], [s, -s, r2 * c]]) / r2
    r = p.gbar_z
    return BlochMessiahSpec(u, [r, -r, 0.0])


def tripartite_state(p: TripartiteParams) -> tuple[Covariance, BlochMessiahSpec]:
    """
    Three-mode state of two processes sharing one mode.

    A balanced mixer on the shared mode and its first partner, followed by a
    cos^2(theta) beam splitter on the two partners, acts on squeezers
    (+gbar z, -gbar z, 0).
    """
    bm = tripartite_bm(p)
    return covariance_from_bm(bm), bm


@dataclass(frozen=True)
class FourModeLinearParams:
    """Linear four-mode chain: g1 links the two shared modes, g2 the outer ones."""

    g1: complex
    g2: complex
    z: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "g1", complex(self.g1))
        object.__setattr__(self, "g2", complex(self.g2))
        object.__setattr__(self, "z", float(self.z))
        if self.g1 == 0 and self.g2 == 0:
            raise ValueError("at least one of g1, g2 must be nonzero")
        if self.z < 0:
            raise ValueError(f"propagation length must be >= 0, got {self.z}")

    @classmethod
    def from_ratio(cls, x: float, gbar_z: float) -> "FourModeLinearParams":
        """Real couplings with |g2/g1| = x and gbar*z = gbar_z (z = 1)."""
        if math.isinf(x):
            return cls(0.0, gbar_z, 1.0)
        norm = math.sqrt(1.0 + x * x)
        return cls(gbar_z / norm, gbar_z * x / norm, 1.0)

    @property
    def ratio(self) -> float:
        return _mag(self.g2) / _mag(self.g1) if self.g1 != 0 else math.inf

    @property
    def gbar(self) -> float:
        return math.hypot(_mag(self.g1), _mag(self.g2))

    @property
    def gbar_z(self) -> float:
        return self.gbar * self.z

    @property
    def lambdas(self) -> tuple[float, float]:
        """
        Squeeze rates (Lambda_S, Lambda_D).

        Written as (sqrt(4|g2|^2 + |g1|^2) +- |g1|)/2, which equals
        gbar/sqrt(x^2+1) * (sqrt(4x^2+1) +- 1)/2 and stays finite at g1 = 0.
        """
        a1, a2 = _mag(self.g1), _mag(self.g2)
        root = math.sqrt(4 * a2 * a2 + a1 * a1)
        return 0.5 * (root + a1), 0.5 * (root - a1)

    @property
    def lambda_s(self) -> float:
        return self.lambdas[0]

    @property
    def lambda_d(self) -> float:
        return self.lambdas[1]

    @property
    def gamma(self) -> float:
        """Mixing angle, tan^2(gamma) = Lambda_D / Lambda_S."""
        ls, ld = self.lambdas
        return math.atan(math.sqrt(ld / ls))

    @property
    def r_s(self) -> float:
        return self.lambda_s * self.z

    @property
    def r_d(self) -> float:
        return self.lambda_d * self.z


def _pair_mixer() -> np.ndarray:
    return np.array([[1, 1, 0, 0], [1, -1, 0, 0], [0, 0, 1, 1], [0, 0, 1, -1]], dtype=float) / math.sqrt(2)


def four_mode_linear_bm(p: FourModeLinearParams) -> BlochMessiahSpec:
    c, s = math.cos(p.gamma), math.sin(p.gamma)
    rot = np.array([[c, 0, -s, 0], [0, c, 0, -s], [s, 0, c, 0], [0, s, 0, c]])
    rs, rd = p.r_s, p.r_d
    return BlochMessiahSpec(rot @ _pair_mixer(), [rs, -rs, -rd, rd])


def four_mode_linear_state(p: FourModeLinearParams) -> tuple[Covariance, BlochMessiahSpec]:
    """
    Linear four-mode chain: two EPR pairs of squeeze Lambda_S z and
    -Lambda_D z, mixed signal-with-signal and idler-with-idler on beam
    splitters with R/T = tan^2(gamma).
    """
    bm = four_mode_linear_bm(p)
    return covariance_from_bm(bm), bm


def reduce_phase(phi_minus: float) -> float:
    """Fold a pump phase offset into [0, pi/2]; entanglement depends on |cos phi|."""
    phi = math.fmod(phi_minus, math.pi)
    if phi < 0:
        phi += math.pi
    if phi > math.pi / 2:
        phi = math.pi - phi
    return phi


@dataclass(frozen=True)
class FourModeSquareParams:
    """Square four-mode chain in the equal-intensity case |g1| = |g2| = g_mag."""

    g_mag: float
    phi_minus: float
    z: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "g_mag", float(self.g_mag))
        object.__setattr__(self, "z", float(self.z))
        if not self.g_mag > 0:
            raise ValueError(f"g_mag must be positive, got {self.g_mag}")
        if self.z < 0:
            raise ValueError(f"propagation length must be >= 0, got {self.z}")
        phi = float(self.phi_minus)
        if not 0.0 <= phi <= math.pi / 2:
            reduced = reduce_phase(phi)
            warnings.warn(
                f"phi_minus = {phi} outside [0, pi/2]; using the equivalent value {reduced}",
                stacklevel=3,
            )
            phi = reduced
        object.__setattr__(self, "phi_minus", phi)

    @classmethod
    def from_couplings(cls, g1: complex, g2: complex, z: float = 1.0) -> "FourModeSquareParams":
        g1, g2 = complex(g1), complex(g2)
        a1, a2 = abs(g1), abs(g2)
        if not math.isclose(a1, a2, rel_tol=1e-12, abs_tol=0.0):
            raise ValueError(
                f"square coupling is implemented only for |g1| = |g2|; got |g1| = {a1}, |g2| = {a2}"
            )
        phi = 0.5 * (np.angle(g1) - np.angle(g2))
        return cls(a1, phi, z)

    @property
    def gbar(self) -> float:
        return math.sqrt(2.0) * self.g_mag

    @property
    def gbar_z(self) -> float:
        return self.gbar * self.z

    @property
    def lambdas(self) -> tuple[float, float]:
        """(Lambda_S, Lambda_D) = g_mag (2 cos phi_minus +- 1); Lambda_D < 0 past pi/3."""
        c2 = 2.0 * math.cos(self.phi_minus)
        return self.g_mag * (c2 + 1.0), self.g_mag * (c2 - 1.0)

    @property
    def r_s(self) -> float:
        return self.lambdas[0] * self.z

    @property
    def r_d(self) -> float:
        return self.lambdas[1] * self.z

    @property
    def central_coupling(self) -> float:
        """|g1 + g2| = 2 g_mag cos(phi_minus)."""
        return 2.0 * self.g_mag * math.cos(self.phi_minus)


SQUARE_MIXER = 0.5 * np.array(
    [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]], dtype=float
)


def four_mode_square_bm(p: FourModeSquareParams) -> BlochMessiahSpec:
    rs, rd = p.r_s, p.r_d
    return BlochMessiahSpec(SQUARE_MIXER, [rs, -rs, -rd, rd])


def four_mode_square_state(p: FourModeSquareParams) -> tuple[Covariance, BlochMessiahSpec]:
    """
    Square four-mode chain: squeezers (+r_S, -r_S, -r_D, +r_D) on a
    Hadamard-like balanced mixer.  r_D keeps its sign, so past
    phi_minus = pi/3 the last two squeezers swap quadratures.
    """
    bm = four_mode_square_bm(p)
    return covariance_from_bm(bm), bm


FAMILIES = ("tri", "lin4", "sq4")
FAMILY_MODES = {"tri": 3, "lin4": 4, "sq4": 4}


def build_state(params) -> tuple[Covariance, BlochMessiahSpec]:
    if isinstance(params, TripartiteParams):
        return tripartite_state(params)
    if isinstance(params, FourModeLinearParams):
        return four_mode_linear_state(params)
    if isinstance(params, FourModeSquareParams):
        return four_mode_square_state(params)
    raise TypeError(f"unknown parameter type {type(params).__name__}")


def family_of(params) -> str:
    return {
        TripartiteParams: "tri",
        FourModeLinearParams: "lin4",
        FourModeSquareParams: "sq4",
    }[type(params)]


def params_for_point(family: str, x: float, y: float):
    """
    Parameters at a sweep point: x is |g2/g1| (tri, lin4) or phi_minus (sq4),
    y is the total gain gbar*z.  Couplings are scaled to gbar = 1 and the
    gain is carried by z = y, so the zero-gain row is representable.
    """
    if y < 0:
        raise ValueError(f"gain must be >= 0, got {y}")
    if family == "tri":
        p = TripartiteParams.from_ratio(x, 1.0)
        return TripartiteParams(p.g1, p.g2, y)
    if family == "lin4":
        p = FourModeLinearParams.from_ratio(x, 1.0)
        return FourModeLinearParams(p.g1, p.g2, y)
    if family == "sq4":
        return FourModeSquareParams(1.0 / math.sqrt(2.0), x, y)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def _complex_field(obj, name):
    val = obj[name]
    if isinstance(val, dict):
        return complex(float(val.get("re", 0.0)), float(val.get("im", 0.0)))
    if isinstance(val, (int, float)):
        return complex(val)
    raise ValueError(f"field {name!r} must be a number or an object {{re, im}}")


def params_from_spec(obj: dict):
    """
    Parse a state spec, e.g.
    {"family": "tri", "g1": {"re": 1, "im": 0}, "g2": {"re": 1, "im": 0}, "z": 1}
    or {"family": "sq4", "g_mag": 1, "phi_minus": 0.5, "z": 1}.
    """
    if not isinstance(obj, dict):
        raise ValueError("state spec must be a JSON object")
    family = obj.get("family")
    try:
        z = float(obj.get("z", 1.0))
        if family == "tri":
            return TripartiteParams(_complex_field(obj, "g1"), _complex_field(obj, "g2"), z)
        if family == "lin4":
            return FourModeLinearParams(_complex_field(obj, "g1"), _complex_field(obj, "g2"), z)
        if family == "sq4":
            if "g_mag" in obj:
                return FourModeSquareParams(float(obj["g_mag"]), float(obj.get("phi_minus", 0.0)), z)
            return FourModeSquareParams.from_couplings(_complex_field(obj, "g1"), _complex_field(obj, "g2"), z)
    except KeyError as exc:
        raise ValueError(f"state spec for family {family!r} is missing field {exc}") from None
    except TypeError as exc:
        raise ValueError(f"bad field type in state spec: {exc}") from None
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def params_to_spec(params) -> dict:
    fam = family_of(params)
    if fam == "sq4":
        return {"family": fam, "g_mag": params.g_mag, "phi_minus": params.phi_minus, "z": params.z}
    return {
        "family": fam,
        "g1": {"re": params.g1.real, "im": params.g1.imag},
        "g2": {"re": params.g2.real, "im": params.g2.imag},
        "z": params.z,
    }


def load_state_spec(path) -> object:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON ({exc})") from None
    return params_from_spec(obj)

"""
Variance-based separability bounds and closed-form PT spectra.

For real coefficient vectors d, d' and eta(d) = sum_a d_a Q_a, every state obeys

    <d eta(d)^2> + <d eta(d')^2> >= 2 sqrt(<..><..>) >= 2 |d^T Omega d'|

and a state separable across A additionally obeys the same chain with the
right-hand side replaced by 2 |d^T G_A Omega G_A d'|, G_A the Y-mirror of
Alice's modes.  Sub-shot-noise pairs read off the Bloch-Messiah mixer commute,
so only the mirrored bound can be violated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .gaussian import (
    ModePartition,
    as_covariance,
    enumerate_bipartitions,
    symplectic_form,
)
from .states import (
    FourModeLinearParams,
    FourModeSquareParams,
    TripartiteParams,
    four_mode_linear_state,
    tripartite_state,
)

VIOLATION_TOL = 1e-10


@dataclass(frozen=True)
class NonlocalObservable:
    coeffs: np.ndarray
    label: str = ""

    def __post_init__(self):
        d = np.array(self.coeffs, dtype=float).reshape(-1)
        if d.size % 2 or not np.all(np.isfinite(d)):
            raise ValueError("observable needs a finite coefficient vector of even length")
        if not np.any(d):
            raise ValueError("observable coefficients are all zero")
        d.setflags(write=False)
        object.__setattr__(self, "coeffs", d)

    @property
    def n_modes(self) -> int:
        return self.coeffs.size // 2


def _vec(d) -> np.ndarray:
    return d.coeffs if isinstance(d, NonlocalObservable) else np.asarray(d, dtype=float)


def observable_variance(v, d) -> float:
    """<d eta(d)^2> = d^T V d."""
    m = as_covariance(v).matrix
    dv = _vec(d)
    if dv.size != m.shape[0]:
        raise ValueError(f"observable has {dv.size} coefficients, covariance dimension is {m.shape[0]}")
    return float(dv @ m @ dv)


def heisenberg_bound(d, d2) -> float:
    """|<[eta(d), eta(d')]>| = 2 |d^T Omega d'|."""
    a, b = _vec(d), _vec(d2)
    if a.size != b.size:
        raise ValueError("observables act on different numbers of modes")
    return float(2.0 * abs(a @ symplectic_form(a.size // 2) @ b))


def ppt_bound(d, d2, partition: ModePartition) -> float:
    """Commutator bound of the mirrored pair, 2 |d^T G_A Omega G_A d'|."""
    a, b = _vec(d), _vec(d2)
    if a.size != 2 * partition.n_modes or b.size != a.size:
        raise ValueError("observable dimension does not match the partition")
    g = partition.mirror()
    return heisenberg_bound(g * a, g * b)


@dataclass(frozen=True)
class BoundEvaluation:
    lhs: float
    rhs: float
    kind: str
    partition: ModePartition | None = None
    violated: bool = False
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "kind": self.kind,
            "partition": None if self.partition is None else self.partition.label,
            "bound_lhs": self.lhs,
            "bound_rhs": self.rhs,
            "bound_violated": self.violated,
        }


def _combine(var1: float, var2: float, how: str) -> float:
    if how == "auto":
        how = "sum" if math.isclose(var1, var2, rel_tol=1e-12, abs_tol=1e-300) else "product"
    if how == "sum":
        return var1 + var2
    if how == "product":
        return 2.0 * math.sqrt(max(var1, 0.0) * max(var2, 0.0))
    raise ValueError(f"unknown combination {how!r}")


def evaluate_pair(v, d, d2, partition: ModePartition | None = None, combine: str = "auto", label: str = "") -> BoundEvaluation:
    """
    Compare the variances of eta(d), eta(d') with the Heisenberg bound
    (no partition) or with the mirrored bound for ``partition``.

    The left side is the sum of variances when they are equal and
    2 sqrt(product) otherwise; the product form is the stronger one.
    """
    lhs = _combine(observable_variance(v, d), observable_variance(v, d2), combine)
    if partition is None:
        rhs, kind = heisenberg_bound(d, d2), "heisenberg"
    else:
        rhs, kind = ppt_bound(d, d2, partition), "ppt"
    return BoundEvaluation(lhs, rhs, kind, partition, lhs < rhs - VIOLATION_TOL, label)


# three modes ---------------------------------------------------------------


def tripartite_observables(p: TripartiteParams) -> tuple[NonlocalObservable, NonlocalObservable]:
    """
    The squeezed combinations (X0 - X1 cos th - X2 sin th)/sqrt2 and
    (Y0 + Y1 cos th + Y2 sin th)/sqrt2, each with variance exp(-2 gbar z).
    """
    c, s = math.cos(p.theta), math.sin(p.theta)
    r2 = math.sqrt(2.0)
    d = NonlocalObservable(np.array([1.0, -c, -s, 0.0, 0.0, 0.0]) / r2, "eta_x")
    d2 = NonlocalObservable(np.array([0.0, 0.0, 0.0, 1.0, c, s]) / r2, "eta_y")
    return d, d2


@dataclass(frozen=True)
class TripartiteBoundSuite:
    params: TripartiteParams
    evaluations: dict  # storage mode -> BoundEvaluation for the cut {mode} x rest
    thresholds: dict  # storage mode -> gbar*z above which the bound is violated

    def violated(self, mode: int) -> bool:
        return self.evaluations[mode].violated


def tripartite_thresholds(p: TripartiteParams) -> dict:
    """
    Gain thresholds for the single-mode cuts, keyed by storage mode:
    shared mode 1 -> 0, mode 2 -> ln sqrt(1 + |g2/g1|^2),
    mode 3 -> ln sqrt(1 + |g1/g2|^2).
    """
    a1, a2 = abs(p.g1), abs(p.g2)
    t2 = math.inf if a1 == 0 else 0.5 * math.log1p((a2 / a1) ** 2)
    t3 = math.inf if a2 == 0 else 0.5 * math.log1p((a1 / a2) ** 2)
    return {1: 0.0, 2: t2, 3: t3}


def tripartite_bound_suite(p: TripartiteParams) -> TripartiteBoundSuite:
    v, _ = tripartite_state(p)
    d, d2 = tripartite_observables(p)
    evals = {}
    for mode in (1, 2, 3):
        part = ModePartition(3, [mode])
        evals[mode] = evaluate_pair(v, d, d2, part, combine="sum", label=f"mode {mode}")
    return TripartiteBoundSuite(p, evals, tripartite_thresholds(p))


# four modes, linear chain ---------------------------------------------------


def four_mode_observables(p: FourModeLinearParams) -> dict:
    """
    Squeezed combinations of the linear chain: variances exp(-2 Lambda_S z)
    for "sigma", "sigma'" and exp(-2 Lambda_D z) for "delta", "delta'".
    """
    c, s = math.cos(p.gamma), math.sin(p.gamma)
    r2 = math.sqrt(2.0)
    z4 = np.zeros(4)
    return {
        "sigma": NonlocalObservable(np.r_[np.array([c, -c, s, -s]) / r2, z4], "sigma"),
        "sigma'": NonlocalObservable(np.r_[z4, np.array([c, c, s, s]) / r2], "sigma'"),
        "delta": NonlocalObservable(np.r_[np.array([-s, -s, c, c]) / r2, z4], "delta"),
        "delta'": NonlocalObservable(np.r_[z4, np.array([-s, s, c, -c]) / r2], "delta'"),
    }


# which of the four bounds is the first to break, per canonical Alice set
HIGHLIGHTED_BOUND = {
    (1,): "ss",
    (2,): "ss",
    (3,): "dd",
    (4,): "dd",
    (1, 2): "sd",
    (1, 3): "ss",
    (1, 4): "ss",
}


def closed_form_verdict(alice: tuple, r_s: float, r_d: float) -> bool:
    """Sufficient inseparability condition for a linear-chain cut, in r_S, r_D."""
    tot = r_s + r_d
    if tot <= 0:
        return False
    if alice in ((1,), (2,)):
        return math.exp(-2 * r_s) < r_s / tot
    if alice in ((3,), (4,)):
        return math.exp(-2 * r_d) < r_s / tot
    if alice == (1, 2):
        return math.exp(-tot) < 2 * math.sqrt(r_s * r_d) / tot
    if alice == (1, 3):
        return math.exp(-2 * r_s) < 1.0
    if alice == (1, 4):
        return math.exp(-2 * r_s) < (r_s - r_d) / tot
    raise ValueError(f"no closed form for Alice set {alice}")


@dataclass(frozen=True)
class PartitionBounds:
    partition: ModePartition
    bounds: dict  # "ss", "sd", "ds", "dd" -> BoundEvaluation
    highlighted: str
    closed_form: bool

    @property
    def best(self) -> BoundEvaluation:
        return self.bounds[self.highlighted]

    @property
    def violated(self) -> bool:
        return self.best.violated

    @property
    def any_violated(self) -> bool:
        return any(b.violated for b in self.bounds.values())

    def commutators(self) -> dict:
        return {k: b.rhs for k, b in self.bounds.items()}


def four_mode_bound_suite(p: FourModeLinearParams) -> dict:
    """
    All four mirrored bounds for each of the seven cuts of the linear chain.

    Same-index pairs (sigma, sigma') and (delta, delta') use the sum of
    variances; mixed pairs use 2 sqrt(product).  The reported verdict is that
    of the bound which breaks first as the gain grows.
    """
    v, _ = four_mode_linear_state(p)
    obs = four_mode_observables(p)
    pairs = {
        "ss": (obs["sigma"], obs["sigma'"], "sum"),
        "sd": (obs["sigma"], obs["delta'"], "product"),
        "ds": (obs["delta"], obs["sigma'"], "product"),
        "dd": (obs["delta"], obs["delta'"], "sum"),
    }
    out = {}
    for part in enumerate_bipartitions(4):
        bounds = {
            key: evaluate_pair(v, a, b, part, combine=how, label=key)
            for key, (a, b, how) in pairs.items()
        }
        out[part] = PartitionBounds(
            part, bounds, HIGHLIGHTED_BOUND[part.alice], closed_form_verdict(part.alice, p.r_s, p.r_d)
        )
    return out


def negativity_p13(p: FourModeLinearParams) -> float:
    """Logarithmic negativity of the signal-idler cut, (2/ln2) sqrt(4|g2|^2 + |g1|^2) z."""
    return 2.0 / math.log(2.0) * math.sqrt(4 * abs(p.g2) ** 2 + abs(p.g1) ** 2) * p.z


def squeeze_per_gain(x: float) -> float:
    """Lambda_S / gbar of the linear chain at coupling ratio x = |g2/g1|."""
    return FourModeLinearParams.from_ratio(x, 1.0).lambda_s


def max_squeeze_per_gain(x_lo: float = 0.1, x_hi: float = 10.0) -> tuple[float, float]:
    """
    Numerically maximize Lambda_S / gbar over x in [x_lo, x_hi].

    Returns (x_best, value); analytically the maximum is 2/sqrt(3) at sqrt(2).
    """
    res = minimize_scalar(lambda x: -squeeze_per_gain(x), bounds=(x_lo, x_hi), method="bounded",
                          options={"xatol": 1e-12})
    if not res.success:
        raise RuntimeError(f"maximization failed: {res.message}")
    return float(res.x), -float(res.fun)


# closed-form PT spectra -----------------------------------------------------


def _cosh_pair(q_minus_1: float) -> tuple[float, float]:
    """(q + sqrt(q^2-1), its inverse) from q - 1 >= 0, free of cancellation."""
    q = 1.0 + q_minus_1
    top = q + math.sqrt(q_minus_1 * (q + 1.0))
    return top, 1.0 / top


def _sinh_pair(w: float) -> tuple[float, float]:
    """(sqrt(1+w^2) + |w|, its inverse)."""
    top = math.hypot(1.0, w) + abs(w)
    return top, 1.0 / top


def _desc(vals) -> np.ndarray:
    return np.sort(np.asarray(vals, dtype=float))[::-1]


def _tri_spectrum(p: TripartiteParams, alice: tuple) -> np.ndarray:
    r = p.gbar_z
    if alice == (1,):
        return _desc([math.exp(2 * r), 1.0, math.exp(-2 * r)])
    f = math.cos(p.theta) if alice == (2,) else math.sin(p.theta)
    # b = 1 + 2 (f sinh r)^2, nu = b +- sqrt(b^2 - 1)
    top, bot = _cosh_pair(2.0 * (f * math.sinh(r)) ** 2)
    return _desc([top, 1.0, bot])


def _lin_spectrum(p: FourModeLinearParams, alice: tuple) -> np.ndarray:
    rs, rd = p.r_s, p.r_d
    c2, s2 = math.cos(p.gamma) ** 2, math.sin(p.gamma) ** 2
    if alice in ((1,), (2,), (3,), (4,)):
        if alice in ((3,), (4,)):
            c2, s2 = s2, c2
        # b = 2 q^2 - 1, q = cosh(2rS) c2 + cosh(2rD) s2, nu = sqrt(b +- sqrt(b^2-1)) = q +- sqrt(q^2-1)
        top, bot = _cosh_pair(2.0 * (math.sinh(rs) ** 2 * c2 + math.sinh(rd) ** 2 * s2))
        return _desc([top, 1.0, 1.0, bot])
    if alice == (1, 2):
        top, bot = _sinh_pair(math.sin(2 * p.gamma) * math.sinh(rs + rd))
        return _desc([top, top, bot, bot])
    if alice == (1, 3):
        return _desc([math.exp(2 * rs), math.exp(2 * rd), math.exp(-2 * rd), math.exp(-2 * rs)])
    if alice == (1, 4):
        # p = 1 + 2 w^2, sqrt(p +- sqrt(p^2-1)) = sqrt(1+w^2) +- |w|
        c = rs - rd
        top, bot = _sinh_pair(math.cos(2 * p.gamma) * math.sinh(rs + rd))
        ec = math.exp(c)
        return _desc([top / ec, bot / ec, top * ec, bot * ec])
    raise ValueError(f"no closed form for Alice set {alice}")


def _sq_spectrum(p: FourModeSquareParams, alice: tuple) -> np.ndarray:
    rs, rd = p.r_s, p.r_d
    if len(alice) == 1:
        # b = (cosh 2rS + cosh 2rD)^2 / 2 - 1 = 2 q^2 - 1, q = (cosh 2rS + cosh 2rD)/2
        top, bot = _cosh_pair(math.sinh(rs) ** 2 + math.sinh(rd) ** 2)
        return _desc([top, 1.0, 1.0, bot])
    if alice == (1, 2):
        e = math.exp(abs(rs + rd))
        return _desc([e, e, 1 / e, 1 / e])
    if alice == (1, 3):
        return _desc([math.exp(2 * rs), math.exp(2 * abs(rd)), math.exp(-2 * abs(rd)), math.exp(-2 * rs)])
    if alice == (1, 4):
        e = math.exp(rs - rd)
        return _desc([e, e, 1 / e, 1 / e])
    raise ValueError(f"no closed form for Alice set {alice}")


_SPECTRA = {
    "tri": (TripartiteParams, 3, _tri_spectrum),
    "lin4": (FourModeLinearParams, 4, _lin_spectrum),
    "sq4": (FourModeSquareParams, 4, _sq_spectrum),
}


def analytic_pt_spectrum(family: str, params, partition: ModePartition) -> np.ndarray:
    """
    Closed-form symplectic spectrum of the partial transpose, descending.

    ``partition`` uses storage labels; the tripartite shared mode and its two
    partners are storage modes 1, 2, 3.
    """
    try:
        ptype, n, fn = _SPECTRA[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}") from None
    if not isinstance(params, ptype):
        raise ValueError(f"family {family!r} needs {ptype.__name__}, got {type(params).__name__}")
    if partition.n_modes != n:
        raise ValueError(f"family {family!r} has {n} modes, partition has {partition.n_modes}")
    return fn(params, partition.alice)


@dataclass(frozen=True)
class FamilySummary:
    """Per-cut closed forms plus the genuine-multipartite flag."""

    family: str
    spectra: dict = field(default_factory=dict)

    @property
    def genuine(self) -> bool:
        return all(np.min(s) < 1 - VIOLATION_TOL for s in self.spectra.values())


def analytic_summary(family: str, params) -> FamilySummary:
    n = _SPECTRA[family][1]
    return FamilySummary(family, {p: analytic_pt_spectrum(family, params, p) for p in enumerate_bipartitions(n)})

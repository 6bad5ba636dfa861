"""
Parameter sweeps over the three state families and the verification suite.

A sweep point is (x, y): x is the coupling ratio |g2/g1| on a log grid for
"tri" and "lin4", or the pump phase offset phi_minus on a linear grid for
"sq4"; y is the total gain gbar*z on a linear grid.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .criteria import (
    analytic_pt_spectrum,
    four_mode_bound_suite,
    tripartite_bound_suite,
)
from .evolution import oracle_state
from .gaussian import (
    ModePartition,
    enumerate_bipartitions,
    parse_partition,
    partial_transpose,
    ppt_report,
    symplectic_spectrum,
    validate_covariance,
)
from .states import (
    FAMILIES,
    FAMILY_MODES,
    BlochMessiahSpec,
    FourModeLinearParams,
    TripartiteParams,
    build_state,
    covariance_from_bm,
    family_of,
    params_for_point,
    params_to_spec,
)

CSV_HEADER = ("family", "x", "y", "partition", "nu_product", "log_negativity", "bound_violated")
OUTPUTS = ("nu_product", "log_negativity", "bound_verdicts")


@dataclass(frozen=True)
class SweepSpec:
    family: str
    x_min: float
    x_max: float
    y_min: float = 0.0
    y_max: float = 3.0
    resolution: int = 101
    partitions: tuple = ()  # empty means all
    outputs: tuple = OUTPUTS

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if isinstance(self.resolution, bool) or int(self.resolution) != self.resolution or self.resolution < 2:
            raise ValueError(f"resolution must be an integer >= 2, got {self.resolution}")
        object.__setattr__(self, "resolution", int(self.resolution))
        if not self.x_min < self.x_max or not self.y_min < self.y_max:
            raise ValueError("axis ranges must be strictly increasing")
        if self.x_axis == "ratio" and self.x_min <= 0:
            raise ValueError("ratio axis is logarithmic and needs x_min > 0")
        if self.x_axis == "phi_minus" and not (0 <= self.x_min and self.x_max <= math.pi / 2 + 1e-12):
            raise ValueError("phi_minus axis must lie within [0, pi/2]")
        if self.y_min < 0:
            raise ValueError("gain axis must be >= 0")
        bad = set(self.outputs) - set(OUTPUTS)
        if bad:
            raise ValueError(f"unknown outputs {sorted(bad)}; expected a subset of {OUTPUTS}")
        n = FAMILY_MODES[self.family]
        parts = tuple(p if isinstance(p, ModePartition) else parse_partition(str(p), n) for p in self.partitions)
        object.__setattr__(self, "partitions", parts)

    @classmethod
    def default(cls, family: str, resolution: int = 101) -> "SweepSpec":
        if family == "sq4":
            return cls(family, 0.0, math.pi / 2, resolution=resolution)
        return cls(family, 0.1, 10.0, resolution=resolution)

    @classmethod
    def from_dict(cls, obj: dict) -> "SweepSpec":
        """
        Accepts {"family", "resolution", "partitions": "all" | [labels],
        "x_range": [lo, hi], "y_range": [lo, hi], "outputs": [...]}; ranges
        default to ratio [0.1, 10] (phi_minus [0, pi/2] for sq4) and gain [0, 3].
        """
        if not isinstance(obj, dict) or "family" not in obj:
            raise ValueError("sweep spec must be a JSON object with a 'family' field")
        base = cls.default(obj["family"], obj.get("resolution", 101))
        kw = {}
        try:
            if "x_range" in obj:
                kw["x_min"], kw["x_max"] = (float(v) for v in obj["x_range"])
            if "y_range" in obj:
                kw["y_min"], kw["y_max"] = (float(v) for v in obj["y_range"])
        except (TypeError, ValueError):
            raise ValueError("x_range and y_range must be pairs of numbers") from None
        parts = obj.get("partitions", "all")
        if parts != "all":
            if not isinstance(parts, list):
                raise ValueError("partitions must be 'all' or a list of labels")
            kw["partitions"] = tuple(parts)
        if "outputs" in obj:
            kw["outputs"] = tuple(obj["outputs"])
        return replace(base, **kw)

    @property
    def x_axis(self) -> str:
        return "phi_minus" if self.family == "sq4" else "ratio"

    def x_grid(self) -> np.ndarray:
        if self.x_axis == "ratio":
            return np.logspace(math.log10(self.x_min), math.log10(self.x_max), self.resolution)
        return np.linspace(self.x_min, self.x_max, self.resolution)

    def y_grid(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.resolution)

    def partition_list(self) -> list:
        return list(self.partitions) or enumerate_bipartitions(FAMILY_MODES[self.family])


def load_sweep_spec(path) -> SweepSpec:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON ({exc})") from None
    return SweepSpec.from_dict(obj)


@dataclass(frozen=True)
class SweepRow:
    family: str
    x: float
    y: float
    partition: str
    nu_product: float
    log_negativity: float
    bound_violated: bool | None  # None where no variance suite exists (sq4)

    def csv_fields(self) -> list:
        flag = "" if self.bound_violated is None else str(self.bound_violated).lower()
        return [self.family, repr(self.x), repr(self.y), self.partition,
                repr(self.nu_product), repr(self.log_negativity), flag]


def bound_verdicts(params) -> dict:
    """Variance-bound verdict per partition label; empty for the square state."""
    if isinstance(params, TripartiteParams):
        suite = tripartite_bound_suite(params)
        return {ModePartition(3, [m]).label: e.violated for m, e in suite.evaluations.items()}
    if isinstance(params, FourModeLinearParams):
        return {p.label: pb.violated for p, pb in four_mode_bound_suite(params).items()}
    return {}


def evaluate_point(family: str, x: float, y: float, partitions) -> list:
    params = params_for_point(family, float(x), float(y))
    v, _ = build_state(params)
    verdicts = bound_verdicts(params)
    rows = []
    for part in partitions:
        rep = ppt_report(v, part)
        rows.append(SweepRow(family, float(x), float(y), part.label, rep.nu_product,
                             rep.log_negativity, verdicts.get(part.label)))
    return rows


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list:
    """Rows in row-major order: y outer, x inner, partitions innermost."""
    parts = spec.partition_list()
    points = [(x, y) for y in spec.y_grid() for x in spec.x_grid()]

    def work(pt):
        return evaluate_point(spec.family, pt[0], pt[1], parts)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(work, points))
    else:
        chunks = [work(pt) for pt in points]
    return [row for chunk in chunks for row in chunk]


def write_csv(rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow(row.csv_fields())


# verification ----------------------------------------------------------------

GRIDS = {"coarse": 11, "fine": 101}


@dataclass
class CheckResult:
    name: str
    max_deviation: float
    tol: float
    offenders: list

    @property
    def passed(self) -> bool:
        return not self.offenders

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        msg = f"{status} {self.name}: max deviation {self.max_deviation:.6e} (tol {self.tol:.1e})"
        if self.offenders:
            msg += f", {len(self.offenders)} offending points, first {self.offenders[0]}"
        return msg


def _factory(params, fault: str | None):
    v, bm = build_state(params)
    if fault == "squeeze-sign":
        sq = np.array(bm.squeeze, dtype=float)
        sq[0] = -sq[0]
        v = covariance_from_bm(BlochMessiahSpec(bm.u_b, sq))
    elif fault is not None:
        raise ValueError(f"unknown fault {fault!r}")
    return v


def _scaled(dev: float, v) -> float:
    return dev / max(1.0, float(np.max(np.abs(v.matrix))))


def run_verify(grid: str = "coarse", tol: float = 1e-8, spectrum_tol: float = 1e-9, fault: str | None = None,
               jobs: int = 1) -> list:
    """
    Cross-checks over every family on an n x n grid:

    - physical: factory covariances are valid and pure;
    - oracle_vs_factory: direct evolution against the Bloch-Messiah
      construction, elementwise, relative to max(1, max |V|);
    - analytic_vs_numeric: closed-form PT spectra against numerics,
      relative to max(1, nu);
    - bound_implies_ppt: every variance-bound violation is also a PPT
      violation.
    """
    try:
        n = GRIDS[grid]
    except KeyError:
        raise ValueError(f"unknown grid {grid!r}; expected one of {sorted(GRIDS)}") from None

    def point(task):
        family, x, y = task
        params = params_for_point(family, x, y)
        v = _factory(params, fault)
        rep = validate_covariance(v)
        purity = float(np.max(np.abs(symplectic_spectrum(v) - 1.0)))
        oracle = _scaled(float(np.max(np.abs(oracle_state(params).matrix - v.matrix))), v)
        spec_dev = 0.0
        subset_bad = []
        verdicts = bound_verdicts(params)
        for part in enumerate_bipartitions(v.n_modes):
            pt = partial_transpose(v, part)
            num = symplectic_spectrum(pt)
            ana = analytic_pt_spectrum(family, params, part)
            spec_dev = max(spec_dev, float(np.max(np.abs(num - ana) / np.maximum(1.0, ana))))
            if verdicts.get(part.label) and not ppt_report(v, part).entangled:
                subset_bad.append(part.label)
        return (family, x, y), rep.physical and rep.symmetric, purity, oracle, spec_dev, subset_bad

    tasks = []
    for family in FAMILIES:
        spec = SweepSpec.default(family, n)
        tasks += [(family, float(x), float(y)) for y in spec.y_grid() for x in spec.x_grid()]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(point, tasks))
    else:
        results = [point(t) for t in tasks]

    checks = {
        "physical": CheckResult("physical", 0.0, spectrum_tol, []),
        "oracle_vs_factory": CheckResult("oracle_vs_factory", 0.0, tol, []),
        "analytic_vs_numeric": CheckResult("analytic_vs_numeric", 0.0, spectrum_tol, []),
        "bound_implies_ppt": CheckResult("bound_implies_ppt", 0.0, 0.0, []),
    }
    for where, valid, purity, oracle, spec_dev, subset_bad in results:
        c = checks["physical"]
        c.max_deviation = max(c.max_deviation, purity)
        if not valid or purity > spectrum_tol:
            c.offenders.append(where)
        for key, dev, lim in (("oracle_vs_factory", oracle, tol), ("analytic_vs_numeric", spec_dev, spectrum_tol)):
            c = checks[key]
            c.max_deviation = max(c.max_deviation, dev)
            if not dev <= lim:
                c.offenders.append(where)
        c = checks["bound_implies_ppt"]
        c.max_deviation = max(c.max_deviation, float(len(subset_bad)))
        c.offenders += [where + (lbl,) for lbl in subset_bad]
    return list(checks.values())


def timed_verify(**kw) -> tuple[list, float]:
    t0 = time.perf_counter()
    res = run_verify(**kw)
    return res, time.perf_counter() - t0


# reports ---------------------------------------------------------------------


def _bound_entries(params) -> dict:
    """Highlighted variance-bound evaluation per partition label."""
    if isinstance(params, TripartiteParams):
        suite = tripartite_bound_suite(params)
        return {ModePartition(3, [m]).label: e for m, e in suite.evaluations.items()}
    if isinstance(params, FourModeLinearParams):
        return {p.label: pb.best for p, pb in four_mode_bound_suite(params).items()}
    return {}


def build_report(params, partitions=None) -> dict:
    """
    Per-partition PPT report plus the variance bound where one is defined.

    The square state has no variance suite; its bound fields are null.  The
    "genuine" flag is set when every bipartition is PPT-entangled, and is
    only reported when all partitions were evaluated.
    """
    v, _ = build_state(params)
    all_parts = enumerate_bipartitions(v.n_modes)
    parts = all_parts if partitions is None else list(partitions)
    bounds = _bound_entries(params)
    entries = []
    for part in parts:
        rep = ppt_report(v, part)
        b = bounds.get(part.label)
        entries.append({
            "label": part.label,
            "verdict": rep.verdict,
            "spectrum_pt": [float(x) for x in rep.spectrum_pt],
            "nu_sub_unity": list(rep.sub_unity),
            "nu_product": rep.nu_product,
            "log_negativity": rep.log_negativity,
            "bound_lhs": None if b is None else b.lhs,
            "bound_rhs": None if b is None else b.rhs,
            "bound_violated": None if b is None else b.violated,
        })
    out = {"state": params_to_spec(params), "family": family_of(params), "partitions": entries}
    if len(parts) == len(all_parts):
        out["genuine"] = all(e["verdict"] == "entangled" for e in entries)
    return out

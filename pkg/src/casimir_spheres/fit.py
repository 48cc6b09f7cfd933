"""Synthetic sphere-sphere / sphere-plate experiments and beyond-PFA fits.

Measurements are force gradients divided by the effective radius,
``F'/R`` (N/m^2), taken for several radius combinations at common
separations.  Two estimators are provided at a fixed separation ``a``:

* one parameter, assuming a radius-independent ``beta'``::

      F'/R = -2 pi F_pp(a) (1 + beta' a/R)

* two parameters, allowing for the ``u`` dependence of ``beta'``::

      F'/R = -2 pi F_pp(a) (1 - theta_hat a/R - kappa_hat a/(R1 + R2))

Both are solved as weighted linear least squares on the dimensionless
ratio ``(F'/R) / (-2 pi F_pp) - 1``.
"""
import csv
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .classical import SphereGeometry
from .curvature import force_gradient_total
from .errors import DomainError, FitError
from .lifshitz import DEFAULT_POLICY, plane_interaction
from .material import DEFAULT_GOLD, ThermalEnvironment

_UM = 1e-6
_NM = 1e-9
CSV_HEADER = ["R1_um", "R2_um", "a_nm", "Fprime_over_Rtilde", "sigma"]
NORMAL_EQUATIONS_MAX_CONDITION = 1e8
SINGULAR_CONDITION = 1e12


@dataclass(frozen=True)
class RadiusCombination:
    """A pair of sphere radii in metres; ``R2 = inf`` for a plate."""

    R1: float
    R2: float = math.inf

    def __post_init__(self):
        if not (self.R1 > 0 and self.R2 > 0) or math.isinf(self.R1):
            raise DomainError("radii must be positive with R1 finite")

    def geometry(self, a):
        return SphereGeometry(self.R1, self.R2, a)

    @property
    def effective_radius(self):
        return self.geometry(1.0).effective_radius

    @property
    def u(self):
        return self.geometry(1.0).u

    @property
    def inverse_radius_sum(self):
        return self.geometry(1.0).inverse_radius_sum


_PLATE_SPHERES_UM = (40.7, 36.1, 34.2)
_SECOND_SPHERES_UM = (29.8, 38.0, 46.9)

# three sphere-plate and nine sphere-sphere setups of the two-sphere experiment
EXPERIMENT_COMBINATIONS = tuple(
    [RadiusCombination(r * _UM) for r in _PLATE_SPHERES_UM]
    + [
        RadiusCombination(r1 * _UM, r2 * _UM)
        for r1 in sorted(_PLATE_SPHERES_UM)
        for r2 in _SECOND_SPHERES_UM
    ]
)
EXPERIMENT_SEPARATIONS = tuple(np.linspace(40 * _NM, 300 * _NM, 26))


@dataclass(frozen=True)
class FitRecord:
    combination: RadiusCombination
    separation: float
    fprime_over_rtilde: float
    sigma: float = None


@dataclass(frozen=True)
class FitDataset:
    """An ordered collection of :class:`FitRecord`."""

    records: tuple

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def separations(self):
        return sorted({r.separation for r in self.records})

    def at_separation(self, a, rtol=1e-9):
        return FitDataset(tuple(r for r in self.records if math.isclose(r.separation, a, rel_tol=rtol)))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv_text())

    def to_csv_text(self):
        lines = [",".join(CSV_HEADER)]
        for r in self.records:
            c = r.combination
            r2 = "inf" if math.isinf(c.R2) else repr(c.R2 / _UM)
            sigma = "" if r.sigma is None else repr(r.sigma)
            lines.append(",".join([
                repr(c.R1 / _UM), r2, repr(r.separation / _NM), repr(r.fprime_over_rtilde), sigma,
            ]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != CSV_HEADER:
                raise DomainError(f"{path}: expected header {','.join(CSV_HEADER)}")
            records = []
            for row in reader:
                sigma = row["sigma"].strip()
                records.append(FitRecord(
                    combination=RadiusCombination(float(row["R1_um"]) * _UM, float(row["R2_um"]) * _UM),
                    separation=float(row["a_nm"]) * _NM,
                    fprime_over_rtilde=float(row["Fprime_over_Rtilde"]),
                    sigma=float(sigma) if sigma else None,
                ))
        return cls(tuple(records))


def small_distance_model(theta_hat, kappa_hat, material=DEFAULT_GOLD, thermal=ThermalEnvironment(),
                         policy=DEFAULT_POLICY):
    """Force-gradient generator from the two-coefficient small-distance form.

    Returns ``model(geom) -> F'`` in N/m.
    """
    def model(geom):
        force = plane_interaction(material, thermal, geom.gap, policy).force
        r = geom.effective_radius
        bracket = 1.0 - geom.gap * theta_hat / r - geom.gap * kappa_hat * geom.inverse_radius_sum
        return -2.0 * math.pi * r * force * bracket
    return model


def synthesize_dataset(material=DEFAULT_GOLD, thermal=ThermalEnvironment(), combinations=EXPERIMENT_COMBINATIONS,
                       separations=EXPERIMENT_SEPARATIONS, table=None, noise_sigma=None, seed=None,
                       model=None, policy=DEFAULT_POLICY):
    """Generate ``F'/R`` records for every (separation, combination) pair.

    Parameters
    ----------
    noise_sigma : float, optional
        Standard deviation (N/m^2) of independent Gaussian noise added to
        each value.  The value is stored as the record's ``sigma``.
    seed : int, optional
        Seed for the noise generator; equal seeds give identical datasets.
    model : callable, optional
        ``model(geom) -> F'``; defaults to the combined beyond-PFA gradient.
    """
    if model is None:
        def model(geom):
            return force_gradient_total(material, thermal, geom, table, policy)
    rng = np.random.default_rng(seed)
    records = []
    for a in separations:
        for comb in combinations:
            geom = comb.geometry(float(a))
            value = model(geom) / geom.effective_radius
            if noise_sigma:
                value += rng.normal(0.0, noise_sigma)
            records.append(FitRecord(comb, float(a), value, noise_sigma if noise_sigma else None))
    return FitDataset(tuple(records))


@dataclass(frozen=True)
class FitResult:
    model: str
    separation: float
    names: tuple
    estimates: tuple
    standard_errors: tuple
    covariance: tuple
    residuals: tuple
    condition_number: float
    solver: str
    plate_force: float
    absolute_sigma: bool = False

    def __getitem__(self, name):
        return self.estimates[self.names.index(name)]

    def standard_error(self, name):
        return self.standard_errors[self.names.index(name)]

    def confidence_interval(self, name, z=2.0):
        v, s = self[name], self.standard_error(name)
        return v - z * s, v + z * s

    def as_dict(self):
        return {
            "model": self.model,
            "separation_m": self.separation,
            "coefficients": [
                {"name": n, "estimate": e, "standard_error": s}
                for n, e, s in zip(self.names, self.estimates, self.standard_errors)
            ],
            "covariance": [list(row) for row in self.covariance],
            "condition_number": self.condition_number,
            "solver": self.solver,
            "absolute_sigma": self.absolute_sigma,
            "plate_force_N_per_m2": self.plate_force,
            "n_records": len(self.residuals),
            "residuals_N_per_m2": list(self.residuals),
        }

    def to_json(self, **kwargs):
        return json.dumps(self.as_dict(), **kwargs)


def _weighted_lstsq(x, y, w):
    sw = np.sqrt(w)
    xw = x * sw[:, None]
    yw = y * sw
    cond = float(np.linalg.cond(xw))
    if not np.isfinite(cond) or cond > SINGULAR_CONDITION:
        raise FitError("regressors are collinear", condition_number=cond)
    normal = xw.T @ xw
    if cond * cond <= NORMAL_EQUATIONS_MAX_CONDITION:
        beta = np.linalg.solve(normal, xw.T @ yw)
        solver = "normal-equations"
    else:
        q, r = np.linalg.qr(xw)
        beta = solve_triangular(r, q.T @ yw)
        solver = "qr"
    r_inv = np.linalg.inv(np.linalg.qr(xw, mode="r"))
    cov = r_inv @ r_inv.T
    return beta, cov, cond, solver


def _fit(dataset, a, regressor_fn, names, signs, model_name, material, thermal, policy):
    data = dataset.at_separation(a)
    n = len(data)
    if n < 3:
        raise FitError(f"need at least 3 records at a={a:g} m, got {n}")
    force = plane_interaction(material, thermal, a, policy).force
    scale = -2.0 * math.pi * force
    obs = np.array([r.fprime_over_rtilde for r in data])
    y = obs / scale - 1.0
    x = np.array([regressor_fn(r.combination) for r in data]) * a
    sigmas = [r.sigma for r in data]
    absolute = all(s is not None and s > 0 for s in sigmas)
    w = 1.0 / (np.array(sigmas) / abs(scale)) ** 2 if absolute else np.ones(n)
    beta, cov, cond, solver = _weighted_lstsq(x, y, w)
    fitted = scale * (1.0 + x @ beta)
    resid = obs - fitted
    p = x.shape[1]
    if not absolute:
        dof = n - p
        s2 = float(np.sum(w * ((y - x @ beta) ** 2)) / dof) if dof > 0 else math.nan
        cov = cov * s2
    sgn = np.array(signs, dtype=float)
    cov = cov * np.outer(sgn, sgn)
    est = beta * sgn
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    return FitResult(
        model=model_name,
        separation=a,
        names=tuple(names),
        estimates=tuple(map(float, est)),
        standard_errors=tuple(map(float, se)),
        covariance=tuple(tuple(map(float, row)) for row in cov),
        residuals=tuple(map(float, resid)),
        condition_number=cond,
        solver=solver,
        plate_force=force,
        absolute_sigma=absolute,
    )


def fit_one_parameter(dataset, a, material=DEFAULT_GOLD, thermal=ThermalEnvironment(), policy=DEFAULT_POLICY):
    """Fit a radius-independent ``beta'`` against ``1/R_eff`` at separation ``a``."""
    data = dataset.at_separation(a)
    radii = {round(r.combination.effective_radius, 15) for r in data}
    if len(radii) < 2:
        raise FitError("one-parameter fit needs at least two distinct effective radii")
    return _fit(dataset, a, lambda c: [1.0 / c.effective_radius], ("beta_prime",), (1.0,),
                "one-parameter", material, thermal, policy)


def fit_two_parameter(dataset, a, material=DEFAULT_GOLD, thermal=ThermalEnvironment(), policy=DEFAULT_POLICY):
    """Joint fit of ``theta_hat`` and ``kappa_hat`` against ``1/R_eff`` and ``1/(R1+R2)``."""
    data = dataset.at_separation(a)
    us = {round(r.combination.u, 12) for r in data}
    if len(us) < 2:
        raise FitError("two-parameter fit needs records with at least two distinct u values",
                       condition_number=math.inf)
    return _fit(dataset, a, lambda c: [1.0 / c.effective_radius, c.inverse_radius_sum],
                ("theta_hat", "kappa_hat"), (-1.0, -1.0), "two-parameter", material, thermal, policy)


def noise_for_beta_uncertainty(combinations, a, beta_standard_error, material=DEFAULT_GOLD,
                               thermal=ThermalEnvironment(), policy=DEFAULT_POLICY):
    """Noise level on ``F'/R`` (N/m^2) giving a target standard error on ``beta'``.

    For the one-parameter estimator with equal weights,
    ``se(beta') = sigma_y / sqrt(sum (a/R)^2)`` where ``sigma_y`` is the
    noise on the dimensionless ratio.
    """
    x = np.array([a / c.effective_radius for c in combinations])
    force = plane_interaction(material, thermal, a, policy).force
    return beta_standard_error * math.sqrt(float(x @ x)) * 2.0 * math.pi * abs(force)

"""Experiment registry: parameter schemas, fixed CSV columns, runners and --check thresholds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import dicke, spinfid
from ..results import ResultTable, fit_power_law
from ..tfvlasov import dispersion, semiclassical, thomas_fermi, vlasov
from .config import ExperimentSpec, Param

TWO_PI = 2 * math.pi

# acceptance thresholds used by --check
DICKE_ORACLE_TOL = 1e-8
REVIVAL_TOL = 1e-10
COLLAPSE_SLOPE_TOL = 0.05
CLOSED_FORM_TOL = 1e-12
SHORT_TIME_RTOL = 1e-3
VARIANCE_TOL = 1e-10
LANDAU_RATE_RTOL = 0.05
MASS_DRIFT_TOL = 1e-8
MOMENTUM_DRIFT_TOL = 1e-6
TF_EXPONENT_RTOL = 0.01
WK_EXPONENT_TOL = 0.05
WK_ANALYTIC_TOL = 1e-10


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


# ---------------------------------------------------------------- dicke


def _dicke_params(p) -> dicke.DickeParams:
    return dicke.DickeParams(
        omega=p["omega"], g=p["g"], n_atoms=p["n_atoms"], delta=p.get("delta") or 0.0, fock_cutoff=p.get("fock_cutoff") or 64
    )


def run_dicke_envelope(p, rng) -> ResultTable:
    params = _dicke_params(p)
    t_max = p["t_max"] if p["t_max"] is not None else TWO_PI / p["omega"]
    t = np.linspace(0.0, t_max, p["n_points"])
    table = ResultTable(EXPERIMENTS["dicke-envelope"].columns)
    table.extend(zip(t, dicke.envelope(t, params)))
    return table


def check_dicke_envelope(p, table):
    env = table.column("envelope")
    return [
        CheckResult("envelope starts at 1", abs(env[0] - 1) < 1e-15, f"envelope(0) = {env[0]!r}"),
        CheckResult("envelope bounded by 1", bool(np.all(env <= 1 + 1e-15)), f"max = {env.max()!r}"),
    ]


def radiation_state(p, rng) -> dicke.RadiationState:
    cutoff = p["fock_cutoff"]
    kind = p["state"]
    if kind == "vacuum":
        return dicke.RadiationState.vacuum(cutoff)
    if kind == "number":
        return dicke.RadiationState.number(p["photon_number"], cutoff)
    if kind == "coherent":
        return dicke.RadiationState.coherent(p["coherent_amplitude"], cutoff)
    levels = p["random_levels"]
    c = np.zeros(cutoff + 1, dtype=complex)
    c[: levels + 1] = rng.standard_normal(levels + 1) + 1j * rng.standard_normal(levels + 1)
    return dicke.RadiationState(c / np.linalg.norm(c))


def run_dicke_exact(p, rng) -> ResultTable:
    params = _dicke_params(p)
    state = radiation_state(p, rng)
    t = np.linspace(0.0, TWO_PI / p["omega"], p["n_points"])
    analytic = dicke.analytic_expectation(t, state, params)
    exact = dicke.exact_expectation(t, state, params, grow_cutoff=p["grow_cutoff"])
    table = ResultTable(EXPERIMENTS["dicke-exact-vs-analytic"].columns)
    for row in zip(t, analytic.real, analytic.imag, exact.amplitudes.real, exact.amplitudes.imag, np.abs(analytic - exact.amplitudes)):
        table.append(row)
    table.meta.update(truncation_suspect=exact.truncation_suspect, propagation_cutoff=exact.propagation_cutoff)
    return table


def check_dicke_exact(p, table):
    dev = table.column("abs_deviation")
    revival = abs(complex(table.column("analytic_re")[-1], table.column("analytic_im")[-1]))
    return [
        CheckResult("analytic matches exact propagation", dev.max() < DICKE_ORACLE_TOL, f"max deviation {dev.max():.3e} < {DICKE_ORACLE_TOL:.0e}"),
        CheckResult("full revival at 2 pi / omega", abs(revival - 1) < REVIVAL_TOL, f"|<U_F>| - 1 = {revival - 1:.3e}"),
    ]


def run_collapse_scaling(p, rng) -> ResultTable:
    study = dicke.collapse_study(p["n_atoms"], p["g"], p["omega"])
    return ResultTable(EXPERIMENTS["dicke-collapse-scaling"].columns, study.rows, study.meta)


def check_collapse_scaling(p, table):
    fit = fit_power_law(table.column("n_atoms"), table.column("fitted_width"))
    return [
        CheckResult(
            "revival width scales as 1/N",
            abs(fit.exponent + 1) <= p["slope_tolerance"],
            f"exponent {fit.exponent:.4f}, target -1 +- {p['slope_tolerance']}",
        )
    ]


# ---------------------------------------------------------------- spins


def spin_model(p, rng, n_sites=None):
    n = p["n_sites"] if n_sites is None else n_sites
    ens, phi = spinfid.build_model(
        p["model"], n, delta=p["delta"], coupling=p["coupling"], field_strength=p["field_strength"]
    )
    if p["state"] == "random":
        phi = spinfid.ProductState.random(n, rng)
    return ens, phi


def run_spin_gaussian(p, rng) -> ResultTable:
    ens, phi = spin_model(p, rng)
    s2 = spinfid.variance(ens, phi)
    t_max = p["t_max"] if p["t_max"] is not None else 3.0 / math.sqrt(s2)
    t = np.linspace(0.0, t_max, p["n_points"])
    f = spinfid.FidelityEvaluator(ens, phi)(t)
    gauss = spinfid.gaussian_prediction(s2, t)
    table = ResultTable(EXPERIMENTS["spin-gaussian"].columns)
    table.extend(zip(t, f, gauss, np.abs(f - gauss)))
    _, c2 = short_time_fit(ens, phi)
    table.meta.update(sigma_sq=s2, short_time_coefficient=c2)
    return table


def short_time_fit(ens, phi) -> tuple[float, float]:
    """``(sigma^2, fitted quadratic coefficient of -log F on (0, 0.01/sigma])``."""
    s2 = spinfid.variance(ens, phi)
    t = np.linspace(0.0, 0.01 / math.sqrt(s2), 41)[1:]
    y = -np.log(spinfid.FidelityEvaluator(ens, phi)(t))
    design = np.column_stack([t**2, t**4])
    (c2, _), *_ = np.linalg.lstsq(design, y, rcond=None)
    return s2, float(c2)


def check_spin_gaussian(p, table):
    t, f = table.column("t"), table.column("fidelity_exact")
    out = [
        CheckResult("F(0) = 1", abs(f[0] - 1) < 1e-12, f"F(0) - 1 = {f[0] - 1:.3e}"),
        CheckResult("0 <= F <= 1", bool(np.all((f >= 0) & (f <= 1))), f"range [{f.min():.3e}, {f.max():.3e}]"),
    ]
    if p["model"] == "independent-field" and p["state"] == "default":
        closed = np.cos(p["delta"] * t / 2) ** (2 * p["n_sites"])
        err = np.max(np.abs(f - closed))
        out.append(CheckResult("closed form cos^2N(delta t / 2)", err < CLOSED_FORM_TOL, f"max error {err:.3e}"))
    s2, c2 = table.meta["sigma_sq"], table.meta["short_time_coefficient"]
    out.append(CheckResult("short-time Gaussian coefficient", abs(c2 / s2 - 1) < SHORT_TIME_RTOL, f"fit {c2:.10g} vs sigma^2 {s2:.10g}"))
    return out


def run_spin_hypotheses(p, rng) -> ResultTable:
    table = ResultTable(EXPERIMENTS["spin-hypotheses"].columns)
    dense = []
    for n in p["n_sites"]:
        ens, phi = spin_model(p, rng, n)
        report = spinfid.check_hypotheses(ens, phi, p["C"], p["C_prime"])
        table.append((n, report.sigma_sq, report.c_lower, report.c_prime, float(report.hypotheses_met)))
        if n <= 16:
            dense.append(abs(spinfid.dense_variance(ens, phi) - report.sigma_sq))
    table.meta.update(dense_variance_error=max(dense, default=0.0))
    return table


def check_spin_hypotheses(p, table):
    met = table.column("hypotheses_met")
    err = table.meta["dense_variance_error"]
    return [
        CheckResult("theorem hypotheses hold", bool(np.all(met == 1)), f"{int(met.sum())}/{met.size} sizes satisfy them"),
        CheckResult("local variance equals dense variance", err < VARIANCE_TOL, f"max difference {err:.3e}"),
    ]


# ---------------------------------------------------------------- kinetics


def run_landau(p, rng) -> ResultTable:
    if p["profile"] == "maxwellian":
        run = vlasov.landau_run(
            p["epsilon"], p["k_mode"], p["n_x"], p["n_v"], p["v_max"], p["t_final"], p["dt"], p["fermi_term"], p["record_every"]
        )
    else:
        W = vlasov.two_stream(p["epsilon"], p["k_mode"], p["drift"], p["v_th"], p["n_x"], p["n_v"], p["v_max"])
        dt = p["dt"] if p["dt"] is not None else 0.9 * W.dx / W.v_max
        run = vlasov.simulate(W, p["t_final"], dt, thomas_fermi.PhysicalConstants.plasma_units(), p["fermi_term"], p["record_every"])
    meta = {k: v for k, v in run.meta.items() if k != "final_state"}
    table = ResultTable(EXPERIMENTS["landau-damping"].columns, run.rows, meta)
    table.meta["verdict"] = vlasov.stability_verdict(table)
    return table


def check_landau(p, table):
    m = table.meta
    mass = table.column("mass")
    momentum = table.column("momentum")
    mass_drift = float(np.max(np.abs(mass - mass[0])) / mass[0])
    mom_drift = float(np.max(np.abs(momentum - momentum[0])))
    out = [CheckResult("mass conserved", mass_drift < MASS_DRIFT_TOL, f"relative drift {mass_drift:.3e}")]
    if p["profile"] == "two-stream":
        out.append(CheckResult("two-stream is unstable", m["verdict"] == vlasov.UNDAMPED, f"verdict {m['verdict']}"))
        return out
    out.append(CheckResult("momentum conserved", mom_drift < MOMENTUM_DRIFT_TOL, f"drift {mom_drift:.3e}"))
    if p["epsilon"] == 0:
        e = table.column("field_energy").max()
        out.append(CheckResult("no field without perturbation", e < vlasov.FIELD_FLOOR, f"max field energy {e:.3e}"))
        return out
    root = dispersion.langmuir_root(p["k_mode"])
    rel = abs(abs(m["gamma"]) - abs(root.imag)) / abs(root.imag)
    out.append(
        CheckResult(
            "damping rate matches dispersion root",
            rel < LANDAU_RATE_RTOL,
            f"gamma {m['gamma']:.5f} vs {root.imag:.5f} (relative error {rel:.2%})",
        )
    )
    out.append(CheckResult("Maxwellian is damped", m["verdict"] == vlasov.DAMPED, f"verdict {m['verdict']}"))
    return out


def run_tf_scaling(p, rng) -> ResultTable:
    k = thomas_fermi.PhysicalConstants(hbar=p["hbar"], mass=p["mass"], charge=p["charge"])
    study = thomas_fermi.tf_energy_scaling(p["Z"], k)
    return ResultTable(EXPERIMENTS["tf-energy-scaling"].columns, study.rows, study.meta)


def check_tf_scaling(p, table):
    fit = fit_power_law(table.column("Z"), -table.column("energy"))
    rel = abs(fit.exponent - 7 / 3) / (7 / 3)
    return [CheckResult("energy scales as Z^(7/3)", rel < TF_EXPONENT_RTOL, f"exponent {fit.exponent:.6f} (relative error {rel:.2e})")]


def harmonic_potential(p) -> semiclassical.PotentialField:
    x = np.linspace(-p["half_width"], p["half_width"], p["n_grid"])
    return semiclassical.PotentialField(0.5 * p["spring"] * x**2, x)


def run_wk(p, rng) -> ResultTable:
    k = thomas_fermi.PhysicalConstants(hbar=p["hbar"], mass=p["mass"])
    V = harmonic_potential(p)
    idx = int(np.argmin(np.abs(V.coords - p["x"])))
    t = np.geomspace(p["t_min"], p["t_max"], p["n_points"])
    factor = semiclassical.wigner_kirkwood_factor(V, idx, t, k)
    table = ResultTable(EXPERIMENTS["wk-diagnostic"].columns)
    table.extend(zip(t, factor.real, factor.imag, np.abs(factor - 1)))
    table.meta.update(x=float(V.coords[idx]))
    return table


def check_wk(p, table):
    k = thomas_fermi.PhysicalConstants(hbar=p["hbar"], mass=p["mass"])
    V = harmonic_potential(p)
    idx = int(np.argmin(np.abs(V.coords - p["x"])))
    x = V.coords[idx]
    t = table.column("t")
    got = table.column("factor_re") + 1j * table.column("factor_im")
    kk, hb, m = p["spring"], k.hbar, k.mass
    analytic = 1 + hb**2 / (12 * m) * (t**2 * kk / hb**2 - 1j * t**3 * kk**2 * x**2 / hb**3)
    err = float(np.max(np.abs(got - analytic)))
    fit = fit_power_law(t, table.column("abs_deviation"))
    flat = semiclassical.PotentialField(np.full_like(V.coords, 3.0), V.coords)
    flat_dev = float(np.max(np.abs(semiclassical.wigner_kirkwood_factor(flat, idx, t, k) - 1)))
    return [
        CheckResult("harmonic factor matches analytic substitution", err < WK_ANALYTIC_TOL, f"max error {err:.3e}"),
        CheckResult("|factor - 1| grows as t^2", abs(fit.exponent - 2) < WK_EXPONENT_TOL, f"exponent {fit.exponent:.4f}"),
        CheckResult("constant potential gives factor 1", flat_dev == 0.0, f"max |factor - 1| = {flat_dev:.3e}"),
    ]


# ---------------------------------------------------------------- registry

_MODEL = dict(
    model=Param(str, "independent-field", choices=("independent-field", "transverse-ising")),
    delta=Param(float, 1.0, positive=True, unit="energy"),
    coupling=Param(float, 1.0, unit="energy"),
    field_strength=Param(float, 1.0, unit="energy"),
    state=Param(str, "default", choices=("default", "random")),
)

EXPERIMENTS: dict[str, ExperimentSpec] = {}


def _register(spec: ExperimentSpec):
    EXPERIMENTS[spec.name] = spec


_register(
    ExperimentSpec(
        "dicke-envelope",
        "Gaussian collapse envelope exp(-(N g/w)^2 (1 - cos w t)) on a time grid",
        dict(
            omega=Param(float, required=True, positive=True, unit="frequency"),
            g=Param(float, required=True, positive=True, unit="frequency"),
            n_atoms=Param(int, required=True, positive=True),
            t_max=Param(float, None, positive=True, unit="time"),
            n_points=Param(int, 1000, positive=True),
        ),
        [("t", "time"), ("envelope", "1")],
        run_dicke_envelope,
        check_dicke_envelope,
    )
)
_register(
    ExperimentSpec(
        "dicke-exact-vs-analytic",
        "closed-form <U_F(t)> against exact propagation over one period",
        dict(
            omega=Param(float, 1.0, positive=True, unit="frequency"),
            g=Param(float, required=True, positive=True, unit="frequency"),
            n_atoms=Param(int, required=True, positive=True),
            fock_cutoff=Param(int, 64, positive=True),
            state=Param(str, "vacuum", choices=("vacuum", "number", "coherent", "random")),
            photon_number=Param(int, 1, non_negative=True),
            coherent_amplitude=Param(float, 1.0, non_negative=True),
            random_levels=Param(int, 4, non_negative=True),
            n_points=Param(int, 50, positive=True),
            grow_cutoff=Param(bool, True),
        ),
        [
            ("t", "time"),
            ("analytic_re", "1"),
            ("analytic_im", "1"),
            ("exact_re", "1"),
            ("exact_im", "1"),
            ("abs_deviation", "1"),
        ],
        run_dicke_exact,
        check_dicke_exact,
    )
)
_register(
    ExperimentSpec(
        "dicke-collapse-scaling",
        "revival-peak width against N with a log-log fit",
        dict(
            omega=Param(float, 1.0, positive=True, unit="frequency"),
            g=Param(float, required=True, positive=True, unit="frequency"),
            n_atoms=Param(int, required=True, positive=True, list_native=True),
            slope_tolerance=Param(float, COLLAPSE_SLOPE_TOL, positive=True),
        ),
        [("n_atoms", "1"), ("fitted_width", "time"), ("analytic_width", "time")],
        run_collapse_scaling,
        check_collapse_scaling,
    )
)
_register(
    ExperimentSpec(
        "spin-gaussian",
        "exact product-state fidelity against the Gaussian limit exp(-sigma^2 t^2)",
        dict(
            n_sites=Param(int, required=True, positive=True),
            t_max=Param(float, None, positive=True, unit="time"),
            n_points=Param(int, 200, positive=True),
            **_MODEL,
        ),
        [("t", "time"), ("fidelity_exact", "1"), ("gaussian_prediction", "1"), ("abs_deviation", "1")],
        run_spin_gaussian,
        check_spin_gaussian,
    )
)
_register(
    ExperimentSpec(
        "spin-hypotheses",
        "variance bound sigma^2 >= N C and term bound C' across chain lengths",
        dict(
            n_sites=Param(int, required=True, positive=True, list_native=True),
            C=Param(float, required=True, positive=True, unit="energy^2"),
            C_prime=Param(float, required=True, positive=True, unit="energy"),
            **_MODEL,
        ),
        [("n_sites", "1"), ("sigma_sq", "energy^2"), ("c_lower", "energy^2"), ("c_prime", "energy"), ("hypotheses_met", "bool")],
        run_spin_hypotheses,
        check_spin_hypotheses,
    )
)
_register(
    ExperimentSpec(
        "landau-damping",
        "1D1V Vlasov-Poisson run: Landau damping or two-stream instability",
        dict(
            k_mode=Param(float, 0.5, positive=True, unit="1/length"),
            epsilon=Param(float, 0.001, non_negative=True),
            n_x=Param(int, 128, positive=True),
            n_v=Param(int, 256, positive=True),
            v_max=Param(float, 6.0, positive=True, unit="velocity"),
            t_final=Param(float, 50 * TWO_PI, positive=True, unit="time"),
            dt=Param(float, None, positive=True, unit="time"),
            profile=Param(str, "maxwellian", choices=("maxwellian", "two-stream")),
            drift=Param(float, 2.0, positive=True, unit="velocity"),
            v_th=Param(float, 0.5, positive=True, unit="velocity"),
            fermi_term=Param(bool, False),
            record_every=Param(int, 1, positive=True),
        ),
        [("t", "1/omega_p"), ("field_energy", "energy^2/length"), ("mass", "1"), ("momentum", "1")],
        run_landau,
        check_landau,
    )
)
_register(
    ExperimentSpec(
        "tf-energy-scaling",
        "minimized radial Thomas-Fermi energy against Z",
        dict(
            Z=Param(int, [10, 20, 40, 80], positive=True, list_native=True),
            hbar=Param(float, 1.0, positive=True),
            mass=Param(float, 1.0, positive=True),
            charge=Param(float, 1.0, positive=True),
        ),
        [("Z", "1"), ("energy", "energy"), ("scale", "1/length"), ("shape", "1")],
        run_tf_scaling,
        check_tf_scaling,
    )
)
_register(
    ExperimentSpec(
        "wk-diagnostic",
        "Wigner-Kirkwood correction bracket for a harmonic potential",
        dict(
            spring=Param(float, 1.0, positive=True),
            x=Param(float, 1.0, unit="length"),
            half_width=Param(float, 4.0, positive=True, unit="length"),
            n_grid=Param(int, 401, positive=True),
            t_min=Param(float, 1e-3, positive=True, unit="time"),
            t_max=Param(float, 1e-1, positive=True, unit="time"),
            n_points=Param(int, 30, positive=True),
            hbar=Param(float, 1.0, positive=True),
            mass=Param(float, 1.0, positive=True),
        ),
        [("t", "time"), ("factor_re", "1"), ("factor_im", "1"), ("abs_deviation", "1")],
        run_wk,
        check_wk,
    )
)

"""Command-line front end: configure instances, run checks, emit reports.

Subcommands
    rp-check     positivity certificates over configured families
    reconstruct  physical space, transfer contraction, spectrum
    npoint       multi-time moment identity, three-way comparison table
    cdual        involutive split and dual structure constants
    cone-check   hyperbolic cone diagnostics and semigroup membership
    suite        every check above plus controls, one summary table

Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 usage or
configuration error.  Reports are plain text written atomically; tables
carry 17 significant digits, summaries 6.  With a fixed seed and config,
repeated runs produce byte-identical files: no timestamps, no absolute
paths, fixed iteration order.

Configuration is a key: value text file; command-line flags win over file
values.  The default output directory comes from --out, then the
OSLAB_OUT environment variable, then ./oslab-reports.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import liealg
from .lattice import (
    CovarianceError,
    GaussianEuclideanMeasure,
    LatticeMismatchError,
    TestFunction,
    TimeLattice,
    check_stationarity,
    check_time_reflection_symmetry,
    cosine_damped_covariance,
    free_field_covariance,
    ou_covariance,
)
from .positivity import (
    DEFAULT_PSD_RTOL,
    DplusMembershipError,
    HermiticityError,
    SampledObservable,
    certificate_to_text,
    delta_family,
    pd_gram_certificate,
    rp_gram_certificate,
    rp_sampled_certificate,
)
from .reconstruction import (
    CONTRACTION_TOL,
    ReflectionPositivityError,
    RepresentabilityError,
    ShiftRangeError,
    SpectrumError,
    build_physical_space,
    check_reflection_intertwining,
    extract_hamiltonian,
    transfer_operator,
    verify_npoint_identity,
)
from .textio import atomic_write, fmt, fmt6

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

OUT_ENV_VAR = "OSLAB_OUT"
DEFAULT_OUT_DIR = "oslab-reports"

MEASURE_INSTANCES = ("ou", "free-field", "non-rp", "corrupted")

# documented negative-control parameters: the cosine-damped kernel at this
# frequency is positive definite but not reflection positive for the
# full positive-site spike family at this amplitude
NON_RP_OMEGA = 4.0
NON_RP_SCALE = 2.0

# documented corrupted-functional fixture: adding a constant to every
# nonzero argument breaks positive-definiteness against the zero function
CORRUPTION_OFFSET = 0.5
CORRUPTED_SPIKE_SITE = 9
CORRUPTED_SPIKE_SCALE = 0.2

# errors that mean the requested computation is out of range or malformed
RANGE_ERRORS = (ShiftRangeError, LatticeMismatchError, DplusMembershipError)
# errors that mean a mathematical check failed on valid input
MATH_ERRORS = (
    ReflectionPositivityError,
    RepresentabilityError,
    SpectrumError,
    CovarianceError,
    HermiticityError,
    liealg.StructureError,
    liealg.InvolutionError,
    liealg.ConeError,
)


class ConfigError(ValueError):
    """Invalid configuration value, file, or flag combination."""


@dataclass
class RunConfig:
    """Validated run parameters shared by every subcommand."""

    instance: str = "ou"
    n_points: int = 32
    spacing: float = 0.25
    mass: float = 1.0
    max_degree: int = 3
    times: tuple = ()
    degrees: tuple = ()
    step: float | None = None
    samples: int = 0
    seed: int = 2026
    tolerance: float | None = None
    out: str | None = None
    algebra: str | None = None  # per-command default when unset
    families: int = 8
    family_size: int = 6

    def validate(self) -> None:
        if self.instance not in MEASURE_INSTANCES:
            raise ConfigError(
                "unknown instance %r; choose from %s"
                % (self.instance, ", ".join(MEASURE_INSTANCES))
            )
        if self.n_points % 2 != 0 or not 4 <= self.n_points <= 4096:
            raise ConfigError("n_points must be even and between 4 and 4096")
        if self.spacing <= 0.0:
            raise ConfigError("spacing must be positive")
        if self.mass <= 0.0:
            raise ConfigError("mass must be positive")
        if self.max_degree < 1:
            raise ConfigError("max_degree must be at least 1")
        if self.samples != 0 and self.samples < 1000:
            raise ConfigError(
                "samples must be 0 (Monte Carlo disabled) or at least 1000"
            )
        if self.step is not None and self.step <= 0.0:
            raise ConfigError("step must be positive")
        if self.families < 1:
            raise ConfigError("families must be at least 1")
        if not 1 <= self.family_size <= 16:
            raise ConfigError("family_size must be between 1 and 16")
        if len(self.times) != len(self.degrees):
            raise ConfigError("times and degrees must have equal length")
        if any(d < 1 for d in self.degrees):
            raise ConfigError("degrees must be positive integers")
        if self.tolerance is not None and self.tolerance <= 0.0:
            raise ConfigError("tolerance must be positive")

    def out_dir(self) -> str:
        return self.out or os.environ.get(OUT_ENV_VAR) or DEFAULT_OUT_DIR


_INT_KEYS = ("n_points", "max_degree", "samples", "seed", "families", "family_size")
_FLOAT_KEYS = ("spacing", "mass", "step", "tolerance")
_STR_KEYS = ("instance", "out", "algebra")


def load_config(path: str | None, overrides: dict) -> RunConfig:
    """Build a RunConfig from an optional file plus flag overrides."""
    from .textio import parse_kv_text

    values: dict = {}
    if path is not None:
        if not os.path.isfile(path):
            raise ConfigError("config file not found: %s" % path)
        with open(path) as fh:
            scalars, blocks = parse_kv_text(fh.read())
        if blocks:
            raise ConfigError("config file takes only key: value lines")
        for key, raw in scalars.items():
            try:
                if key in _INT_KEYS:
                    values[key] = int(raw)
                elif key in _FLOAT_KEYS:
                    values[key] = float(raw)
                elif key in _STR_KEYS:
                    values[key] = raw
                elif key == "times":
                    values[key] = tuple(float(t) for t in raw.split())
                elif key == "degrees":
                    values[key] = tuple(int(d) for d in raw.split())
                else:
                    raise ConfigError("unknown config key %r" % key)
            except (TypeError, ValueError) as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError("bad value for %s: %r" % (key, raw)) from exc
    for key, val in overrides.items():
        if val is not None:
            values[key] = val
    cfg = replace(RunConfig(), **values)
    cfg.validate()
    return cfg


def build_measure(cfg: RunConfig) -> GaussianEuclideanMeasure:
    lattice = TimeLattice(cfg.n_points, cfg.spacing)
    if cfg.instance in ("ou", "corrupted"):
        return ou_covariance(cfg.mass, lattice)
    if cfg.instance == "free-field":
        return free_field_covariance(cfg.mass, lattice)
    if cfg.instance == "non-rp":
        return cosine_damped_covariance(cfg.mass, NON_RP_OMEGA, lattice)
    raise ConfigError("unknown instance %r" % cfg.instance)


def corrupted_functional(measure: GaussianEuclideanMeasure):
    """The documented broken functional: a constant added off the origin."""

    def evaluate(f: TestFunction) -> complex:
        base = measure.generating_functional(f)
        if float(np.max(np.abs(f.coeffs))) != 0.0:
            return base + CORRUPTION_OFFSET
        return base

    return evaluate


def _random_complex_family(lattice: TimeLattice, rng, size: int):
    fs = []
    for _ in range(size):
        c = 0.35 * (
            rng.standard_normal(lattice.n_points)
            + 1j * rng.standard_normal(lattice.n_points)
        )
        fs.append(TestFunction(lattice, c))
    return fs


def _random_dplus_family(lattice: TimeLattice, rng, size: int):
    pos = lattice.positive_indices
    fs = []
    for _ in range(size):
        c = np.zeros(lattice.n_points)
        c[pos] = 0.5 * rng.standard_normal(len(pos))
        fs.append(TestFunction(lattice, c))
    return fs


def _say(quiet: bool, text: str) -> None:
    if not quiet:
        print(text)


def _config_lines(cfg: RunConfig, keys) -> list:
    rendered = {
        "instance": cfg.instance,
        "n_points": "%d" % cfg.n_points,
        "spacing": fmt(cfg.spacing),
        "mass": fmt(cfg.mass),
        "max_degree": "%d" % cfg.max_degree,
        "samples": "%d" % cfg.samples,
        "seed": "%d" % cfg.seed,
        "families": "%d" % cfg.families,
        "family_size": "%d" % cfg.family_size,
    }
    return ["%s: %s" % (k, rendered[k]) for k in keys]


# -- rp-check -----------------------------------------------------------------

def cmd_rp_check(cfg: RunConfig, quiet: bool = False) -> int:
    measure = build_measure(cfg)
    lattice = measure.lattice
    rtol = cfg.tolerance if cfg.tolerance is not None else DEFAULT_PSD_RTOL
    functional = measure.generating_functional
    if cfg.instance == "corrupted":
        functional = corrupted_functional(measure)

    rng = np.random.default_rng(cfg.seed)
    runs = []  # (label, certificate)

    if cfg.instance == "corrupted":
        zero = TestFunction(lattice, np.zeros(lattice.n_points))
        c = np.zeros(lattice.n_points)
        c[min(CORRUPTED_SPIKE_SITE, lattice.n_points - 1)] = CORRUPTED_SPIKE_SCALE
        fixture = [zero, TestFunction(lattice, c)]
        runs.append(("pd fixture", pd_gram_certificate(functional, fixture, rtol)))
    for i in range(cfg.families):
        size = int(rng.integers(1, cfg.family_size + 1))
        fam = _random_complex_family(lattice, rng, size)
        runs.append(("pd family %d" % i, pd_gram_certificate(functional, fam, rtol)))
    if cfg.instance == "non-rp":
        spikes = delta_family(lattice, list(lattice.positive_indices), NON_RP_SCALE)
        runs.append(("rp spike family", rp_gram_certificate(functional, spikes, rtol)))
    for i in range(cfg.families):
        size = int(rng.integers(1, cfg.family_size + 1))
        fam = _random_dplus_family(lattice, rng, size)
        runs.append(("rp family %d" % i, rp_gram_certificate(functional, fam, rtol)))

    n_bad = sum(1 for _, cert in runs if cert.verdict != "positive")
    lines = ["format: oslab-rp-check v1"]
    lines += _config_lines(
        cfg, ("instance", "n_points", "spacing", "mass", "seed", "families", "family_size")
    )
    lines.append("tolerance: %s" % fmt(rtol))
    lines.append("certificates: %d" % len(runs))
    for label, cert in runs:
        lines.append(
            "%s: %s size=%d min_eig=%s norm=%s"
            % (label, cert.verdict, cert.gram.shape[0], fmt6(cert.min_eigenvalue), fmt6(cert.norm))
        )
        _say(quiet, "rp-check %s: %s (min eig %s)" % (label, cert.verdict, fmt6(cert.min_eigenvalue)))
    lines.append("indefinite: %d" % n_bad)
    lines.append("verdict: %s" % ("pass" if n_bad == 0 else "fail"))
    lines.append("")
    for label, cert in runs:
        lines.append("[%s]" % label)
        lines.append(certificate_to_text(cert).rstrip("\n"))
        lines.append("")

    out = cfg.out_dir()
    atomic_write(os.path.join(out, "rp_check_report.txt"), "\n".join(lines))
    if n_bad:
        first_bad = next(cert for _, cert in runs if cert.verdict != "positive")
        atomic_write(os.path.join(out, "witness.txt"), certificate_to_text(first_bad))
        _say(quiet, "rp-check: FAIL (%d indefinite; witness written)" % n_bad)
        return EXIT_CHECK_FAILED
    _say(quiet, "rp-check: PASS (%d certificates positive)" % len(runs))
    return EXIT_OK


# -- reconstruct --------------------------------------------------------------

def _basis_times(cfg: RunConfig, lattice: TimeLattice, count: int = 3):
    if cfg.times:
        return tuple(cfg.times)
    pos = lattice.times[lattice.positive_indices]
    return tuple(float(t) for t in pos[: min(count, len(pos))])


def _comparison_rows(reports, with_mc: bool):
    if with_mc:
        header = "case,lhs_operator,rhs_wick,rhs_mc,mc_se,rel_dev_wick,sigma_dev"
    else:
        header = "case,lhs_operator,rhs_wick,rel_dev_wick"
    rows = [header]
    for label, rep in reports:
        cells = [label, fmt(rep.lhs_operator), fmt(rep.rhs_wick)]
        if with_mc:
            cells += [fmt(rep.rhs_mc), fmt(rep.mc_se)]
        cells.append(fmt(rep.operator_vs_wick))
        if with_mc:
            cells.append(fmt(rep.mc_sigma_deviation))
        rows.append(",".join(cells))
    return "\n".join(rows) + "\n"


def cmd_reconstruct(cfg: RunConfig, quiet: bool = False) -> int:
    if cfg.instance not in ("ou", "free-field"):
        raise ConfigError("reconstruct expects instance ou or free-field")
    measure = build_measure(cfg)
    lattice = measure.lattice
    exact = cfg.instance == "ou"
    contraction_tol = cfg.tolerance if cfg.tolerance is not None else (
        CONTRACTION_TOL if exact else 1.0e-3
    )
    times = _basis_times(cfg, lattice)
    space = build_physical_space(measure, times=times, max_degree=cfg.max_degree)

    step = cfg.step if cfg.step is not None else cfg.spacing
    T = transfer_operator(space, step, exact=exact, contraction_tol=contraction_tol)
    norm = float(np.linalg.norm(T, 2))
    T2 = transfer_operator(space, 2.0 * step, exact=exact, contraction_tol=contraction_tol)
    semigroup_residual = float(np.max(np.abs(T @ T - T2)))

    asymmetry = float(np.max(np.abs(T - T.T)))
    T_sym = 0.5 * (T + T.T)
    ham = extract_hamiltonian(space, T_sym, step)
    vacuum_energy = float(np.linalg.norm(ham.matrix @ space.vacuum))
    gaps = ham.spectrum[1:] - ham.spectrum[0]  # excitations over the ground state

    failures = []
    if norm > 1.0 + contraction_tol:
        failures.append("contraction norm %s exceeds bound" % fmt6(norm))
    if exact:
        if semigroup_residual > 1.0e-8:
            failures.append("semigroup residual %s exceeds 1e-08" % fmt6(semigroup_residual))
        if vacuum_energy > 1.0e-8:
            failures.append("vacuum energy %s exceeds 1e-08" % fmt6(vacuum_energy))
        expected = cfg.mass * np.arange(1, len(gaps) + 1)
        gap_dev = float(np.max(np.abs(gaps - expected) / expected)) if len(gaps) else 0.0
        if gap_dev > 0.01:
            failures.append("spectrum gaps deviate %s from harmonic ladder" % fmt6(gap_dev))
    else:
        gap_dev = None

    # anchor the embedded comparison at the first positive grid time, where
    # the compressed multiplication chain telescopes exactly
    t0 = float(lattice.times[lattice.positive_indices[0]])
    comparison = None
    if cfg.instance == "ou":
        npoint_times = (t0, t0 + step)
        need = max(cfg.max_degree, 2)
        npoint_space = build_physical_space(measure, times=(t0,), max_degree=need)
        rep = verify_npoint_identity(
            npoint_space, npoint_times, (1, 1), n_samples=cfg.samples, seed=cfg.seed
        )
        comparison = [("q(%s)q(%s)" % (fmt6(npoint_times[0]), fmt6(npoint_times[1])), rep)]
        if rep.operator_vs_wick > 0.01:
            failures.append("two-point comparison off by %s" % fmt6(rep.operator_vs_wick))

    lines = ["format: oslab-reconstruct v1"]
    lines += _config_lines(cfg, ("instance", "n_points", "spacing", "mass", "max_degree", "seed"))
    lines.append("basis_times: %s" % " ".join(fmt(t) for t in times))
    lines.append("step: %s" % fmt(step))
    lines.append("basis_size: %d" % len(space.basis))
    lines.append("physical_dim: %d" % space.physical_dim)
    lines.append("gram_eigenvalues:")
    for w in space.eigenvalues:
        lines.append("  %s" % fmt(float(w)))
    lines.append("transfer_norm: %s" % fmt(norm))
    lines.append("transfer_asymmetry: %s" % fmt(asymmetry))
    lines.append("semigroup_residual: %s" % fmt(semigroup_residual))
    if not exact:
        lines.append("note: raw orthogonal compression; finite-volume effects reported, not hidden")
    lines.append("raw_spectrum:")
    for w in ham.raw_spectrum:
        lines.append("  %s" % fmt(float(w)))
    lines.append("shifted_spectrum:")
    for w in ham.spectrum:
        lines.append("  %s" % fmt(float(w)))
    lines.append("spectrum_gaps:")
    for k, g in enumerate(gaps, start=1):
        lines.append("  gap %d: %s" % (k, fmt(float(g))))
    if gap_dev is not None:
        lines.append("gap_deviation: %s" % fmt(gap_dev))
    lines.append("vacuum_energy_norm: %s" % fmt(vacuum_energy))
    if comparison:
        lines.append("two_point_rel_dev: %s" % fmt(comparison[0][1].operator_vs_wick))
    lines.append("verdict: %s" % ("pass" if not failures else "fail"))
    for f in failures:
        lines.append("failure: %s" % f)
    lines.append("")

    out = cfg.out_dir()
    atomic_write(os.path.join(out, "reconstruct_report.txt"), "\n".join(lines))
    if comparison:
        atomic_write(
            os.path.join(out, "reconstruct_comparison.csv"),
            _comparison_rows(comparison, with_mc=cfg.samples > 0),
        )
    _say(quiet, "reconstruct physical_dim=%d transfer_norm=%s" % (space.physical_dim, fmt6(norm)))
    for f in failures:
        _say(quiet, "reconstruct FAIL: %s" % f)
    _say(quiet, "reconstruct: %s" % ("PASS" if not failures else "FAIL"))
    return EXIT_OK if not failures else EXIT_CHECK_FAILED


# -- npoint -------------------------------------------------------------------

def cmd_npoint(cfg: RunConfig, quiet: bool = False) -> int:
    if cfg.instance not in ("ou", "free-field"):
        raise ConfigError("npoint expects instance ou or free-field")
    if cfg.instance == "free-field":
        raise ConfigError(
            "the operator-side identity is exact only for the Markov instance; "
            "run instance ou, or compare Wick and Monte Carlo arms directly"
        )
    measure = build_measure(cfg)
    lattice = measure.lattice
    t0 = float(lattice.times[lattice.positive_indices[0]])
    h = cfg.spacing

    cases = []
    if cfg.times:
        cases.append((tuple(cfg.times), tuple(cfg.degrees)))
    else:
        cases.append(((t0, t0 + h), (1, 1)))
        cases.append(((t0, t0 + h, t0 + 2 * h, t0 + 3 * h), (1, 1, 1, 1)))

    reports = []
    failures = []
    for times, degrees in cases:
        need = max(cfg.max_degree, sum(degrees))
        space = build_physical_space(measure, times=(t0,), max_degree=need)
        rep = verify_npoint_identity(space, times, degrees, n_samples=cfg.samples, seed=cfg.seed)
        label = "".join("q(%s)^%d" % (fmt6(t), d) for t, d in zip(times, degrees))
        reports.append((label, rep))
        if rep.operator_vs_wick > 0.01:
            failures.append("%s: operator vs Wick off by %s" % (label, fmt6(rep.operator_vs_wick)))
        sigma = rep.mc_sigma_deviation
        if sigma is not None and sigma > 3.0:
            failures.append("%s: Monte Carlo off by %s sigma" % (label, fmt6(sigma)))

    lines = ["format: oslab-npoint v1"]
    lines += _config_lines(cfg, ("instance", "n_points", "spacing", "mass", "samples", "seed"))
    lines.append("cases: %d" % len(reports))
    for label, rep in reports:
        lines.append("%s:" % label)
        lines.append("  lhs_operator: %s" % fmt(rep.lhs_operator))
        lines.append("  rhs_wick: %s" % fmt(rep.rhs_wick))
        lines.append("  rel_dev: %s" % fmt(rep.operator_vs_wick))
        if cfg.samples > 0:
            lines.append("  rhs_mc: %s" % fmt(rep.rhs_mc))
            lines.append("  mc_se: %s" % fmt(rep.mc_se))
            lines.append("  sigma_dev: %s" % fmt(rep.mc_sigma_deviation))
        _say(
            quiet,
            "npoint %s: rel dev %s%s"
            % (
                label,
                fmt6(rep.operator_vs_wick),
                "" if cfg.samples == 0 else ", mc %s sigma" % fmt6(rep.mc_sigma_deviation),
            ),
        )
    lines.append("verdict: %s" % ("pass" if not failures else "fail"))
    for f in failures:
        lines.append("failure: %s" % f)
    lines.append("")

    out = cfg.out_dir()
    atomic_write(os.path.join(out, "npoint_report.txt"), "\n".join(lines))
    atomic_write(
        os.path.join(out, "npoint_comparison.csv"),
        _comparison_rows(reports, with_mc=cfg.samples > 0),
    )
    _say(quiet, "npoint: %s" % ("PASS" if not failures else "FAIL"))
    return EXIT_OK if not failures else EXIT_CHECK_FAILED


# -- cdual --------------------------------------------------------------------

def _load_algebra(name: str):
    if os.path.isfile(name):
        with open(name) as fh:
            algebra, involution, cone = liealg.algebra_from_text(fh.read())
        return algebra, involution, cone
    algebra, involution = liealg.builtin_algebra(name)
    return algebra, involution, None


def cmd_cdual(cfg: RunConfig, quiet: bool = False) -> int:
    name = cfg.algebra or "sl2R-cartan"
    try:
        algebra, involution, _ = _load_algebra(name)
    except ValueError as exc:
        if isinstance(exc, MATH_ERRORS):
            raise
        raise ConfigError(str(exc)) from exc
    report = liealg.validate_algebra(algebra)
    if involution is None:
        raise ConfigError("algebra %r carries no involution; cannot form the dual" % name)
    split = liealg.split_by_involution(algebra, involution)
    adapted, _ = liealg.adapted_algebra(split)
    dual = liealg.c_dual(split)
    dual_report = liealg.validate_algebra(dual)

    dual_split = liealg.split_by_involution(dual, liealg.c_dual_involution(split))
    double = liealg.c_dual(dual_split)
    double_residual = float(np.max(np.abs(double.structure - adapted.structure)))

    su2_residual = None
    if name == "sl2R-cartan":
        su2 = liealg.change_basis(dual, liealg.SU2_BASIS_CHANGE)
        su2_residual = float(np.max(np.abs(su2.structure - liealg.su2_structure())))

    failures = []
    if double_residual > liealg.STRUCTURE_TOL:
        failures.append("applying the dual twice drifts by %s" % fmt6(double_residual))
    if su2_residual is not None and su2_residual > 1.0e-10:
        failures.append("compact-form identification off by %s" % fmt6(su2_residual))

    lines = ["format: oslab-cdual v1"]
    lines.append("algebra: %s" % name)
    lines.append("dim: %d" % algebra.dim)
    lines.append("antisymmetry_residual: %s" % fmt(report.antisymmetry_residual))
    lines.append("jacobi_residual: %s" % fmt(report.jacobi_residual))
    lines.append("h_dim: %d" % split.h_dim)
    lines.append("q_dim: %d" % split.q_dim)
    lines.append("bracket_residual: %s" % fmt(split.bracket_residual))
    lines.append("adapted_labels: %s" % " ".join(adapted.labels))
    lines.append("dual_labels: %s" % " ".join(dual.labels))
    lines.append("dual_structure:")
    c = dual.structure
    for i in range(dual.dim):
        for j in range(dual.dim):
            for k in range(dual.dim):
                if c[i, j, k] != 0.0:
                    lines.append("  %d %d %d %s" % (i, j, k, fmt(c[i, j, k])))
    lines.append("dual_jacobi_residual: %s" % fmt(dual_report.jacobi_residual))
    lines.append("double_dual_residual: %s" % fmt(double_residual))
    if su2_residual is not None:
        lines.append("su2_match_residual: %s" % fmt(su2_residual))
    lines.append("verdict: %s" % ("pass" if not failures else "fail"))
    for f in failures:
        lines.append("failure: %s" % f)
    lines.append("")

    atomic_write(os.path.join(cfg.out_dir(), "cdual_report.txt"), "\n".join(lines))
    _say(quiet, "cdual %s: h_dim=%d q_dim=%d double_dual_residual=%s"
         % (name, split.h_dim, split.q_dim, fmt6(double_residual)))
    _say(quiet, "cdual: %s" % ("PASS" if not failures else "FAIL"))
    return EXIT_OK if not failures else EXIT_CHECK_FAILED


# -- cone-check ---------------------------------------------------------------

def cmd_cone_check(cfg: RunConfig, quiet: bool = False) -> int:
    name = cfg.algebra or "sl2R-adH"
    if name == "nilpotent-control":
        split, cone = liealg.nilpotent_control_cone()
        with_membership = False
    elif name == "sl2R-adH":
        split, cone = liealg.builtin_cone("sl2R-adH")
        with_membership = True
    elif os.path.isfile(name):
        with open(name) as fh:
            algebra, involution, cone = liealg.algebra_from_text(fh.read())
        if involution is None or cone is None:
            raise ConfigError("algebra file must carry an involution and a cone")
        liealg.validate_algebra(algebra)
        split = liealg.split_by_involution(algebra, involution)
        with_membership = False
    else:
        raise ConfigError(
            "cone-check takes sl2R-adH, nilpotent-control, or an algebra file with a cone"
        )

    report = liealg.hyperbolic_cone_check(split, cone, h_samples=8, seed=cfg.seed)
    failures = []
    if not report.all_hyperbolic:
        bad = next(pc for pc in report.point_checks if not pc.hyperbolic)
        failures.append("non-hyperbolic cone point: %s" % bad.reason)
    if not report.witness_strictly_positive:
        failures.append("interior witness is not a strictly positive combination")
    if report.invariance_residual > liealg.CONE_RESIDUAL_TOL:
        failures.append("cone not invariant under the fixed subgroup (residual %s)"
                        % fmt6(report.invariance_residual))

    membership = control = None
    if with_membership:
        n_products = cfg.samples if cfg.samples > 0 else 200
        membership = liealg.semigroup_membership_sample(n_products, cfg.seed, cone="quadrant")
        control = liealg.semigroup_membership_sample(n_products, cfg.seed, cone="wedge")
        if membership.success_rate < 1.0:
            failures.append("quadrant products failed to re-factor (%d of %d)"
                            % (membership.n_products - membership.n_success, membership.n_products))
        elif membership.worst_residual > 1.0e-8:
            failures.append("re-factorization residual %s" % fmt6(membership.worst_residual))

    lines = ["format: oslab-cone-check v1"]
    lines.append("algebra: %s" % name)
    lines.append("h_dim: %d" % split.h_dim)
    lines.append("q_dim: %d" % split.q_dim)
    lines.append("points_checked: %d" % len(report.point_checks))
    lines.append("all_hyperbolic: %s" % ("true" if report.all_hyperbolic else "false"))
    lines.append("witness_strictly_positive: %s"
                 % ("true" if report.witness_strictly_positive else "false"))
    lines.append("witness_combination: %s" % " ".join(fmt(x) for x in report.witness_combination))
    lines.append("invariance_residual: %s" % fmt(report.invariance_residual))
    for idx, pc in enumerate(report.point_checks):
        eigs = " ".join(fmt(float(v)) for v in np.sort(pc.eigenvalues.real))
        lines.append("point %d: %s [%s]" % (idx, pc.reason, eigs))
    if membership is not None:
        lines.append("membership_products: %d" % membership.n_products)
        lines.append("membership_rate: %s" % fmt(membership.success_rate))
        lines.append("membership_worst_residual: %s" % fmt(membership.worst_residual))
        lines.append("wedge_control_rate: %s" % fmt(control.success_rate))
        lines.append("wedge_control_failures: %d" % len(control.failures))
        lines.append("note: the wedge control is expected to fail; it is diagnostic only")
    lines.append("verdict: %s" % ("pass" if not failures else "fail"))
    for f in failures:
        lines.append("failure: %s" % f)
    lines.append("")

    atomic_write(os.path.join(cfg.out_dir(), "cone_check_report.txt"), "\n".join(lines))
    _say(quiet, "cone-check %s: hyperbolic=%s invariance_residual=%s"
         % (name, report.all_hyperbolic, fmt6(report.invariance_residual)))
    for f in failures:
        _say(quiet, "cone-check FAIL: %s" % f)
    _say(quiet, "cone-check: %s" % ("PASS" if not failures else "FAIL"))
    return EXIT_OK if not failures else EXIT_CHECK_FAILED


# -- suite --------------------------------------------------------------------

SUITE_CHECKS = (
    "covariance-psd",
    "stationarity-reflection",
    "pd-certificates",
    "rp-certificates",
    "non-rp-control",
    "corrupted-control",
    "sampled-rp",
    "reconstruction-spectrum",
    "contraction-semigroup",
    "npoint-identity",
    "reflection-intertwining",
    "cdual-involution",
    "cone-hyperbolic",
    "semigroup-membership",
    "commutant-dimension",
)


def _suite_results(cfg: RunConfig):
    """Run every suite check; returns [(name, passed, detail)] in fixed order."""
    lattice = TimeLattice(cfg.n_points, cfg.spacing)
    ou = ou_covariance(cfg.mass, lattice)
    ff = free_field_covariance(cfg.mass, lattice)
    rng = np.random.default_rng(cfg.seed)
    results = []

    margins = []
    for m in (ou, ff):
        w = np.linalg.eigvalsh(m.covariance)
        margins.append(float(w[0] / np.linalg.norm(m.covariance, 2)))
    ok = all(v >= -1.0e-10 for v in margins)
    results.append(("covariance-psd", ok,
                    "min eig over norm: %s" % " ".join(fmt6(v) for v in margins)))

    st_ou, dev_ou = check_stationarity(ou)
    sym_ou, _ = check_time_reflection_symmetry(ou)
    sym_ff, _ = check_time_reflection_symmetry(ff)
    _, dev_ff = check_stationarity(ff)
    ok = st_ou and sym_ou and sym_ff
    results.append(("stationarity-reflection", ok,
                    "ou deviation %s, boundary-pinned deviation %s reported"
                    % (fmt6(dev_ou), fmt6(dev_ff))))

    pd_certs = []
    for _ in range(cfg.families):
        size = int(rng.integers(1, cfg.family_size + 1))
        pd_certs.append(pd_gram_certificate(
            ou.generating_functional, _random_complex_family(lattice, rng, size)))
    ok = all(c.verdict == "positive" for c in pd_certs)
    worst = min(c.min_eigenvalue / c.norm for c in pd_certs)
    results.append(("pd-certificates", ok,
                    "%d families, worst relative min eig %s" % (len(pd_certs), fmt6(worst))))

    rp_certs = []
    for _ in range(cfg.families):
        size = int(rng.integers(1, cfg.family_size + 1))
        rp_certs.append(rp_gram_certificate(
            ou.generating_functional, _random_dplus_family(lattice, rng, size)))
    ok = all(c.verdict == "positive" for c in rp_certs)
    worst = min(c.min_eigenvalue / c.norm for c in rp_certs)
    results.append(("rp-certificates", ok,
                    "%d families, worst relative min eig %s" % (len(rp_certs), fmt6(worst))))

    cosine = cosine_damped_covariance(cfg.mass, NON_RP_OMEGA, lattice)
    spikes = delta_family(lattice, list(lattice.positive_indices), NON_RP_SCALE)
    cert = rp_gram_certificate(cosine.generating_functional, spikes)
    results.append(("non-rp-control", cert.verdict == "indefinite",
                    "cosine kernel min eig %s (indefinite expected)" % fmt6(cert.min_eigenvalue)))

    broken = corrupted_functional(ou)
    zero = TestFunction(lattice, np.zeros(lattice.n_points))
    c1 = np.zeros(lattice.n_points)
    c1[min(CORRUPTED_SPIKE_SITE, lattice.n_points - 1)] = CORRUPTED_SPIKE_SCALE
    cert = pd_gram_certificate(broken, [zero, TestFunction(lattice, c1)])
    results.append(("corrupted-control", cert.verdict == "indefinite",
                    "corrupted functional min eig %s (indefinite expected)"
                    % fmt6(cert.min_eigenvalue)))

    t_pos = lattice.times[lattice.positive_indices]
    obs = [
        SampledObservable(((float(t_pos[0]), "q"),)),
        SampledObservable(((float(t_pos[1]), "q"),)),
        SampledObservable(((float(t_pos[0]), "q2"),)),
        SampledObservable(((float(t_pos[0]), "tanh"),)),
    ]
    n_mc = cfg.samples if cfg.samples > 0 else 2000
    cert = rp_sampled_certificate(ou, obs, n_mc, cfg.seed)
    results.append(("sampled-rp", cert.verdict == "positive",
                    "%d paths, min eig %s (se %s)"
                    % (n_mc, fmt6(cert.min_eigenvalue), fmt6(cert.min_eigenvalue_se))))

    times = _basis_times(cfg, lattice)
    space = build_physical_space(ou, times=times, max_degree=cfg.max_degree)
    T = transfer_operator(space, cfg.spacing)
    ham = extract_hamiltonian(space, T, cfg.spacing)
    gaps = ham.spectrum[1:] - ham.spectrum[0]
    expected = cfg.mass * np.arange(1, len(gaps) + 1)
    gap_dev = float(np.max(np.abs(gaps - expected) / expected))
    vac = float(np.linalg.norm(ham.matrix @ space.vacuum))
    ok = gap_dev <= 0.01 and vac <= 1.0e-8
    results.append(("reconstruction-spectrum", ok,
                    "gap deviation %s, vacuum energy %s" % (fmt6(gap_dev), fmt6(vac))))

    norm_excess = 0.0
    semi = 0.0
    for a_mult, b_mult in ((1, 1), (1, 2), (2, 2)):
        Ta = transfer_operator(space, a_mult * cfg.spacing)
        Tb = transfer_operator(space, b_mult * cfg.spacing)
        Tab = transfer_operator(space, (a_mult + b_mult) * cfg.spacing)
        norm_excess = max(norm_excess, float(np.linalg.norm(Ta, 2)) - 1.0)
        semi = max(semi, float(np.max(np.abs(Ta @ Tb - Tab))))
    ok = norm_excess <= 1.0e-10 and semi <= 1.0e-8
    results.append(("contraction-semigroup", ok,
                    "worst norm excess %s, semigroup residual %s" % (fmt6(norm_excess), fmt6(semi))))

    t0 = float(t_pos[0])
    h = cfg.spacing
    np_space = build_physical_space(ou, times=(t0,), max_degree=4)
    rep2 = verify_npoint_identity(np_space, (t0, t0 + h), (1, 1))
    rep4 = verify_npoint_identity(np_space, (t0, t0 + h, t0 + 2 * h, t0 + 3 * h), (1, 1, 1, 1))
    worst = max(rep2.operator_vs_wick, rep4.operator_vs_wick)
    results.append(("npoint-identity", worst <= 0.01,
                    "two- and four-point rel dev %s, %s"
                    % (fmt6(rep2.operator_vs_wick), fmt6(rep4.operator_vs_wick))))

    rep = check_reflection_intertwining(ou, max_degree=2, shifts=(1, 2))
    broken_rep = check_reflection_intertwining(ou, max_degree=2, shifts=(1,), break_reflection=True)
    ok = (rep.involution_defect == 0.0 and rep.intertwining_defect <= 1.0e-8
          and rep.unitarity_defect <= 1.0e-8 and broken_rep.intertwining_defect >= 0.1)
    results.append(("reflection-intertwining", ok,
                    "defects %s / %s, broken control %s"
                    % (fmt6(rep.intertwining_defect), fmt6(rep.unitarity_defect),
                       fmt6(broken_rep.intertwining_defect))))

    algebra, tau = liealg.builtin_algebra("sl2R-cartan")
    split = liealg.split_by_involution(algebra, tau)
    adapted, _ = liealg.adapted_algebra(split)
    dual = liealg.c_dual(split)
    jac = liealg.validate_algebra(dual).jacobi_residual
    dual_split = liealg.split_by_involution(dual, liealg.c_dual_involution(split))
    double_res = float(np.max(np.abs(liealg.c_dual(dual_split).structure - adapted.structure)))
    su2_res = float(np.max(np.abs(
        liealg.change_basis(dual, liealg.SU2_BASIS_CHANGE).structure - liealg.su2_structure())))
    ok = jac <= 1.0e-12 and double_res <= 1.0e-12 and su2_res <= 1.0e-10
    results.append(("cdual-involution", ok,
                    "jacobi %s, double dual %s, compact match %s"
                    % (fmt6(jac), fmt6(double_res), fmt6(su2_res))))

    c_split, c_cone = liealg.builtin_cone()
    c_rep = liealg.hyperbolic_cone_check(c_split, c_cone, h_samples=8, seed=cfg.seed)
    n_split, n_cone = liealg.nilpotent_control_cone()
    n_rep = liealg.hyperbolic_cone_check(n_split, n_cone, h_samples=2, seed=cfg.seed)
    control_named = any("nilpotent" in pc.reason for pc in n_rep.point_checks)
    ok = (c_rep.all_hyperbolic and c_rep.witness_strictly_positive
          and c_rep.invariance_residual <= liealg.CONE_RESIDUAL_TOL
          and not n_rep.all_hyperbolic and control_named)
    results.append(("cone-hyperbolic", ok,
                    "invariance residual %s; nilpotent control rejected: %s"
                    % (fmt6(c_rep.invariance_residual), "yes" if control_named else "no")))

    n_products = cfg.samples if cfg.samples > 0 else 200
    mem = liealg.semigroup_membership_sample(n_products, cfg.seed, cone="quadrant")
    wedge = liealg.semigroup_membership_sample(n_products, cfg.seed, cone="wedge")
    ok = (mem.success_rate == 1.0 and mem.worst_residual <= 1.0e-8
          and wedge.success_rate < 1.0)
    results.append(("semigroup-membership", ok,
                    "quadrant rate %s worst %s; wedge control rate %s"
                    % (fmt6(mem.success_rate), fmt6(mem.worst_residual),
                       fmt6(wedge.success_rate))))

    H, E, F = liealg.SL2_H, liealg.SL2_E, liealg.SL2_F
    cases = (
        ([H, E, F], 1),
        ([H], 2),
        ([np.eye(2)], 4),
        ([np.diag([1.0, 2.0, 3.0])], 3),
    )
    got = [liealg.commutant_dimension(mats) for mats, _ in cases]
    ok = all(g == want for g, (_, want) in zip(got, cases))
    results.append(("commutant-dimension", ok,
                    "dimensions %s" % " ".join(str(g) for g in got)))

    return results


def cmd_suite(cfg: RunConfig, quiet: bool = False, inject_failure: str | None = None,
              config_note: str = "built-in defaults") -> int:
    if inject_failure is not None and inject_failure not in SUITE_CHECKS:
        raise ConfigError(
            "unknown check %r; choose from %s" % (inject_failure, ", ".join(SUITE_CHECKS))
        )
    results = _suite_results(cfg)
    if inject_failure is not None:
        results = [
            (name, False, "injected failure (diagnostic)") if name == inject_failure
            else (name, passed, detail)
            for name, passed, detail in results
        ]

    n_failed = sum(1 for _, passed, _ in results if not passed)
    lines = ["format: oslab-suite v1"]
    lines.append("config: %s" % config_note)
    lines += _config_lines(cfg, ("n_points", "spacing", "mass", "seed"))
    for name, passed, detail in results:
        status = "PASS" if passed else "FAIL"
        lines.append("check %s: %s (%s)" % (name, status, detail))
        _say(quiet, "suite %s: %s (%s)" % (name, status, detail))
    lines.append("failed: %d/%d" % (n_failed, len(results)))
    lines.append("verdict: %s" % ("pass" if n_failed == 0 else "fail"))
    lines.append("")

    path = os.path.join(cfg.out_dir(), "suite_summary.txt")
    atomic_write(path, "\n".join(lines))
    _say(quiet, "suite: %s (%d/%d failed), summary in %s"
         % ("PASS" if n_failed == 0 else "FAIL", n_failed, len(results), path))
    return EXIT_OK if n_failed == 0 else EXIT_CHECK_FAILED


# -- argument parsing ---------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oslab",
        description="Finite-lattice reflection-positivity laboratory.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_instance=False, with_algebra=None):
        p.add_argument("--config", help="key: value configuration file")
        p.add_argument("--seed", type=int, help="random seed")
        p.add_argument("--samples", type=int,
                       help="Monte-Carlo sample count (0 disables; else at least 1000)")
        p.add_argument("--out", help="output directory (default: $%s or %s)"
                       % (OUT_ENV_VAR, DEFAULT_OUT_DIR))
        p.add_argument("--tolerance", type=float, help="primary tolerance override")
        p.add_argument("--quiet", action="store_true", help="suppress progress lines")
        if with_instance:
            p.add_argument("--instance", choices=MEASURE_INSTANCES, help="measure instance")
        if with_algebra is not None:
            p.add_argument("algebra", nargs="?", default=None,
                           help="built-in algebra name or algebra file (default: %s)" % with_algebra)

    p = sub.add_parser("rp-check", help="certify positivity over random families")
    common(p, with_instance=True)
    p = sub.add_parser("reconstruct", help="build the physical space and spectrum")
    common(p, with_instance=True)
    p.add_argument("--step", type=float, help="transfer step (default: lattice spacing)")
    p.add_argument("--n-points", type=int, dest="n_points", help="lattice size (even)")
    p.add_argument("--spacing", type=float, help="lattice spacing")
    p.add_argument("--mass", type=float, help="mass parameter")
    p = sub.add_parser("npoint", help="verify the multi-time moment identity")
    common(p, with_instance=True)
    p.add_argument("--times", help="observable times, space separated")
    p.add_argument("--degrees", help="observable degrees, space separated")
    p = sub.add_parser("cdual", help="involutive split and dual structure constants")
    common(p, with_algebra="sl2R-cartan")
    p = sub.add_parser("cone-check", help="hyperbolic cone diagnostics")
    common(p, with_algebra="sl2R-adH")
    p = sub.add_parser("suite", help="run every check, one summary")
    common(p)
    p.add_argument("--inject-failure", metavar="NAME",
                   help="force the named check to fail (%s)" % ", ".join(SUITE_CHECKS))

    return parser


_OVERRIDE_KEYS = (
    "instance", "seed", "samples", "out", "tolerance", "step",
    "n_points", "spacing", "mass",
)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    overrides = {}
    for key in _OVERRIDE_KEYS:
        if hasattr(args, key):
            overrides[key] = getattr(args, key)
    if getattr(args, "algebra", None) is not None:
        overrides["algebra"] = args.algebra
    if getattr(args, "times", None) is not None:
        try:
            overrides["times"] = tuple(float(t) for t in args.times.split())
        except ValueError:
            print("error: --times takes space-separated numbers", file=sys.stderr)
            return EXIT_USAGE
    if getattr(args, "degrees", None) is not None:
        try:
            overrides["degrees"] = tuple(int(d) for d in args.degrees.split())
        except ValueError:
            print("error: --degrees takes space-separated integers", file=sys.stderr)
            return EXIT_USAGE

    any_override = any(
        overrides.get(k) is not None for k in overrides if k != "out"
    )
    config_note = "built-in defaults" if args.config is None and not any_override \
        else "user-supplied"

    try:
        cfg = load_config(args.config, overrides)
        if args.command == "rp-check":
            return cmd_rp_check(cfg, quiet=args.quiet)
        if args.command == "reconstruct":
            return cmd_reconstruct(cfg, quiet=args.quiet)
        if args.command == "npoint":
            return cmd_npoint(cfg, quiet=args.quiet)
        if args.command == "cdual":
            return cmd_cdual(cfg, quiet=args.quiet)
        if args.command == "cone-check":
            return cmd_cone_check(cfg, quiet=args.quiet)
        if args.command == "suite":
            return cmd_suite(cfg, quiet=args.quiet,
                             inject_failure=args.inject_failure,
                             config_note=config_note)
        raise ConfigError("unknown command %r" % args.command)
    except ConfigError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except RANGE_ERRORS as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except MATH_ERRORS as exc:
        print("check failed: %s" % exc, file=sys.stderr)
        return EXIT_CHECK_FAILED
    except ValueError as exc:
        # remaining value errors are malformed requests (off-grid times,
        # steps that are not multiples of the spacing, bad shapes)
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

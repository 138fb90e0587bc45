"""Command-line interface: ``mathieu-lattice {spectrum,propagate,bragg,mathieu}``.

Exit codes: 0 success, 1 validation error, 2 numeric failure, 3 I/O error.
Every run writes ``manifest.json`` next to its outputs.
"""

import json
import logging
import os
import sys

import click
import numpy as np

from . import __version__
from .bragg import BraggConfig, BraggState, raman_nath_profile, verify_equivalence
from .errors import ConfigurationError, ContaminatedModeError, DomainError, LabelingError, NumericError
from .io import (
    RunManifest,
    fmt,
    write_chart_csv,
    write_function_table,
    write_intensity_csv,
    write_json,
    write_pgm,
)
from .mathieu_eval import MathieuFunction, eval_cse, ode_residual, uniform_grid
from .oracles import dense_spectrum
from .propagator import FieldState, integrate_direct, observables, propagate
from .spectrum import LatticeConfig, StabilityChart, recurrence_residuals, spectral_basis, spectral_bases

EXIT_VALIDATION = 1
EXIT_NUMERIC = 2
EXIT_IO = 3

log = logging.getLogger("mathieu_lattice")


def _load_config(ctx, param, value):
    if value is None:
        return None
    try:
        with open(value, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise click.BadParameter(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise click.BadParameter("config file must hold a JSON object")
    # keys may be given per subcommand or flat; "q-min", "q_min" and "--q-min" all work
    section = data.get(ctx.info_name, data)
    names = {p.name.lower(): p.name for p in ctx.command.params if p.name}
    defaults = {}
    for key, val in section.items():
        norm = key.lstrip("-").replace("-", "_").lower()
        if norm not in names:
            raise click.BadParameter(f"unknown config key {key!r}")
        defaults[names[norm]] = val
    ctx.default_map = defaults
    ctx.meta["config_path"] = os.path.abspath(value)
    return value


config_option = click.option(
    "--config",
    type=click.Path(dir_okay=False),
    callback=_load_config,
    is_eager=True,
    expose_value=False,
    help="JSON file with default values; flags override it.",
)
out_option = click.option("--out", "out_dir", default=".", show_default=True, type=click.Path(file_okay=False))


def _prepare(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    return out_dir


def _params(ctx):
    return {k: v for k, v in ctx.params.items() if k != "out_dir"}


def _finish(manifest, out_dir):
    manifest.write(os.path.join(out_dir, "manifest.json"))


def _manifest(ctx, out_dir):
    m = RunManifest(subcommand=ctx.info_name, parameters=_params(ctx), version=__version__)
    if "config_path" in ctx.meta:
        m.inputs["config"] = ctx.meta["config_path"]
    m.parameters["out_dir"] = os.path.abspath(out_dir)
    return m


@click.group()
@click.version_option(__version__, prog_name="mathieu-lattice")
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def cli(verbose):
    """Mathieu-Bragg waveguide lattice tools."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s: %(message)s")


# ---------------------------------------------------------------------------

@cli.command()
@config_option
@click.option("--q-min", type=float, default=0.0, show_default=True)
@click.option("--q-max", type=float, default=10.0, show_default=True)
@click.option("--q-steps", type=int, default=101, show_default=True, help="Number of q samples.")
@click.option("--m-max", type=int, default=10, show_default=True, help="Highest mode index written.")
@click.option("--J", "J", type=int, default=64, show_default=True, help="Truncation half-width.")
@click.option("--check-dense", is_flag=True, help="Compare against a dense eigensolve at 2J.")
@out_option
@click.pass_context
def spectrum(ctx, q_min, q_max, q_steps, m_max, J, check_dense, out_dir):
    """Characteristic curves E_m(q): chart.csv and spectrum.json."""
    if q_steps < 1:
        raise ConfigurationError("--q-steps must be at least 1")
    if q_max < q_min:
        raise ConfigurationError("--q-max must not be below --q-min")
    if not 0 <= m_max <= 2 * J:
        raise ConfigurationError(f"--m-max must lie in [0, 2J={2 * J}]")
    _prepare(out_dir)
    manifest = _manifest(ctx, out_dir)
    q_grid = np.linspace(q_min, q_max, q_steps)
    bases = spectral_bases(q_grid, J)
    chart = StabilityChart(q_grid=q_grid, values=np.array([b.eigenvalues[: m_max + 1] for b in bases]), J=J)

    chart_path = os.path.join(out_dir, "chart.csv")
    write_chart_csv(chart, chart_path)
    manifest.add_output(chart_path)

    dump = {
        "J": J,
        "m_max": m_max,
        "modes": [
            {
                "q": float(q),
                "eigenvalues": b.eigenvalues[: m_max + 1],
                "parity": list(b.parity[: m_max + 1]),
                "mathieu_index": [list(x) if x else None for x in b.mathieu_index[: m_max + 1]],
                "contaminated": b.contaminated[: m_max + 1],
                "coefficients": b.coefficients[: m_max + 1],
            }
            for q, b in zip(q_grid, bases)
        ],
    }
    json_path = os.path.join(out_dir, "spectrum.json")
    write_json(dump, json_path)
    manifest.add_output(json_path)

    click.echo(f"wrote {len(q_grid) * (m_max + 1)} chart rows to {chart_path}")
    if check_dense:
        ref = np.array([dense_spectrum(q, 2 * J)[: m_max + 1] for q in q_grid])
        dev = float(np.max(np.abs(ref - chart.values)))
        click.echo(f"dense oracle (J={2 * J}) max deviation: {dev:.3e}")
        manifest.parameters["dense_deviation"] = dev
    _finish(manifest, out_dir)


# ---------------------------------------------------------------------------

def _parse_list(text, conv, what):
    try:
        return [conv(tok.strip()) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigurationError(f"cannot parse {what} from {text!r}") from None


@cli.command(name="propagate")
@config_option
@click.option("--q", type=float, default=2.0, show_default=True)
@click.option("--J", "J", type=int, default=64, show_default=True)
@click.option("--sites", default=None, help="Comma-separated excited sites, e.g. '0' or '-3,3'.")
@click.option("--weights", default=None, help="Comma-separated complex weights, e.g. '1,1j'.")
@click.option("--mode", type=int, default=None, help="Launch eigenmode m instead of sites.")
@click.option("--z-max", type=float, default=5.0, show_default=True)
@click.option("--z-steps", type=int, default=500, show_default=True, help="Number of z samples.")
@click.option("--pgm/--no-pgm", default=False, show_default=True, help="Also write a 16-bit heatmap.")
@click.option("--oracle", is_flag=True, help="Cross-check with direct RK4 integration.")
@click.option("--h", "h", type=float, default=1e-4, show_default=True, help="RK4 step for --oracle.")
@out_option
@click.pass_context
def propagate_cmd(ctx, q, J, sites, weights, mode, z_max, z_steps, pgm, oracle, h, out_dir):
    """Intensity evolution from a site list or an eigenmode."""
    if (sites is None) == (mode is None):
        raise ConfigurationError("give exactly one of --sites or --mode")
    if z_steps < 2:
        raise ConfigurationError("--z-steps must be at least 2")
    cfg = LatticeConfig(q=q, J=J)
    basis = spectral_basis(q, J)
    if mode is not None:
        initial = FieldState.from_mode(basis, mode)
    else:
        site_list = _parse_list(sites, int, "--sites")
        wts = _parse_list(weights, complex, "--weights") if weights else None
        initial = FieldState.from_sites(J, site_list, wts)

    _prepare(out_dir)
    manifest = _manifest(ctx, out_dir)
    z = np.linspace(0.0, z_max, z_steps)
    result = propagate(basis, initial, z)

    path = os.path.join(out_dir, "intensity.csv")
    write_intensity_csv(z, result.intensities, path)
    manifest.add_output(path)
    obs_path = os.path.join(out_dir, "observables.csv")
    with open(obs_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("z,norm,second_moment,participation_ratio\n")
        for row in zip(z, result.norm, result.second_moment, result.participation_ratio):
            fh.write(",".join(fmt(v) for v in row) + "\n")
    manifest.add_output(obs_path)
    if pgm:
        pgm_path = os.path.join(out_dir, "intensity.pgm")
        write_pgm(result.intensities, pgm_path)
        manifest.add_output(pgm_path)

    norm, m2, pr = observables(result.states[-1])
    click.echo(f"q={q:g} J={J} z_max={z_max:g}: norm={norm:.12f} second_moment={m2:.6g} participation_ratio={pr:.6g}")
    click.echo(f"max norm drift: {result.norm_drift:.3e}")

    a = initial.amplitudes
    if np.allclose(a, a[::-1], rtol=0, atol=1e-15):
        asym = float(np.max(np.abs(result.intensities - result.intensities[:, ::-1])))
        click.echo(f"reflection-symmetric input: max intensity asymmetry {asym:.3e}")
        manifest.parameters["max_asymmetry"] = asym
    if result.edge_contaminated:
        msg = f"WARNING: edge sites exceed 1e-8; increase --J (J={J})"
        click.echo(msg)
        manifest.warnings.append(msg)
    manifest.parameters["edge_contaminated"] = result.edge_contaminated

    if oracle:
        direct = integrate_direct(cfg, initial, z, h)
        dev = float(np.max(np.abs(direct.amplitudes - result.amplitudes)))
        click.echo(f"oracle (RK4, h={h:g}) max deviation: {dev:.3e}")
        manifest.parameters["oracle_deviation"] = dev
        manifest.warnings.extend(direct.warnings)
    _finish(manifest, out_dir)


# ---------------------------------------------------------------------------

@cli.command()
@config_option
@click.option("--omega", type=float, default=2.0, show_default=True, help="Half the Bragg-Rabi frequency.")
@click.option("--omega-k", type=float, default=1.0, show_default=True, help="Recoil frequency.")
@click.option("--omega-D", "omega_D", type=float, default=-1.0, show_default=True, help="Doppler shift.")
@click.option("--t-max", type=float, default=3.0, show_default=True)
@click.option("--t-steps", type=int, default=301, show_default=True, help="Number of time samples.")
@click.option("--h", "h", type=float, default=1e-4, show_default=True, help="RK4 step.")
@click.option("--J", "J", type=int, default=64, show_default=True)
@click.option("--raman-nath", is_flag=True, help="Also tabulate the Bessel (kinetic-free) limit.")
@click.option("--rn-max", type=float, default=5.0, show_default=True, help="Largest Omega*t in the Bessel table.")
@click.option("--rn-steps", type=int, default=101, show_default=True)
@click.option("--rn-nmax", type=int, default=20, show_default=True)
@out_option
@click.pass_context
def bragg(ctx, omega, omega_k, omega_D, t_max, t_steps, h, J, raman_nath, rn_max, rn_steps, rn_nmax, out_dir):
    """Bragg ladder vs. Mathieu lattice equivalence report."""
    cfg = BraggConfig(omega=omega, omega_k=omega_k, omega_D=omega_D)
    cfg.integer_l()
    if t_steps < 2:
        raise ConfigurationError("--t-steps must be at least 2")
    _prepare(out_dir)
    manifest = _manifest(ctx, out_dir)
    report = verify_equivalence(cfg, BraggState.from_sites(J, [0]), t_max, h, samples=t_steps)

    rpath = os.path.join(out_dir, "report.json")
    write_json(report.to_dict(), rpath)
    manifest.add_output(rpath)
    bpath = os.path.join(out_dir, "bragg_populations.csv")
    write_intensity_csv(report.t_grid, report.bragg_populations, bpath, axis_name="t")
    manifest.add_output(bpath)
    lpath = os.path.join(out_dir, "lattice_populations.csv")
    write_intensity_csv(-cfg.delta * report.t_grid, report.lattice_populations, lpath, axis_name="z")
    manifest.add_output(lpath)
    click.echo(
        f"delta={cfg.delta:g} eta={cfg.eta:g} l={report.l} q={cfg.q:g}: "
        f"max population discrepancy {report.max_population_discrepancy:.3e}"
    )

    if raman_nath:
        x = np.linspace(0.0, rn_max, rn_steps)
        table = raman_nath_profile(x, rn_nmax, J=J)
        tpath = os.path.join(out_dir, "raman_nath.csv")
        with open(tpath, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("omega_t,n,bessel,lattice\n")
            for i, xv in enumerate(x):
                for k, n in enumerate(table.n):
                    fh.write(f"{fmt(xv)},{n},{fmt(table.bessel[i, k])},{fmt(table.lattice[i, k])}\n")
        manifest.add_output(tpath)
        click.echo(f"Raman-Nath limit: max |lattice - J_n(2 Omega t)^2| = {table.max_deviation:.3e}")
        manifest.parameters["raman_nath_deviation"] = table.max_deviation
    _finish(manifest, out_dir)


# ---------------------------------------------------------------------------

@cli.command()
@config_option
@click.option("--q", type=float, default=1.0, show_default=True)
@click.option("--m", "m", type=int, default=0, show_default=True, help="Mode index (ascending eigenvalue).")
@click.option("--points", type=int, default=1024, show_default=True, help="Samples on [0, 2 pi).")
@click.option("--J", "J", type=int, default=64, show_default=True)
@out_option
@click.pass_context
def mathieu(ctx, q, m, points, J, out_dir):
    """Tabulate cse_m(x; q) and its Mathieu-equation residual."""
    if points <= 2 * J:
        # grid must resolve the highest Fourier index
        raise ConfigurationError(f"--points must exceed 2J = {2 * J}")
    basis = spectral_basis(q, J)
    fn = MathieuFunction.from_basis(basis, m)
    x = uniform_grid(points)
    values = eval_cse(fn, x)
    residual = ode_residual(fn, fn.eigenvalue, x)

    _prepare(out_dir)
    manifest = _manifest(ctx, out_dir)
    tpath = os.path.join(out_dir, f"cse_m{m}.csv")
    write_function_table(x, values, tpath)
    manifest.add_output(tpath)
    summary = {
        "q": q,
        "m": m,
        "J": J,
        "points": points,
        "eigenvalue": fn.eigenvalue,
        "parity": fn.parity,
        "kind": fn.kind,
        "order": fn.order,
        "characteristic_value": 4.0 * fn.eigenvalue if fn.kind else None,
        "ode_residual": residual,
        "recurrence_residual": float(np.max(np.abs(recurrence_residuals(basis)[m]))),
        "max_abs_real": float(np.max(np.abs(values.real))),
        "max_abs_imag": float(np.max(np.abs(values.imag))),
    }
    spath = os.path.join(out_dir, f"residual_m{m}.json")
    write_json(summary, spath)
    manifest.add_output(spath)
    label = f"{fn.kind}_{fn.order}" if fn.kind else "unlabelled"
    click.echo(f"m={m} ({label}) E={fn.eigenvalue!r}: max ODE residual {residual:.3e}")
    _finish(manifest, out_dir)


def main(argv=None):
    """Entry point with the package's exit-code contract."""
    try:
        cli.main(args=argv, prog_name="mathieu-lattice", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_VALIDATION
    except click.ClickException as exc:
        exc.show()
        return EXIT_VALIDATION
    except (ConfigurationError, DomainError, LabelingError, ContaminatedModeError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_VALIDATION
    except NumericError as exc:
        click.echo(f"numeric error: {exc}", err=True)
        return EXIT_NUMERIC
    except OSError as exc:
        click.echo(f"I/O error: {exc}", err=True)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())

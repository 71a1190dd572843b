"""
The subcommands. Each one reads a run configuration, runs the numerical pipeline and
writes its tables, maps and a manifest to the output directory.
"""

from __future__ import annotations

import hashlib
import logging
import time
from argparse import Namespace
from contextlib import contextmanager
from importlib import resources
from pathlib import Path
from typing import Callable, Iterator

import numpy as np
import pandas as pd

from rfiforge import __version__
from rfiforge.cli.export import (
    prepare_out_dir,
    write_frame,
    write_manifest,
    write_map,
    write_matrix,
    write_snapshots,
    write_table,
)
from rfiforge.exceptions import ConfigurationError, OutputError
from rfiforge.models.config import RunConfig, ScenarioDocument
from rfiforge.models.manifest import RunManifest
from rfiforge.models.scenario import ScenarioConfig
from rfiforge.models.studies import StudyVariant
from rfiforge.processing.covariance import sample_covariance
from rfiforge.processing.imaging import dirty_map
from rfiforge.processing.mitigation import mitigate_by_projection, mitigate_by_subtraction
from rfiforge.processing.scenario import observe
from rfiforge.simulator import Simulator
from rfiforge.utils import hermitian_part, model_validation

logger = logging.getLogger(__name__)

PRESET_PREFIX = "preset:"

Timings = dict[str, float]


@contextmanager
def stage(timings: Timings, name: str) -> Iterator[None]:
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[name] = round(time.perf_counter() - start, 6)


def load_config(source: str) -> RunConfig:
    """
    Read a run configuration from a path, or from a bundled preset named `preset:<name>`.

    Raises
    ------
    ConfigurationError
        If the preset does not exist or the document is invalid
    OutputError
        If the file cannot be read
    """
    if source.startswith(PRESET_PREFIX):
        name = source.removeprefix(PRESET_PREFIX)
        preset = resources.files("rfiforge.cli.presets") / f"{name}.json"
        if not preset.is_file():
            raise ConfigurationError(f"unknown preset {name!r}", field="config")
        text = preset.read_text(encoding="utf-8")
    else:
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as e:
            raise OutputError(f"cannot read {source}: {e.strerror or e}") from e
    config = RunConfig.from_json(text)
    logger.debug("Loaded configuration from %s", source)
    return config


def make_simulator(config: RunConfig, args: Namespace) -> Simulator:
    """
    The base seed is taken from `--seed`, else from `RFI_FORGE_SEED`, else from the document.
    """
    workers = args.workers or config.workers
    if args.seed is not None:
        return Simulator(args.seed, workers=workers)
    return Simulator.from_env(config.seed, workers=workers)


@model_validation
def build_scenario(document: ScenarioDocument, seed: int, args: Namespace) -> ScenarioConfig:
    scenario = document.build(seed).model_copy()
    if args.delta is not None:
        scenario.gain_delta = args.delta
    return scenario


def _checksum(array: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(array, dtype="<f8").tobytes()).hexdigest()


def _scenario_metadata(scenario: ScenarioConfig) -> dict:
    return {
        "n_antennas": scenario.n_antennas,
        "n_samples": scenario.n_samples,
        "sigma_n": scenario.sigma_n,
        "inr_db": 10 * np.log10(scenario.inr) if scenario.inr > 0 else None,
        "sources": len(scenario.sources),
        "gain_delta": scenario.gain_delta,
        "max_baseline": scenario.geometry.max_baseline,
    }


def _finish(
    command: str,
    config: RunConfig,
    simulator: Simulator,
    out_dir: Path,
    paths: list[Path],
    timings: Timings,
    metadata: dict,
) -> Path:
    manifest = RunManifest(
        command=command,
        tool_version=__version__,
        config_hash=config.digest(),
        base_seed=simulator.base_seed,
        timings=timings,
        metadata=metadata,
    )
    return write_manifest(out_dir, manifest, paths)


def cmd_simulate(config: RunConfig, args: Namespace) -> Path:
    """
    Synthesize the scenario once and write its zero-lag and lagged SCMs.
    """
    out_dir = prepare_out_dir(args.out_dir)
    tau = args.tau if args.tau is not None else 1
    timings: Timings = {}

    with make_simulator(config, args) as simulator:
        with stage(timings, "synthesize"):
            scenario = build_scenario(config.require_scenario(), simulator.base_seed, args)
            snapshots, u = observe(scenario)
        with stage(timings, "covariance"):
            scm0 = sample_covariance(snapshots, 0)
            scm_tau = sample_covariance(snapshots, tau)

    with stage(timings, "export"):
        paths = [
            write_matrix(out_dir / "scm_tau0.csv", scm0.matrix),
            write_matrix(out_dir / f"scm_tau{tau}.csv", scm_tau.matrix),
        ]
        if args.snapshots:
            paths.append(write_snapshots(out_dir / "snapshots.csv", snapshots.data))

    metadata = {
        **_scenario_metadata(scenario),
        "tau": tau,
        "gain_vector_sha256": _checksum(u),
    }
    return _finish("simulate", config, simulator, out_dir, paths, timings, metadata)


def cmd_gamma_study(config: RunConfig, args: Namespace) -> Path:
    """
    Run the signature accuracy study and write `gamma_study.csv`.

    `--tau` and `--delta` restrict the variants to the given lag or gain error.
    """
    out_dir = prepare_out_dir(args.out_dir)
    document = config.gamma_study
    trials = args.trials if args.trials is not None else document.trials
    variants = list(document.variants)
    if args.tau is not None or args.delta is not None:
        taus = [args.tau] if args.tau is not None else sorted({v.tau for v in variants})
        deltas = (
            [args.delta] if args.delta is not None else sorted({v.gain_delta for v in variants})
        )
        variants = [StudyVariant(tau=tau, gain_delta=delta) for tau in taus for delta in deltas]
    timings: Timings = {}

    with make_simulator(config, args) as simulator:
        with stage(timings, "study"):
            table = simulator.gamma.run(
                document.inr_grid,
                document.n_grid,
                variants,
                trials,
                n_antennas=document.n_antennas,
                sigma_n=document.sigma_n,
                omega=document.omega,
            )

    with stage(timings, "export"):
        paths = [write_table(out_dir / "gamma_study.csv", table.rows())]

    metadata = {**table.metadata, "trials": trials, "variants": [v.label for v in variants]}
    return _finish("gamma-study", config, simulator, out_dir, paths, timings, metadata)


def cmd_smear_study(config: RunConfig, args: Namespace) -> Path:
    """
    Run the smearing study and write `smearing_study.csv` and `smearing_spectra.csv`.
    """
    out_dir = prepare_out_dir(args.out_dir)
    document = config.smear_study
    trials = args.trials if args.trials is not None else document.trials
    timings: Timings = {}

    with make_simulator(config, args) as simulator:
        with stage(timings, "study"):
            table = simulator.smearing.run(
                document.alpha_sigma,
                document.n_grid,
                document.template(),
                trials,
                sigma_n=document.sigma_n,
                kappa=document.kappa,
                empirical_limit=document.empirical_limit,
            )

    spectra = []
    for row in table.rows:
        empirical = row.empirical_spectrum
        for index, value in enumerate(row.spectrum):
            spectra.append(
                {
                    "trial": row.trial,
                    "n_samples": row.n_samples,
                    "index": index,
                    "closed_form": value,
                    "empirical": empirical[index] if empirical is not None else None,
                }
            )

    with stage(timings, "export"):
        paths = [
            write_table(out_dir / "smearing_study.csv", [row.to_row() for row in table.rows]),
            write_frame(out_dir / "smearing_spectra.csv", pd.DataFrame(spectra)),
        ]

    metadata = {
        "alpha_sigma": document.alpha_sigma,
        "n_antennas": document.n_antennas,
        "trials": trials,
        "kappa": document.kappa,
    }
    return _finish("smear-study", config, simulator, out_dir, paths, timings, metadata)


def cmd_compare(config: RunConfig, args: Namespace) -> Path:
    """
    Compare projection and subtraction over several seeds and write `comparison.csv`,
    `comparison_summary.csv` and the maps of the first seed.

    `--trials` sets the number of seeds.
    """
    out_dir = prepare_out_dir(args.out_dir)
    document = config.compare
    seeds = args.trials if args.trials is not None else document.seeds
    tau = args.tau if args.tau is not None else document.tau
    timings: Timings = {}

    with make_simulator(config, args) as simulator:
        scenario = build_scenario(config.require_scenario(), simulator.base_seed, args)
        with stage(timings, "comparison"):
            report = simulator.comparison.run(
                scenario,
                seeds,
                alpha_sigma=document.alpha_sigma,
                tau=tau,
                kappa=document.kappa,
                grid=config.imaging.grid(),
                panels=document.panels,
            )

    with stage(timings, "export"):
        paths = [
            write_table(out_dir / "comparison.csv", report.rows()),
            write_table(out_dir / "comparison_summary.csv", [report.summary_row()]),
        ]
        for name, sky_map in report.panels.items():
            paths.extend(write_map(out_dir, f"map_{name}", sky_map, config.imaging.format))

    metadata = {**_scenario_metadata(scenario), **report.metadata, "seeds": seeds}
    return _finish("compare", config, simulator, out_dir, paths, timings, metadata)


def cmd_image(config: RunConfig, args: Namespace) -> Path:
    """
    Image one realization of the scenario: raw, lagged, RFI-free and both corrected maps.
    """
    out_dir = prepare_out_dir(args.out_dir)
    tau = args.tau if args.tau is not None else config.compare.tau
    grid = config.imaging.grid()
    timings: Timings = {}

    with make_simulator(config, args) as simulator:
        with stage(timings, "synthesize"):
            scenario = build_scenario(config.require_scenario(), simulator.base_seed, args)
            snapshots, u = observe(scenario)
            reference, _ = observe(scenario.without_rfi())
        with stage(timings, "mitigation"):
            R0 = sample_covariance(snapshots, 0)
            Rtau = sample_covariance(snapshots, tau)
            projected = mitigate_by_projection(R0, kappa=config.compare.kappa)
            subtracted = mitigate_by_subtraction(R0, Rtau)

    covariances = {
        "raw": R0.matrix,
        "lagged": hermitian_part(Rtau.matrix),
        "reference": sample_covariance(reference, 0).matrix,
        "projection": projected.corrected,
        "subtraction": subtracted.corrected,
    }
    paths: list[Path] = []
    with stage(timings, "imaging"):
        for name, matrix in covariances.items():
            sky_map = dirty_map(matrix, scenario.geometry, grid, description=name)
            paths.extend(write_map(out_dir, f"map_{name}", sky_map, config.imaging.format))

    metadata = {
        **_scenario_metadata(scenario),
        "tau": tau,
        "rank_removed": projected.rank_removed,
        "xi0": [subtracted.xi0.real, subtracted.xi0.imag],
        "gain_vector_sha256": _checksum(u),
    }
    return _finish("image", config, simulator, out_dir, paths, timings, metadata)


COMMANDS: dict[str, Callable[[RunConfig, Namespace], Path]] = {
    "simulate": cmd_simulate,
    "gamma-study": cmd_gamma_study,
    "smear-study": cmd_smear_study,
    "compare": cmd_compare,
    "image": cmd_image,
}

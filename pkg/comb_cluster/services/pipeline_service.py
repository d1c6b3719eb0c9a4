"""End-to-end pipeline: build, entangle, verify, report.

Stages run in order: H-graph, interferometer, initial graph, entangled graph, covariance,
nullifiers, lattice, sampling and exports. Dense stages (expm oracle, covariance,
numeric nullifiers, sampling) only run up to ``DENSE_MODE_LIMIT`` modes and are listed as
skipped above it. Verdicts are collected by name; exceptions propagate with the module
tag of the stage that raised them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from comb_cluster.adapters.config_loader import ExportSelector, PipelineConfig, load_splitter_matrix
from comb_cluster.domain import (
    BalancedSplitter,
    BlockInterferometer,
    GraphState,
    HGraph,
    LatticeReport,
    MacronodeGraph,
    MonteCarloResult,
    NullifierSet,
    QuadratureCovariance,
    SLOT_ORDERING,
    SqueezingScalars,
)
from comb_cluster.observability import PipelineTracker, StageTimer, get_logger, record_verdict
from comb_cluster.services import gaussian_engine as engine
from comb_cluster.services.comb_index import pump_frequency, pump_indices
from comb_cluster.services.hgraph_service import (
    boundary_modes,
    build_hgraph,
    matching_projector_check,
)
from comb_cluster.services.interferometer_service import (
    build_block_interferometer,
    orthogonality_error,
    resolve_splitter,
)
from comb_cluster.services.lattice_service import (
    coarse_grain,
    hgraph_macronode_graph,
    verify_lattice,
)
from comb_cluster.services.nullifier_service import (
    boundary_deviation,
    max_deviation,
    monte_carlo_nullifiers,
    nullifier_cov_analytic,
    nullifier_cov_numeric,
    nullifier_rows,
    two_tone_support,
)
from comb_cluster.services.sampling import sample_quadratures
from comb_cluster.settings import Settings, get_settings

if TYPE_CHECKING:
    from comb_cluster.adapters.exporters import ArtifactExporter

logger = get_logger(__name__)

R_ORTHOGONALITY_LIMIT = 1e-13


def theta_key(theta: float) -> str:
    """Stable text key for an angle."""
    return format(theta, ".17g")


@dataclass
class ThetaChecks:
    """Per-angle nullifier artifacts and their deviations."""

    rows: NullifierSet
    analytic: sp.csr_array
    numeric: Optional[np.ndarray] = None
    deviation: Optional[float] = None
    boundary_deviation: Optional[float] = None
    two_tone_ok: Optional[bool] = None
    monte_carlo: Optional[MonteCarloResult] = None


@dataclass
class RunSummary:
    """Verdicts and scalar results of one run; ``timings`` stays out of the report."""

    run_id: str
    config: PipelineConfig
    scalars: SqueezingScalars
    num_modes: int
    pumps: List[List[int]]
    verdicts: Dict[str, bool] = field(default_factory=dict)
    lattice: Optional[LatticeReport] = None
    nullifier_deviation: Dict[str, float] = field(default_factory=dict)
    boundary_deviation: Dict[str, float] = field(default_factory=dict)
    monte_carlo: List[MonteCarloResult] = field(default_factory=list)
    symplectic_range: Optional[List[float]] = None
    boundary: List[Dict[str, Any]] = field(default_factory=list)
    skipped: List[str] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    written: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_report(self) -> Dict[str, Any]:
        """Verification report; contains no run id or timings so reruns match byte for byte."""
        k = self.scalars
        return {
            "config": self.config.echo(),
            "scalars": k.to_dict(),
            "variance": {
                "analytic_vacuum_units": engine.vacuum_units(k.epsilon / 2.0),
                "analytic_squeezing_db": engine.squeezing_db(k.epsilon / 2.0),
            },
            "pumps": {
                "indices": self.pumps,
                "frequencies": [
                    [
                        pump_frequency(p, self.config.omega0, self.config.delta_omega)
                        for p in pair
                    ]
                    for pair in self.pumps
                ],
            },
            "num_modes": self.num_modes,
            "lattice": self.lattice.to_dict() if self.lattice else None,
            "nullifier_max_deviation": dict(self.nullifier_deviation),
            "boundary_variance_deviation": dict(self.boundary_deviation),
            "monte_carlo": [result.to_dict() for result in self.monte_carlo],
            "symplectic_range": self.symplectic_range,
            "boundary_modes": self.boundary,
            "slot_ordering": SLOT_ORDERING,
            "verdicts": dict(sorted(self.verdicts.items())),
            "skipped": list(self.skipped),
            "passed": self.passed,
        }


@dataclass
class RunState:
    """Everything produced by a run, as consumed by the exporters."""

    summary: RunSummary
    hgraph: HGraph
    splitter: BalancedSplitter
    interferometer: BlockInterferometer
    initial: GraphState
    entangled: GraphState
    cluster: GraphState
    macronode_graph: MacronodeGraph
    thetas: Dict[str, ThetaChecks] = field(default_factory=dict)
    covariance: Optional[QuadratureCovariance] = None


class PipelineService:
    """Runs one configuration through every stage and collects verdicts."""

    def __init__(
        self,
        *,
        settings: Optional[Settings] = None,
        exporter: Optional["ArtifactExporter"] = None,
    ) -> None:
        self.settings = settings or get_settings()
        self._exporter = exporter

    @property
    def exporter(self) -> "ArtifactExporter":
        if self._exporter is None:
            from comb_cluster.adapters.exporters import get_artifact_exporter

            self._exporter = get_artifact_exporter()
        return self._exporter

    # ------------------------------------------------------------------
    # Public API
    # ------------------------------------------------------------------

    def run(
        self,
        config: PipelineConfig,
        *,
        out_dir: Optional[Path] = None,
        base_dir: Optional[Path] = None,
        selectors: Optional[Sequence[ExportSelector]] = None,
    ) -> RunState:
        """Execute the pipeline; exports happen only when ``out_dir`` is given."""
        timings: Dict[str, float] = {}
        window = config.comb_window
        num_modes = 2 * config.dimension * window.size

        with PipelineTracker(dimension=config.dimension, num_modes=num_modes) as run_id:
            summary = RunSummary(
                run_id=run_id,
                config=config,
                scalars=SqueezingScalars.from_alpha(config.alpha),
                num_modes=num_modes,
                pumps=[list(pump_indices(spec)) for spec in config.specs()],
                timings=timings,
            )
            dense = num_modes <= self.settings.DENSE_MODE_LIMIT

            with StageTimer("hgraph", timings):
                g = build_hgraph(config.specs(), window)
                _, matching_ok = matching_projector_check(g)
                self._verdict(summary, "matching", matching_ok)
                summary.boundary = boundary_modes(g)

            with StageTimer("interferometer", timings):
                matrix = load_splitter_matrix(config, base_dir or Path.cwd())
                splitter = resolve_splitter(2 * config.dimension, matrix)
                r = build_block_interferometer(splitter, g)
                self._verdict(
                    summary, "orthogonality", orthogonality_error(r.matrix) < R_ORTHOGONALITY_LIMIT
                )

            with StageTimer("initial_graph", timings):
                z0 = engine.initial_graph(g, config.alpha)
                if dense:
                    oracle = engine.expm_graph_oracle(g, config.alpha)
                    error = float(np.max(np.abs(z0.dense() - oracle)))
                    self._verdict(summary, "expm_oracle", error < self.settings.ORACLE_TOLERANCE)
                else:
                    self._skip(summary, "expm_oracle")

            with StageTimer("entangle", timings):
                z = engine.apply_interferometer(z0, r)
                z_cluster = engine.cluster_graph(g, r, config.alpha)

            covariance: Optional[QuadratureCovariance] = None
            with StageTimer("covariance", timings):
                if dense:
                    initial_cov = engine.covariance_from_graph(z0)
                    covariance = engine.covariance_from_graph(z)
                    spectrum = engine.symplectic_eigenvalues(covariance)
                    summary.symplectic_range = [float(spectrum.min()), float(spectrum.max())]
                    cluster_cov = engine.covariance_from_graph(z_cluster)
                    pure = all(engine.is_pure(c) for c in (initial_cov, covariance, cluster_cov))
                    self._verdict(summary, "purity", pure)
                else:
                    self._skip(summary, "covariance")

            with StageTimer("nullifiers", timings):
                checks = self._nullifiers(config, g, r, covariance, summary)

            with StageTimer("lattice", timings):
                mg = coarse_grain(
                    engine.rotated_graph(g, r), r.partition, self.settings.REL_THRESHOLD
                )
                offsets = sorted({spec.delta_m for spec in config.specs()})
                summary.lattice = verify_lattice(mg, offsets, copies=config.copies, window=window)
                self._verdict(summary, "lattice", summary.lattice.passed)
                reference = hgraph_macronode_graph(g)
                same = [e[:2] for e in reference.edges] == [e[:2] for e in mg.edges]
                self._verdict(summary, "macronode_invariance", same)

            with StageTimer("sampling", timings):
                if config.samples > 0 and covariance is not None:
                    self._sample(config, covariance, checks, summary)
                elif config.samples > 0:
                    self._skip(summary, "sampling")

            state = RunState(
                summary=summary,
                hgraph=g,
                splitter=splitter,
                interferometer=r,
                initial=z0,
                entangled=z,
                cluster=z_cluster,
                macronode_graph=mg,
                thetas=checks,
                covariance=covariance,
            )

            chosen = list(selectors) if selectors is not None else list(config.exports)
            if out_dir is not None and chosen:
                with StageTimer("export", timings):
                    written = self.exporter.export(state, chosen, out_dir)
                    summary.written = [str(path) for path in written]

            logger.info(
                "pipeline verdicts",
                passed=summary.passed,
                failed=[name for name, ok in summary.verdicts.items() if not ok],
                skipped=summary.skipped,
            )
            return state

    # ------------------------------------------------------------------
    # Stages
    # ------------------------------------------------------------------

    def _nullifiers(
        self,
        config: PipelineConfig,
        g: HGraph,
        r: BlockInterferometer,
        covariance: Optional[QuadratureCovariance],
        summary: RunSummary,
    ) -> Dict[str, ThetaChecks]:
        checks: Dict[str, ThetaChecks] = {}
        matched = g.matched_mask
        deviations: List[bool] = []
        two_tone: List[bool] = []
        for theta in config.thetas:
            key = theta_key(theta)
            rows = nullifier_rows(theta, r, g, config.alpha)
            check = ThetaChecks(rows=rows, analytic=nullifier_cov_analytic(theta, g, config.alpha))

            if config.alpha > 0:
                sizes = np.array([len(s) for s in two_tone_support(rows, g)])
                check.two_tone_ok = bool(
                    np.all(sizes[matched] == 2) and np.all(sizes[~matched] == 1)
                )
                two_tone.append(check.two_tone_ok)

            if covariance is not None:
                check.numeric = nullifier_cov_numeric(covariance, rows)
                check.deviation = max_deviation(check.analytic, check.numeric, g)
                check.boundary_deviation = boundary_deviation(check.numeric, g)
                summary.nullifier_deviation[key] = check.deviation
                summary.boundary_deviation[key] = check.boundary_deviation
                tolerance = self.settings.NULLIFIER_TOLERANCE
                deviations.append(
                    check.deviation < tolerance and check.boundary_deviation < tolerance
                )
            checks[key] = check

        if covariance is not None:
            self._verdict(summary, "nullifier_covariance", all(deviations))
        else:
            self._skip(summary, "nullifier_covariance")
        if two_tone:
            self._verdict(summary, "two_tone", all(two_tone))
        else:
            self._skip(summary, "two_tone", reason="no squeezing")
        return checks

    def _sample(
        self,
        config: PipelineConfig,
        covariance: QuadratureCovariance,
        checks: Dict[str, ThetaChecks],
        summary: RunSummary,
    ) -> None:
        samples = sample_quadratures(covariance, config.samples, config.seed)
        passed = True
        for check in checks.values():
            analytic = check.analytic.diagonal()
            result = monte_carlo_nullifiers(samples, check.rows, analytic)
            check.monte_carlo = result
            summary.monte_carlo.append(result)
            passed = passed and result.passed(self.settings.MC_Z_LIMIT)
        self._verdict(summary, "monte_carlo", passed)

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    @staticmethod
    def _verdict(summary: RunSummary, check: str, passed: bool) -> None:
        summary.verdicts[check] = bool(passed)
        record_verdict(check, bool(passed))
        if not passed:
            logger.warning("verification failed", check=check)

    @staticmethod
    def _skip(summary: RunSummary, stage: str, reason: str = "above dense mode limit") -> None:
        summary.skipped.append(stage)
        logger.info("stage skipped", stage=stage, reason=reason)


# Factory --------------------------------------------------------------------


def get_pipeline_service() -> PipelineService:
    return PipelineService()


def run_pipeline(
    config: PipelineConfig,
    *,
    out_dir: Optional[Path] = None,
    base_dir: Optional[Path] = None,
) -> RunState:
    """Convenience wrapper around :class:`PipelineService`."""
    return get_pipeline_service().run(config, out_dir=out_dir, base_dir=base_dir)

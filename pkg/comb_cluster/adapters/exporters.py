"""Artifact exports: H-graph JSON, Matrix Market matrices, DOT graphs, JSON report.

Files are written into a staging directory next to the target and moved into place with
``os.replace`` once every file has been written; on any failure the staging directory is
removed so no partial artifact set is left behind.
"""
from __future__ import annotations

import json
import os
import shutil
import tempfile
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Protocol, Sequence, runtime_checkable

import numpy as np
import scipy.io
import scipy.sparse as sp

try:
    from jsonschema import ValidationError as SchemaError
    from jsonschema import validate
except ModuleNotFoundError:
    validate = None
    SchemaError = Exception

from comb_cluster.adapters.config_loader import ExportSelector
from comb_cluster.domain import SLOT_ORDERING, ExportError, GraphState, HGraph, MacronodeGraph
from comb_cluster.observability import get_logger
from comb_cluster.services.comb_index import frequency_of, frequency_to_compound
from comb_cluster.services.hgraph_service import adjacency_matrix, edge_records

if TYPE_CHECKING:
    from comb_cluster.services.pipeline_service import RunState

logger = get_logger(__name__)

REPORT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": [
        "config",
        "scalars",
        "lattice",
        "nullifier_max_deviation",
        "monte_carlo",
        "boundary_modes",
        "slot_ordering",
        "verdicts",
        "passed",
    ],
    "properties": {
        "config": {"type": "object", "required": ["window", "opos", "alpha", "thetas", "seed"]},
        "scalars": {
            "type": "object",
            "required": ["alpha", "c", "s", "epsilon", "t"],
            "additionalProperties": {"type": "number"},
        },
        "lattice": {"type": ["object", "null"]},
        "nullifier_max_deviation": {"type": "object", "additionalProperties": {"type": "number"}},
        "monte_carlo": {
            "type": "array",
            "items": {"type": "object", "required": ["theta", "max_abs_z"]},
        },
        "boundary_modes": {"type": "array"},
        "slot_ordering": {"type": "string"},
        "verdicts": {"type": "object", "additionalProperties": {"type": "boolean"}},
        "passed": {"type": "boolean"},
    },
}

MODE_MAP_FILE = "modes.json"


def to_json(payload: Any) -> str:
    """Deterministic JSON text (sorted keys, trailing newline)."""
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_matrix_market(path: Path, matrix: Any, comment: str = "") -> None:
    """Coordinate Matrix Market file at 17 significant digits.

    Symmetric matrices are declared symmetric; real and complex kinds follow the dtype.
    """
    coo = sp.coo_array(matrix)
    symmetric = (coo - coo.T).count_nonzero() == 0
    if symmetric:
        lower = coo.row >= coo.col
        coo = sp.coo_array((coo.data[lower], (coo.row[lower], coo.col[lower])), shape=coo.shape)
    scipy.io.mmwrite(
        str(path),
        coo,
        comment=comment,
        field="complex" if np.iscomplexobj(coo.data) else "real",
        precision=17,
        symmetry="symmetric" if symmetric else "general",
    )


def mode_map(g: HGraph) -> List[Dict[str, Any]]:
    """Canonical mode map; ``index`` is the 1-based Matrix Market row."""
    return [
        {**mode.to_dict(), "index": i + 1, "m": int(g.macronodes[i]), "slot": mode.slot}
        for i, mode in enumerate(g.modes)
    ]


def to_dot(mg: MacronodeGraph, copies: int = 1, name: str = "macronodes") -> str:
    """Undirected DOT graph; node label carries the macronode index and its copy label."""
    lines = [f"graph {name} {{"]
    for node in mg.nodes:
        compound = frequency_to_compound(frequency_of(node), copies)
        label = f"{node}" if copies == 1 else f"{node} (k={compound.k}, m={compound.m})"
        lines.append(f'  "{node}" [label="{label}", copy={compound.k}];')
    for a, b, weight in mg.edges:
        lines.append(f'  "{a}" -- "{b}" [weight="{weight:.17g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


@runtime_checkable
class ArtifactExporter(Protocol):
    """Public interface consumed by the pipeline."""

    def export(
        self, state: "RunState", selectors: Sequence[ExportSelector], out_dir: Path
    ) -> List[Path]: ...


class FileArtifactExporter(ArtifactExporter):
    """Writes artifacts to a directory, all or nothing."""

    def export(
        self, state: "RunState", selectors: Sequence[ExportSelector], out_dir: Path
    ) -> List[Path]:
        out_dir = Path(out_dir)
        chosen = sorted({ExportSelector(s) for s in selectors}, key=lambda s: s.value)
        staging = out_dir / f".staging-{state.summary.run_id}"
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            staging.mkdir(exist_ok=False)
            names: List[str] = []
            for selector in chosen:
                names.extend(self._writers[selector](self, state, staging))
            targets: List[Path] = []
            try:
                for filename in names:
                    target = out_dir / filename
                    os.replace(staging / filename, target)
                    targets.append(target)
            except OSError:
                for target in targets:
                    target.unlink(missing_ok=True)
                raise
        except OSError as exc:
            raise ExportError(f"cannot write artifacts to {out_dir}: {exc}") from exc
        finally:
            shutil.rmtree(staging, ignore_errors=True)

        logger.info("artifacts exported", out_dir=str(out_dir), files=[t.name for t in targets])
        return targets

    # ------------------------------------------------------------------
    # Writers; each returns the file names it created in ``staging``
    # ------------------------------------------------------------------

    def _write_hgraph(self, state: "RunState", staging: Path) -> List[str]:
        g = state.hgraph
        modes = mode_map(g)
        payload = {
            "window": g.window.to_dict() if g.window else None,
            "opos": [spec.to_dict() for spec in g.specs],
            "edges": edge_records(g),
            "unmatched": [modes[i] for i in g.unmatched],
        }
        (staging / "hgraph.json").write_text(to_json(payload), encoding="utf-8")
        return ["hgraph.json"]

    def _write_matrices(self, state: "RunState", staging: Path) -> List[str]:
        g = state.hgraph
        matrices: Dict[str, Any] = {
            "G.mtx": adjacency_matrix(g),
            "R.mtx": state.interferometer.matrix,
            "ReZ.mtx": _part(state.entangled, "real"),
            "ImZ.mtx": _part(state.entangled, "imag"),
            "ReZC.mtx": _part(state.cluster, "real"),
            "ImZC.mtx": _part(state.cluster, "imag"),
        }
        for key, check in state.thetas.items():
            suffix = key.replace(".", "p").replace("-", "m")
            matrices[f"nullifier_cov_analytic_theta_{suffix}.mtx"] = check.analytic
            if check.numeric is not None:
                symmetric = 0.5 * (check.numeric + check.numeric.T)
                matrices[f"nullifier_cov_numeric_theta_{suffix}.mtx"] = symmetric

        for filename, matrix in matrices.items():
            write_matrix_market(staging / filename, matrix, comment=f"modes: see {MODE_MAP_FILE}")
        (staging / MODE_MAP_FILE).write_text(
            to_json({"slot_ordering": SLOT_ORDERING, "modes": mode_map(g)}), encoding="utf-8"
        )
        return sorted(matrices) + [MODE_MAP_FILE]

    def _write_dot(self, state: "RunState", staging: Path) -> List[str]:
        text = to_dot(state.macronode_graph, copies=state.summary.config.copies)
        (staging / "macronodes.dot").write_text(text, encoding="utf-8")
        return ["macronodes.dot"]

    def _write_report(self, state: "RunState", staging: Path) -> List[str]:
        report = state.summary.to_report()
        if validate is not None:
            try:
                validate(instance=report, schema=REPORT_SCHEMA)
            except SchemaError as exc:
                raise ExportError(f"report failed schema validation: {exc}") from exc
        (staging / "report.json").write_text(to_json(report), encoding="utf-8")
        return ["report.json"]

    _writers = {
        ExportSelector.HGRAPH: _write_hgraph,
        ExportSelector.MATRICES: _write_matrices,
        ExportSelector.DOT: _write_dot,
        ExportSelector.REPORT: _write_report,
    }


def _part(state: GraphState, which: str) -> sp.csr_array:
    coo = sp.coo_array(state.z)
    data = coo.data.real if which == "real" else coo.data.imag
    result = sp.coo_array((data, (coo.row, coo.col)), shape=coo.shape).tocsr()
    result.eliminate_zeros()
    return result


# Factory --------------------------------------------------------------------


def get_artifact_exporter() -> ArtifactExporter:
    return FileArtifactExporter()


def export_artifacts(
    state: "RunState", selectors: Sequence[ExportSelector], out_dir: Path
) -> List[Path]:
    """Write the selected artifact families for one run into ``out_dir``."""
    return get_artifact_exporter().export(state, selectors, Path(out_dir))


def write_text_atomic(path: Path, text: str) -> Path:
    """Write one text file through a sibling temporary file and ``os.replace``."""
    path = Path(path)
    temporary: Optional[Path] = None
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(
            "w", encoding="utf-8", dir=path.parent, prefix=f".{path.name}.", delete=False
        ) as handle:
            handle.write(text)
            temporary = Path(handle.name)
        os.replace(temporary, path)
    except OSError as exc:
        if temporary is not None:
            temporary.unlink(missing_ok=True)
        raise ExportError(f"cannot write {path}: {exc}") from exc
    return path

"""Report run configuration: a single JSON document.

A run references many inputs (terminology files, annotations, the list
of coder pairs to compare), so the report command takes one declarative
config file; command-line flags override individual values. Relative
paths inside the config resolve against the config file's directory.

Example:

    {
      "terminology": {"kind": "edge_list", "edge_path": "mini.csv"},
      "focus_root": 404684003,
      "focus_inclusive": true,
      "policy": "term_count",
      "thresholds": [1, 2, 3],
      "annotations_path": "annotations.csv",
      "comparisons": [["A", "B"], ["A", "GS"], ["B", "GS"]],
      "micro_average_groups": {"human_vs_gs": [["A", "GS"], ["B", "GS"]]},
      "similarity_matrices": [{"left": "A", "right": "B", "reference": "GS"}],
      "rating_crosstabs": [{"left": "A", "right": "B"}],
      "acceptability_coders": ["A", "B"],
      "distance_vs_rating": {"reference": "GS", "coders": ["A", "B"]},
      "output_dir": "out",
      "markdown": true,
      "figures": true
    }
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConfigError, InvalidThresholds
from .ingest import IngestConfig
from .metric import DEFAULT_THRESHOLDS, DenominatorPolicy, normalize_thresholds

CLINICAL_FINDING_ROOT = 404684003

CoderPair = tuple[str, str]


@dataclass
class RunConfig:
    ingest: IngestConfig
    annotations_path: str
    comparisons: list[CoderPair]
    output_dir: str
    focus_root: int = CLINICAL_FINDING_ROOT
    focus_inclusive: bool = True
    policy: DenominatorPolicy = DenominatorPolicy.TERM_COUNT
    thresholds: tuple[Fraction, ...] = DEFAULT_THRESHOLDS
    micro_average_groups: dict[str, list[CoderPair]] = field(default_factory=dict)
    similarity_matrices: list[tuple[str, str, str]] = field(default_factory=list)
    rating_crosstabs: list[CoderPair] = field(default_factory=list)
    acceptability_coders: list[str] = field(default_factory=list)
    distance_vs_rating: tuple[str, list[str]] | None = None  # (reference, coders)
    markdown: bool = True
    figures: bool = False

    def as_dict(self) -> dict:
        """Full effective configuration, echoed into every report."""
        return {
            "terminology": self.ingest.as_dict(),
            "annotations_path": self.annotations_path,
            "comparisons": [list(pair) for pair in self.comparisons],
            "output_dir": self.output_dir,
            "focus_root": self.focus_root,
            "focus_inclusive": self.focus_inclusive,
            "policy": self.policy.value,
            "thresholds": [str(t) for t in self.thresholds],
            "micro_average_groups": {
                name: [list(pair) for pair in pairs]
                for name, pairs in self.micro_average_groups.items()
            },
            "similarity_matrices": [list(triple) for triple in self.similarity_matrices],
            "rating_crosstabs": [list(pair) for pair in self.rating_crosstabs],
            "acceptability_coders": list(self.acceptability_coders),
            "distance_vs_rating": (
                None
                if self.distance_vs_rating is None
                else {
                    "reference": self.distance_vs_rating[0],
                    "coders": list(self.distance_vs_rating[1]),
                }
            ),
            "markdown": self.markdown,
            "figures": self.figures,
        }


def _coder_pair(value, where: str) -> CoderPair:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, str) and v for v in value)
    ):
        raise ConfigError(f"{where}: expected a [left, right] coder pair, got {value!r}")
    return (value[0], value[1])


def _resolve(base_dir: str, path: str) -> str:
    return path if os.path.isabs(path) else os.path.normpath(os.path.join(base_dir, path))


def load_run_config(path: str) -> RunConfig:
    """Parse and validate a report config file.

    Everything wrong with the document itself raises
    :class:`ConfigError`; references that can only be checked against
    data (unknown coder ids) are verified later at run time.
    """
    try:
        with open(path, "r", encoding="utf-8") as stream:
            raw = json.load(stream)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")

    base_dir = os.path.dirname(os.path.abspath(path))

    terminology = raw.get("terminology")
    if not isinstance(terminology, dict) or "kind" not in terminology:
        raise ConfigError("config needs a 'terminology' object with a 'kind'")
    kind = terminology["kind"]
    try:
        if kind == "edge_list":
            ingest = IngestConfig.edge_list(
                edge_path=_resolve(base_dir, terminology["edge_path"]),
                lenient=bool(terminology.get("lenient", False)),
            )
        elif kind == "rf2_snapshot":
            ingest = IngestConfig.rf2(
                concept_path=_resolve(base_dir, terminology["concept_path"]),
                relationship_path=_resolve(base_dir, terminology["relationship_path"]),
                relationship_selector=terminology.get("selector", "inferred"),
                include_inactive=bool(terminology.get("include_inactive", False)),
                lenient=bool(terminology.get("lenient", False)),
            )
        else:
            raise ConfigError(f"unknown terminology kind {kind!r}")
        ingest.validate()
    except KeyError as exc:
        raise ConfigError(f"terminology section is missing {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    if "annotations_path" not in raw:
        raise ConfigError("config needs 'annotations_path'")
    if "output_dir" not in raw:
        raise ConfigError("config needs 'output_dir'")

    comparisons_raw = raw.get("comparisons")
    if not isinstance(comparisons_raw, list) or not comparisons_raw:
        raise ConfigError("config needs a non-empty 'comparisons' list")
    comparisons = [_coder_pair(p, "comparisons") for p in comparisons_raw]

    try:
        policy = DenominatorPolicy.parse(raw.get("policy", DenominatorPolicy.TERM_COUNT.value))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        thresholds = normalize_thresholds(raw.get("thresholds", [1, 2, 3]))
    except InvalidThresholds as exc:
        raise ConfigError(str(exc)) from exc

    focus_root = raw.get("focus_root", CLINICAL_FINDING_ROOT)
    if not isinstance(focus_root, int) or focus_root <= 0:
        raise ConfigError(f"focus_root must be a positive integer, got {focus_root!r}")

    groups: dict[str, list[CoderPair]] = {}
    for name, pairs in (raw.get("micro_average_groups") or {}).items():
        if not isinstance(pairs, list) or not pairs:
            raise ConfigError(f"micro_average_groups[{name!r}] must be a non-empty list")
        groups[name] = [_coder_pair(p, f"micro_average_groups[{name!r}]") for p in pairs]

    matrices: list[tuple[str, str, str]] = []
    for entry in raw.get("similarity_matrices") or []:
        if not isinstance(entry, dict) or not {"left", "right", "reference"} <= entry.keys():
            raise ConfigError(
                "similarity_matrices entries need 'left', 'right' and 'reference'"
            )
        matrices.append((entry["left"], entry["right"], entry["reference"]))

    crosstabs = []
    for entry in raw.get("rating_crosstabs") or []:
        if not isinstance(entry, dict) or not {"left", "right"} <= entry.keys():
            raise ConfigError("rating_crosstabs entries need 'left' and 'right'")
        crosstabs.append((entry["left"], entry["right"]))

    acceptability = raw.get("acceptability_coders") or []
    if not isinstance(acceptability, list) or not all(
        isinstance(c, str) for c in acceptability
    ):
        raise ConfigError("acceptability_coders must be a list of coder ids")

    dvr = None
    dvr_raw = raw.get("distance_vs_rating")
    if dvr_raw is not None:
        if (
            not isinstance(dvr_raw, dict)
            or "reference" not in dvr_raw
            or not isinstance(dvr_raw.get("coders"), list)
            or not dvr_raw["coders"]
        ):
            raise ConfigError(
                "distance_vs_rating needs a 'reference' and a non-empty 'coders' list"
            )
        dvr = (dvr_raw["reference"], list(dvr_raw["coders"]))

    return RunConfig(
        ingest=ingest,
        annotations_path=_resolve(base_dir, raw["annotations_path"]),
        comparisons=comparisons,
        output_dir=_resolve(base_dir, raw["output_dir"]),
        focus_root=focus_root,
        focus_inclusive=bool(raw.get("focus_inclusive", True)),
        policy=policy,
        thresholds=thresholds,
        micro_average_groups=groups,
        similarity_matrices=matrices,
        rating_crosstabs=crosstabs,
        acceptability_coders=acceptability,
        distance_vs_rating=dvr,
        markdown=bool(raw.get("markdown", True)),
        figures=bool(raw.get("figures", False)),
    )

"""Run configuration shared by the command-line subcommands."""

import json
import os
from dataclasses import dataclass, field, replace
from typing import Optional

from .evaluation.grid import NATIVE_SPECS, SMOTE_ORDERS, GridOptions
from .exceptions import ConfigError
from .features.indices import NtrConfig, ReferencePattern
from .learn.ranking import RANKERS
from .learn.spec import EXTERNAL, ClassifierSpec, canonical_kind

PRESETS = {s.name: s for s in NATIVE_SPECS}
PRESETS["cart"] = ClassifierSpec("cart")


def resolve_spec(entry):
    """A ClassifierSpec from a preset name, alias or ``{kind, params, name, seed}`` dict."""
    if isinstance(entry, ClassifierSpec):
        return entry
    if isinstance(entry, str):
        key = entry.strip().lower()
        if key in PRESETS:
            return PRESETS[key]
        kind = canonical_kind(key)
        if kind in PRESETS:
            return PRESETS[kind]
        raise ConfigError(f"unknown classifier {entry!r}; presets are {sorted(PRESETS)}")
    if isinstance(entry, dict):
        if "kind" not in entry:
            raise ConfigError(f"classifier entry lacks 'kind': {entry}")
        return ClassifierSpec.from_dict(entry)
    raise ConfigError(f"cannot interpret classifier entry {entry!r}")


def resolve_specs(entries):
    if entries in ("all", ["all"]):
        return list(NATIVE_SPECS)
    return [resolve_spec(e) for e in entries]


def resolve_rankers(entries):
    if entries in ("all", ["all"]):
        return list(RANKERS)
    out = [canonical_kind(r) for r in entries]
    for r in out:
        if r not in RANKERS:
            raise ConfigError(f"unknown ranker {r!r}; expected one of {RANKERS}")
    return out


@dataclass(frozen=True)
class SynthesisParams:
    n_cg: int = 45
    n_dm: int = 122
    separation: float = 3.0

    def __post_init__(self):
        if int(self.n_cg) < 1 or int(self.n_dm) < 1:
            raise ConfigError("synthesis counts must be >= 1")
        if float(self.separation) < 0:
            raise ConfigError("synthesis separation must be >= 0")


@dataclass(frozen=True)
class RunConfig:
    """Input source, feature settings, grid settings and output location.

    Exactly one of ``manifest`` and ``synthesis`` names the data source.
    """

    manifest: Optional[str] = None
    synthesis: Optional[SynthesisParams] = None
    ntr: NtrConfig = field(default_factory=NtrConfig)
    reference: ReferencePattern = field(default_factory=ReferencePattern)
    rankers: tuple = RANKERS
    classifiers: tuple = NATIVE_SPECS
    k_max: int = 28
    seed: int = 0
    output_dir: str = "out"
    global_prune: bool = False
    smote_order: str = "rank-first"
    use_validation: bool = False

    def __post_init__(self):
        if self.smote_order not in SMOTE_ORDERS:
            raise ConfigError(f"smote_order must be one of {SMOTE_ORDERS}")
        if int(self.k_max) < 1:
            raise ConfigError("k_max must be >= 1")

    def check_source(self):
        if (self.manifest is None) == (self.synthesis is None):
            raise ConfigError("exactly one of 'manifest' and 'synthesis' must be given")
        return self

    def check_output(self):
        path = os.path.abspath(self.output_dir)
        probe = path
        while not os.path.exists(probe):
            probe = os.path.dirname(probe)
        if not os.path.isdir(probe) or not os.access(probe, os.W_OK):
            raise ConfigError(f"output directory {self.output_dir!r} is not writable")
        return self

    def grid_options(self, n_jobs=None):
        return GridOptions(global_prune=self.global_prune, smote_order=self.smote_order,
                           use_validation=self.use_validation, n_jobs=n_jobs)

    def update(self, **changes):
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    @classmethod
    def from_dict(cls, d):
        known = {"manifest", "synthesis", "ntr", "reference", "rankers", "classifiers", "k_max",
                 "seed", "output_dir", "global_prune", "smote_order", "use_validation"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        kw = dict(d)
        try:
            if kw.get("synthesis") is not None:
                kw["synthesis"] = SynthesisParams(**kw["synthesis"])
            if "ntr" in kw:
                kw["ntr"] = NtrConfig.from_dict(kw["ntr"])
            if "reference" in kw:
                kw["reference"] = ReferencePattern(**kw["reference"])
        except (TypeError, KeyError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        if "rankers" in kw:
            kw["rankers"] = tuple(resolve_rankers(kw["rankers"]))
        if "classifiers" in kw:
            kw["classifiers"] = tuple(resolve_specs(kw["classifiers"]))
        return cls(**kw)

    @classmethod
    def from_file(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                d = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(d, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_dict(d)

    def to_dict(self):
        return {
            "manifest": self.manifest,
            "synthesis": None if self.synthesis is None else {
                "n_cg": self.synthesis.n_cg, "n_dm": self.synthesis.n_dm,
                "separation": self.synthesis.separation},
            "ntr": self.ntr.to_dict(), "reference": self.reference.as_dict(),
            "rankers": list(self.rankers), "classifiers": [s.to_dict() for s in self.classifiers],
            "k_max": self.k_max, "seed": self.seed, "output_dir": self.output_dir,
            "global_prune": self.global_prune, "smote_order": self.smote_order,
            "use_validation": self.use_validation,
        }


def external_spec(text):
    """Parse ``NAME=PATH`` into an external-score spec."""
    name, sep, path = text.partition("=")
    if not sep or not name or not path:
        raise ConfigError(f"external scores must be NAME=PATH, got {text!r}")
    return ClassifierSpec(EXTERNAL, {"path": path}, name=name)

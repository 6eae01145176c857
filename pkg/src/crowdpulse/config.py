"""Pipeline configuration: dataclass defaults, TOML files, CLI overrides.

Precedence is defaults < config file < explicit flags. The TOML file
mirrors the dataclass layout with one table per stage, e.g.::

    features = "f4"
    classifier = "svm"
    seed = 7

    [svm]
    C = 0.5

Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import DataError

FEATURE_BUNDLES = ("f1", "f2", "f3", "f4", "f5", "f6")
CLASSIFIERS = ("nb", "svm", "elman", "rakel")


@dataclass
class FeatureConfig:
    min_count: int = 1
    lexicon_path: str | None = None
    synonyms_path: str | None = None


@dataclass
class PvSection:
    d: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 20
    lr_start: float = 0.025
    lr_end: float = 0.0001
    workers: int = 1
    infer_steps: int = 200


@dataclass
class LdaSection:
    topics: int = 20
    alpha: float | None = None            # defaults to 50/topics
    beta: float = 0.01
    iterations: int = 500
    burn_in: int = 200
    sample_every: int = 10
    infer_iterations: int = 50


@dataclass
class NbSection:
    smoothing: float = 1.0


@dataclass
class SvmSection:
    C: float = 1.0
    tol: float = 1e-3
    max_passes: int = 10


@dataclass
class ElmanSection:
    e: int = 50
    h: int = 32
    epochs: int = 30
    lr: float = 0.05
    bptt_limit: int = 16


@dataclass
class RakelSection:
    k: int = 3
    m: int | None = None                  # defaults to min(2|L|, C(|L|,k))
    threshold: float = 0.5
    base: str = "svm"


@dataclass
class PipelineConfig:
    features: str = "f4"
    classifier: str = "svm"
    seed: int = 1
    feature: FeatureConfig = field(default_factory=FeatureConfig)
    pv: PvSection = field(default_factory=PvSection)
    lda: LdaSection = field(default_factory=LdaSection)
    nb: NbSection = field(default_factory=NbSection)
    svm: SvmSection = field(default_factory=SvmSection)
    elman: ElmanSection = field(default_factory=ElmanSection)
    rakel: RakelSection = field(default_factory=RakelSection)

    def __post_init__(self):
        if self.features not in FEATURE_BUNDLES:
            raise DataError(
                f"unknown feature bundle {self.features!r}; "
                f"choose from {', '.join(FEATURE_BUNDLES)}"
            )
        if self.classifier not in CLASSIFIERS:
            raise DataError(
                f"unknown classifier {self.classifier!r}; "
                f"choose from {', '.join(CLASSIFIERS)}"
            )


_SECTION_FIELDS = {
    "feature": FeatureConfig,
    "pv": PvSection,
    "lda": LdaSection,
    "nb": NbSection,
    "svm": SvmSection,
    "elman": ElmanSection,
    "rakel": RakelSection,
}
_TOP_SCALARS = ("features", "classifier", "seed")


def _apply_section(section: Any, values: dict, where: str) -> None:
    names = {f.name for f in dataclasses.fields(section)}
    for key, value in values.items():
        if key not in names:
            raise DataError(f"unknown config key {key!r} in [{where}]")
        setattr(section, key, value)


def load_config(path: str | Path | None = None) -> PipelineConfig:
    """Build a config from defaults, optionally layered with a TOML file."""
    cfg = PipelineConfig()
    if path is None:
        return cfg
    try:
        payload = tomllib.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise DataError(f"config {path} is not valid TOML: {exc}") from exc
    for key, value in payload.items():
        if key in _TOP_SCALARS:
            setattr(cfg, key, value)
        elif key in _SECTION_FIELDS:
            if not isinstance(value, dict):
                raise DataError(f"config section [{key}] must be a table")
            _apply_section(getattr(cfg, key), value, key)
        else:
            raise DataError(f"unknown config key {key!r}")
    cfg.__post_init__()
    return cfg


def apply_overrides(cfg: PipelineConfig, **overrides: Any) -> PipelineConfig:
    """Set explicit values on top of a loaded config; None means unset.

    Keys are either top-level names or dotted section paths such as
    ``svm.C``.
    """
    for key, value in overrides.items():
        if value is None:
            continue
        if "." in key:
            section_name, leaf = key.split(".", 1)
            if section_name not in _SECTION_FIELDS:
                raise DataError(f"unknown config section {section_name!r}")
            _apply_section(getattr(cfg, section_name), {leaf: value}, section_name)
        elif key in _TOP_SCALARS:
            setattr(cfg, key, value)
        else:
            raise DataError(f"unknown config key {key!r}")
    cfg.__post_init__()
    return cfg

"""
Run configuration: every parameter section of a run plus seeds and the
output directory.

A run config is a JSON object (or key=value file) with one object per
section, e.g. ``{"field": {"length": 9.0, "width": 6.0}, "scenario":
{"name": "Match"}}``. ``--set section.key=value`` overrides are applied on
top before validation.
"""

from dataclasses import dataclass, field as dc_field
import logging
from pathlib import Path

from django.conf import settings

from behaviors.params import BehaviorParams
from core.config import build_section, parse_scalar, read_config_file, section_to_dict, set_dotted
from core.exceptions import ConfigurationError
from field.spec import FieldSpec
from kick_timing.estimator import KickTimingParams
from localization.likelihood import LocalizationParams
from perception.noise import NoiseModel
from perception.obstacles import ObstacleParams
from simulation.scenarios import ScenarioConfig
from simulation.state import SimParams

logger = logging.getLogger(__name__)

MAX_SEEDS = 100000


@dataclass(frozen=True)
class AgentParams:
    """Agent loop timing."""
    perception_period: float = 0.1
    challenge_perception_period: float = 0.02

    def clean(self):
        for name in ('perception_period', 'challenge_perception_period'):
            if not getattr(self, name) > 0:
                raise ConfigurationError(name, 'must be > 0')

    @classmethod
    def from_dict(cls, data, prefix='agent'):
        return build_section(cls, data, prefix=prefix)


SECTIONS = {
    'field': FieldSpec,
    'sim': SimParams,
    'noise': NoiseModel,
    'obstacles': ObstacleParams,
    'behavior': BehaviorParams,
    'localization': LocalizationParams,
    'kick_timing': KickTimingParams,
    'agent': AgentParams,
    'scenario': ScenarioConfig,
}


@dataclass(frozen=True)
class RunConfig:
    field: FieldSpec = dc_field(default_factory=FieldSpec)
    sim: SimParams = dc_field(default_factory=SimParams)
    noise: NoiseModel = dc_field(default_factory=NoiseModel)
    obstacles: ObstacleParams = dc_field(default_factory=ObstacleParams)
    behavior: BehaviorParams = dc_field(default_factory=BehaviorParams)
    localization: LocalizationParams = dc_field(default_factory=LocalizationParams)
    kick_timing: KickTimingParams = dc_field(default_factory=KickTimingParams)
    agent: AgentParams = dc_field(default_factory=AgentParams)
    scenario: ScenarioConfig = dc_field(default_factory=ScenarioConfig)
    seeds: tuple = (0,)
    output_dir: str = ''

    @property
    def output_path(self):
        return Path(self.output_dir or settings.SIMULATION_OUTPUT_DIR)

    def to_dict(self):
        """JSON-ready nested dict; ``run_config_from_dict`` reads it back."""
        data = {name: section_to_dict(getattr(self, name)) for name in SECTIONS}
        data['seeds'] = list(self.seeds)
        data['output_dir'] = str(self.output_dir)
        return data


def parse_seeds(text):
    """
    Seed list from ``a..b`` (inclusive), ``a,b,c`` or a single integer.

    Raises:
        ConfigurationError: naming ``seeds``
    """
    if isinstance(text, int):
        text = str(text)
    if isinstance(text, (list, tuple)):
        seeds = [int(s) for s in text]
    else:
        text = str(text).strip()
        try:
            if '..' in text:
                low, high = (int(part) for part in text.split('..', 1))
                if high < low:
                    raise ConfigurationError('seeds', f"empty range {text!r}")
                seeds = list(range(low, high + 1))
            else:
                seeds = [int(part) for part in text.split(',') if part.strip()]
        except ValueError:
            raise ConfigurationError('seeds', f"expected a..b or a comma list of integers, got {text!r}")
    if not seeds:
        raise ConfigurationError('seeds', 'at least one seed is required')
    if len(seeds) > MAX_SEEDS:
        raise ConfigurationError('seeds', f"at most {MAX_SEEDS} seeds per batch")
    if any(s < 0 or s >= 2 ** 64 for s in seeds):
        raise ConfigurationError('seeds', 'seeds must be 64-bit unsigned integers')
    return tuple(seeds)


def apply_overrides(data, overrides):
    """Apply ``section.key=value`` strings onto nested config ``data``."""
    for item in overrides or ():
        if '=' not in item:
            raise ConfigurationError(item, 'override must look like section.key=value')
        key, value = item.split('=', 1)
        key = key.strip()
        if '.' not in key and key not in ('seeds', 'output_dir'):
            raise ConfigurationError(key, 'override key must name a section, e.g. field.length')
        set_dotted(data, key, parse_scalar(value))
    return data


def run_config_from_dict(data, require_field=False):
    """
    Validate every section of ``data`` into a RunConfig.

    Args:
        data: nested mapping, as read from a config file
        require_field: demand ``field.length`` and ``field.width``
            (config files must state the field they run on)
    """
    data = dict(data or {})
    unknown = sorted(set(data) - set(SECTIONS) - {'seeds', 'output_dir'})
    if unknown:
        raise ConfigurationError(unknown[0], 'unknown configuration section')
    sections = {}
    for name, cls in SECTIONS.items():
        raw = data.get(name) or {}
        if not isinstance(raw, dict):
            raise ConfigurationError(name, 'section must be an object')
        if cls is FieldSpec:
            required = ('length', 'width') if require_field else ()
            sections[name] = cls.from_dict(raw, prefix=name, required=required)
        else:
            sections[name] = cls.from_dict(raw, prefix=name)
    seeds = parse_seeds(data['seeds']) if 'seeds' in data else (0,)
    return RunConfig(seeds=seeds, output_dir=str(data.get('output_dir') or ''), **sections)


def load_run_config(path=None, overrides=(), seeds=None, output_dir=None):
    """
    Read, override and validate a run config file.

    Without ``path`` the defaults apply and the field is not required.
    """
    data = read_config_file(path) if path else {}
    apply_overrides(data, overrides)
    if seeds is not None:
        data['seeds'] = seeds
    if output_dir:
        data['output_dir'] = str(output_dir)
    config = run_config_from_dict(data, require_field=path is not None)
    logger.debug(f"Loaded run config {path or '(defaults)'}: scenario {config.scenario.name}, "
                 f"{len(config.seeds)} seed(s)")
    return config

from abc import ABC
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import yaml
from loguru import logger

from . import defaults
from .errors import ConfigError
from .util import env_int


@dataclass
class AbstractSetting(ABC):
    id: str
    name: str
    default_value: Any
    value: Any
    apply_callback: Callable

    def validate(self, value: Any) -> Any:
        return value

    def set(self, value: Any, source: str = "config"):
        self.value = self.validate(value)
        logger.trace(f"Setting {self.id} = {self.value!r} from {source}")

    def apply(self):
        """Apply the setting by calling its callback."""
        logger.trace(f"Applying setting {self.id}: {self.value}")
        self.apply_callback(self.value)

    def to_dict(self):
        return {"id": self.id, "value": self.value}


@dataclass
class IntSetting(AbstractSetting):
    id: str
    name: str
    min_value: int
    max_value: int
    default_value: int
    value: int
    apply_callback: Callable[[int], None]

    def validate(self, value: Any) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{self.id} must be an integer, got {value!r}")
        if not self.min_value <= value <= self.max_value:
            raise ConfigError(
                f"{self.id} = {value} outside [{self.min_value}, {self.max_value}]",
                {"setting": self.id, "value": value},
            )
        return value


@dataclass
class BoolSetting(AbstractSetting):
    id: str
    name: str
    default_value: bool
    value: bool
    apply_callback: Callable[[bool], None]

    def validate(self, value: Any) -> bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{self.id} must be true or false, got {value!r}")
        return value


@dataclass
class StringOptionSetting(AbstractSetting):
    id: str
    name: str
    options: list[str]
    default_value: str
    value: str
    apply_callback: Callable[[str], None]

    def validate(self, value: Any) -> str:
        if value not in self.options:
            raise ConfigError(f"{self.id} must be one of {self.options}, got {value!r}", {"setting": self.id})
        return value


@dataclass
class GroupSetting(AbstractSetting):
    id: str
    name: str
    default_value: None = None
    value: None = None
    apply_callback: Callable = field(default=lambda _: None)
    children: list[AbstractSetting] = field(default_factory=list)

    def apply(self):
        for child in self.children:
            child.apply()

    def to_dict(self):
        return {
            "id": self.id,
            "name": self.name,
            "children": [child.to_dict() for child in self.children],
        }


@dataclass
class SolverOptions:
    search_radius: int = defaults.SEARCH_RADIUS
    max_candidates: int = defaults.SEARCH_MAX_CANDIDATES
    pic0_samples: int = defaults.PIC0_SAMPLES
    sample_seed: int = defaults.SAMPLE_SEED
    output_format: str = defaults.OUTPUT_FORMAT
    canonical: bool = True
    log_level: str = defaults.LOG_LEVEL


def build_settings(options: SolverOptions) -> list[GroupSetting]:
    def setter(attr):
        return lambda value: setattr(options, attr, value)

    return [
        GroupSetting(
            id="solver",
            name="Solver",
            children=[
                IntSetting(
                    id="search_radius",
                    name="Rigidity search radius",
                    min_value=0,
                    max_value=1000,
                    default_value=defaults.SEARCH_RADIUS,
                    value=options.search_radius,
                    apply_callback=setter("search_radius"),
                ),
                IntSetting(
                    id="max_candidates",
                    name="Rigidity candidate cap",
                    min_value=1,
                    max_value=10**9,
                    default_value=defaults.SEARCH_MAX_CANDIDATES,
                    value=options.max_candidates,
                    apply_callback=setter("max_candidates"),
                ),
                IntSetting(
                    id="pic0_samples",
                    name="Random Pic0 samples",
                    min_value=0,
                    max_value=100000,
                    default_value=defaults.PIC0_SAMPLES,
                    value=options.pic0_samples,
                    apply_callback=setter("pic0_samples"),
                ),
                IntSetting(
                    id="sample_seed",
                    name="Sample seed",
                    min_value=0,
                    max_value=2**31 - 1,
                    default_value=defaults.SAMPLE_SEED,
                    value=options.sample_seed,
                    apply_callback=setter("sample_seed"),
                ),
            ],
        ),
        GroupSetting(
            id="output",
            name="Output",
            children=[
                StringOptionSetting(
                    id="format",
                    name="Report format",
                    options=defaults.OUTPUT_FORMATS,
                    default_value=defaults.OUTPUT_FORMAT,
                    value=options.output_format,
                    apply_callback=setter("output_format"),
                ),
                BoolSetting(
                    id="canonical",
                    name="Sorted-key JSON",
                    default_value=True,
                    value=options.canonical,
                    apply_callback=setter("canonical"),
                ),
            ],
        ),
        GroupSetting(
            id="logging",
            name="Logging",
            children=[
                StringOptionSetting(
                    id="level",
                    name="Log level",
                    options=defaults.LOG_LEVELS,
                    default_value=defaults.LOG_LEVEL,
                    value=options.log_level,
                    apply_callback=setter("log_level"),
                ),
            ],
        ),
    ]


def flatten_settings(settings: list[AbstractSetting]) -> list[AbstractSetting]:
    flat = []
    for s in settings:
        if isinstance(s, GroupSetting):
            flat.extend(flatten_settings(s.children))
        else:
            flat.append(s)
    return flat


def read_config(path: str) -> dict[str, Any]:
    try:
        with open(path, "r", encoding="UTF-8") as f:
            data = yaml.safe_load(f)
    except FileNotFoundError:
        logger.trace(f"No config file at {path}, using defaults")
        return {}
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse {path}: {e}", {"path": path}) from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a mapping at top level", {"path": path})
    return data


def load_settings(settings: list[GroupSetting], config: dict[str, Any]):
    """Copy values from the parsed config file into the settings tree."""
    known = {group.id: group for group in settings}
    for section, values in config.items():
        group = known.get(section)
        if group is None:
            logger.warning(f"Ignoring unknown config section {section!r}")
            continue
        if not isinstance(values, dict):
            raise ConfigError(f"config section {section!r} must be a mapping")
        children = {child.id: child for child in group.children}
        for key, value in values.items():
            if key not in children:
                logger.warning(f"Ignoring unknown config key {section}.{key}")
                continue
            children[key].set(value)


def load_options(
    config_path: str = defaults.CONFIG_PATH,
    search_radius: int | None = None,
    output_format: str | None = None,
) -> SolverOptions:
    """Flag > environment > config file > built-in default."""
    options = SolverOptions()
    settings = build_settings(options)
    load_settings(settings, read_config(config_path))
    flat = {s.id: s for s in flatten_settings(settings)}
    radius = env_int(defaults.SEARCH_RADIUS_ENV)
    if radius is not None:
        flat["search_radius"].set(radius, defaults.SEARCH_RADIUS_ENV)
    if search_radius is not None:
        flat["search_radius"].set(search_radius, "--search-radius")
    if output_format is not None:
        flat["format"].set(output_format, "--format")
    for setting in settings:
        setting.apply()
    return options

"""
Run configuration: one JSON document describing a whole experiment.

Every field has a default, so ``{}`` is a valid document. The document is
validated by ``harness.serializers.RunConfigSerializer``; the dataclasses here
are what the rest of the code consumes.
"""
import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from fusion.integration import FusionConfig
from mpr.branch import MprConfig
from rfl.branch import RflConfig
from supervision.losses import LossConfig
from synthgen.sequences import GenConfig
from utils.exceptions import ConfigurationError, DataError, format_validation_errors
from utils.seeding import DATA_STREAM, MAX_SEED, derive_seed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PathsConfig:
    data_dir: str = ''
    out_dir: str = ''


@dataclass(frozen=True)
class OptimConfig:
    lr: float = 1e-3
    betas: tuple = (0.9, 0.999)
    eps: float = 1e-8
    epochs: int = 30
    batch_size: int = 4

    def __post_init__(self):
        object.__setattr__(self, 'betas', tuple(float(b) for b in self.betas))

    def validate(self):
        if self.lr <= 0 or self.eps <= 0:
            raise ConfigurationError(f'lr and eps must be positive, got {self.lr}, {self.eps}')
        if len(self.betas) != 2 or not all(0.0 <= b < 1.0 for b in self.betas):
            raise ConfigurationError(f'betas must be two numbers in [0, 1), got {list(self.betas)}')
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigurationError(f'epochs and batch_size must be positive, got {self.epochs}, {self.batch_size}')
        return self


@dataclass(frozen=True)
class DataConfig:
    n_train: int = 200
    n_val: int = 20
    n_test: int = 50


@dataclass(frozen=True)
class RunConfig:
    paths: PathsConfig = field(default_factory=PathsConfig)
    gen: GenConfig = field(default_factory=GenConfig)
    mpr: MprConfig = field(default_factory=MprConfig)
    rfl: RflConfig = field(default_factory=RflConfig)
    fusion: FusionConfig = field(default_factory=FusionConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    optim: OptimConfig = field(default_factory=OptimConfig)
    data: DataConfig = field(default_factory=DataConfig)
    seed: int = 0

    def validate(self):
        if not 0 <= self.seed <= MAX_SEED:
            raise ConfigurationError(f'seed must lie in [0, 2**64 - 1], got {self.seed}')
        if self.gen.seed != 0:
            raise ConfigurationError(
                f'gen.seed is derived from the root seed and cannot be set (got {self.gen.seed}); set seed instead'
            )
        self.gen.validate()
        self.mpr.validate(self.gen.seq_len)
        self.rfl.validate()
        self.fusion.validate()
        self.loss.validate()
        self.optim.validate()
        return self

    def generation_config(self):
        """GenConfig whose seed is the run's ``data`` sub-stream.

        ``gen.seed`` itself is never read; ``validate`` rejects a non-zero value.
        """
        return replace(self.gen, seed=derive_seed(self.seed, DATA_STREAM))

    def to_dict(self):
        return _jsonable(asdict(self))

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data, source='<config>'):
        from .serializers import RunConfigSerializer

        serializer = RunConfigSerializer(data=data)
        if not serializer.is_valid():
            raise ConfigurationError(f'{source}: {format_validation_errors(serializer.errors)}')
        return serializer.save().validate()


def _jsonable(value):
    if isinstance(value, dict):
        return {key: _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return value


def config_hash(cfg):
    """sha256 of the canonical JSON form; paths are excluded so moving a run keeps its hash."""
    payload = cfg.to_dict()
    payload.pop('paths', None)
    canonical = json.dumps(payload, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def load_run_config(path=None):
    """Read and validate a RunConfig JSON file; no path gives the defaults."""
    if path is None:
        return RunConfig().validate()
    path = Path(path)
    if not path.exists():
        raise DataError(f'{path}: config file not found')
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f'{path}: not valid JSON ({exc.msg} at line {exc.lineno})') from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f'{path}: expected a JSON object, got {type(data).__name__}')
    cfg = RunConfig.from_dict(data, source=str(path))
    logger.debug(f'Loaded run config {path} (hash {config_hash(cfg)[:12]})')
    return cfg


def save_run_config(cfg, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(cfg.to_json() + '\n', encoding='utf-8')
    return path

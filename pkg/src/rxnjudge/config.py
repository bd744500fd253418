"""Flat ``key=value`` run configuration."""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from typing import Optional

from .errors import ConfigError

SEED_ENV = "RXPJ_SEED"
SEGMENTERS = ("greedy", "dp")


@dataclass(frozen=True)
class Config:
    embedding_dim: int = 64
    hidden_dim: int = 128
    max_len: int = 100
    threshold: float = 0.5
    use_rsd: bool = True
    use_dlg: bool = True
    seed: int = 0
    epochs: int = 30
    batch_size: int = 128
    learning_rate: float = 1e-3
    clip_norm: float = 5.0
    lexicon_max_n: int = 8
    lexicon_threshold: float = 0.0
    lexicon_min_count: int = 3
    vocab_min_count: int = 2
    segmenter: str = "greedy"
    train_path: Optional[str] = None
    dev_path: Optional[str] = None
    test_path: Optional[str] = None
    lexicon_path: Optional[str] = None
    checkpoint_path: Optional[str] = None
    report_dir: Optional[str] = None
    incremental_pool_path: Optional[str] = None

    def __post_init__(self):
        for name in ("embedding_dim", "hidden_dim", "max_len", "epochs", "batch_size",
                     "lexicon_max_n"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.lexicon_max_n < 2:
            raise ConfigError("lexicon_max_n must be at least 2")
        if self.learning_rate < 0:
            raise ConfigError("learning_rate must be non-negative")
        if self.segmenter not in SEGMENTERS:
            raise ConfigError(f"segmenter must be one of {SEGMENTERS}, got {self.segmenter!r}")

    def with_overrides(self, **kw) -> "Config":
        return replace(self, **kw)

    def to_kv(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{f.name}={v}")
        return "\n".join(lines) + "\n"

    def echo(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_TYPES = {f.name: f.type for f in fields(Config)}


def _coerce(key: str, raw: str):
    kind = _TYPES[key]
    raw = raw.strip()
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            low = raw.lower()
            if low in ("true", "1", "yes"):
                return True
            if low in ("false", "0", "no"):
                return False
            raise ValueError(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot read {raw!r} as {kind}") from None
    if kind == "str":
        return raw
    return raw or None


def parse_config(text: str, base: Optional[Config] = None) -> Config:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        values[key] = _coerce(key, raw)
    return replace(base or Config(), **values)


def load_config(path=None, env=None) -> Config:
    """Read a config file (or defaults); ``RXPJ_SEED`` overrides ``seed``."""
    cfg = Config()
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                cfg = parse_config(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    env = os.environ if env is None else env
    if env.get(SEED_ENV):
        cfg = replace(cfg, seed=_coerce("seed", env[SEED_ENV]))
    return cfg

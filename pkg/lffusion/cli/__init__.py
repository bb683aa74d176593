from .main import build_parser, dispatch, main, resolve_config
from .schemas import RunConfig, load_config

__all__ = ["build_parser", "dispatch", "main", "resolve_config", "RunConfig", "load_config"]

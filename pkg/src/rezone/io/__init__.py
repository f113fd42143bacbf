from .config import RunConfig, parse_config
from .runner import Artifact, RunResult, compute, run

__all__ = ["RunConfig", "parse_config", "Artifact", "RunResult", "compute", "run"]

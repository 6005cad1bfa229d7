import logging
import os
from dataclasses import dataclass, replace
from typing import Mapping

from errors import ArgumentError

logger = logging.getLogger(__name__)

THREADS_ENV = "EPOWER_THREADS"
MAX_DEFAULT_WORKERS = 8


@dataclass(frozen=True)
class Settings:
    norm_tol: float = 1e-10
    herm_tol: float = 1e-10
    unitary_tol: float = 1e-8
    psd_tol: float = 1e-9
    ame_tol: float = 1e-8
    class_residual_tol: float = 1e-9
    grad_tol: float = 1e-10

    mc_samples: int = 20000
    seed: int = 0
    grid: int = 64
    bins: int = 40
    workers: int = 1

    def with_workers(self, workers: int | None) -> "Settings":
        if workers is None:
            return self
        if workers < 1:
            raise ArgumentError(f"worker count must be positive, got {workers}")
        return replace(self, workers=workers)


def default_workers() -> int:
    return max(1, min(os.cpu_count() or 1, MAX_DEFAULT_WORKERS))


def load_settings(environ: Mapping[str, str] | None = None) -> Settings:
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return Settings(workers=default_workers())

    try:
        workers = int(raw)
    except ValueError:
        raise ArgumentError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    if workers < 1:
        raise ArgumentError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")

    logger.debug("worker count taken from %s: %d", THREADS_ENV, workers)
    return Settings(workers=workers)


# Library default; the CLI builds its own from the environment via load_settings()
SETTINGS = Settings()

from __future__ import annotations

import logging
import os
from contextvars import ContextVar
from types import TracebackType
from typing import Callable, Iterable, Type, TypeVar

import numpy as np
from joblib import Parallel

from rfiforge.exceptions import ConfigurationError
from rfiforge.models.scenario import SEED_UPPER_BOUND
from rfiforge.studies import StudiesMixin
from rfiforge.utils import MAP_BACKEND, derive_rng, derive_seed, map_ordered

T = TypeVar("T")
R = TypeVar("R")

SEED_ENV_VAR = "RFI_FORGE_SEED"

logger = logging.getLogger(__name__)


class Simulator(StudiesMixin):
    """
    The main class for running Monte-Carlo studies

    Parameters
    ----------
    base_seed : int, optional
        The seed every trial stream is derived from, by default 0
    workers : int, optional
        Number of worker threads trials are spread over, by default 1. Results do not
        depend on this value.

    Attributes
    ----------
    base_seed : int
        The base seed
    workers : int
        The number of worker threads
    gamma : GammaStudy
        Interface for the signature estimation accuracy study.
    smearing : SmearingStudy
        Interface for the subspace smearing study.
    comparison : MitigationComparison
        Interface for the projection versus subtraction comparison.
    """

    def __init__(self, base_seed: int = 0, *, workers: int = 1):
        if not 0 <= base_seed < SEED_UPPER_BOUND:
            raise ConfigurationError(f"base seed must lie in [0, 2**64), got {base_seed}", field="seed")
        if workers < 1:
            raise ConfigurationError(f"workers must be at least 1, got {workers}", field="workers")

        self.base_seed = int(base_seed)
        self.workers = int(workers)

        self.__parallel: ContextVar[Parallel | None] = ContextVar("parallel", default=None)

        super().__init__(self)

    def _create_parallel(self) -> Parallel:
        return Parallel(n_jobs=self.workers, backend=MAP_BACKEND)

    def get_parallel(self) -> Parallel | None:
        """
        The worker pool opened by `with`. None when running serially or outside a context.
        """
        return self.__parallel.get()

    def __enter__(self) -> Simulator:
        if self.__parallel.get() is not None:
            raise RuntimeError("Worker pool already exists")
        if self.workers > 1:
            parallel = self._create_parallel()
            parallel.__enter__()
            self.__parallel.set(parallel)
        return self

    def __exit__(
        self,
        exc_type: Type[BaseException] | None = None,
        exc_value: BaseException | None = None,
        traceback: TracebackType | None = None,
    ) -> None:
        parallel = self.__parallel.get()
        if parallel is not None:
            parallel.__exit__(exc_type, exc_value, traceback)
            self.__parallel.set(None)

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        """
        Apply `fn` to every item, in input order. Inside `with` the trials share one worker
        pool; outside it a pool lives for the duration of the call.
        """
        return map_ordered(fn, items, workers=self.workers, parallel=self.get_parallel())

    def trial_seed(self, *keys: int) -> int:
        """
        The seed of the trial identified by `keys`, e.g. `(cell_id, trial_index)`.
        """
        return derive_seed(self.base_seed, *keys)

    def rng(self, *keys: int) -> np.random.Generator:
        return derive_rng(self.base_seed, *keys)

    @classmethod
    def from_env(cls, default_seed: int = 0, **kwargs) -> Simulator:
        """
        Create a Simulator whose base seed is read from the environment

        The following environment variables are used:

        - `RFI_FORGE_SEED`: The base seed. `default_seed` is used when it is not set.
        """
        raw = os.getenv(SEED_ENV_VAR)
        seed = default_seed
        if raw is not None:
            try:
                seed = int(raw, 0)
            except ValueError as e:
                raise ConfigurationError(
                    f"{SEED_ENV_VAR} must be an integer, got {raw!r}", field=SEED_ENV_VAR
                ) from e
            logger.debug("Base seed %d taken from %s", seed, SEED_ENV_VAR)
        return cls(seed, **kwargs)

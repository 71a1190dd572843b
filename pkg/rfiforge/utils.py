from __future__ import annotations

from functools import wraps
from typing import Any, Callable, Iterable, ParamSpec, Sequence, TypeVar

import numpy as np
from joblib import Parallel, delayed
from pydantic import ValidationError

from rfiforge.exceptions import DimensionMismatch, ModelValidationError

T = TypeVar("T")
R = TypeVar("R")
P = ParamSpec("P")

_SEED_MASK = (1 << 64) - 1


class _MissingSentinel:
    def __eq__(self, other) -> bool:
        return False

    def __bool__(self) -> bool:
        return False

    def __repr__(self) -> str:
        return "<MISSING>"


MISSING: Any = _MissingSentinel()


def model_validation(f: Callable[P, T]) -> Callable[P, T]:
    """
    Wrapper for factories that build models from loose arguments.

    Re-raises pydantic's `ValidationError` as a `ModelValidationError` so callers only
    have to deal with the rfiforge exception hierarchy.
    """

    @wraps(f)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> T:
        try:
            return f(*args, **kwargs)
        except ValidationError as e:
            raise ModelValidationError(e.errors()) from e

    return wrapper


def derive_seed(*keys: int) -> int:
    """
    Fold a base seed and any number of integer keys into a single 64-bit seed.

    Parameters
    ----------
    keys : int
        Non-negative integers, typically `(base_seed, cell_id, trial_index)`

    Returns
    -------
    int
        A seed in `[0, 2**64)`, a pure function of `keys`
    """
    entropy = [int(key) & _SEED_MASK for key in keys]
    state = np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)
    return int(state[0])


def derive_rng(*keys: int) -> np.random.Generator:
    """
    Build a counter-based generator (Philox) for the stream identified by `keys`.
    """
    entropy = [int(key) & _SEED_MASK for key in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


MAP_BACKEND = "threading"


def map_ordered(
    fn: Callable[[T], R],
    items: Iterable[T],
    *,
    workers: int = 1,
    parallel: Parallel | None = None,
) -> list[R]:
    """
    Apply `fn` to every item, in parallel when allowed, returning results in input order.

    Parameters
    ----------
    fn : Callable[[T], R]
        A pure function of its argument
    items : Iterable[T]
        The work items
    workers : int, optional
        Number of worker threads used when no `parallel` is given, by default 1 (serial)
    parallel : Parallel | None, optional
        A joblib `Parallel` whose worker pool is already running, by default None

    Returns
    -------
    list[R]
        `[fn(item) for item in items]`, whatever the number of workers
    """
    items = list(items)
    if parallel is None:
        if workers <= 1 or len(items) <= 1:
            return [fn(item) for item in items]
        parallel = Parallel(n_jobs=workers, backend=MAP_BACKEND)
    return list(parallel(delayed(fn)(item) for item in items))


def hermitian_part(matrix: np.ndarray) -> np.ndarray:
    """
    Return `(A + A^H) / 2`.
    """
    return 0.5 * (matrix + matrix.conj().T)


def require_square(matrix: np.ndarray, name: str = "matrix") -> int:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {matrix.shape}")
    return matrix.shape[0]


def require_same_shape(a: np.ndarray, b: np.ndarray, names: Sequence[str] = ("A", "B")) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(
            f"{names[0]} and {names[1]} must have the same shape, got {a.shape} and {b.shape}"
        )


def db_to_power(db: float) -> float:
    return float(10.0 ** (db / 10.0))

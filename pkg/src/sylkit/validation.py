"""Input validation helpers and the minimal estimator parameter API."""

from __future__ import annotations

import inspect

import numpy as np

from .errors import NonFiniteValueError


def check_finite(arr: np.ndarray, name: str = "array") -> np.ndarray:
    """Raise NonFiniteValueError if `arr` contains NaN or infinity."""
    if not np.isfinite(arr).all():
        raise NonFiniteValueError(f"{name} contains NaN or infinite values")
    return arr


def as_float_matrix(x, name: str = "matrix", dtype=np.float64) -> np.ndarray:
    """Coerce to a finite 2-D float array (copying as needed)."""
    arr = np.asarray(x, dtype=dtype)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    return check_finite(arr, name)


def as_float_vector(x, name: str = "vector", dtype=np.float64) -> np.ndarray:
    """Coerce to a finite 1-D float array."""
    arr = np.asarray(x, dtype=dtype)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    return check_finite(arr, name)


def as_frame_sequence(x, frame_rate_hz: float = 50.0, utterance_id: str = ""):
    """Accept a FrameSequence or a raw (n_frames, dim) array."""
    from .types import FrameSequence

    if isinstance(x, FrameSequence):
        return x
    return FrameSequence(np.asarray(x), frame_rate_hz, utterance_id)


class ParamsMixin:
    """sklearn-compatible get_params/set_params from the __init__ signature."""

    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        return [
            p.name
            for p in sig.parameters.values()
            if p.name != "self" and p.kind == p.POSITIONAL_OR_KEYWORD
        ]

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = self._param_names()
        for key, value in params.items():
            if key not in valid:
                raise ValueError(f"invalid parameter {key!r} for {type(self).__name__}")
            setattr(self, key, value)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"

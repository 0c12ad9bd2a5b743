from __future__ import annotations

from typing import Any


class QprError(Exception):
    """Base class for every error raised by qprcert."""


class InvalidOperatorError(QprError, ValueError):
    """An operator, mixture, weight vector or embedding violates its type invariant."""


class SpaceMismatchError(QprError, ValueError):
    """Two representations that must share an ontic space do not."""


class UncatalogedStateError(QprError, KeyError):
    """A tabulated representation was queried outside of its catalog."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class RankDeficientFrameError(QprError, ValueError):
    """A frame does not span the Hermitian operators."""


class OutsideHullError(QprError, ValueError):
    """A translated-linear map was evaluated off its affine domain."""


class ExtensionImpossibleError(QprError, ValueError):
    """Point/value data admit no extension of the requested kind."""

    def __init__(self, message: str, *, witness: dict[str, Any]) -> None:
        super().__init__(message)
        self.witness = witness


__all__ = [
    "ExtensionImpossibleError",
    "InvalidOperatorError",
    "OutsideHullError",
    "QprError",
    "RankDeficientFrameError",
    "SpaceMismatchError",
    "UncatalogedStateError",
]

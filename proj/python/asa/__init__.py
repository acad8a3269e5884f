"""Arabic sentiment classification with noise-regularized BiLSTM models and LIME explanations."""

from ._core import (
    AsaError,
    DataError,
    NumericError,
    UsageError,
    evaluate,
    explain,
    explain_checkpoint,
    fit_surrogate,
    normalize,
    overfit_percent,
    prepare,
    synthesize,
    tokenize,
    train,
)

__all__ = [
    "AsaError",
    "DataError",
    "NumericError",
    "UsageError",
    "evaluate",
    "explain",
    "explain_checkpoint",
    "fit_surrogate",
    "normalize",
    "overfit_percent",
    "prepare",
    "synthesize",
    "tokenize",
    "train",
]

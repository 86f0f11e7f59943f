"""Two-option crowdsourced ranking under the Biased Initial Guess model."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    AnswerPair,
    ChoiceOutcome,
    DomainError,
    ModelParams,
    choice_prob_first,
    choose_best_prob,
    initial_selection_prob,
    sample_choice,
)
from .raicr import VoteLedger, mle_quality  # noqa: E402

__all__ = [
    "AnswerPair",
    "ChoiceOutcome",
    "DomainError",
    "ModelParams",
    "VoteLedger",
    "choice_prob_first",
    "choose_best_prob",
    "initial_selection_prob",
    "mle_quality",
    "sample_choice",
]

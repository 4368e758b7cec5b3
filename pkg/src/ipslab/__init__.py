"""Simulation lab for constant- and log-space verifiers talking to unbounded provers."""
from .errors import ArityError, BudgetError, ConfigError, InputDomainError, IpsLabError, UnsupportedSpecError
from .langspace import BINARY, BITS, UNARY, Alphabet, LanguageSpec, dima2_member, lex_rank, lex_unrank
from .runtime import Decision, Outcome, ResourceBudget, run_protocol
from .protocols import PROTOCOLS, amplify, get_protocol
from .harness import Scenario, TrialStats, exact_usquare_acceptance, run_trials, wilson_interval

__version__ = "0.1.0"

__all__ = [
    "Alphabet", "LanguageSpec", "UNARY", "BINARY", "BITS", "lex_rank", "lex_unrank", "dima2_member",
    "Decision", "Outcome", "ResourceBudget", "run_protocol", "PROTOCOLS", "get_protocol", "amplify",
    "Scenario", "TrialStats", "run_trials", "wilson_interval", "exact_usquare_acceptance",
    "IpsLabError", "ConfigError", "ArityError", "InputDomainError", "BudgetError", "UnsupportedSpecError",
]

"""Closed-form adversary arithmetic for a PIN + behavioral scheme.

An attacker must both guess the PIN (n_t tries over sigma^tau codes)
and fool the classifier (probability pr_forge, the false negative
rate). Once the PIN is known, only the behavioral check remains.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError, ThreatOverflowError


@dataclass
class ThreatParams:
    pr_forge: float  # classifier false negative rate
    n_t: int  # allowed PIN tries before lockout
    sigma: int  # candidate symbols per PIN digit
    tau: int  # PIN digit count

    def validate(self) -> None:
        if not 0.0 <= self.pr_forge <= 1.0:
            raise ConfigError("pr_forge must be in [0, 1]")
        if self.n_t < 0:
            raise ConfigError("n_t must be >= 0")
        if self.sigma < 1 or self.tau < 1:
            raise ConfigError("sigma and tau must be >= 1")
        if self.n_t > self.sigma**self.tau:
            raise ConfigError("n_t cannot exceed the PIN space sigma^tau")


def _pin_space(p: ThreatParams) -> float:
    space = p.sigma**p.tau  # exact integer arithmetic
    try:
        return float(space)
    except OverflowError:
        raise ThreatOverflowError(
            f"sigma^tau = {p.sigma}^{p.tau} exceeds the floating-point range"
        ) from None


def adversary_probability(p: ThreatParams) -> float:
    """Probability of guessing the PIN within n_t tries and forging behavior."""
    p.validate()
    return p.pr_forge * p.n_t / _pin_space(p)


def post_compromise_probability(p: ThreatParams) -> float:
    """Attacker success once the PIN is already known (theft or collusion)."""
    p.validate()
    return p.pr_forge


def format_probability(value: float) -> str:
    """Both scientific and percentage spellings, e.g. '1e-04 (0.01%)'."""
    return f"{value:.6g} ({value * 100.0:.6g}%)"

"""Closed-form adversary arithmetic for a PIN plus behavioral check.

An attacker who does not know the PIN must guess it within n_t tries
out of sigma^tau codes, and then still fool the location classifier
with probability pr_forge (its false negative rate). An attacker who
already knows the PIN faces only the behavioral check.
"""

from geocoherence import (
    ThreatParams,
    adversary_probability,
    format_probability,
    post_compromise_probability,
)

pr_forge = 1e-4  # a classifier FNR of 0.01%

print(f"{'tries':>5} {'digits':>6}  adversary probability")
for n_t in (3, 4, 5, 6):
    p = ThreatParams(pr_forge=pr_forge, n_t=n_t, sigma=10, tau=6)
    print(f"{n_t:>5} {p.tau:>6}  {format_probability(adversary_probability(p))}")

print()
print("longer PINs shrink the guessing term geometrically:")
for tau in (4, 6, 8):
    p = ThreatParams(pr_forge=pr_forge, n_t=4, sigma=10, tau=tau)
    print(f"  tau={tau}: {format_probability(adversary_probability(p))}")

p = ThreatParams(pr_forge=pr_forge, n_t=4, sigma=10, tau=6)
print()
print("once the PIN leaks, only the behavioral check remains:")
print(f"  {format_probability(post_compromise_probability(p))}")

"""Adversary-method lower bounds for explicitly specified finite functions.

Computes the additive and multiplicative adversary bounds and the gamma2
factorization norm, builds and verifies the witness transformations relating
them, and evaluates the closed-form direct-product / XOR / threshold bound
formulas, all with runnable numerical checks.
"""

__version__ = "0.1.0"

"""eta-atlas: level curves of the completed zeta-derivative function.

Numerics for eta(s) = pi^(-s/2) Gamma(s/2) zeta'(s), zero catalogs for zeta
and its derivatives, level-curve continuation and zero classification,
curvature and sum identities, and the CUE characteristic-polynomial analog.
"""

__version__ = "0.1.0"

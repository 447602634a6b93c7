"""Constant mean curvature one surfaces in hyperbolic 3-space.

Modules: ``algebra`` (SL(2,C) and the ball model), ``mero`` (meromorphic
calculus), ``surface`` (surface data), ``integrate`` (lift ODE and
monodromy), ``period`` (unitarizability and parameter scans), ``geometry``
(curvature and flux), ``catalog`` (explicit families), ``verify`` (case
analyses and type enumeration), ``mesh`` (sampling and OBJ export) and
``cli``.
"""

__version__ = "0.1.0"

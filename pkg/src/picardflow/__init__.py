"""Fourier fixed-point construction of incompressible Euler and
Navier-Stokes Cauchy solutions.

Two backends realise the velocity/pressure integral operators: an analytic
modal backend for single-circumferential-mode forcing in 2-D (closed forms
in incomplete gamma and confluent hypergeometric functions, plus nested
Simpson quadrature for the viscous first correction), and a discrete
spectral backend for arbitrary decaying forcing in 2-D and 3-D.  A
verification harness turns the method's checkable claims (divergence,
initial conditions, residuals, correction dominance, backend agreement)
into reproducible reports.
"""

from .quadrature import PrecisionPolicy
from .specfun import EvalPrecision

__all__ = ["PrecisionPolicy", "EvalPrecision"]
__version__ = "0.1.0"

"""Null wave fronts in Lorentz-Minkowski space.

Modules: ``lorentz`` (inner products, subspaces), ``geometry`` (generating
curves and surfaces), ``frontgen`` (normal-form fronts), ``singular``
(singular loci), ``completion`` (reconstruction and gluing), ``catalog``
(built-in examples), ``export`` and ``cli``.
"""

from .frontgen import NullFront, normal_form, parallel_front
from .geometry import GeneratingFront, build_curve, build_surface

__all__ = ["GeneratingFront", "NullFront", "build_curve", "build_surface", "normal_form",
           "parallel_front"]
__version__ = "0.1.0"

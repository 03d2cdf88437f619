"""Inverse mean curvature flow lab: curves on S^2, axisymmetric surfaces, scenario runs."""

from imcf_lab._core import *  # noqa: F401,F403
from imcf_lab._core import __doc__  # noqa: F401

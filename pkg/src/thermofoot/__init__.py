"""Plantar thermogram analysis for diabetic foot screening.

Subpackages: ``data`` (maps, manifests, synthetic cohorts), ``features``
(temperature-class and angiosome features, correlation pruning), ``learn``
(tree ensembles and linear classifiers), ``evaluation`` (cross-validated
grid search and metrics). ``stats`` holds the cohort tests and ``enhance``
the image operators.
"""

__version__ = "0.1.0"

"""Temperature-class histogram and the estimate-temperature family (ET, ETD, HSE)."""

from dataclasses import dataclass

import numpy as np

from ..exceptions import EmptyMapError

# Temperature class centres C0..C7 in degrees C.
CLASS_CENTERS = np.array([26.5, 28.5, 29.5, 30.5, 31.0, 32.5, 33.5, 34.5])
# Class k covers [boundary[k-1], boundary[k]); C0 and C7 are open-ended.
CLASS_BOUNDARIES = (CLASS_CENTERS[:-1] + CLASS_CENTERS[1:]) / 2.0


@dataclass(frozen=True)
class TemperatureHistogram:
    percentages: np.ndarray
    modal_index: int
    max_temperature: float
    class_centers: np.ndarray = CLASS_CENTERS


def _values(source):
    if hasattr(source, "foreground"):
        return np.asarray(source.foreground, dtype=float)
    v = np.asarray(source, dtype=float).ravel()
    return v[v != 0.0]


def temperature_class(values):
    """Index of the temperature class of each value."""
    return np.searchsorted(CLASS_BOUNDARIES, np.asarray(values, dtype=float), side="right")


def temperature_histogram(source):
    """Fraction of foreground pixels per temperature class.

    ``source`` is a ThermalMap or an array whose zero entries are background.
    The modal class is the most populated one, lowest index on ties.
    """
    values = _values(source)
    if values.size == 0:
        raise EmptyMapError("temperature map has no foreground pixels")
    counts = np.bincount(temperature_class(values), minlength=len(CLASS_CENTERS))
    pct = counts / values.size
    return TemperatureHistogram(percentages=pct, modal_index=int(np.argmax(pct)),
                                max_temperature=float(values.max()))


def estimate_temperature(hist):
    """Weighted mean of the modal class centre and its two neighbours.

    A neighbour beyond C0 or C7 does not exist and contributes nothing.
    """
    j = hist.modal_index
    lo, hi = max(j - 1, 0), min(j + 1, len(hist.class_centers) - 1)
    a = hist.percentages[lo:hi + 1]
    c = hist.class_centers[lo:hi + 1]
    return float(np.dot(a, c) / a.sum())


def estimated_temperature_difference(left_et, right_et):
    """Absolute left/right ET gap; 0.0 when either side is missing."""
    if left_et is None or right_et is None:
        return 0.0
    return abs(float(left_et) - float(right_et))


def hot_spot_estimator(hist, et=None):
    """Gap between the hottest present temperature and ET."""
    if et is None:
        et = estimate_temperature(hist)
    return abs(hist.max_temperature - et)

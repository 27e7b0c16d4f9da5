import statistics
import time

from ..exceptions import ConfigError


def time_inference(model, X, repetitions=10):
    """Median wall-clock milliseconds per sample of ``model.predict``.

    One untimed warm-up call precedes the timed repetitions.
    """
    if int(repetitions) < 1:
        raise ConfigError(f"repetitions must be >= 1, got {repetitions}")
    n = max(len(X), 1)
    model.predict(X)
    samples = []
    for _ in range(int(repetitions)):
        t0 = time.perf_counter()
        model.predict(X)
        samples.append((time.perf_counter() - t0) * 1000.0 / n)
    return statistics.median(samples)

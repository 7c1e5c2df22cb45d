"""
Autocorrelation counter: a training-free reference the learned model has to beat.
"""
import numpy as np
from scipy.signal import find_peaks

MIN_LAG = 2
PEAK_THRESHOLD = 0.2


def autocorr_count(X):
    """N / L, where L is the first autocorrelation peak of the channel-averaged signal.

    Returns 0 when the signal is constant, shorter than 4 frames, or has no
    peak above PEAK_THRESHOLD normalized autocorrelation.
    """
    X = np.asarray(X, dtype=np.float64)
    signal = X.mean(axis=1) if X.ndim == 2 else X
    n = signal.shape[0]
    if n < 4:
        return 0.0
    centred = signal - signal.mean()
    energy = float(centred @ centred)
    if energy <= 1e-12 * n:
        return 0.0
    acf = np.correlate(centred, centred, mode='full')[n - 1:] / energy
    # start one lag early so a peak at MIN_LAG has a left neighbour
    peaks, _ = find_peaks(acf[MIN_LAG - 1:], height=PEAK_THRESHOLD)
    if len(peaks) == 0:
        return 0.0
    return n / float(peaks[0] + MIN_LAG - 1)

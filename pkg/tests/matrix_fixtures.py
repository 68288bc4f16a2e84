"""Reference matrices for the five-measurement repetition-code example.

The detector-error matrix here is the exact GF(2) product of the detector
and measurement-syndrome matrices (the published form of its row 3 carries a
one-entry misprint; the product is authoritative).
"""
import numpy as np

D1 = np.array(
    [
        [1, 0, 0, 0, 0],
        [0, 1, 0, 0, 0],
        [0, 0, 1, 1, 0],
        [0, 0, 0, 1, 1],
    ],
    dtype=np.uint8,
)

D2 = np.array(
    [
        [1, 0, 0, 0, 0],
        [0, 1, 0, 0, 0],
        [1, 0, 1, 1, 0],
        [0, 1, 0, 1, 1],
    ],
    dtype=np.uint8,
)

OMEGA1 = np.array(
    [
        [1, 1, 0, 1, 0, 0, 0, 0],
        [0, 1, 1, 0, 1, 0, 0, 0],
        [1, 0, 0, 0, 0, 1, 0, 0],
        [0, 1, 0, 0, 0, 0, 1, 0],
        [0, 0, 1, 0, 0, 0, 0, 1],
    ],
    dtype=np.uint8,
)

H1 = (D1 @ OMEGA1) % 2

H2 = (D2 @ OMEGA1) % 2

H2_EXPECTED = np.array(
    [
        [1, 1, 0, 1, 0, 0, 0, 0],
        [0, 1, 1, 0, 1, 0, 0, 0],
        [0, 0, 0, 1, 0, 1, 1, 0],
        [0, 0, 0, 0, 1, 0, 1, 1],
    ],
    dtype=np.uint8,
)

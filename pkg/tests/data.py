import itertools
import math

# (l1, l2, α) grid for the Cheeger-Müller check
CM_GRID = [
    (l1, l2, alpha)
    for l1, l2, alpha in itertools.product(
        (0.5, 1.0), (2.0, 3.0), (math.pi / 6, math.pi / 4)
    )
]

CYLINDER_B1 = 1.0
CYLINDER_H = 1.0

TEST_COMPLEXES = [
    "data-files/acyclic-interval.json",
    "data-files/circle-product-cw.json",
    "data-files/circle-stray-cell.json",
]

"""Geometry and parameter grids used by the experiment presets."""
from __future__ import annotations

import numpy as np

# H2 bond lengths (Angstrom); 6 training + 44 interleaved test points
H2_TRAIN_GRID: tuple[float, ...] = (0.5, 0.9, 1.3, 1.7, 2.1, 2.5)
H2_TEST_GRID: tuple[float, ...] = tuple(float(r) for r in np.round(np.linspace(0.45, 2.55, 44), 4))
# geometries shown in the latent-space density-matrix figure
H2_EXTRA_POINTS: tuple[float, ...] = (0.75, 1.5)

# H4 inter-molecule separation d (bohr), intra-molecule bond fixed at 2 bohr
H4_TRAIN_GRID: tuple[float, ...] = (0.6, 1.4, 2.2, 3.0, 3.8, 4.6)

# Hubbard hopping amplitudes at U = 2
HUBBARD_T_GRID: tuple[float, ...] = tuple(float(t) for t in np.round(np.linspace(0.9, 1.1, 6), 10))
HUBBARD_U = 2.0

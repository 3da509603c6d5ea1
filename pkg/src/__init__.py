"""qtraj: quantum trajectories of a particle on a continuously monitored lattice"""

__version__ = "0.1.0"

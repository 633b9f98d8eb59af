"""tvwb-toolkit: tree very weak Bernoulli computations for one-sided endomorphisms."""

__version__ = "0.1.0"
__description__ = "Exact tree-name distances, tvwB decisions, Birkhoff couplings and Monte Carlo checks"

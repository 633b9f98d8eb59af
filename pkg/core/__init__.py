"""Computational core: trees, t-bar, Markov shifts, Birkhoff decompositions, simulation."""

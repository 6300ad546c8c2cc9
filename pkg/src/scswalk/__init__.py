"""Hadamard discrete-time quantum walk vs. the simultaneous coin-and-shift (SCS) Hamiltonian."""

__version__ = "0.1.0"

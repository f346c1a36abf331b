"""Core solvers: geometry, Triangle Algorithm, variants, LP layer and oracles."""

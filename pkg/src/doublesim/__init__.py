"""doublesim: a desk-scale doubles-battle stochastic game with population
training, meta-game solvers, evaluation protocols, and a battle-log pipeline."""

__version__ = "0.1.0"

"""mirrortactics: grid-tactics game, scripted enemy, and imitation trainer."""

__version__ = "0.1.0"

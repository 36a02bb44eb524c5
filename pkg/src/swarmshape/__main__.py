"""Allows ``python -m swarmshape`` as an alternative to the console script."""

from .cli import console

if __name__ == "__main__":
    console()

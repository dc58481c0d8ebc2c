"""Hybridtele - simulate teleportation over a hybrid coherent/dual-rail channel."""

__version__ = "0.1.0"

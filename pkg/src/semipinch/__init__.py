"""Gaze-plus-semi-pinch group selection: interaction engine, synthetic user and trial runner."""

__version__ = "0.1.0"

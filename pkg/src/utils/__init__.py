"""Utility modules for reading and writing checker inputs."""

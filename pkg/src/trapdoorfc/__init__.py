"""RSA-trapdoored formula coloring and integer programming instances."""
__version__ = "0.1.0"

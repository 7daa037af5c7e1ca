"""Multi-task partial-diffusion affine projection over clustered networks."""

__version__ = "0.1.0"

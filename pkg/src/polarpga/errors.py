"""Exception types shared across the package."""


class ConvergenceError(RuntimeError):
    """A numerical iteration (quadrature refinement or bisection) hit its cap."""

"""2D Riemann-SPH wave tank with a hinged surge-flap converter and RL damping control."""

__version__ = "0.1.0"

GRAVITY = 9.81  # m/s^2, magnitude; the solver applies (0, -GRAVITY)

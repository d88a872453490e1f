# Throttles para as ações de resolução e simulação
from .custom_throttles import SimulationThrottle, SolverThrottle

__all__ = ["SolverThrottle", "SimulationThrottle"]

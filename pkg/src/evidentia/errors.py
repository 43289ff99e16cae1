"""Exception types shared across the package."""


class EvidentiaError(ValueError):
    """Base error carrying a machine-readable reason ``code``."""

    def __init__(self, code: str, message: str = ""):
        self.code = code
        self.message = message or code
        super().__init__(f"{code}: {self.message}" if message else code)


class ModelError(EvidentiaError):
    """Invalid or incoherent model inputs (probabilities, partitions, scenarios)."""


class SimulationError(EvidentiaError):
    """Raised by the Monte Carlo oracle (infeasible configs, starved cells)."""


class InsufficientSamples(SimulationError):
    def __init__(self, cell: str, message: str = ""):
        self.cell = cell
        super().__init__("insufficient-samples", message or f"no observations in cell {cell!r}")

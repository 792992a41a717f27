import os
from dotenv import load_dotenv
from typing import List, Optional, Tuple

load_dotenv()


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


class Config:
    """Configuration class for the fuzzy learning agent."""

    def __init__(self):
        self.reload()

    def reload(self):
        """Read every setting from the environment."""
        # Experiment settings
        self.SEED = int(os.getenv("SEED", "42"))
        self.RECORD_COUNT = int(os.getenv("RECORD_COUNT", "400"))
        self.NOISE_SIGMA = float(os.getenv("NOISE_SIGMA", "0.02"))
        self.KFOLD_K = int(os.getenv("KFOLD_K", "5"))
        self.GENERATIONS = int(os.getenv("GENERATIONS", "300"))
        self.LEARN_WORKERS = int(os.getenv("LEARN_WORKERS", "1"))

        # Genetic algorithm
        self.GA_POPULATION = int(os.getenv("GA_POPULATION", "50"))
        self.GA_CROSSOVER_RATE = float(os.getenv("GA_CROSSOVER_RATE", "0.9"))
        self.GA_MUTATION_RATE = float(os.getenv("GA_MUTATION_RATE", "0.1"))
        self.GA_MUTATION_SIGMA = float(os.getenv("GA_MUTATION_SIGMA", "0.05"))  # fraction of domain width

        # Particle swarm (standard constriction coefficients)
        self.PSO_SWARM_SIZE = int(os.getenv("PSO_SWARM_SIZE", "84"))
        self.PSO_INERTIA = float(os.getenv("PSO_INERTIA", "0.729"))
        self.PSO_COGNITIVE = float(os.getenv("PSO_COGNITIVE", "1.49445"))
        self.PSO_SOCIAL = float(os.getenv("PSO_SOCIAL", "1.49445"))
        self.PSO_VELOCITY_CLAMP = float(os.getenv("PSO_VELOCITY_CLAMP", "0.2"))  # fraction of domain width

        # Inference
        self.COG_SAMPLES = int(os.getenv("COG_SAMPLES", "1001"))
        self.FML_STRICT = _env_bool("FML_STRICT", "true")

        # Recommendation
        self.ACCURACY_THRESHOLD = float(os.getenv("ACCURACY_THRESHOLD", "1.0"))
        self.CURRENT_GRADE = int(os.getenv("CURRENT_GRADE", "4"))

        # Agent service
        self.SERVICE_BIND = os.getenv("SERVICE_BIND", "127.0.0.1:7855")

        # Logging
        self.LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
        self.LOG_FILE = os.getenv("LOG_FILE") or None

    def load_file(self, path: str):
        """Override settings from a .env-style file, then re-read."""
        if not os.path.exists(path):
            raise FileNotFoundError(f"Config file not found: {path}")
        load_dotenv(path, override=True)
        self.reload()

    def validate(self) -> List[str]:
        """Return a list of configuration problems (empty when usable)."""
        problems = []
        for name in ("GA_CROSSOVER_RATE", "GA_MUTATION_RATE", "PSO_VELOCITY_CLAMP"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                problems.append(f"{name}={value} outside [0, 1]")
        for name in ("RECORD_COUNT", "GENERATIONS", "GA_POPULATION", "PSO_SWARM_SIZE",
                     "COG_SAMPLES", "LEARN_WORKERS"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be positive")
        if self.KFOLD_K < 2:
            problems.append("KFOLD_K must be at least 2")
        if self.COG_SAMPLES < 2:
            problems.append("COG_SAMPLES must be at least 2")
        return problems

    @staticmethod
    def parse_bind(bind: Optional[str]) -> Tuple[str, int]:
        """Split 'host:port' into its parts."""
        host, _, port = (bind or "").rpartition(":")
        if not host or not port.isdigit():
            raise ValueError(f"Invalid bind address: {bind!r} (expected host:port)")
        return host, int(port)


# Global config instance
config = Config()

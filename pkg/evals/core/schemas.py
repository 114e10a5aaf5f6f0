"""Data structures for tracked study configurations."""
from dataclasses import asdict, dataclass, field
from typing import Dict, List


@dataclass
class StudyConfig:
    """A gamma-tuned distortion-vs-rate study for one or more source biases."""
    experiment_name: str
    run_id: str
    biases: List[float] = field(default_factory=lambda: [0.5])
    rates: List[float] = field(default_factory=lambda: [0.2, 0.3, 0.4, 0.5])
    gamma_grid: List[float] = field(default_factory=lambda: [0.1, 0.3, 0.5, 0.7, 0.9])
    N: int = 500
    trials: int = 20
    beta: float = 5.0
    max_iters: int = 35
    master_seed: int = 2024
    workers: int = 1
    converse_slack: float = 0.02
    baseline_margin: float = 0.05

    def get_output_dir(self) -> str:
        return f"logs/eval_results/{self.experiment_name}"

    def get_stem(self, p: float) -> str:
        """Output stem for the sweep tables of bias p."""
        return f"{self.get_output_dir()}/{self.run_id}_p{p:g}"

    def get_plot_path(self) -> str:
        return f"{self.get_output_dir()}/{self.run_id}_curve.svg"

    def get_summary_path(self) -> str:
        return f"{self.get_output_dir()}/{self.run_id}_checks.csv"

    def to_dict(self) -> Dict:
        return asdict(self)

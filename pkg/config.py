"""
Configuration management for the separability certifier
"""
from pydantic_settings import BaseSettings
from typing import Optional


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    # Application
    app_name: str = "Tripartite PPT Separability Certifier"
    app_version: str = "1.0.0"

    # Matrix comparison (Frobenius, relative to max(1, ||rho||_F))
    matrix_tol: float = 1e-10
    hermiticity_tol: float = 1e-10

    # Rank decisions
    rank_rel_tol: float = 1e-9
    range_tol: float = 1e-8

    # PPT verdicts (absolute on the minimum eigenvalue)
    ppt_tol: float = 1e-9
    pt_consistency_tol: float = 1e-10

    # Joint diagonalization
    commute_tol: float = 1e-8
    cluster_tol: float = 1e-7

    # Canonical form extraction
    canonical_tol: float = 1e-8
    filter_eig_floor: float = 1e-12
    filter_cond_max: float = 1e12
    pivot_max_trials: int = 64

    # Decomposition and certificates
    decomposition_tol: float = 1e-8
    prune_weight_tol: float = 1e-14

    # Product kernel vectors
    kernel_tol: float = 1e-8
    root_accept_tol: float = 1e-6

    # Randomness
    default_seed: int = 0

    # Logging
    log_level: str = "WARNING"
    log_format: str = "text"
    log_file: Optional[str] = None

    class Config:
        env_file = ".env"
        case_sensitive = False

    def tolerances(self) -> dict:
        """Tolerances recorded in certificates"""
        return {
            "matrix_tol": self.matrix_tol,
            "rank_rel_tol": self.rank_rel_tol,
            "ppt_tol": self.ppt_tol,
            "commute_tol": self.commute_tol,
            "canonical_tol": self.canonical_tol,
            "decomposition_tol": self.decomposition_tol,
            "prune_weight_tol": self.prune_weight_tol,
        }


# Global settings instance
settings = Settings()

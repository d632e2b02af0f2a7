from functools import lru_cache
from typing import Literal, Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", case_sensitive=False, extra="ignore")

    app_name: str = "Selection Game Workbench"
    environment: str = "development"
    debug: bool = False
    api_v1_prefix: str = "/api/v1"

    # Search configuration
    node_budget: int = Field(default=1_000_000, description="Explored-node budget for solves and enumerations")
    seed: int = Field(default=0, description="Seed for the random corpus")
    omega_k: Optional[int] = Field(default=None, description="Largest finite set checked by omega-cover payoffs")
    markov_search: Literal["transversal", "exhaustive"] = Field(
        default="transversal", description="II Markov search strategy"
    )

    log_level: str = Field(default="WARNING", description="Root log level for the CLI")
    out_dir: str = Field(default="out", description="Directory for counterexample files")
    corpus_workers: int = Field(default=1, description="Worker processes for corpus runs")

    @field_validator("node_budget", "corpus_workers")
    @classmethod
    def check_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be a positive integer")
        return v

    @field_validator("omega_k")
    @classmethod
    def check_omega_k(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError("omega_k must be at least 1")
        return v

    @field_validator("log_level", mode="before")
    @classmethod
    def normalise_log_level(cls, v: str) -> str:
        return str(v).upper()


@lru_cache()
def get_settings() -> Settings:
    return Settings()

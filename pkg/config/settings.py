from pydantic_settings import BaseSettings
from typing import Optional


class Settings(BaseSettings):
    # 프로젝트 설정
    project_name: str = "voltail - stochastic volatility return distributions"
    log_level: str = "INFO"

    # 경로 설정
    data_dir: str = "./data"
    output_dir: str = "./output"
    djia_file: str = "./data/djia_1976_2006.csv"

    # 재현성 설정 (VOLTAIL_SEED가 있으면 --seed보다 우선)
    seed: int = 20061231

    # 병렬 처리 설정
    workers: Optional[int] = None
    mc_block_size: int = 4096

    class Config:
        env_file = ".env"
        env_prefix = "VOLTAIL_"
        case_sensitive = False


# 전역 설정 객체
settings = Settings()

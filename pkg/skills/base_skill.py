"""
Skill 기본 클래스
CLI 하위 명령 하나 이상을 수행하는 분석 단위. 기본값은 Skill 디렉토리의 config.yaml에서 읽습니다.
"""

from abc import ABC, abstractmethod
from typing import Dict, Any, List, Optional
from pathlib import Path
import inspect
import logging

import yaml
from pydantic import BaseModel

from config.pipeline import PipelineConfig


class SkillMetadata(BaseModel):
    """Skill 메타데이터"""
    name: str
    description: str
    version: str
    dependencies: List[str] = []
    tags: List[str] = []


class BaseSkill(ABC):
    """
    voltail Skill 기본 클래스

    하위 클래스는 메타데이터, 도구, 지원 작업과 execute를 구현합니다.
    작업 컨텍스트는 pipeline_config()로 config.yaml 기본값과 합쳐 PipelineConfig가 됩니다.
    """

    def __init__(self):
        self.config = self._load_config()
        self.metadata = self._load_metadata()
        self.tools = self._initialize_tools()
        self.logger = logging.getLogger(f"skills.{self.metadata.name}")
        level = (self.config.get('logging') or {}).get('level')
        if level:
            self.logger.setLevel(str(level).upper())

    @abstractmethod
    def _load_metadata(self) -> SkillMetadata:
        """Skill 메타데이터"""

    @abstractmethod
    def _initialize_tools(self) -> Dict[str, Any]:
        """
        Skill에서 사용할 수치 도구

        Returns:
            Dict[str, Any]: 이름 → 호출 가능한 도구
        """

    @abstractmethod
    def get_capabilities(self) -> List[str]:
        """지원하는 작업(CLI 하위 명령) 이름"""

    @abstractmethod
    def execute(self, task: str, context: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """
        작업 실행

        Args:
            task: 작업 이름 (예: "analyze", "simulate", "pdf")
            context: PipelineConfig 필드 이름을 키로 하는 값 (None은 기본값 사용)

        Returns:
            Dict[str, Any]: 요약 값과 출력 파일 경로

        Raises:
            VoltailError: 입력 또는 수치 계산 실패
        """

    def _load_config(self) -> Dict[str, Any]:
        config_file = Path(inspect.getfile(type(self))).parent / "config.yaml"
        if not config_file.exists():
            return {}
        with open(config_file, 'r', encoding='utf-8') as f:
            return yaml.safe_load(f) or {}

    def pipeline_config(self, context: Optional[Dict[str, Any]]) -> PipelineConfig:
        """
        config.yaml 기본값 위에 작업 컨텍스트를 덮어써 PipelineConfig 생성

        config.yaml 중 PipelineConfig 필드가 아닌 항목(예: quadrature 허용 오차)은 Skill이 직접 읽습니다.

        Raises:
            pydantic.ValidationError: 범위를 벗어난 값
        """
        defaults = {k: v for k, v in self.config.items() if k in PipelineConfig.model_fields}
        return PipelineConfig.from_context(defaults, context)

    def validate_input(self, task: str, context: Dict[str, Any]) -> bool:
        return task in self.get_capabilities()

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} tasks={self.get_capabilities()}>"

"""
Skill Manager
skills/ 하위 디렉토리의 Skill을 찾아 로드하고, 작업을 성공/실패 envelope로 감싸 실행
"""

from typing import Dict, List, Optional, Any, Union
from pathlib import Path
import importlib
import logging
import time

from pydantic import ValidationError

from skills.base_skill import BaseSkill
from tools.errors import VoltailError

logger = logging.getLogger(__name__)


class SkillManager:
    """
    voltail Skill 관리자

    skills/<name>/skill.py 의 <Name>Skill 클래스를 로드합니다. 예: return_analysis -> ReturnAnalysisSkill
    """

    def __init__(self, skills_dir: Union[str, Path, None] = None):
        """
        Args:
            skills_dir: Skill 디렉토리 (기본: 이 패키지 디렉토리)
        """
        self.skills_dir = Path(skills_dir) if skills_dir else Path(__file__).parent
        if not self.skills_dir.exists():
            raise FileNotFoundError(f"Skills directory not found: {self.skills_dir}")
        self.skills: Dict[str, BaseSkill] = {}
        self._load_all_skills()

    def _load_all_skills(self):
        for skill_path in sorted(self.skills_dir.iterdir()):
            if not skill_path.is_dir() or skill_path.name.startswith('_'):
                continue
            if not (skill_path / "skill.py").exists():
                continue
            try:
                self.skills[skill_path.name] = self._load_skill(skill_path.name)
                logger.debug(f"Loaded skill: {skill_path.name}")
            except Exception as e:
                logger.error(f"Failed to load skill {skill_path.name}: {e}")

    @staticmethod
    def _load_skill(skill_name: str) -> BaseSkill:
        module = importlib.import_module(f"skills.{skill_name}.skill")
        class_name = ''.join(word.capitalize() for word in skill_name.split('_')) + 'Skill'
        return getattr(module, class_name)()

    def get_skill(self, skill_name: str) -> Optional[BaseSkill]:
        return self.skills.get(skill_name)

    def list_skills(self) -> List[str]:
        return list(self.skills.keys())

    def find_skill_for_task(self, task: str) -> Optional[str]:
        """
        작업 이름(CLI 하위 명령)을 지원하는 Skill 찾기

        Args:
            task: 작업 이름 (예: "analyze", "pdf")

        Returns:
            Optional[str]: Skill 이름 또는 None
        """
        for skill_name, skill in self.skills.items():
            if task in skill.get_capabilities():
                return skill_name
        return None

    def execute_skill(
        self,
        skill_name: str,
        task: str,
        context: Optional[Dict[str, Any]] = None
    ) -> Dict[str, Any]:
        """
        Skill 실행

        VoltailError와 설정 검증 오류는 실패 envelope로, 그 밖의 예외는 traceback과 함께 로그를 남긴 뒤
        실패 envelope로 돌려줍니다.

        Args:
            skill_name: Skill 이름
            task: 작업 이름
            context: 작업 컨텍스트

        Returns:
            Dict[str, Any]: {success, skill, task, elapsed, result | error, error_type}

        Raises:
            ValueError: Skill을 찾을 수 없거나 지원하지 않는 작업
        """
        skill = self.get_skill(skill_name)
        if not skill:
            raise ValueError(f"Skill not found: {skill_name}")
        if not skill.validate_input(task, context or {}):
            raise ValueError(f"Skill '{skill_name}' does not support task '{task}'")

        envelope: Dict[str, Any] = {'skill': skill_name, 'task': task}
        started = time.perf_counter()
        try:
            envelope['result'] = skill.execute(task, context)
            envelope['success'] = True
        except (VoltailError, ValidationError) as e:
            logger.error(f"{skill_name}.{task} failed: {e}")
            envelope.update(success=False, error=str(e), error_type=type(e).__name__)
        except Exception as e:
            logger.exception(f"{skill_name}.{task} crashed")
            envelope.update(success=False, error=str(e), error_type=type(e).__name__)
        envelope['elapsed'] = time.perf_counter() - started
        logger.info(f"{skill_name}.{task} finished in {envelope['elapsed']:.2f}s (success={envelope['success']})")
        return envelope

    def __repr__(self) -> str:
        return f"<SkillManager skills={self.list_skills()}>"

"""
Return Analysis Skill 패키지
"""

from .skill import ReturnAnalysisSkill

__all__ = ['ReturnAnalysisSkill']

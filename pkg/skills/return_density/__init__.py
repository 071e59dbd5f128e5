"""
Return Density Skill 패키지
"""

from .skill import ReturnDensitySkill

__all__ = ['ReturnDensitySkill']

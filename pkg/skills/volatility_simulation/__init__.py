"""
Volatility Simulation Skill 패키지
"""

from .skill import VolatilitySimulationSkill

__all__ = ['VolatilitySimulationSkill']

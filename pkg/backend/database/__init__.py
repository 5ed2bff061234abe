"""Database module."""

from .connection import DatabaseManager, get_db, get_db_manager
from .models import Base, SimulationRun

__all__ = [
    "Base",
    "SimulationRun",
    "DatabaseManager",
    "get_db_manager",
    "get_db",
]

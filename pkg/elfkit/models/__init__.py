"""
Expose ORM models for easy imports.
"""

from .base import Base
from .elf import ElfRow

__all__ = ["Base", "ElfRow"]

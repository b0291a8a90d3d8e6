"""
Declarative base shared by every table.
"""

import sqlalchemy.orm as orm


class Base(orm.DeclarativeBase):
    pass

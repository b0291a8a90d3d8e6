"""
ElfRow model (persistence layer).

- One row per placed emergency landing field.
- The rectangle is stored both as anchor/length/width/rotation and as WKT so
  plain SQL clients can read the geometry.
- Required lengths are NULL when that landing direction cannot stop the aircraft.
"""
import sqlalchemy as sa
import sqlalchemy.orm as orm

from .base import Base


class ElfRow(Base):
    __tablename__ = "elfs"

    id: orm.Mapped[int] = orm.mapped_column(primary_key=True, autoincrement=True)
    polygon_id: orm.Mapped[int] = orm.mapped_column(index=True, nullable=False)
    anchor_x: orm.Mapped[float] = orm.mapped_column(sa.Float, nullable=False)
    anchor_y: orm.Mapped[float] = orm.mapped_column(sa.Float, nullable=False)
    rotation: orm.Mapped[float] = orm.mapped_column(sa.Float, nullable=False)
    length: orm.Mapped[float] = orm.mapped_column(sa.Float, nullable=False)
    width: orm.Mapped[float] = orm.mapped_column(sa.Float, nullable=False)
    slope_fwd_pct: orm.Mapped[float] = orm.mapped_column(sa.Float, nullable=False)
    slope_rev_pct: orm.Mapped[float] = orm.mapped_column(sa.Float, nullable=False)
    required_length_fwd: orm.Mapped[float | None] = orm.mapped_column(sa.Float, nullable=True)
    required_length_rev: orm.Mapped[float | None] = orm.mapped_column(sa.Float, nullable=True)
    accepted: orm.Mapped[bool] = orm.mapped_column(sa.Boolean, index=True, nullable=False)
    wet115: orm.Mapped[bool] = orm.mapped_column(sa.Boolean, nullable=False)
    wet160: orm.Mapped[bool] = orm.mapped_column(sa.Boolean, nullable=False)
    geometry_wkt: orm.Mapped[str] = orm.mapped_column(sa.Text, nullable=False)

    def __repr__(self) -> str:
        return (
            f"<ElfRow polygon={self.polygon_id} length={self.length:.1f} "
            f"accepted={self.accepted}>"
        )

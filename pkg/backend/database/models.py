"""Database models for stored simulation runs."""

from datetime import datetime

from sqlalchemy import JSON, Column, DateTime, Float, Index, Integer, String
from sqlalchemy.orm import declarative_base

Base = declarative_base()


class SimulationRun(Base):
    """KPI summary of one completed simulation run."""

    __tablename__ = "simulation_runs"

    id = Column(Integer, primary_key=True, index=True)
    scenario = Column(String(100), nullable=False, index=True)
    algorithm = Column(String(10), nullable=False, index=True)  # none, mlb1, mlb2
    beta_variant = Column(String(20), nullable=False)
    ue_count = Column(Integer, nullable=False, index=True)
    seed = Column(Integer, nullable=False)
    duration = Column(Float, nullable=False)  # s

    throughput_mbps = Column(Float, nullable=False)
    loss_ratio = Column(Float, nullable=False)
    ho_count = Column(Integer, nullable=False)
    sector_throughput_mbps = Column(JSON)  # one value per sector
    control_messages = Column(Integer, default=0)

    # Full ScenarioConfig as dumped by pydantic
    config = Column(JSON, nullable=False)

    run_date = Column(DateTime, default=datetime.utcnow, index=True)
    execution_time_seconds = Column(Float)

    __table_args__ = (Index("idx_algorithm_ue_count", "algorithm", "ue_count"),)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "scenario": self.scenario,
            "algorithm": self.algorithm,
            "beta_variant": self.beta_variant,
            "ue_count": self.ue_count,
            "seed": self.seed,
            "duration": self.duration,
            "throughput_mbps": self.throughput_mbps,
            "loss_ratio": self.loss_ratio,
            "ho_count": self.ho_count,
            "sector_throughput_mbps": self.sector_throughput_mbps,
            "control_messages": self.control_messages,
            "config": self.config,
            "run_date": self.run_date.isoformat() if self.run_date else None,
            "execution_time_seconds": self.execution_time_seconds,
        }

    def __repr__(self):
        return f"<SimulationRun(scenario={self.scenario}, algorithm={self.algorithm}, ues={self.ue_count})>"

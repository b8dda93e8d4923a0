"""
Optional SQLite (or any SQLAlchemy URL) record of growth runs: one
ExperimentRun row per ``generic grow`` invocation, one GrowthStepRecord row
per realized extension.
"""

import logging
from typing import List, Optional

import pandas as pd
from sqlalchemy.engine import Engine
from sqlmodel import Field, Relationship, Session, SQLModel, create_engine, select

from chromatic_models.amalgamation import GrowthLog

logger = logging.getLogger(__name__)


class ExperimentRun(SQLModel, table=True):
    __tablename__ = "experiment_runs"

    id: Optional[int] = Field(default=None, primary_key=True)
    command: str
    class_name: str
    seed: int
    budget: int
    size_cap: int
    saturated: bool = False
    final_size: int = 0

    # one run has many steps
    steps: List["GrowthStepRecord"] = Relationship(back_populates="run")

    def __repr__(self) -> str:
        return (
            f"ExperimentRun(id={self.id}, class_name={self.class_name}, "
            f"seed={self.seed}, final_size={self.final_size})"
        )


class GrowthStepRecord(SQLModel, table=True):
    __tablename__ = "growth_steps"

    id: Optional[int] = Field(default=None, primary_key=True)
    step: int
    size: int
    edges: int
    chi: Optional[int] = None
    omega: int

    run_id: Optional[int] = Field(default=None, foreign_key="experiment_runs.id")
    run: Optional[ExperimentRun] = Relationship(back_populates="steps")

    def __repr__(self) -> str:
        return f"GrowthStepRecord(step={self.step}, size={self.size}, chi={self.chi})"


def open_ledger(url: str, echo: bool = False) -> Engine:
    engine = create_engine(url, echo=echo)
    SQLModel.metadata.create_all(engine)
    return engine


def record_growth(
    engine: Engine, log: GrowthLog, command: str, budget: int, size_cap: int
) -> int:
    """Store ``log`` (through its DataFrame) and return the new run id."""
    frame = log.to_frame()
    with Session(engine) as session:
        run = ExperimentRun(
            command=command,
            class_name=log.class_name,
            seed=log.seed,
            budget=budget,
            size_cap=size_cap,
            saturated=log.saturated,
            final_size=int(frame["size"].iloc[-1]) if len(frame) else 0,
        )
        session.add(run)
        # flush to get the run id assigned
        session.flush()
        for _, row in frame.iterrows():
            session.add(
                GrowthStepRecord(
                    step=int(row["step"]),
                    size=int(row["size"]),
                    edges=int(row["edges"]),
                    chi=None if pd.isna(row["chi"]) else int(row["chi"]),
                    omega=int(row["omega"]),
                    run=run,
                )
            )
        session.commit()
        run_id = run.id
    logger.info(f"recorded run {run_id} with {len(frame)} steps")
    return run_id


def runs_frame(engine: Engine) -> pd.DataFrame:
    """Every recorded step joined with its run, one row per step."""
    rows = []
    with Session(engine) as session:
        for run in session.exec(select(ExperimentRun)).all():
            for step in run.steps:
                rows.append(
                    {
                        "run_id": run.id,
                        "class_name": run.class_name,
                        "seed": run.seed,
                        "step": step.step,
                        "size": step.size,
                        "edges": step.edges,
                        "chi": step.chi,
                        "omega": step.omega,
                    }
                )
    columns = ["run_id", "class_name", "seed", "step", "size", "edges", "chi", "omega"]
    return pd.DataFrame(rows, columns=columns)

from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field


class MatchReport(BaseModel):
    """Greedy nearest-neighbour pairing of two root multisets"""

    model_config = ConfigDict(frozen=True)

    pairs: List[Tuple[int, int]] = Field(
        ..., description="(computed index, reference index)"
    )
    distances: List[float] = Field(
        ..., description="|x - y| / max(1, |y|) per pair"
    )
    collisions: int = Field(
        0, description="Computed roots whose nearest reference was taken"
    )
    size_mismatch: bool = False

    @property
    def max_distance(self) -> float:
        return max(self.distances, default=0.0)

    def matches(self, tolerance: float) -> bool:
        return (
            not self.size_mismatch
            and self.collisions == 0
            and self.max_distance <= tolerance
        )

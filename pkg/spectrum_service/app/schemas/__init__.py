from .kernel_schemas import (
    ExponentialSumKernel,
    GapConditionReport,
    KernelFamily,
    KernelParams,
    LaplaceValue,
)
from .oracle_schemas import MatchReport
from .run_schemas import (
    ClaimResult,
    KernelConfig,
    RunConfig,
    SpectrumRecord,
    SweepRecord,
    VerificationReport,
)
from .spectrum_schemas import (
    BoundChecks,
    ComplexPair,
    ContourReport,
    GapContour,
    MonotoneReport,
    PairBoxReport,
    RealBranch,
    RealZeroLadder,
    Rectangle,
    SpectrumSlice,
    WindingResult,
)
from .timedomain_schemas import OdeReduction, SimulationResult

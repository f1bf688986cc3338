"""trendnet: discrete dynamic network simulation with level-, trend-, and
hybrid-mode regulation."""

__version__ = "0.1.0"

from .model import (  # noqa: E402,F401
    Diagnostic,
    Element,
    Gate,
    Hyperedge,
    InvalidModelError,
    Mode,
    Model,
    SimState,
    Sign,
    Tail,
    apply_toggle,
    initial_state,
    require_valid,
    validate_model,
)
from .dynamics import (  # noqa: F401
    BalanceResult,
    balancing,
    quantize,
    quantize_steps,
    set_term_level,
    set_term_trend,
    update_element,
)
from .scheduler import (  # noqa: F401
    Ensemble,
    GroupUpdate,
    RandomSequential,
    RunTrace,
    Scheme,
    SequentialFixed,
    SimulationConfig,
    Simultaneous,
    run_once,
    simulate,
    step,
)
from .analytics import (  # noqa: F401
    AveragedTrajectory,
    SaturationReport,
    average,
    combine_averages,
    rescale_levels,
    saturation_report,
)

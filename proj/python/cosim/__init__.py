"""Co-simulation master algorithms with coupling-error estimation and PI step-size control."""

from ._core import (
    ArgumentError,
    ConfigurationError,
    ControllerConfig,
    ControllerError,
    CosimError,
    DivergenceError,
    EstimatorError,
    PiController,
    aggregate,
    builtin_scenarios,
    compact_reference,
    compare,
    ecco_residual_energy,
    effective_config,
    lagrange_predict,
    lagrange_weights,
    main,
    nepce_input_error,
    normalize,
    oscillator_energy,
    predictor_output_error,
    run,
    scaled_tolerances,
)

__all__ = [name for name in dir() if not name.startswith("_")]

"""Reactor telemetry synthesis, attack injection and three-level event characterization."""

from ._core import (  # noqa: F401
    Bundle,
    Classifier,
    CyberCharError,
    Dataset,
    DosLevel,
    FusedClass,
    Model,
    ScenarioState,
    TripCause,
    build_use_case,
    class_name,
    confusion,
    default_config,
    enumerate_states,
    evaluate,
    fit,
    fuse,
    load_bundle,
    load_classifier,
    make_state,
    metrics,
    roc,
    run_cli,
    save_bundle,
    train_architecture,
    true_class,
    window_count,
    windowize,
)

__version__ = "0.1.0"

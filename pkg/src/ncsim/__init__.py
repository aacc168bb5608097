"""Networked control system simulation and certification toolkit.

Simulates linear plant/controller loops whose sensor data crosses a shared
network under TOD or round-robin scheduling (classic or deadband-modified),
with transmissions gated by a per-interval dwell bound plus a deadband
trigger.  Ships LMI-based gain verification, a closed-form transmission
interval bound with an ODE cross-check, a Lyapunov run monitor, and a
benchmark/sweep harness around the batch-reactor example.
"""

from .certify import (
    Certificate,
    CertificationError,
    LinearNcsModel,
    bisect_gamma,
    compute_L,
    derive_eta,
    make_certificate,
    verify_lmi,
)
from .hybrid_sim import (
    HybridState,
    MonitorReport,
    SimulationError,
    Trajectory,
    TriggerConfig,
    average_transmission_interval,
    export_jump_log_csv,
    export_trajectory_csv,
    flow_step,
    in_deadband,
    jump,
    monitor_lyapunov,
    sample_initial_conditions,
    simulate,
)
from .mati import (
    LambdaPolicy,
    MatiParams,
    generate_lambda,
    mati_bound,
    mati_bound_by_ode,
    ultimate_bound_radius,
)
from .model_io import (
    ModelParseError,
    batch_reactor_path,
    certificate_from_gains,
    load_model,
)
from .numerics import (
    SymMatrix,
    VectorField,
    integrate_fixed,
    locate_event,
    spectral_norm,
    sym_eigenvalues,
)
from .protocols import (
    NodePartition,
    Protocol,
    ProtocolError,
    rr_classic_jump,
    rr_contraction,
    rr_lyapunov,
    rr_modified_jump,
    sandwich_bounds,
    tod_classic_jump,
    tod_contraction,
    tod_modified_jump,
)

__version__ = "0.1.0"

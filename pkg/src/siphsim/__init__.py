"""
siphsim: behavioral simulator and design calculator for a WDM
silicon-photonics linear-algebra accelerator.

Plans the comb spectrum and resonator geometry, simulates the optical
matrix-vector multiply chain with device nonlinearity, quantization and
noise, composes it into matrix-matrix operations and an iterative matrix
inverse, benches massive-MIMO linear detection, and reproduces the
accelerator's power/area/throughput scaling projections.
"""

__version__ = "0.1.0"

from .material import MaterialModel, default_silicon_material, material_from_band
from .wdm import (
    PlannerConfig,
    WdmPlan,
    plan_mma_spectrum,
    plan_mrm_radii,
    plan_rtr_spectrum,
    validate_plan,
)
from .devices import (
    AdcModel,
    AnalogChainModel,
    DeviceChain,
    EoCalibrationTable,
    HsDacModel,
    MrmModel,
    R2rDacModel,
    RtrPdModel,
    SplitterModel,
    calibrate_eo,
    hs_dac_static_power,
    laser_power_per_wavelength,
    laser_total_power,
    mrm_transmission,
    noise_power_at_adc,
    r2r_dac_static_power,
    rtr_absorbed_power,
    tia_response,
)
from .engine import (
    EngineConfig,
    FidelityMode,
    MvmEngine,
    QuantizedMatrix,
    QuantizedVector,
    golden_mvm,
)
from .pipeline import (
    ComplexEncoding,
    MmmMode,
    NeumannConfig,
    NeumannRun,
    SignedEncoding,
    complex_mmm,
    neumann_invert,
    run_mma,
    run_mmm,
    signed_mvm,
)
from .mimo import (
    ChannelRealization,
    DetectionResult,
    MimoConfig,
    generate_instance,
    gram_decompose,
    linear_detect,
    sweep,
)
from .perf import (
    ASIC_REFERENCE,
    BlockBudget,
    PerfReport,
    heater_power,
    perf_report,
    perf_table,
    total_area,
    total_power,
)

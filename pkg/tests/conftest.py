import pytest

from siphsim.devices import DeviceChain
from siphsim.engine import EngineConfig, MvmEngine
from siphsim.material import default_silicon_material
from siphsim.wdm import PlannerConfig, plan_mrm_radii, plan_rtr_spectrum


@pytest.fixture(scope="session")
def silicon():
    return default_silicon_material()


@pytest.fixture(scope="session")
def plan32(silicon):
    cfg = PlannerConfig(m=32, delta_lambda_target_nm=0.5)
    return plan_mrm_radii(plan_rtr_spectrum(cfg, silicon), silicon)


@pytest.fixture(scope="session")
def engine32(silicon, plan32):
    cfg = EngineConfig(m=32, l_bits=4, plan=plan32, material=silicon, seed=1234)
    return MvmEngine(cfg).calibrate()


@pytest.fixture(scope="session")
def engine8(silicon):
    plan = plan_mrm_radii(
        plan_rtr_spectrum(PlannerConfig(m=8, delta_lambda_target_nm=2.0), silicon),
        silicon,
    )
    cfg = EngineConfig(m=8, l_bits=4, plan=plan, material=silicon, seed=77)
    return MvmEngine(cfg).calibrate()


def build_engine(m, l_bits=4, seed=0, silicon_mat=None, **engine_kwargs):
    mat = silicon_mat or default_silicon_material()
    plan = plan_mrm_radii(
        plan_rtr_spectrum(
            PlannerConfig(m=m, delta_lambda_target_nm=16.0 / m), mat
        ),
        mat,
    )
    from siphsim.devices import AdcModel, HsDacModel, R2rDacModel

    devices = DeviceChain(
        hs_dac=HsDacModel(l_bits=l_bits),
        r2r_dac=R2rDacModel(l_bits=l_bits),
        adc=AdcModel(l_bits=l_bits),
    )
    cfg = EngineConfig(
        m=m, l_bits=l_bits, plan=plan, material=mat, devices=devices, seed=seed
    )
    return MvmEngine(cfg, **engine_kwargs).calibrate()

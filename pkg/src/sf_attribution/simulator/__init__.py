"""合成事件数据集：漂移的行为者画像、事件发射与虚假旗帜注入。"""
from sf_attribution.simulator.config import SimConfig
from sf_attribution.simulator.dataset_io import read_dataset, write_dataset
from sf_attribution.simulator.generator import (
    Dataset,
    InjectionRecord,
    generate,
    interpretability_fixture,
    is_train_step,
)
from sf_attribution.simulator.profiles import (
    ProfileSet,
    ThreatActorProfile,
    expected_incident_count,
    generate_profiles,
    incident_count_stddev,
    step_drift,
)

__all__ = [
    "SimConfig",
    "ThreatActorProfile",
    "ProfileSet",
    "generate_profiles",
    "step_drift",
    "expected_incident_count",
    "incident_count_stddev",
    "Dataset",
    "InjectionRecord",
    "generate",
    "interpretability_fixture",
    "is_train_step",
    "write_dataset",
    "read_dataset",
]

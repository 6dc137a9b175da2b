from wmlab.data.auxiliary import AuxiliaryData, build_auxiliary, proxy_mode_split
from wmlab.data.containers import Dataset, LabeledImage, load_cached, save_cached
from wmlab.data.sources import load_source, registered_sources
from wmlab.data.triggers import (
    TriggerSpec,
    content_trigger_spec,
    make_unrelated_triggers,
    noise_trigger_spec,
    synthesize_triggers,
)

__all__ = [
    "AuxiliaryData",
    "Dataset",
    "LabeledImage",
    "TriggerSpec",
    "build_auxiliary",
    "content_trigger_spec",
    "load_cached",
    "load_source",
    "make_unrelated_triggers",
    "noise_trigger_spec",
    "proxy_mode_split",
    "registered_sources",
    "save_cached",
    "synthesize_triggers",
]

"""Information gathering in networks under local visibility."""
from .datasets import (
    BundleFormatError,
    DatasetBundle,
    build_er_dataset,
    build_org_hierarchy_dataset,
    build_pa_overlay_dataset,
    load_bundle,
    save_bundle,
)
from .explorer import (
    NetExpParams,
    QuotaUnachievable,
    RunTrace,
    Step,
    brute_force_min_cover,
    centralized_greedy,
    netexp,
    run_baseline,
)
from .graph import (
    FeatureOverlayConfig,
    Graph,
    brute_force_min_cds,
    gen_erdos_renyi,
    gen_feature_overlay,
    gen_preferential_attachment,
    greedy_cds,
    is_connected_subset,
    max_degree,
    neighborhood,
)
from .utility import FeatureTable, Task, feature_coverage, marginal_gain, sample_tasks, task_utility
from .visibility import InvalidChain, VisibilityError, VisibilityView, new_view

__version__ = "0.1.0"

"""Feature selection by greedy minimization of conditional min-entropy.

Shannon-based greedy selection and the MIFS, mRMR, JMI and CMIM scores are
included for comparison, together with an exhaustive minimum-subset solver
and a small evaluation harness.
"""

from .dataset import (
    BinningSpec,
    Dataset,
    DatasetError,
    FeatureColumn,
    generate_fig1_dataset,
    generate_redundant_dataset,
    load_csv,
    load_sparse,
    random_dataset,
    split,
)
from .distribution import JointTable, class_marginal, extend, joint
from .entropy import (
    bayes_error,
    cachin_cond_min_entropy,
    cond_min_entropy,
    cond_mutual_info_min,
    cond_mutual_info_shannon,
    cond_shannon,
    mutual_info_min,
    mutual_info_shannon,
    renyi_entropy,
)
from .evaluation import ClassifierKind, EvalReport, classify, run_pipeline
from .oracle import MinSetResult, brute_force_score, check_local_optimality, min_set_exact
from .selection import Criterion, SelectionTrace, StopRule, greedy_select, score_cmim, score_jmi, score_mifs, score_mrmr

__version__ = "0.1.0"

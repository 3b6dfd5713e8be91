"""Relevance feedback that fuses pseudo-relevance, click, and brain-decoded
relevance signals for document re-ranking, with an EEG decoding path, a
synthetic cohort generator, an adaptive combination-weight search, and a full
split-by-timepoint evaluation harness."""

from .adaptive import (
    ClusterAssignment,
    Scenario,
    SynthesisParams,
    adaptive_search,
    cluster_documents,
    cluster_ground_truth,
    estimate_synthesis_params,
    synth_brain,
    synth_clicks,
)
from .combine import CombinationWeights, WEIGHT_GRID, combine, default_weights, scenario_weights
from .dataio import load_bundle, save_bundle
from .decoder import (
    DecoderConfig,
    DecoderModel,
    DecoderScope,
    PERSONALIZATION_THRESHOLD,
    binarize_grade,
    predict,
    select_model,
    train,
)
from .eeg import EegSegment, differential_entropy, extract_de, preprocess
from .expansion import ExpansionConfig, expand_and_score, rerank_unseen, select_feedback, softmax_weights
from .generator import GeneratorConfig, generate_cohort
from .metrics import auc, mean_average_precision, ndcg_at_k
from .pipeline import (
    DecodedScores,
    ExperimentReport,
    PipelineConfig,
    decode_bundle,
    paired_metric_test,
    run_adaptive_irf,
    run_irf,
    run_rrf,
)
from .sessions import DatasetBundle, ExaminedDoc, Session
from .signals import (
    CosineSimilarityScorer,
    ExaminationRecord,
    brain_scores_select,
    click_scores,
    pseudo_scores,
)
from .types import (
    BrainRFError,
    DataIntegrityError,
    Document,
    RankedList,
    RFMode,
    ScoreVector,
    SynthesisError,
    TrainingError,
    UndefinedMetricError,
    ValidationError,
)

__version__ = "0.1.0"

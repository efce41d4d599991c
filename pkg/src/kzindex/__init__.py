"""K_z continuous research impact index, classical h/g indices and cohort statistics."""

__version__ = "0.1.0"

from .errors import KzError
from .metrics import (
    KzBreakdownRow,
    MetricReport,
    career_length,
    career_zone,
    g_index,
    h_index,
    kz_breakdown,
    kz_score,
    metric_report,
    paper_impact,
    publication_age,
)
from .model import (
    EvaluationContext,
    ProfileSet,
    Publication,
    ResearcherProfile,
    parse_profiles,
    parse_profiles_csv,
    parse_profiles_json,
    validate,
)
from .stats import (
    ContributorThresholds,
    GofReport,
    LogKzStats,
    chi_square_critical,
    chi_square_statistic,
    classify,
    contributor_thresholds,
    expected_frequencies,
    goodness_of_fit,
    log_kz_stats,
    normal_cdf,
    normal_quantile,
)

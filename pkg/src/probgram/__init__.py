"""probgram: noisy-channel string probability simulator and minimal-pair
evaluation toolkit.

Strings are generated by drawing a message, realizing it deterministically,
and corrupting the realization with probability epsilon via a random walk on
a substitution-edit graph. The package computes exact and approximate string
probabilities for such worlds, synthesizes minimal/meaning-matched pairs,
and evaluates how well log probability tracks grammaticality, both on
simulated worlds and on scored-sentence dumps from real language models.
"""

__version__ = "0.1.0"

from .worlds import (World, WorldConfig, WorldError, Message, StringForm, Vocab,
                     build_cube_world, build_random_world, edit_neighbors,
                     message_similarity, world_from_json, world_to_json)
from .genmodel import (GenerationOutcome, PairCriteria, ProbValue, UnknownStringError,
                       classify_grammatical, enumerate_pairs, error_distance,
                       meaning_matched_pairs, message_posterior, pair_id_for,
                       pair_noise_rng, sample_generation, sample_strings,
                       simulate_minimal_pairs, string_prob_approx,
                       string_prob_exact, string_prob_table, top_message)
from .records import PairRecord, RatingRecord, RecordError, ScoredSentence
from .scoring import (MetricConfigError, MetricKind, TokenScores, UnigramTable,
                      bf_uniform, bf_unigram, logprob_sum, mean_logprob, score, slor)
from .stats import (ConstantInputError, RocResult, cosine_distance, empirical_quantile,
                    levenshtein, midranks, pearson_r, quantile_bins, rho_analytic,
                    roc_auc, zscore_within)
from .predictions import (AcceptabilityParams, AnalyticCheck, BinStat, InequalityAgreement,
                          PredictionReport, analytic_check, attach_acceptability,
                          minpair_accuracy, mismatched_pairs, pair_distance, pred1_run,
                          pred2_run, pred3_run, pred3_inequality_check, spearman_trend,
                          synth_acceptability, with_modeled_logprobs)
from .ingest import (FilterResult, IngestError, IngestReport, LineIssue,
                     annotate_distances, build_pairs, build_unigram,
                     filter_levenshtein_quantile, read_judgments_csv, read_scored_jsonl)

__all__ = [name for name in dir() if not name.startswith("_")]

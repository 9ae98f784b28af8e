"""Local constraint-based causal discovery under selection bias.

Library layout: `graph` (mixed graphs), `separation` (sigma/d-separation
oracles), `citest` (finite-sample tests), `patterns` (pattern mining and
scoring), `scm` (linear-Gaussian simulation), `randgraph` (benchmark
graphs), `icp` (invariant-prediction baseline), `enumeration` (proposition
verification), `evaluation` (PR/ROC harness and experiment drivers),
`estimators` (scikit-learn style wrappers) and `cli`.
"""

from .citest import (DataCiModel, Dataset, DecisionPolicy, ThresholdMode,
                     binarize_column, context_invariance_test, decide,
                     fisher_z_pvalue, partial_correlation_test)
from .errors import (BudgetError, DataError, FormatError, GraphError,
                     SelbiasError, SimulationError)
from .estimators import IcpDiscovery, LcdDiscovery, YStructureDiscovery
from .evaluation import (GroundTruth, ancestral_ground_truth, average_precision,
                         bootstrap_scores, intervention_ground_truth,
                         oracle_pattern_check, pr_curve, roc_curve,
                         run_fixed_graph_experiment,
                         run_random_graph_experiment)
from .enumeration import (enumerate_dmgs, verify_extended_ystructure,
                          verify_no_sound_3var_rule)
from .graph import (Dmg, JciFlag, NodeRole, ancestors, descendants,
                    format_graph, latent_projection, load_graph, parse_graph,
                    save_graph, strongly_connected_component, validate_jci1)
from .icp import IcpResult, boost_preselect, icp_predict, icp_predictions
from .patterns import (PatternHit, Prediction, find_lcd, find_y_structures,
                       score_predictions)
from .randgraph import GraphSamplerParams, fixed_graph, sample_random_graph
from .scm import (Intervention, LinearScm, SelectionRule,
                  check_identifiability, sample_weights, simulate,
                  simulate_paired)
from .separation import (CiModel, CiVerdict, GraphOracle, Verdict,
                         check_lemma1, d_separated, is_minimal_dependence,
                         is_minimal_independence, oracle_ci, sigma_separated)

__version__ = "0.1.0"

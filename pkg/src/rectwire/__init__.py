"""Rectified wire networks: per-edge rectifiers, monotone conservative
training, and the exact-update oracle."""

from .builders import (assign_balanced_weights, build_expander,
                       complete_boolean_network, expander_edge_count,
                       final_layer_bias_matrix, fragment_biases,
                       fragment_network, path_counts, q0_eval,
                       rescale_to_unit_weights, three_var_network)
from .circuits import (Circuit, CompiledCircuit, compile_circuit,
                       evaluate_circuit, format_circuit, parse_circuit,
                       random_circuit)
from .dynamics import (ActivationState, classify, evaluate, gradient,
                       velocity, zero_eps)
from .encode import (CdfEncoder, Sample, encode_boolean, encode_symbolic,
                     fit_cdf, load_idx_images, load_idx_labels,
                     load_mnist_binarized, read_dataset, write_dataset,
                     write_symbolic_dataset)
from .experiments import ExperimentResult, PRESETS, run_experiment
from .network import (FileFormatError, Network, load_biases, load_network,
                      save_biases, save_network, validate_biases)
from .oracle import (MpInstance, OracleResult, build_instance,
                     solve_conservative, solve_conservative_scipy,
                     update_cost)
from .rng import SplitMix64
from .sda import (AGGRESSIVE, ALREADY_CORRECT, IRREVERSIBLE_TIE, MADE_STRICT_MIN,
                  MADE_ZERO, ULTRA, SdaOutcome, sda_update, step_size)
from .synthdata import (MARKOV_ALPHABET, MARKOV_T, NmfSpec,
                        all_boolean_functions, boolean_dataset,
                        markov_dataset, markov_optimal_rate,
                        markov_optimal_rate_mc, markov_strings,
                        named_boolean_functions, nmf_dataset, nmf_eval,
                        nmf_eval_batch)
from .trainer import (BatchEvaluator, EvalStats, TrainReport, TrainResult,
                      TrialResult, evaluate_dataset, train_online,
                      train_to_convergence)

__version__ = "0.1.0"

from .experiments import CSV_COLUMNS, experiment_ratio, repeat_mirrored, run_trial, save_table
from .oracles import exact_min_two_bins, oracle_balls_bins, oracle_binom_tail, sweep_case_analysis
from .stats import mean_ci, ratio_ci, trial_rng, z_value
from .verify import verify_chunk_contract

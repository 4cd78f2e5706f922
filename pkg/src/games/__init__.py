from .engine import ESCAPE, EscapeOption, GameState, IllegalMoveError, run_kserver, run_mss, run_mts
from .layered import export_layered_graph, layered_shortest_path, mts_to_layered_graph
from .ledger import CostLedger, StepRecord
from .offline import BudgetExceededError, OfflineResult, opt_cost_dp, opt_cost_mts
from .translations import MirroredKServer, MirroredMts, mss_to_kserver, mss_to_mts

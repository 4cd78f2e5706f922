from .base import OnlineAlgorithm
from .escape import EscapeAwareWrapper, escape_aware_wrapper
from .greedy import Greedy, greedy
from .offline_agents import PathFollower, TrajectoryAgent
from .random_eligible import RandomEligible, random_eligible
from .registry import available_algorithms, make_algorithm, parse_algorithms, register_algorithm
from .stay_inside import StayInside
from .work_function import WorkFunction, work_function

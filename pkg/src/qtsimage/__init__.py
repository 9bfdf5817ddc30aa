"""Image computation for quantum transition systems with tensor decision diagrams."""
from .benchmarks import bitflip_system, gen_benchmark
from .circuit import Circuit, Gate, KrausOperator, QuantumTransitionSystem, circuit_to_network, gate_tensor, index_graph
from .estimator import ImageComputer
from .exceptions import (CapacityError, ComputationTimeout, NonProjectorError, OrderError, ParameterError, ParseError,
                         PreconditionError, QtsError, ShapeError)
from .image import ImageResult, ReachResult, addition_image, basic_image, contraction_image, image, reachable
from .partition import plan_addition, plan_contraction
from .qtsfile import dump, load, parse_transition_system, serialize
from .subspace import (Subspace, basis_decompose, equal_subspace, first_nonzero_column, initial_subspace, join, ket_state,
                       projector_from_basis)
from .tdd import Tdd, TddEngine

__version__ = "0.1.0"

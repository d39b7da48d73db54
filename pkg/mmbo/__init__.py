__version__ = '0.1.0'

from mmbo.arens import ArensDecomposition, decompose, reconstruct
from mmbo.bdspace import (BDVector, TestFunction1D, apply_ddot, apply_gdot,
                          boundary_eval, boundary_space, project_boundary)
from mmbo.const import BDKind, MonotoneKind, ScenarioKind
from mmbo.errors import (InconsistencyError, InvalidGram, MalformedScenario,
                         MMBOError, NotMaximalMonotone, NotMonotone,
                         NotSelfadjoint, SingularSystem)
from mmbo.hilbert import HilbertSpace, Subspace, Vector
from mmbo.relation import (LinearRelation, MonotonicityReport, adjoint,
                           compose, inverse, invert_pre_post,
                           is_maximal_monotone, is_monotone, is_selfadjoint,
                           one_plus, post_set, pre_set, random_monotone,
                           resolvent_apply)
from mmbo.scenarios import (get_block_operator, get_scenario,
                            get_scenario_meta, load_scenario)
from mmbo.semigroup import EvolutionConfig, evolve
from mmbo.systemnode import (BlockOperator, TraceSystem, domain_membership,
                             forward_h, reverse_construct)

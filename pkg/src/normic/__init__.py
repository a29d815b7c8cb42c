"""Question-relative belief and knowledge from probability thresholds.

Worlds compatible with the agent's evidence are ordered by how probable
their answer to a contextually given question is; belief keeps the worlds
whose typicality survives the threshold, and knowledge extends belief per
either a transitive or a margin-for-error definition.  The package covers
exact discrete models, a world-relative generalization, continuous
questions ordered by probability density, de se questions, and the named
case studies built from all of these.
"""

from .core import (FalseDiscoveryError, InexpressibleEvidenceError,
                   KnowledgeVariant, NormalityStructure, RevisionReport,
                   StructureError, World, believed_state_set,
                   revision_report)
from .genprob import (AnswerSpectrum, ConditioningError, ModelError,
                      ProbabilityStructure, Question, SufficiencyRule,
                      UndecidedAtDepth, believed_answers, believed_states,
                      check_threshold, generate, likeliness, threshold_holds,
                      typicality)
from .relnorm import (RelativizedNormalityStructure,
                      WorldlyProbabilityStructure, rel_check_threshold,
                      rel_generate, rel_likeliness, rel_typicality)
from .density import (BeliefRegion, Density, DensityNormality,
                      DensityStructure, HybridModel, belief_region,
                      density_normality, gaussian, hybrid_normality,
                      sublevel_mass, uniform, wrapped_normal)
from .dese import (DecayInterval, DecayModel, DeSeQuestion,
                   decay_belief_interval, decay_density, dedicto_contrast,
                   dese_likeliness, dese_spectrum)
from .scenarios import (BeliefSummary, HeadingScenario, RacingQuestion,
                        build_clock, build_decay, build_flipping,
                        build_heading, build_lottery, build_weighing,
                        heading_checks, racing_believed, racing_spectrum,
                        racing_summary, racing_table)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

from prim.agents.backend import (Backend, BackendRejection, BackendUnreachable, ChatMessage,
                                 FixtureMissing, LiveBackend, LLMBackendConfig, ScriptedBackend,
                                 complete)
from prim.agents.literature import (FixtureSource, PaperEntry, QuotaExceeded,
                                    SemanticScholarSource, SourceUnreachable, search_literature)
from prim.agents.prompts import PromptTemplate, catalog
from prim.agents.roles import (NO_HYPOTHESIS, NO_LITERATURE, ExtractionError, Hypothesis,
                               LiteratureInsights, PaperSummary, PreconditionError,
                               ResearchConstraints, ResearchGoal, UnknownVariable,
                               UnparseableAfterRetries, ValueOutOfBounds, build_search_query,
                               clarify_constraints, clarify_goal, extract_experiment_variables,
                               format_parameter_space, generate_hypothesis, parse_variables,
                               refine_hypothesis, render_analysis, summarize_literature,
                               write_report)

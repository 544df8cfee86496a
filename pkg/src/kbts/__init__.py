"""Knowledge-based PC troubleshooting toolkit.

Rule storage and persistence, a forward-chaining inference engine with
an interactive questionnaire, a fuzzy classifier for power-on self-test
beep patterns, a knowledge agent that grows the rule-base from curated
web pages, and an HTTP service plus CLI tying it together.
"""

from .agent import SourceConfig, SyncReport, sync
from .engine import (
    EmptyRuleBaseError,
    InvalidChoiceError,
    Question,
    Session,
    SessionClosedError,
    answer,
    build_decision_tree,
    forward_chain,
    start_session,
)
from .fuzzy import (
    BeepPattern,
    LinguisticValue,
    NegativeDurationError,
    PostDiagnosis,
    classify,
    defuzzify,
    diagnose_beep,
    fuzzify,
)
from .rules import (
    Diagnosis,
    DuplicateRuleError,
    EmptyFieldError,
    Fact,
    KnowledgeBaseError,
    ParseError,
    Rule,
    RuleBase,
    RuleNotFoundError,
    load,
    normalize,
    save,
)
from .seed import seed_rulebase, seed_rules
from .service import ServiceConfig, create_app, load_config

__version__ = "0.1.0"

__all__ = [
    "BeepPattern",
    "Diagnosis",
    "DuplicateRuleError",
    "EmptyFieldError",
    "EmptyRuleBaseError",
    "Fact",
    "InvalidChoiceError",
    "KnowledgeBaseError",
    "LinguisticValue",
    "NegativeDurationError",
    "ParseError",
    "PostDiagnosis",
    "Question",
    "Rule",
    "RuleBase",
    "RuleNotFoundError",
    "ServiceConfig",
    "Session",
    "SessionClosedError",
    "SourceConfig",
    "SyncReport",
    "answer",
    "build_decision_tree",
    "classify",
    "create_app",
    "defuzzify",
    "diagnose_beep",
    "forward_chain",
    "fuzzify",
    "load",
    "load_config",
    "normalize",
    "save",
    "seed_rulebase",
    "seed_rules",
    "sync",
    "__version__",
]

"""tenselab: a tense-logic workbench.

Formula language, finite (general) frames, exhaustive semantics,
parameterized formula families, t-morphism search, frame combinators, and
exact symbolic models of two infinite general frames, with verification
suites over all of it.
"""

__version__ = "0.1.0"

"""
Rating lexicons and their joins with embedding spaces.
"""
from .norms import (
    JoinedSample,
    NormLexicon,
    composition_diagnostics,
    join,
    join_summary,
    load_lexicon,
    save_lexicon,
    zscore,
)

__all__ = [
    'JoinedSample', 'NormLexicon', 'composition_diagnostics', 'join', 'join_summary',
    'load_lexicon', 'save_lexicon', 'zscore',
]

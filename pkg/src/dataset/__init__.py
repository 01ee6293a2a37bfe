"""Pitching corpus: domain types, file I/O, top-5 selection, restriction and synthesis.

Submodules are imported explicitly (`src.dataset.models`, `src.dataset.corpus`,
...); signal preparation depends on the domain types here while corpus loading
depends on signal preparation.
"""

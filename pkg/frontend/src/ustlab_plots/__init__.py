"""Figure rendering for ustlab CSV/JSON artifacts.

Figures are derived artifacts: every statistic shown is recomputed from the
published files with the same conventions the reports use, never invented
here.
"""

__version__ = "0.1.0"

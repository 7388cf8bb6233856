"""Backend selector for the layout optimizer.

Prefers the compiled extension and falls back to the pure-Python twin when
the extension is unavailable (no compiler at install time, unsupported
platform).  ``TRIVIEW_LAYOUT=python`` forces the fallback, which is useful
for parity checks and benchmarks.
"""

from __future__ import annotations

import os

if os.environ.get("TRIVIEW_LAYOUT", "").lower() == "python":
    from triview._layout_py import BACKEND, optimize_layout
else:
    try:
        from triview._layout_native import BACKEND, optimize_layout
    except ImportError:
        from triview._layout_py import BACKEND, optimize_layout

__all__ = ["BACKEND", "optimize_layout"]

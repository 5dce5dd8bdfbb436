"""Rewrite tests/golden/*.txt from the current build.

Run from the repository root after an intended output change:

    python3 tests/regen_golden.py
"""

import io
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from golden_cases import CASES  # noqa: E402

from premia.cli import run  # noqa: E402


def main():
    out_dir = ROOT / "tests" / "golden"
    out_dir.mkdir(exist_ok=True)
    for stem, argv in CASES.items():
        buf = io.StringIO()
        code = run(argv, stdout=buf, stderr=io.StringIO())
        if code != 0:
            raise SystemExit(f"{stem}: exit status {code}")
        (out_dir / f"{stem}.txt").write_text(buf.getvalue(), encoding="utf-8")
        print(f"wrote {stem}.txt")


if __name__ == "__main__":
    main()

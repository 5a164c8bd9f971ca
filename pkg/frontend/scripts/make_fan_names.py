"""Regenerate src/fanNames.json from the scoring table.

Run from the repository root with the package installed:

    python3 frontend/scripts/make_fan_names.py
"""
import json
from pathlib import Path

from mahjong_lab.scoring import default_fan_table

out = Path(__file__).resolve().parent.parent / "src" / "fanNames.json"
names = {str(p.pattern_id): p.name for p in default_fan_table()}
out.write_text(json.dumps(names, indent=2) + "\n")
print(f"wrote {len(names)} pattern names to {out}")

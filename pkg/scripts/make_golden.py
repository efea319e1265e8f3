"""Regenerate tests/golden/*.json from configs/demo/*.json.

Run after an intentional change to report contents; the golden test then
checks byte equality against these files.
"""

from pathlib import Path

from formalkp.cli import main

ROOT = Path(__file__).resolve().parents[1]


def demo_commands():
    for cfg in sorted((ROOT / "configs" / "demo").glob("*.json")):
        group, action = cfg.stem.split("_", 1)
        yield cfg, group, action


if __name__ == "__main__":
    out_dir = ROOT / "tests" / "golden"
    out_dir.mkdir(parents=True, exist_ok=True)
    for cfg, group, action in demo_commands():
        target = out_dir / f"{cfg.stem}.json"
        code = main([group, action, str(cfg), "--out", str(target)])
        print(f"{cfg.stem:20s} exit={code}")

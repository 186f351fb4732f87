"""Utility functions for the stage cache"""
import os
import sys
import shutil
import argparse
from pathlib import Path

# Add project root to path
sys.path.append(str(Path(__file__).resolve().parent.parent))

from walgebra.config import settings


def cache_entries(cache_dir=None):
    """
    List cached orbits with their stage files

    Args:
        cache_dir: Stage artifact directory (defaults to settings.CACHE_DIR)
    """
    cache_dir = Path(cache_dir or settings.CACHE_DIR)
    if not cache_dir.exists():
        return {}
    return {
        entry.name: sorted(p.stem for p in entry.glob("*.json"))
        for entry in sorted(cache_dir.iterdir())
        if entry.is_dir()
    }


def clean_cache(cache_dir=None, orbit_key=None, stale_only=False):
    """
    Clean the stage cache to start fresh

    Args:
        cache_dir: Stage artifact directory (defaults to settings.CACHE_DIR)
        orbit_key: Only clean this orbit, e.g. ``F4-a2``
        stale_only: Only remove leftover temporary files from interrupted writes
    """
    cache_dir = Path(cache_dir or settings.CACHE_DIR)
    if not cache_dir.exists():
        return 0

    targets = [cache_dir / orbit_key] if orbit_key else [p for p in cache_dir.iterdir() if p.is_dir()]
    removed = 0
    for directory in targets:
        if not directory.exists():
            continue
        if stale_only:
            for item in directory.glob(".*.tmp"):
                os.unlink(item)
                removed += 1
        else:
            removed += len(list(directory.glob("*.json")))
            shutil.rmtree(directory)
        print(f"Cleaned directory: {directory}")
    return removed


def main():
    parser = argparse.ArgumentParser(description="Inspect or clean the stage cache")
    parser.add_argument("--cache-dir", default=None, help="Stage artifact directory")
    parser.add_argument("--orbit", default=None, help="Orbit cache key, e.g. F4-a2")
    parser.add_argument("--stale-only", action="store_true", help="Only remove temporary files")
    parser.add_argument("--list", action="store_true", help="List cached stages instead of cleaning")
    args = parser.parse_args()

    if args.list:
        for key, stages in cache_entries(args.cache_dir).items():
            print(f"{key}: {', '.join(stages)}")
        return
    removed = clean_cache(args.cache_dir, args.orbit, args.stale_only)
    print(f"Removed {removed} files")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""
Script to export the orbit catalog as JSON and check it against the printed rows
"""
import sys
import json
import argparse
from pathlib import Path
from tqdm import tqdm

# Add project root to path
sys.path.append(str(Path(__file__).resolve().parent.parent))

from walgebra.config import settings
from walgebra.exceptions import WAlgebraError
from walgebra.models.schemas import PipelineConfig
from walgebra.services.catalog import MAX_CATALOG_RANK, catalog, catalog_json
from walgebra.services.golden import catalog_failures
from walgebra.services.pipeline import run


def export(args):
    """Write the generated catalog"""
    rows = catalog_json(args.max_rank)
    output = Path(args.output)
    output.parent.mkdir(parents=True, exist_ok=True)
    with open(output, "w", encoding="utf-8") as handle:
        json.dump(rows, handle, indent=1, sort_keys=True)
        handle.write("\n")
    print(f"Wrote {len(rows)} catalog rows to {output}")


def check_printed():
    """Compare against golden/catalog.json"""
    failures = catalog_failures()
    for failure in failures:
        print(f"  {failure}")
    print(f"Printed rows: {'OK' if not failures else f'{len(failures)} mismatches'}")
    return not failures


def check_realized(args):
    """Run the algebraic stages for every realized row"""
    rows = [row for row in catalog(args.max_rank) if row.realized]
    bad = []
    for row in tqdm(rows, desc="Realized orbits"):
        config = PipelineConfig(
            series=row.series,
            rank=row.rank,
            label=row.label,
            stages=["build", "sl2", "cartan"],
            use_cache=False,
            seed=settings.DEFAULT_SEED,
        )
        try:
            report = run(config)
        except WAlgebraError as exc:
            bad.append(f"{row.name}: {exc}")
            continue
        bad.extend(f"{row.name}: {c.name}" for c in report.certificates if not c.passed)
    for line in bad:
        print(f"  {line}")
    print(f"Checked {len(rows)} realized orbits, {len(bad)} problems")
    return not bad


def main():
    parser = argparse.ArgumentParser(description="Export and check the orbit catalog")
    parser.add_argument("--output", default=str(settings.CACHE_DIR / "catalog.json"), help="Where to write the catalog")
    parser.add_argument("--max-rank", type=int, default=MAX_CATALOG_RANK, help="Largest classical rank to list")
    parser.add_argument("--check-realized", action="store_true", help="Build sl2 data and the opposite Cartan for realized rows")
    args = parser.parse_args()

    export(args)
    ok = check_printed()
    if args.check_realized:
        ok = check_realized(args) and ok
    sys.exit(0 if ok else 2)


if __name__ == "__main__":
    main()

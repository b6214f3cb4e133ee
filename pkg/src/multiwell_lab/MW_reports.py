# ---- This is <MW_reports.py> ----

"""
Check records, JSON reports and the constants manifest
"""

import datetime
import json
import pathlib
from dataclasses import dataclass, field, asdict

from loguru import logger

import numpy as np

import multiwell_lab.MW_lab_config as MW_conf

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

@dataclass
class CheckRecord:
    """Outcome of one inequality or identity check

    slack is max(0, value - bound) / scale; a record with premise False is
    vacuous and never counts as a failure.
    """
    name: str
    value: float
    bound: float
    slack: float
    tolerance: float
    passed: bool
    region: object = None
    premise: object = None
    details: dict = field(default_factory=dict)

    @property
    def vacuous(self):
        return self.premise is False

    def to_dict(self):
        return asdict(self)

# -------------------------------------------------------------------------- #

def inequality_record(
    name,
    value,
    bound,
    scale=None,
    tolerance=None,
    region=None,
    premise=None,
    details=None,
):
    """Build a CheckRecord for the inequality value <= bound"""

    if tolerance is None:
        tolerance = MW_conf.CHECK_TOLERANCES.get(name, 0.0)
    if scale is None:
        scale = max(abs(float(bound)), abs(float(value)), 1e-300)

    slack = max(0.0, float(value) - float(bound)) / max(float(scale), 1e-300)
    passed = True if premise is False else bool(slack <= tolerance)

    if premise is False:
        logger.debug(f'{name}: premise not met, check vacuous')
    elif not passed:
        logger.warning(f'{name}: {value:.6g} > {bound:.6g} (slack {slack:.3g} > tol {tolerance:.3g})')

    return CheckRecord(
        name = name,
        value = float(value),
        bound = float(bound),
        slack = float(slack),
        tolerance = float(tolerance),
        passed = passed,
        region = region,
        premise = premise,
        details = details or {},
    )

# -------------------------------------------------------------------------- #

def all_passed(records):
    """True when every non-vacuous record passed"""
    return all(r.passed for r in records if not r.vacuous)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def to_jsonable(obj):
    """Convert numpy and dataclass content into plain JSON types"""

    if isinstance(obj, CheckRecord):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(key): to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        if not np.isfinite(value):
            return None
        return value
    if isinstance(obj, pathlib.Path):
        return str(obj)
    return obj

# -------------------------------------------------------------------------- #

def dumps(obj):
    """Deterministic JSON text"""
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + '\n'

# -------------------------------------------------------------------------- #

def write_json(path, obj):
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as fp:
        fp.write(dumps(obj))
    return path

# -------------------------------------------------------------------------- #

def write_report(run_dir, suite, records, meta=None):
    """Write an append-only report file for one suite

    The file name carries a timestamp (and a counter on collision); the body
    holds no wall-clock value so repeated checks give identical content.

    Returns
    -------
    path : path of the written report
    """

    run_dir = pathlib.Path(run_dir)
    stamp = datetime.datetime.now().strftime('%Y%m%dT%H%M%S')
    path = run_dir / f'report_{suite}_{stamp}.json'
    n = 1
    while path.exists():
        path = run_dir / f'report_{suite}_{stamp}_{n}.json'
        n += 1

    body = {
        'suite': suite,
        'meta': meta or {},
        'n_records': len(records),
        'n_failed': sum(1 for r in records if not r.vacuous and not r.passed),
        'n_vacuous': sum(1 for r in records if r.vacuous),
        'passed': all_passed(records),
        'records': records,
    }

    logger.info(f'Writing report {path.name} ({body["n_failed"]} failed of {len(records)})')
    return write_json(path, body)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def load_manifest(path):
    """Load a constants manifest (empty manifest if the file does not exist)"""

    path = pathlib.Path(path)
    if not path.is_file():
        return {'entries': []}
    with open(path) as fp:
        return json.load(fp)

# -------------------------------------------------------------------------- #

def manifest_entry(potential, family_id, constant, value, grid_range, eps_range, fit_date=None):
    return {
        'potential': potential,
        'family_id': family_id,
        'constant': constant,
        'value': value,
        'fit_date': fit_date or datetime.date.today().isoformat(),
        'grid_range': list(grid_range),
        'eps_range': list(eps_range),
    }

# -------------------------------------------------------------------------- #

def update_manifest(path, entries):
    """Insert or replace entries keyed by (potential, family_id, constant)"""

    manifest = load_manifest(path)
    keyed = {(e['potential'], e['family_id'], e['constant']): e for e in manifest['entries']}
    for entry in entries:
        keyed[(entry['potential'], entry['family_id'], entry['constant'])] = entry
        logger.debug(f'manifest: {entry["constant"]} = {entry["value"]}')

    manifest['entries'] = [keyed[key] for key in sorted(keyed)]
    write_json(path, manifest)
    return manifest

# -------------------------------------------------------------------------- #

def manifest_value(manifest, constant, potential=None, family_id=None):
    """Most specific stored value of a constant, None if absent"""

    for entry in manifest.get('entries', []):
        if entry['constant'] != constant:
            continue
        if potential is not None and entry['potential'] != potential:
            continue
        if family_id is not None and entry['family_id'] != family_id:
            continue
        return entry['value']
    return None

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

# ---- End of <MW_reports.py> ----

# ---- This is <test_cli.py> ----

import json

import numpy as np
import pytest

import multiwell_lab.MW_lab_config as MW_conf
import multiwell_lab.MW_errors as MW_err
import multiwell_lab.MW_levelsets as MW_lvl
import multiwell_lab.MW_lab_cli as MW_cli
from multiwell_lab.MW_lab_wrappers.mw_lab import main

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

CONFIG = {
    'potential': 'gl-scalar',
    'domain': {'shape': 'rectangle', 'bounds': [0.0, 1.0, 0.0, 1.0]},
    'boundary': 'two-phase:0',
    'eps_list': [0.25, 0.125],
    'cells_per_eps': 4,
}

def _write_config(tmp_path, name='demo', **changes):
    path = tmp_path / f'{name}.json'
    path.write_text(json.dumps({**CONFIG, **changes}))
    return path

@pytest.fixture(scope='module')
def run_dir(tmp_path_factory):
    tmp_path = tmp_path_factory.mktemp('cli')
    out = tmp_path / 'run'
    assert main(['solve', '--config', str(_write_config(tmp_path)), '--out', str(out), '--loglevel', 'WARNING']) == 0
    return out

# -------------------------------------------------------------------------- #

def test_load_config(tmp_path):
    cfg = MW_cli.load_config(_write_config(tmp_path, extra_key=1))
    assert cfg.family_id == 'demo'
    assert cfg.eps_list == [0.25, 0.125]
    assert cfg.suites == MW_cli.SUITES

@pytest.mark.parametrize('changes', [
    {'eps_list': [0.1, 0.2]},
    {'eps_list': 'small'},
    {'cells_per_eps': 2},
    {'domain': {'shape': 'triangle'}},
    {'suites': ['potential', 'nonsense']},
    {'solver': {'no_such_option': 1}},
])
def test_load_config_rejects(tmp_path, changes):
    with pytest.raises(MW_err.ConfigError):
        MW_cli.load_config(_write_config(tmp_path, **changes))

def test_load_config_missing_key(tmp_path):
    path = tmp_path / 'partial.json'
    path.write_text(json.dumps({'potential': 'gl-scalar'}))
    with pytest.raises(MW_err.ConfigError):
        MW_cli.load_config(path)

def test_parse_suites():
    assert MW_cli.parse_suites('all') == MW_cli.SUITES
    assert MW_cli.parse_suites('clearing, potential') == ['clearing', 'potential']
    with pytest.raises(MW_err.ConfigError):
        MW_cli.parse_suites('')

# -------------------------------------------------------------------------- #

def test_version():
    assert main(['version']) == 0

def test_usage_errors(tmp_path):
    assert main([]) == 2
    assert main(['frobnicate']) == 2

    malformed = tmp_path / 'bad.json'
    malformed.write_text('{"potential": "gl-scalar",')
    assert main(['solve', '--config', str(malformed), '--out', str(tmp_path / 'run')]) == 2

    assert main(['check', '--out', str(tmp_path / 'missing')]) == 2
    assert main(['check', '--out', str(tmp_path / 'missing'), '--suite', 'bogus']) == 2
    assert main(['constants', '--out', str(tmp_path / 'missing')]) == 2

# -------------------------------------------------------------------------- #

def test_solve_writes_run(run_dir):
    manifest = json.loads((run_dir / MW_cli.RUN_MANIFEST).read_text())
    assert manifest['family_id'] == 'demo'
    assert [m['epsilon'] for m in manifest['members']] == [0.25, 0.125]
    assert all((run_dir / m['file']).is_file() for m in manifest['members'])
    assert all(m['converged'] for m in manifest['members'])

def test_solve_does_not_overwrite(tmp_path, run_dir):
    before = (run_dir / MW_cli.RUN_MANIFEST).read_text()
    config = _write_config(tmp_path, eps_list=[0.5, 0.25])
    assert main(['solve', '--config', str(config), '--out', str(run_dir)]) == 0
    assert (run_dir / MW_cli.RUN_MANIFEST).read_text() == before

def test_load_run(run_dir):
    run = MW_cli.load_run(run_dir)
    assert len(run.solved) == 2
    assert run.M0 == pytest.approx(max(r.energy for r in run.family))

def test_check_potential_suite(run_dir):
    assert main(['check', '--out', str(run_dir), '--suite', 'potential']) == 0
    reports = sorted(run_dir.glob('report_potential_*.json'))
    assert reports
    body = json.loads(reports[-1].read_text())
    assert body['passed']
    assert body['meta']['family_id'] == 'demo'

def test_resolve_eta0(run_dir):
    run = MW_cli.load_run(run_dir)
    assert MW_cli.resolve_eta0(run, '0.3') == 0.3
    with pytest.raises(MW_err.ConfigError):
        MW_cli.resolve_eta0(run, 'never')
    with pytest.raises(MW_err.ConfigError):
        MW_cli.resolve_eta0(run, '-1')
def test_check_eta0_option(run_dir):
    assert main(['check', '--out', str(run_dir), '--suite', 'potential', '--eta0', 'bogus']) == 2
    # no clearing suite has written eta0 for this run
    assert main(['check', '--out', str(run_dir), '--suite', 'potential', '--eta0', 'manifest']) == 2
    assert main(['check', '--out', str(run_dir), '--suite', 'potential', '--eta0', '-0.5']) == 2

def _new_reports(run_dir, suite, before):
    return sorted(set(run_dir.glob(f'report_{suite}_*.json')) - before)

def test_check_reports_are_deterministic(run_dir):
    suites = ['potential', 'functionals']
    bodies = []
    for _ in range(2):
        before = {s: set(run_dir.glob(f'report_{s}_*.json')) for s in suites}
        main(['check', '--out', str(run_dir), '--suite', ','.join(suites), '--loglevel', 'WARNING'])
        bodies.append([_new_reports(run_dir, s, before[s])[0].read_bytes() for s in suites])
    assert bodies[0] == bodies[1]

# -------------------------------------------------------------------------- #

@pytest.fixture(scope='module')
def two_phase_run(tmp_path_factory):
    tmp_path = tmp_path_factory.mktemp('two_phase')
    out = tmp_path / 'run'
    config = _write_config(tmp_path, name='two_phase', eps_list=[0.1, 0.05], cells_per_eps=8)
    assert main(['solve', '--config', str(config), '--out', str(out), '--loglevel', 'WARNING']) == 0
    return out

def test_levelsets_vacuous_across_interface(two_phase_run):
    run = MW_cli.load_run(two_phase_run)
    result = run.solved[-1]
    with pytest.raises(MW_err.BoundaryConditionViolated):
        disk = MW_cli._center_disk(result.field.grid)
        MW_lvl.radius_set_measure(result.field, run.potential, run.constants, 0, 0.25 * run.constants.mu0, 0.75, disk)

    records = MW_cli._member_levelsets(run, result)
    by_name = {}
    for r in records:
        by_name.setdefault(r.name, []).append(r)
    for name in ('radius_set', 'good_circle', 'level_flux'):
        assert by_name[name] and all(r.vacuous for r in by_name[name])

def test_functionals_emit_positivity(two_phase_run):
    run = MW_cli.load_run(two_phase_run)
    records = MW_cli._member_functionals(run, run.solved[-1])
    positivity = [r for r in records if r.name == 'discrepancy_positivity']
    assert len(positivity) == 1
    assert not positivity[0].vacuous
    assert np.isfinite(positivity[0].details['xi_min'])
    assert positivity[0].details['margin'] == pytest.approx(0.2)

def test_check_all_suites_two_phase(two_phase_run):
    code = main(['check', '--out', str(two_phase_run), '--suite', 'all', '--loglevel', 'WARNING'])
    assert code in (0, 1)
    for suite in MW_cli.SUITES:
        assert sorted(two_phase_run.glob(f'report_{suite}_*.json')), suite

    names = {r['name'] for suite in MW_cli.SUITES
             for r in json.loads(sorted(two_phase_run.glob(f'report_{suite}_*.json'))[-1].read_text())['records']}
    for name in ('select_level', 'good_circle', 'connectivity', 'tangent_cone', 'first_variation',
                 'discrepancy_positivity', 'clearing_out', 'length_bound'):
        assert name in names, name

    manifest = json.loads((two_phase_run / MW_conf.MW_LAB_MANIFEST).read_text())
    assert 'eta0' in {e['constant'] for e in manifest['entries']}
    assert main(['check', '--out', str(two_phase_run), '--suite', 'concentration', '--eta0', 'manifest',
                 '--loglevel', 'WARNING']) in (0, 1)

def test_concentrate_two_phase(two_phase_run):
    code = main(['concentrate', '--out', str(two_phase_run), '--overwrite', '--loglevel', 'WARNING'])
    assert code in (0, 1)
    summary = json.loads((two_phase_run / 'concentration' / 'sstar_summary.json').read_text())
    assert summary['n_components'] == 1
    assert summary['total_length'] == pytest.approx(1.0, abs=0.15)
    assert summary['total_length'] <= summary['length_bound']
    assert (two_phase_run / 'concentration' / 'hopf_frame.csv').is_file()

    cells = np.loadtxt(two_phase_run / 'concentration' / 'sstar_cells.csv', delimiter=',', skiprows=1)
    assert np.all(np.abs(cells[:, 1] - 0.5) <= 0.15)

# -------------------------------------------------------------------------- #

# ---- End of <test_cli.py> ----

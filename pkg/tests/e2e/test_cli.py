"""
E2E tests: the rank2sim command line from arguments to files on disk.
"""

import json

import pandas as pd
import pytest

from rank2sim import io
from rank2sim.main import main
from tests.fixtures.model_specs import (
    ER_KERNEL,
    classic_document,
    duality_spec,
    kernel_document,
    light_bipartite_spec,
)

pytestmark = pytest.mark.e2e

SMALL = dict(n_ladder=(50, 100), replicas=8, limit_replicas=8)
PATH_NAMES = ('N1', 'N2', 'X11', 'X12', 'X21', 'X22', 'U2X21', 'V')


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ('RANK2SIM_SEED', 'RANK2SIM_THREADS', 'RANK2SIM_OUT'):
        monkeypatch.delenv(name, raising=False)


def _write_config(tmp_path, document: dict) -> str:
    path = tmp_path / 'config.json'
    path.write_text(json.dumps(document))
    return str(path)


def _write_spec(tmp_path, spec) -> str:
    path = tmp_path / 'spec.json'
    io.write_spec(path, spec)
    return str(path)


# ============================================================
# CONVERT
# ============================================================

class TestConvert:

    def test_biper(self, tmp_path):
        out = tmp_path / 'out'
        code = main(['convert', 'biper', '--n', '1000', '--m', '10000', '--lambda12', '1.0', '--out', str(out)])
        assert code == 0
        spec = io.read_spec(out / 'spec.json')
        assert spec.Q[0, 0] == 0.0 and spec.Q[0, 1] > 0
        limit = json.loads((out / 'limit.json').read_text())
        assert limit['limit']['lambda'] == pytest.approx(2.0)

    def test_sbm(self, tmp_path):
        out = tmp_path / 'out'
        code = main(['convert', 'sbm', '--n1', '500', '--n2', '500', '--k-tilde', '1,1,1,1',
                     '--mu', '0.5,0.5', '--out', str(out)])
        assert code == 0
        assert (out / 'spec.json').exists()
        assert set(json.loads((out / 'limit.json').read_text())) >= {'chi', 'u', 'v'}

    def test_bad_matrix_exits_2(self, tmp_path, capsys):
        code = main(['convert', 'sbm', '--n1', '5', '--n2', '5', '--k-tilde', '1,1,1',
                     '--mu', '0.5,0.5', '--out', str(tmp_path)])
        assert code == 2
        assert 'comma-separated' in capsys.readouterr().err


# ============================================================
# SAMPLE / EXPLORE
# ============================================================

class TestSampleGraph:

    def test_writes_tables(self, tmp_path):
        spec = _write_spec(tmp_path, duality_spec())
        assert main(['sample-graph', '--spec', spec, '--seed', '3', '--out', str(tmp_path / 'a')]) == 0
        comps = pd.read_csv(tmp_path / 'a' / 'components.csv')
        assert comps['mass1'].sum() == pytest.approx(2.5)
        assert comps['mass2'].sum() == pytest.approx(2.0)
        assert (tmp_path / 'a' / 'edges.csv').exists()

    def test_seed_is_reproducible(self, tmp_path):
        spec = _write_spec(tmp_path, duality_spec())
        for name in ('a', 'b'):
            assert main(['sample-graph', '--spec', spec, '--seed', '11', '--out', str(tmp_path / name)]) == 0
        assert (tmp_path / 'a' / 'edges.csv').read_bytes() == (tmp_path / 'b' / 'edges.csv').read_bytes()

    def test_rung_of_config(self, tmp_path):
        cfg = _write_config(tmp_path, classic_document(**SMALL))
        assert main(['sample-graph', '--config', cfg, '--n', '50', '--out', str(tmp_path / 'g')]) == 0
        assert (tmp_path / 'g' / 'components.csv').exists()


class TestExplore:

    def test_paths_written(self, tmp_path):
        spec = _write_spec(tmp_path, duality_spec())
        assert main(['explore', '--spec', spec, '--seed', '5', '--out', str(tmp_path)]) == 0
        for name in PATH_NAMES:
            assert (tmp_path / 'paths' / f'{name}.csv').exists()

    def test_bipartite(self, tmp_path):
        spec = _write_spec(tmp_path, light_bipartite_spec(200, 2000))
        assert main(['explore', '--spec', spec, '--bipartite', '--seed', '5', '--out', str(tmp_path)]) == 0
        assert (tmp_path / 'paths' / 'V.csv').exists()

    def test_zero_diagonal_exits_2(self, tmp_path, capsys):
        spec = _write_spec(tmp_path, light_bipartite_spec(200, 2000))
        assert main(['explore', '--spec', spec, '--out', str(tmp_path)]) == 2
        assert 'rank2sim:' in capsys.readouterr().err


# ============================================================
# LIMIT / EXPERIMENT / RESIDUALS
# ============================================================

class TestLimit:

    def test_zeta_and_dumped_paths(self, tmp_path):
        cfg = _write_config(tmp_path, classic_document(**SMALL))
        out = tmp_path / 'out'
        assert main(['limit', '--config', cfg, '--replicas', '5', '--dump-paths', '1', '--out', str(out)]) == 0
        zeta = pd.read_csv(out / 'zeta.csv')
        assert set(zeta['replica']) <= set(range(5))
        assert (out / 'paths' / 'limit_0.csv').exists()
        assert not (out / 'paths' / 'limit_1.csv').exists()

    def test_missing_config_exits_2(self, tmp_path, capsys):
        assert main(['limit', '--out', str(tmp_path)]) == 2
        assert '--config' in capsys.readouterr().err


class TestExperiment:

    def test_small_run(self, tmp_path):
        cfg = _write_config(tmp_path, classic_document(**SMALL))
        out = tmp_path / 'out'
        assert main(['experiment', '--config', cfg, '--out', str(out)]) in (0, 1)
        report = json.loads((out / 'report.json').read_text())
        assert report['complete'] is True
        assert [r['n'] for r in report['rungs']] == [50, 100]

    def test_seed_override(self, tmp_path):
        cfg = _write_config(tmp_path, classic_document(**SMALL))
        main(['experiment', '--config', cfg, '--seed', '99', '--out', str(tmp_path / 'out')])
        assert json.loads((tmp_path / 'out' / 'report.json').read_text())['seed'] == 99

    def test_seed_precedence(self, tmp_path, monkeypatch):
        cfg = _write_config(tmp_path, classic_document(**SMALL))
        monkeypatch.setenv('RANK2SIM_SEED', '50')
        main(['experiment', '--config', cfg, '--out', str(tmp_path / 'env')])
        main(['experiment', '--config', cfg, '--seed', '99', '--out', str(tmp_path / 'cli')])
        assert json.loads((tmp_path / 'env' / 'report.json').read_text())['seed'] == 50
        assert json.loads((tmp_path / 'cli' / 'report.json').read_text())['seed'] == 99

    def test_bad_seed_exits_2(self, tmp_path):
        cfg = _write_config(tmp_path, classic_document(**SMALL))
        assert main(['experiment', '--config', cfg, '--seed=-4', '--out', str(tmp_path)]) == 2

    def test_missing_config_file_exits_2(self, tmp_path):
        assert main(['experiment', '--config', str(tmp_path / 'nope.json'), '--out', str(tmp_path)]) == 2

    def test_failed_rung_reports_partial(self, tmp_path, capsys):
        doc = kernel_document('interacting', ER_KERNEL, [[0.0, 0.0], [0.0, 0.0]], (50,), 4, 4)
        cfg = _write_config(tmp_path, doc)
        out = tmp_path / 'out'
        assert main(['experiment', '--config', cfg, '--out', str(out)]) == 2
        assert 'partial report' in capsys.readouterr().err
        assert json.loads((out / 'report.json').read_text())['complete'] is False


class TestResiduals:

    def test_table(self, tmp_path):
        cfg = _write_config(tmp_path, classic_document(**SMALL))
        assert main(['residuals', '--config', cfg, '--out', str(tmp_path)]) == 0
        frame = pd.read_csv(tmp_path / 'residuals.csv')
        assert sorted(frame['n'].unique().tolist()) == [50, 100]

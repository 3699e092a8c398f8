"""
End-to-end tests of the topo-sft command line.
"""

import csv
import io
import json

import pytest

from src.main import build_parser, collect_overrides, main


@pytest.fixture
def cli(workdir, config_file):
    """Run main() inside the working directory with the small test config."""
    def run(*argv):
        return main([str(a) for a in argv])
    return run


@pytest.fixture
def plane_file(cli, workdir):
    assert cli('generate', '--kind', 'plane', '--seed', 3, '--out', 'plane.json') == 0
    return workdir / 'plane.json'


@pytest.fixture
def recon_file(cli, plane_file, workdir):
    assert cli('reconstruct', plane_file, '--out', 'plane.recon.json') == 0
    return workdir / 'plane.recon.json'


class TestParser:
    """Test argument parsing and override collection."""

    def test_missing_subcommand(self):
        with pytest.raises(SystemExit) as info:
            main([])
        assert info.value.code == 2

    def test_unknown_format_choice(self):
        with pytest.raises(SystemExit) as info:
            main(['export', 'x.json', '--format', 'obj'])
        assert info.value.code == 2

    def test_kernel_flag_sets_both_warps(self):
        args = build_parser().parse_args(['reconstruct', 'in.json', '--out', 'o.json',
                                          '--kernel', 'lbw', '--seed', '9'])
        overrides = collect_overrides(args)
        assert overrides['kernels.eta'] == overrides['kernels.delta'] == 'lbw'
        assert overrides['kernels.phi'] is None
        assert overrides['refine.seed'] == 9


class TestGenerate:
    """Test the generate command."""

    def test_hole(self, cli, workdir, capsys):
        assert cli('generate', '--kind', 'hole', '--out', 'hole.json') == 0
        data = json.loads((workdir / 'hole.json').read_text())
        assert data['type'] == 'dataset'
        assert len(data['sources']) == 30
        assert len(data['gt_points']) == 30
        assert data['metadata']['kind'] == 'HoleDisconnection'
        assert data['metadata']['seed'] == 42
        assert 'HoleDisconnection seed=42' in capsys.readouterr().out

    def test_unknown_kind(self, cli, workdir):
        assert cli('generate', '--kind', 'torus', '--out', 'x.json') == 2
        assert not (workdir / 'x.json').exists()

    def test_refuses_to_clobber(self, cli, plane_file):
        before = plane_file.read_bytes()
        assert cli('generate', '--kind', 'plane', '--seed', 4, '--out', plane_file) == 3
        assert plane_file.read_bytes() == before
        assert cli('generate', '--kind', 'plane', '--seed', 4, '--out', plane_file, '--force') == 0
        assert plane_file.read_bytes() != before

    def test_n_points_flag(self, cli, workdir):
        assert cli('generate', '--kind', 'simple', '--n-points', 12, '--out', 's.json') == 0
        assert len(json.loads((workdir / 's.json').read_text())['sources']) == 12

    def test_invalid_config_value(self, cli, workdir):
        assert cli('generate', '--kind', 'plane', '--n-points', 2, '--out', 'p.json') == 2


class TestReconstruct:
    """Test the reconstruct command."""

    def test_refined_with_trace(self, recon_file, workdir):
        data = json.loads(recon_file.read_text())
        assert data['mode'] == 'refined'
        assert len(data['points']) == 30
        trace = json.loads((workdir / 'plane.recon.trace.json').read_text())
        assert trace['type'] == 'trace'
        assert 2 <= len(trace['costs']) <= 3
        assert data['summary']['iterations'] == len(trace['costs'])

    def test_skip_refine(self, cli, plane_file, workdir):
        assert cli('reconstruct', plane_file, '--out', 'base.json', '--skip-refine') == 0
        data = json.loads((workdir / 'base.json').read_text())
        assert data['mode'] == 'baseline'
        assert data['trace'] is None
        assert data['points'] == data['initial_points']
        assert not (workdir / 'base.trace.json').exists()

    def test_lbw_kernel(self, cli, plane_file, workdir):
        assert cli('reconstruct', plane_file, '--out', 'lbw.json', '--kernel', 'lbw',
                   '--skip-refine') == 0
        assert json.loads((workdir / 'lbw.json').read_text())['kernels']['eta'] == 'lbw'

    def test_explicit_trace_path(self, cli, plane_file, workdir):
        assert cli('reconstruct', plane_file, '--out', 'r.json', '--trace', 'costs.json',
                   '--max-iters', 1) == 0
        assert len(json.loads((workdir / 'costs.json').read_text())['costs']) == 1

    def test_missing_input(self, cli):
        assert cli('reconstruct', 'missing.json', '--out', 'r.json') == 4


class TestEvaluate:
    """Test the evaluate command."""

    def test_refined(self, cli, recon_file, plane_file, capsys):
        capsys.readouterr()
        assert cli('evaluate', recon_file, plane_file) == 0
        out = capsys.readouterr().out
        assert 'initial RMSE' in out
        assert 'refined RMSE' in out

    def test_without_ground_truth(self, cli, recon_file, plane_file, workdir):
        data = json.loads(plane_file.read_text())
        del data['gt_points']
        stripped = workdir / 'nogt.json'
        stripped.write_text(json.dumps(data))
        assert cli('evaluate', recon_file, stripped) == 6

    def test_length_mismatch(self, cli, recon_file, workdir):
        assert cli('generate', '--kind', 'plane', '--n-points', 12, '--out', 'small.json') == 0
        assert cli('evaluate', recon_file, workdir / 'small.json') == 4


class TestExport:
    """Test the export command."""

    def test_pointcloud(self, cli, recon_file, workdir):
        assert cli('export', recon_file, '--format', 'pointcloud') == 0
        ply = (workdir / 'plane.recon.ply').read_text()
        assert ply.startswith('ply\n')
        assert 'element vertex 60' in ply
        assert 'element edge 30' in ply

    def test_svg_to_explicit_path(self, cli, recon_file, workdir):
        assert cli('export', recon_file, '--format', 'scatter-svg', '--out', 'view.svg') == 0
        assert (workdir / 'view.svg').read_text().startswith('<svg')

    def test_malformed_json(self, cli, workdir):
        (workdir / 'broken.json').write_text('{"format_version": 1,')
        assert cli('export', 'broken.json', '--format', 'csv') == 4


class TestBenchmark:
    """Test the benchmark command."""

    @pytest.mark.slow
    def test_csv_is_reproducible(self, cli, workdir, capsys):
        assert cli('benchmark', '--seeds', 1, '--csv', 'first.csv') == 0
        assert 'Combined (pooled)' in capsys.readouterr().out
        assert cli('benchmark', '--seeds', 1, '--csv', 'second.csv', '--parallel', 2) == 0
        first = (workdir / 'first.csv').read_bytes()
        assert first == (workdir / 'second.csv').read_bytes()
        assert len(first.decode().splitlines()) == 1 + 4 + 4 + 2

    def test_bad_seed_list(self, cli):
        assert cli('benchmark', '--seeds', '5..1') == 2

    @pytest.mark.slow
    def test_default_sizes_with_threaded_gradients(self, cli, workdir):
        """Seed 42 at default sizes gives the same CSV bytes with one or two gradient workers."""
        (workdir / 'defaults.yaml').write_text('{}\n')
        common = ('benchmark', '--config', 'defaults.yaml', '--seeds', 42)
        assert cli(*common, '--csv', 'serial.csv') == 0
        assert cli(*common, '--workers', 2, '--csv', 'threaded.csv') == 0
        serial = (workdir / 'serial.csv').read_bytes()
        assert serial == (workdir / 'threaded.csv').read_bytes()

        rows = [row for row in csv.DictReader(io.StringIO(serial.decode())) if row['scope'] == 'kind']
        assert len(rows) == 4
        helped = [float(row['refined_rmse']) <= float(row['initial_rmse']) for row in rows]
        assert sum(helped) >= 3

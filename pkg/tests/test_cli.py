import json
import pytest

from qlat import utils
from qlat.cli import (
    EXIT_FAILURE, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE, UsageError,
    _parse_t_values, main, parse_config)
from qlat.utils import Caps

BINARY_23 = '{"coeffs": [[1, 1], [6]]}'


@pytest.fixture(autouse=True)
def clean_config(monkeypatch, tmp_path):
    monkeypatch.setattr(utils, 'CONFIG_PATH', tmp_path / 'absent.json')
    for name in Caps._fields:
        monkeypatch.delenv(f'QLAT_CAP_{name.upper()}', raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


class TestParseConfig(object):
    def test_caps(self):
        config = parse_config(
            ['genus', '-L', 'i4', '--cap-classes', '5', '--cap-modpe', '9'])
        assert config.command == 'genus'
        assert config.args['L'] == 'i4'
        assert config.caps.classes == 5
        assert config.caps.modpe == 9
        assert config.mode == 'json'
        assert config.seed == 0

    def test_max_classes(self):
        config = parse_config(
            ['spn', '-L', 'i4', '--cap-classes', '5', '--max-classes', '3'])
        assert config.caps.classes == 3

    def test_global_options(self):
        config = parse_config(
            ['corpus', '--det-bound', '256', '--count', '2', '--seed', '4',
             '--table', '--n-jobs', '2'])
        assert config.seed == 4
        assert config.mode == 'table'
        assert config.caps.n_jobs == 2
        assert config.args == {
            'm': 1, 'n': 4, 'det_bound': 256, 'count': 2}

    @pytest.mark.parametrize(
        'argv',
        [[],
         ['heights'],
         ['padic'],
         ['reduce'],
         ['bogus', '-L', 'i4'],
         ['genus', '-L', 'i4', '--json', '--table']]) # yapf: disable
    def test_usage(self, argv):
        with pytest.raises(UsageError):
            parse_config(argv)

    def test_t_values(self):
        assert _parse_t_values('1..3, 7,') == [1, 2, 3, 7]


class TestMain(object):
    @pytest.mark.parametrize('argv', [[], ['heights'], ['count', '-M', 'one']])
    def test_usage_exit(self, capsys, argv):
        code, out = run_json(capsys, *argv)
        assert code == EXIT_USAGE
        assert out['error'] == 'UsageError'

    def test_count(self, capsys):
        code, out = run_json(capsys, 'count', '-M', 'one', '-L', 'i4',
                             '--primitive')
        assert code == EXIT_OK
        assert out['r'] == 8
        assert out['r_all'] == 8

    def test_count_negative(self, capsys):
        code, out = run_json(capsys, 'count', '-M', 'three', '-L', 'kitaoka')
        assert code == EXIT_NEGATIVE
        assert out['r_all'] == 0

    def test_count_all_classes(self, capsys):
        code, out = run_json(capsys, 'count', '-M', 'one', '-L', 'i4',
                             '--all-classes')
        assert code == EXIT_OK
        assert out['r_gen'] == '8/1'
        assert out['per_class'] == [{'r': 8, 'r_all': 8}]

    def test_malformed_json(self, capsys):
        code, out = run_json(capsys, 'reduce', '-L', '{"coeffs": [[1, 2]')
        assert code == EXIT_USAGE
        assert 'error' in out

    def test_not_positive_definite(self, capsys):
        code, out = run_json(
            capsys, 'reduce', '-L', '{"coeffs": [[1, 3], [1]]}')
        assert code == EXIT_USAGE
        assert out['error'] == 'ValueError'

    def test_reduce(self, capsys):
        code, out = run_json(
            capsys, 'reduce', '-L', '{"coeffs": [[5, 8], [5]]}')
        assert code == EXIT_OK
        assert out['reduced'] == {'n': 2, 'coeffs': [[2, 2], [5]]}
        assert out['detE'] == 36

    def test_lattice_file(self, capsys, tmp_path):
        path = tmp_path / 'L.json'
        path.write_text(json.dumps({'n': 2, 'coeffs': [[5, 8], [5]]}))
        code, out = run_json(capsys, 'reduce', '-L', str(path))
        assert code == EXIT_OK
        assert out['reduced']['coeffs'] == [[2, 2], [5]]

    def test_missing_file(self, capsys, tmp_path):
        code, _ = run_json(capsys, 'reduce', '-L', str(tmp_path / 'L.json'))
        assert code == EXIT_USAGE

    def test_isom(self, capsys):
        code, out = run_json(capsys, 'isom', '-A', 'binary5',
                             '-B', '{"coeffs": [[2, 2], [3]]}')
        assert code == EXIT_NEGATIVE
        assert out == {'isometric': False, 'U': None}

    def test_aut(self, capsys):
        code, out = run_json(capsys, 'aut', '-L', 'i3')
        assert code == EXIT_OK
        assert out['order'] == 48

    def test_genus_table(self, capsys):
        code, out = run(capsys, 'genus', '-L', BINARY_23, '--table')
        assert code == EXIT_OK
        assert 'aut_order' in out

    def test_genus_cap(self, capsys):
        code, out = run_json(capsys, 'genus', '-L', BINARY_23,
                             '--max-classes', '1')
        assert code == EXIT_FAILURE
        assert out['error'] == 'ResourceError'

    def test_localrep(self, capsys):
        code, out = run_json(capsys, 'localrep', '-M', '{"coeffs": [[7]]}',
                             '-L', 'i3')
        assert code == EXIT_NEGATIVE
        code, _ = run_json(capsys, 'localrep', '-M', 'three', '-L', 'kitaoka',
                           '--prime', '2')
        assert code == EXIT_OK

    def test_ratio(self, capsys):
        code, out = run_json(capsys, 'ratio', '-L', 'i4', '--t', '1..3')
        assert code == EXIT_OK
        assert out['classes'] == 1
        assert [row['r'] for row in out['rows']] == [8, 24, 32]

    @pytest.mark.parametrize(
        'argv',
        [['verify-lgp', '-M', 'one', '-L', 'i3'],
         ['ratio', '-L', 'i3', '--t', '1..3']]) # yapf: disable
    def test_precondition_exit(self, capsys, argv):
        code, out = run_json(capsys, *argv)
        assert code == EXIT_FAILURE
        assert out['error'] == 'PreconditionError'

    def test_heights(self, capsys):
        code, out = run_json(capsys, 'heights', 'content', '--w', '["1/2", 1]')
        assert code == EXIT_OK
        assert out['squared'] == '5/1'
        code, out = run_json(capsys, 'heights', 'lieso', '-L', 'i3')
        assert out['dimension'] == 3
        assert out['height']['squared'] == '8/1'
        code, out = run_json(capsys, 'heights', 'stab', '-L', 'i3',
                             '--W', '[[1, 0, 0]]')
        assert out['dimension'] == 1

    def test_padic_lift(self, capsys):
        system = '{"vars": 1, "polys": [[[1, [2]], [-2, [0]]]]}'
        code, out = run_json(capsys, 'padic', 'lift', '--system', system,
                             '--x0', '[3]', '--p', '7', '--e', '2')
        assert code == EXIT_OK
        assert out['x'] == [10]

    def test_padic_kgen(self, capsys):
        nilpotents = json.dumps([[[0, 1], [0, 0]]] * 3)
        code, out = run_json(capsys, 'padic', 'kgen', '--nilpotents',
                             nilpotents, '--m-dim', '3', '--p', '5')
        assert code == EXIT_NEGATIVE

    def test_corpus_is_reproducible(self, capsys):
        argv = ['corpus', '--det-bound', '256', '--count', '2', '--seed', '5']
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert first[0] == EXIT_OK
        assert first == second
        assert len(json.loads(first[1])) == 2

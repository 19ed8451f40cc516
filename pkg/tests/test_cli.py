"""
Test suite for cli.py
Tests argument parsing, exit statuses and the emitted JSON and TSV documents
"""

import json
import os
import sys

import jsonschema
import pytest
from pydantic import ValidationError

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from cli import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, HANDLERS, JobSpec, main, parse_mu, run
from root_datum import build_root_datum
from utils import ConfigManager, ParseError


def run_json(command, group=None, **parameters):
    job = JobSpec(command=command, group=group, parameters=parameters, output='json')
    status, text = run(job)
    return status, json.loads(text)


class TestParseMu:
    """Test cocharacter arguments"""

    @pytest.mark.parametrize("tag,text,expected", [
        ("GL3", "1,0,-1", (1, 0, -1)),
        ("GL3", " 2, 1, 0 ", (2, 1, 0)),
        ("GL3", "w1+w2", (2, 1, 0)),
        ("GL3", "-w1", (-1, 0, 0)),
        ("B2", "2w1", (2, 0)),
        ("B3", "w1+2*w3", (1, 0, 2)),
    ])
    def test_valid(self, tag, text, expected):
        assert parse_mu(build_root_datum(tag), text) == expected

    @pytest.mark.parametrize("tag,text", [
        ("GL3", ""),
        ("GL3", "1,0"),
        ("GL3", "a,b,c"),
        ("GL3", "w3"),
        ("GL3", "w1+x"),
        ("SL2", "w1"),
    ])
    def test_invalid(self, tag, text):
        with pytest.raises(ParseError):
            parse_mu(build_root_datum(tag), text)


class TestJobSpec:
    """Test the validated job model"""

    def test_default_formats(self):
        assert JobSpec(command='bgmu').output_format == 'tsv'
        assert JobSpec(command='tilting-table').output_format == 'tsv'
        assert JobSpec(command='describe').output_format == 'json'
        assert JobSpec(command='bgmu', output='json').output_format == 'json'

    def test_round_trip(self):
        job = JobSpec(command='averaging', group='U3', parameters={'mu': '1,0,0', 'phi': '2'}, cap=100)
        assert JobSpec.model_validate_json(job.model_dump_json()) == job

    @pytest.mark.parametrize("fields", [
        {'command': 'unknown'},
        {'command': 'bgmu', 'cap': 0},
        {'command': 'bgmu', 'output': 'xml'},
    ])
    def test_invalid(self, fields):
        with pytest.raises(ValidationError):
            JobSpec(**fields)

    def test_every_command_has_a_handler(self):
        for command in ['describe', 'bgmu', 'weights', 'check-character', 'tilting',
                        'tilting-table', 'averaging', 'schema']:
            assert command in HANDLERS


class TestCommands:
    """Test each command through run()"""

    def test_describe_unitary(self):
        status, document = run_json('describe', '2A2')
        assert status == EXIT_OK
        assert document['coinvariants'] == "Z + Z/2"
        assert document['fundamental_group'] == "Z"

    def test_bgmu_gl2(self):
        status, document = run_json('bgmu', 'GL2', mu='1,0')
        assert status == EXIT_OK
        assert len(document['unramified']) == 1
        assert document['polygons'] == [{'slope': '(1,0)', 'degree': '1'},
                                        {'slope': '(1/2,1/2)', 'degree': '0'}]

    def test_bgmu_tsv(self):
        status, text = run(JobSpec(command='bgmu', group='GL2', parameters={'mu': '1,0'}))
        assert status == EXIT_OK
        assert text.startswith("slope\tdegree\n(1,0)\t1\n(1/2,1/2)\t0\n")
        assert "class\tslope\tkappa\tlevi\tW_b\tdegree" in text

    def test_bgmu_non_split_note(self):
        status, document = run_json('bgmu', 'U3', mu='1,0,0')
        assert status == EXIT_OK
        assert 'polygons' not in document
        assert len(document['unramified']) == 2

    def test_weights(self):
        status, document = run_json('weights', 'GL3', mu='1,0,-1')
        assert status == EXIT_OK
        assert document['dimension'] == 8
        assert {'weight': '(0,0,0)', 'multiplicity': 2} in document['weights']

    def test_weights_coinvariant(self):
        status, document = run_json('weights', 'U3', mu='1,0,0', coinvariant='true')
        assert status == EXIT_OK
        assert [row['dimension'] for row in document['classes']] == [1, 1, 1]

    def test_check_character(self):
        status, document = run_json('check-character', 'GL2', chi='2,1')
        assert status == EXIT_OK
        assert document['holds'] is True
        status, document = run_json('check-character', 'GL2', chi='q,1')
        assert status == EXIT_CHECK_FAILED
        assert document['holds'] is False

    def test_check_character_levels(self):
        status, document = run_json('check-character', 'SL2', chi='-1', level='weakly_normalized_regular')
        assert status == EXIT_CHECK_FAILED
        assert document['ladder']['generic'] is True

    def test_check_character_mu_regularity(self):
        status, document = run_json('check-character', 'GL2', chi='2,1', mu='1,0')
        assert status == EXIT_OK
        assert document['mu_regularity']['holds'] is True

    def test_tilting(self):
        status, document = run_json('tilting', 'GL2', mu='3,0', ell='2')
        assert status == EXIT_OK
        assert document['tilting'] is True
        assert document['type_a_criterion'] is True
        status, document = run_json('tilting', 'GL2', mu='2,0', ell='2')
        assert status == EXIT_CHECK_FAILED
        assert document['terms'] == {'(0)': 1}

    def test_tilting_table(self):
        status, text = run(JobSpec(command='tilting-table', group='G2'))
        assert status == EXIT_OK
        assert text == "coweight\tprimes\tvery_good\nw1\t{3}\tl != 2,3\nw2\t{2}\tl != 2,3\n"

    def test_tilting_table_strict(self):
        job = JobSpec(command='tilting-table', group='F4', parameters={'strict': 'true'}, output='json')
        status, text = run(job)
        assert status == EXIT_CHECK_FAILED
        assert len(json.loads(text)['discrepancies']) == 2
        status, _ = run(JobSpec(command='tilting-table', group='F4'))
        assert status == EXIT_OK

    def test_averaging(self):
        status, document = run_json('averaging', 'U3', mu='1,0,0', phi='2')
        assert status == EXIT_OK
        assert document['verdict'] == 'PASS'
        assert 'class' in document['strata'][0]

    def test_schema(self):
        status, document = run_json('schema', kind='averaging')
        assert status == EXIT_OK
        assert 'verdict' in document['required']

    def test_deterministic(self):
        job = JobSpec(command='averaging', group='GL3', parameters={'mu': '2,1,0', 'phi': '2,3,5'})
        assert run(job) == run(job)


class TestErrors:
    """Usage errors exit with status 2 and an error document"""

    @pytest.mark.parametrize("command,group,parameters,details", [
        ('bgmu', 'GL2', {}, '--mu'),
        ('describe', None, {}, '--group'),
        ('tilting', 'GL2', {'mu': '1,0', 'ell': 'x'}, 'x'),
        ('check-character', 'GL2', {'chi': '2,1', 'level': 'very'}, 'very'),
        ('schema', None, {'kind': 'nope'}, 'nope'),
    ])
    def test_parse_errors(self, command, group, parameters, details):
        status, text = run(JobSpec(command=command, group=group, parameters=parameters))
        document = json.loads(text)
        assert status == EXIT_USAGE
        assert document['error'] is True
        assert document['details'] == details

    @pytest.mark.parametrize("command,group,parameters,error", [
        ('describe', 'H3', {}, 'UnsupportedTypeError'),
        ('bgmu', 'GL2', {'mu': '0,1'}, 'PreconditionError'),
        ('tilting', 'GL2', {'mu': '1,0', 'ell': '4'}, 'PreconditionError'),
        ('check-character', 'GL2', {'chi': '0,1'}, 'ParseError'),
    ])
    def test_domain_errors(self, command, group, parameters, error):
        status, text = run(JobSpec(command=command, group=group, parameters=parameters))
        assert status == EXIT_USAGE
        document = json.loads(text)
        assert document['error'] is True
        if error != 'ParseError':
            assert document['details'] == error


class TestSchemas:
    """Emitted JSON documents follow the published schemas"""

    @staticmethod
    def load_schema(kind):
        status, schema = run_json('schema', kind=kind)
        assert status == EXIT_OK
        return schema

    @pytest.mark.parametrize("command,group,parameters", [
        ('describe', 'U3', {}),
        ('describe', 'B2', {}),
        ('bgmu', 'GL3', {'mu': '1,0,-1'}),
        ('bgmu', 'U3', {'mu': '1,0,0'}),
        ('weights', 'G2', {'mu': 'w2'}),
        ('weights', 'U3', {'mu': '1,0,0', 'coinvariant': 'true'}),
        ('check-character', 'GL2', {'chi': '2,1', 'mu': '1,0'}),
        ('check-character', 'U3', {'chi': 'q', 'level': 'weakly_generic'}),
        ('tilting', 'GL3', {'mu': '1,0,-1', 'ell': '3'}),
        ('tilting-table', 'G2', {}),
        ('averaging', 'GL3', {'mu': '2,1,0', 'phi': '2,3,5'}),
    ])
    def test_documents(self, command, group, parameters):
        _, document = run_json(command, group, **parameters)
        jsonschema.validate(instance=document, schema=self.load_schema(command))

    @pytest.mark.parametrize("command,group,parameters", [
        ('bgmu', 'GL2', {}),
        ('describe', 'H3', {}),
    ])
    def test_error_document(self, command, group, parameters):
        status, document = run_json(command, group, **parameters)
        assert status == EXIT_USAGE
        jsonschema.validate(instance=document, schema=self.load_schema('error'))


class TestMain:
    """Test the argparse entry point"""

    def test_describe(self, capsys):
        assert main(['describe', '--group', 'U3']) == EXIT_OK
        document = json.loads(capsys.readouterr().out)
        assert document['coinvariants'] == "Z + Z/2"

    def test_type_alias(self, capsys):
        assert main(['tilting', '--type', 'GL2', '--mu', '2,0', '--ell', '2']) == EXIT_CHECK_FAILED
        assert json.loads(capsys.readouterr().out)['tilting'] is False

    def test_format_flag(self, capsys):
        assert main(['bgmu', '--group', 'GL2', '--mu', '1,0', '--format', 'json']) == EXIT_OK
        assert len(json.loads(capsys.readouterr().out)['polygons']) == 2

    def test_flags(self, capsys):
        assert main(['weights', '--group', 'U3', '--mu', '1,0,0', '--coinvariant']) == EXIT_OK
        assert capsys.readouterr().out.startswith("class\tdimension\n")

    def test_bad_cap(self, capsys):
        assert main(['describe', '--group', 'GL2', '--cap', 'abc']) == EXIT_USAGE
        assert json.loads(capsys.readouterr().out)['error'] is True

    def test_save_config(self, tmp_path, capsys, monkeypatch):
        monkeypatch.delenv("KOTTWITZ_CAP", raising=False)
        path = tmp_path / "effective.json"
        argv = ['describe', '--group', 'GL2', '--cap', '500', '--format', 'json', '--save-config', str(path)]
        assert main(argv) == EXIT_OK
        capsys.readouterr()
        config = ConfigManager.load_config(str(path))
        assert config['orbit_cap'] == config['weight_cap'] == 500
        assert config['output_format'] == 'json'

    def test_save_config_failure(self, tmp_path, capsys):
        target = tmp_path / "missing" / "effective.json"
        assert main(['describe', '--group', 'GL2', '--save-config', str(target)]) == EXIT_USAGE
        document = json.loads(capsys.readouterr().out)
        assert document['details'] == str(target)

    def test_argparse_usage(self):
        with pytest.raises(SystemExit) as excinfo:
            main(['unknown-command'])
        assert excinfo.value.code == EXIT_USAGE


if __name__ == "__main__":
    pytest.main([__file__])

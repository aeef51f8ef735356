"""
Tests for the shared helpers: configuration sections, RNG substreams and
the function cache.
"""

from dataclasses import dataclass
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from core.cache_utils import cached_function
from core.config import build_section, parse_scalar, read_config_file, set_dotted
from core.exceptions import ConfigurationError, TraceParseError
from core.rng import BLOCK_STEPS, normal_draws, substream


@dataclass(frozen=True)
class _Section:
    rate: float = 1.0
    count: int = 3
    enabled: bool = False
    label: str = 'a'

    def clean(self):
        if self.rate <= 0:
            raise ConfigurationError('rate', 'must be > 0')


class BuildSectionTests(SimpleTestCase):

    def test_defaults(self):
        section = build_section(_Section, {})
        self.assertEqual(section, _Section())

    def test_coercion_from_strings(self):
        section = build_section(_Section, {'rate': '2.5', 'count': '4', 'enabled': 'yes'})
        self.assertEqual(section.rate, 2.5)
        self.assertEqual(section.count, 4)
        self.assertTrue(section.enabled)

    def test_clean_error_is_prefixed(self):
        with self.assertRaises(ConfigurationError) as ctx:
            build_section(_Section, {'rate': 0}, prefix='sim')
        self.assertEqual(str(ctx.exception), 'sim.rate: must be > 0')
        self.assertEqual(ctx.exception.key, 'sim.rate')

    def test_missing_required_key(self):
        with self.assertRaises(ConfigurationError) as ctx:
            build_section(_Section, {'count': 1}, prefix='field', required=('rate',))
        self.assertEqual(str(ctx.exception), 'field.rate: required key is missing')

    def test_unknown_key_rejected(self):
        with self.assertRaises(ConfigurationError) as ctx:
            build_section(_Section, {'speed': 1}, prefix='sim')
        self.assertIn('sim.speed', str(ctx.exception))

    def test_bad_boolean(self):
        with self.assertRaises(ConfigurationError):
            build_section(_Section, {'enabled': 'maybe'})


class ConfigFileTests(SimpleTestCase):

    def test_parse_scalar(self):
        self.assertEqual(parse_scalar('1.5'), 1.5)
        self.assertEqual(parse_scalar('true'), True)
        self.assertEqual(parse_scalar('Match'), 'Match')

    def test_set_dotted_nested(self):
        data = {}
        set_dotted(data, 'behavior.halo_radius', 0.7)
        self.assertEqual(data, {'behavior': {'halo_radius': 0.7}})

    def test_set_dotted_through_scalar_fails(self):
        data = {'behavior': 1}
        with self.assertRaises(ConfigurationError):
            set_dotted(data, 'behavior.halo_radius', 0.7)

    def test_key_value_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'field.cfg'
            path.write_text('# comment\nlength = 8\n\nwidth=5.5\nscenario.name = Match\n')
            data = read_config_file(path)
        self.assertEqual(data, {'length': 8, 'width': 5.5, 'scenario': {'name': 'Match'}})

    def test_key_value_file_bad_line(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'bad.cfg'
            path.write_text('length = 8\nnot an assignment\n')
            with self.assertRaises(ConfigurationError) as ctx:
                read_config_file(path)
        self.assertIn(':2', str(ctx.exception))

    def test_json_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'run.json'
            path.write_text('{"field": {"length": 9}}')
            self.assertEqual(read_config_file(path), {'field': {'length': 9}})


class SubstreamTests(SimpleTestCase):

    def test_same_key_same_draws(self):
        a = substream(7, 'perception', step=3, stream=1).normal(size=5)
        b = substream(7, 'perception', step=3, stream=1).normal(size=5)
        self.assertEqual(a.tolist(), b.tolist())

    def test_different_keys_differ(self):
        a = substream(7, 'perception', step=3).normal()
        b = substream(7, 'perception', step=4).normal()
        c = substream(7, 'simulation', step=3).normal()
        self.assertNotEqual(a, b)
        self.assertNotEqual(a, c)

    def test_block_draws_are_keyed_by_step(self):
        a = normal_draws(7, 'simulation', BLOCK_STEPS + 3, stream=2, width=2)
        b = normal_draws(7, 'simulation', BLOCK_STEPS + 3, stream=2, width=2)
        self.assertEqual(a.shape, (2,))
        self.assertEqual(a.tolist(), b.tolist())
        self.assertNotEqual(a.tolist(), normal_draws(7, 'simulation', BLOCK_STEPS + 4, stream=2, width=2).tolist())
        self.assertNotEqual(a.tolist(), normal_draws(7, 'simulation', 3, stream=2, width=2).tolist())
        with self.assertRaises(ValueError):
            a[0] = 0.0


class CachedFunctionTests(SimpleTestCase):

    def test_result_is_memoized(self):
        calls = []

        @cached_function(prefix='test_square')
        def square(value):
            calls.append(value)
            return value * value

        square.cache_clear()
        self.assertEqual(square(4), 16)
        self.assertEqual(square(4), 16)
        self.assertEqual(calls, [4])


class ExceptionTests(SimpleTestCase):

    def test_trace_parse_error_message(self):
        self.assertEqual(str(TraceParseError(12, 'bad float')), 'line 12: bad float')

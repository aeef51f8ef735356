"""
Tests for run configuration, the runner, trace verification, reports,
SVG rendering, the moving-ball challenge and the management commands.
"""

from dataclasses import replace
import io
import json
import math
from pathlib import Path
import tempfile
import time

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, tag

from core.exceptions import ConfigurationError, TraceParseError
from core.factories import SimulationRunFactory
from perception.noise import NoiseModel
from simulation.scenarios import APPROACH_DRILL, AVOIDANCE_DRILL, MATCH, MOVING_BALL_CHALLENGE
from simulation.state import Event
from simulation.trace import TraceWriter, parse_trace, read_trace

from .challenge import arrival_time, challenge_config, summarize
from .config import load_run_config, parse_seeds, run_config_from_dict
from .models import MatchReportRecord, SimulationRun
from .report import report_from_rows, report_from_trace
from .runner import run_one
from .svg import render_svg, svg_context
from .verify import verify_rows

CHALLENGE_CONFIG = Path(settings.BASE_DIR) / 'config' / 'challenge.json'
AVOIDANCE_CONFIG = Path(settings.BASE_DIR) / 'config' / 'avoidance.json'
MATCH_CONFIG = Path(settings.BASE_DIR) / 'config' / 'match.json'


def trace_text(*events):
    stream = io.StringIO()
    writer = TraceWriter(stream)
    for event in events:
        writer.write_event(event)
    return stream.getvalue()


def rows_of(*events):
    return parse_trace(trace_text(*events))


def params_event(**extra):
    values = {'scenario': MATCH, 'seed': 3, 'v_cap': 0.3, 'd_repel': 0.35, 'influence_radius': 1.5,
              'fov': 2.618, 'max_range': 6.0, 'camera_yaw': 0.0}
    values.update(extra)
    return Event(0.0, 'params', extra=tuple(values.items()))


def cmd_event(time, vx, vy=0.0, distance=None, bearing=0.0, in_speed=0.5, state='GoBehindBallNear'):
    extra = [('state', state), ('vx', vx), ('vy', vy), ('omega', 0.0), ('in_speed', in_speed)]
    if distance is not None:
        extra += [('obs_d', distance), ('obs_b', bearing), ('axis', False)]
    return Event(time, 'cmd', 0, extra=tuple(extra))


def short_config(name=APPROACH_DRILL, duration=3.0, **sections):
    data = {'scenario': {'name': name, 'duration': duration}}
    data.update(sections)
    return run_config_from_dict(data)


class RunConfigTests(SimpleTestCase):

    def write_config(self, directory, data, name='run.json'):
        path = Path(directory) / name
        path.write_text(data if isinstance(data, str) else json.dumps(data))
        return path

    def test_missing_field_length_names_key(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = self.write_config(tmp, {'field': {'width': 6.0}})
            with self.assertRaises(ConfigurationError) as ctx:
                load_run_config(path)
        self.assertEqual(ctx.exception.key, 'field.length')
        self.assertIn('field.length', str(ctx.exception))

    def test_defaults_without_file(self):
        config = load_run_config()
        self.assertEqual(config.field.length, 9.0)
        self.assertEqual(config.seeds, (0,))
        self.assertEqual(config.scenario.name, MATCH)

    def test_unknown_section_rejected(self):
        with self.assertRaises(ConfigurationError) as ctx:
            run_config_from_dict({'weather': {}})
        self.assertEqual(ctx.exception.key, 'weather')

    def test_unknown_key_rejected_with_section(self):
        with self.assertRaises(ConfigurationError) as ctx:
            run_config_from_dict({'sim': {'gravity': 9.8}})
        self.assertEqual(ctx.exception.key, 'sim.gravity')

    def test_overrides_apply_and_validate(self):
        config = load_run_config(overrides=['scenario.duration=5', 'behavior.v_cap=0.25'])
        self.assertEqual(config.scenario.duration, 5.0)
        self.assertEqual(config.behavior.v_cap, 0.25)
        with self.assertRaises(ConfigurationError) as ctx:
            load_run_config(overrides=['field.width=20'])
        self.assertEqual(ctx.exception.key, 'field.length')

    def test_key_value_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = self.write_config(tmp, "# drill\nfield.length=9.0\nfield.width=6.0\nscenario.name=ApproachDrill\n",
                                     name='field.txt')
            config = load_run_config(path, seeds='2..4')
        self.assertEqual(config.scenario.name, APPROACH_DRILL)
        self.assertEqual(config.seeds, (2, 3, 4))

    def test_parse_seeds(self):
        self.assertEqual(parse_seeds('1..3'), (1, 2, 3))
        self.assertEqual(parse_seeds('4,7'), (4, 7))
        self.assertEqual(parse_seeds('5'), (5,))
        self.assertEqual(parse_seeds([9, 8]), (9, 8))
        for bad in ('3..1', 'a..b', '', '-1'):
            with self.assertRaises(ConfigurationError):
                parse_seeds(bad)

    def test_dict_round_trip(self):
        config = load_run_config(overrides=['kick_timing.r_kick=[0.2, 0.1]'], seeds='1,2')
        self.assertEqual(run_config_from_dict(config.to_dict()), config)


class VerifyTests(SimpleTestCase):

    def test_clean_rows(self):
        report = verify_rows(rows_of(
            params_event(),
            cmd_event(0.1, 0.3, distance=2.0),
            Event(0.1, 'obs', 0, 1.0, 0.2, extra=(('item', 'ball'), ('p', 0.8))),
            Event(0.1, 'fsm', 0, extra=(('fsm', 'behaviour'), ('from', 'GoBehindBallFar'),
                                        ('to', 'GoBehindBallNear'), ('reason', 'close'))),
        ))
        self.assertTrue(report.ok)
        self.assertEqual(report.rows_checked, 4)

    def test_over_cap_row_flagged_alone(self):
        report = verify_rows(rows_of(
            params_event(),
            cmd_event(0.1, 0.3, distance=2.0),
            cmd_event(0.2, 0.4, distance=0.5),
            cmd_event(0.3, 0.0, vy=0.2, distance=0.5),
        ))
        self.assertEqual([(v.line_no, v.check) for v in report.violations], [(5, 'radial_cap')])

    def test_out_of_fov_observation(self):
        report = verify_rows(rows_of(
            params_event(),
            Event(0.1, 'obs', 0, -1.0, 0.0, extra=(('item', 'ball'), ('p', 0.9))),
        ))
        self.assertEqual([v.check for v in report.violations], ['fov'])
        self.assertEqual(report.violations[0].line_no, 4)

    def test_beyond_range_observation(self):
        report = verify_rows(rows_of(
            params_event(max_range=3.0),
            Event(0.1, 'obs', 0, 3.5, 0.0, extra=(('item', 'GoalPost'), ('p', 0.9))),
        ))
        self.assertEqual(report.counts(), {'fov': 1})

    def test_undeclared_transition(self):
        report = verify_rows(rows_of(
            Event(0.1, 'fsm', 0, extra=(('fsm', 'behaviour'), ('from', 'Kick'), ('to', 'Dribble'))),
        ))
        self.assertEqual(report.counts(), {'fsm_edge': 1})

    def test_transition_continuity(self):
        report = verify_rows(rows_of(
            Event(0.1, 'fsm', 0, extra=(('fsm', 'behaviour'), ('from', 'GoBehindBallFar'),
                                        ('to', 'GoBehindBallNear'))),
            Event(0.2, 'fsm', 0, extra=(('fsm', 'behaviour'), ('from', 'GoBehindBallFar'),
                                        ('to', 'SearchBall'))),
        ))
        self.assertEqual(report.counts(), {'fsm_continuity': 1})

    def test_far_side_step_and_speed_bound(self):
        report = verify_rows(rows_of(
            cmd_event(0.1, 0.2, vy=0.1, state='GoBehindBallFar'),
            cmd_event(0.2, 0.2, distance=2.0, in_speed=0.1),
        ))
        self.assertEqual(report.counts(), {'far_purity': 1, 'speed_bound': 1})

    def test_waypoint_inside_halo(self):
        report = verify_rows(rows_of(
            Event(0.1, 'halo', 0, 0.1, 0.0, extra=(('ball_x', 0.0), ('ball_y', 0.0), ('radius', 0.65))),
            Event(0.2, 'halo', 0, 0.65, 0.0, extra=(('ball_x', 0.0), ('ball_y', 0.0), ('radius', 0.65))),
        ))
        self.assertEqual(report.counts(), {'halo': 1})

    def test_certainty_bounds(self):
        report = verify_rows(rows_of(
            Event(0.1, 'cluster', 0, 1.0, 0.0, extra=(('label', 'Rival'), ('certainty', 1.2))),
            Event(0.1, 'loc', 0, 0.0, 0.0, 0.0, extra=(('confidence', -0.1),)),
        ))
        self.assertEqual(report.counts(), {'certainty': 2})

    def test_obstacle_contact_flagged(self):
        report = verify_rows(rows_of(
            Event(0.0, 'start', 0, -1.0, 0.0, 0.0, (('team', 'home'), ('radius', 0.15))),
            Event(0.0, 'obstacle', 100, 1.0, 0.0, extra=(('radius', 0.2),)),
            Event(2.0, 'collision', 0, 0.7, 0.0, 0.0, (('other', 'obstacle:100'), ('depth', 0.05))),
            Event(2.0, 'collision', 0, 0.7, 0.0, 0.0, (('other', 'robot:1'), ('depth', 0.01))),
        ))
        self.assertEqual(report.counts(), {'contact': 1})
        self.assertEqual(report.violations[0].line_no, 5)
        self.assertIn('0.300 m from obstacle 100, contact at 0.350 m', report.violations[0].message)

    def test_near_far_flip_on_next_tick_flagged(self):
        def switch(time, source, target):
            return Event(time, 'fsm', 0, extra=(('fsm', 'behaviour'), ('from', source), ('to', target)))

        far, near = 'GoBehindBallFar', 'GoBehindBallNear'
        ball = Event(0.9, 'ball', None, 1.0, 0.0)
        report = verify_rows(rows_of(params_event(perception_period=0.1), ball,
                                     switch(1.0, far, near), switch(1.1, near, far)))
        self.assertEqual(report.counts(), {'hysteresis': 1})
        self.assertEqual(report.violations[0].line_no, 6)

        later = verify_rows(rows_of(params_event(perception_period=0.1), ball,
                                    switch(1.0, far, near), switch(1.3, near, far)))
        self.assertTrue(later.ok)
        kicked = verify_rows(rows_of(params_event(perception_period=0.1), ball, switch(1.0, far, near),
                                     Event(1.05, 'ball', None, 1.6, 0.0), switch(1.1, near, far)))
        self.assertTrue(kicked.ok)


class ReportTests(SimpleTestCase):

    def test_recomputed_from_rows(self):
        rows = rows_of(
            params_event(),
            Event(0.0, 'start', 0, -0.6, 0.0, 0.0, (('team', 'home'), ('label', 'CenterFacingOpponent'))),
            Event(0.0, 'start', 1, 0.6, 0.0, 3.14, (('team', 'away'), ('label', 'SidelineLeft'))),
            Event(1.5, 'lock', 0, extra=(('label', 'CenterFacingOpponent'), ('confirmed', True))),
            Event(1.7, 'lock', 1, extra=(('label', 'SidelineRight'), ('confirmed', True))),
            Event(2.0, 'fsm', 0, extra=(('fsm', 'game'), ('from', 'ScoreGoal'), ('to', 'DefendGoal'))),
            Event(3.0, 'collision', 0, 0.0, 0.0),
            Event(4.0, 'goal', None, 4.6, 0.1, extra=(('team', 'home'),)),
            Event(5.0, 'finish', extra=(('own', 1), ('opponent', 0))),
        )
        report = report_from_rows(rows, 'x.csv')
        self.assertEqual(report.seed, 3)
        self.assertEqual(report.score, (1, 0))
        self.assertEqual([(g.time, g.team) for g in report.goals], [(4.0, 'home')])
        self.assertEqual(report.transitions, {'game:ScoreGoal->DefendGoal': 1})
        self.assertEqual(report.lock_time, 1.5)
        self.assertTrue(report.lock_correct)
        self.assertFalse(report.locks[1].correct)
        self.assertEqual(report.collisions, 1)
        self.assertEqual(report.violations, 0)
        self.assertIsNone(report.challenge)

    def test_score_from_goals_without_finish(self):
        report = report_from_rows(rows_of(
            Event(4.0, 'goal', extra=(('team', 'away'),)),
            Event(9.0, 'goal', extra=(('team', 'away'),)),
        ))
        self.assertEqual(report.score, (0, 2))

    def test_obstacle_contact_fails_the_run(self):
        report = report_from_rows(rows_of(
            Event(0.0, 'start', 0, -1.0, 0.0, 0.0, (('team', 'home'), ('radius', 0.15))),
            Event(0.0, 'obstacle', 100, 0.0, 0.0, extra=(('radius', 0.2),)),
            Event(3.0, 'collision', 0, -0.3, 0.0, 0.0, (('other', 'obstacle:100'), ('depth', 0.05))),
        ))
        self.assertEqual(report.collisions, 1)
        self.assertEqual(report.violations, 1)
        self.assertEqual(report.violation_counts, {'contact': 1})


class RunnerTests(SimpleTestCase):

    def test_same_seed_identical_trace(self):
        config = short_config()
        with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
            a = run_one(config, 7, first)
            b = run_one(config, 7, second)
            self.assertEqual(Path(a.trace_path).read_bytes(), Path(b.trace_path).read_bytes())

    def test_seeds_differ(self):
        config = short_config()
        with tempfile.TemporaryDirectory() as tmp:
            a = run_one(config, 1, tmp)
            b = run_one(config, 2, tmp)
            self.assertNotEqual(Path(a.trace_path).read_bytes(), Path(b.trace_path).read_bytes())

    def test_trace_layout_and_report(self):
        config = short_config(duration=2.0)
        with tempfile.TemporaryDirectory() as tmp:
            report = run_one(config, 5, tmp)
            rows = read_trace(report.trace_path)
            self.assertEqual(report_from_trace(report.trace_path), report)
        self.assertEqual([r.kind for r in rows[:3]], ['field', 'params', 'start'])
        self.assertEqual(rows[-1].kind, 'finish')
        self.assertEqual(report.seed, 5)
        self.assertEqual(report.scenario, APPROACH_DRILL)
        self.assertEqual(report.violations, 0)
        self.assertTrue(any(r.kind == 'cmd' for r in rows))
        self.assertAlmostEqual(rows[-1].time, 2.0)

    def test_avoidance_drill_gets_past_obstacle(self):
        config = short_config(AVOIDANCE_DRILL, duration=30.0)
        with tempfile.TemporaryDirectory() as tmp:
            for seed in (1, 2):
                report = run_one(config, seed, tmp)
                rows = read_trace(report.trace_path)
                obstacle = next(r for r in rows if r.kind == 'obstacle')
                path = [r.x for r in rows if r.kind == 'robot' and r.actor_id == 0]
                self.assertGreater(max(path), obstacle.x, f"seed {seed}")
                self.assertTrue(any(r.kind == 'fsm' and r.extra.get('to') == 'GoBehindBallNear' for r in rows))
                self.assertFalse([r for r in rows if r.kind == 'collision'
                                  and r.extra.get('other', '').startswith('obstacle:')])
                self.assertEqual(report.violations, 0)

    def test_match_with_opponent(self):
        config = short_config(MATCH, duration=2.0)
        with tempfile.TemporaryDirectory() as tmp:
            report = run_one(config, 1, tmp)
            rows = read_trace(report.trace_path)
        starts = {r.actor_id: r.extra['team'] for r in rows if r.kind == 'start'}
        self.assertEqual(starts, {0: 'home', 1: 'away'})
        self.assertEqual({r.actor_id for r in rows if r.kind == 'cmd'}, {0, 1})
        self.assertEqual(report.violations, 0)


class SvgTests(SimpleTestCase):

    def test_empty_trace_draws_field_only(self):
        with tempfile.TemporaryDirectory() as tmp:
            trace = Path(tmp) / 'empty.csv'
            trace.write_text(trace_text())
            document = render_svg(trace).read_text()
        self.assertIn('<svg', document)
        self.assertIn('id="field"', document)
        self.assertNotIn('robot-path', document)
        self.assertNotIn('goal-marker', document)

    def test_goal_marker_inside_goal_mouth(self):
        rows = rows_of(
            Event(0.0, 'start', 0, -0.6, 0.0, 0.0, (('team', 'home'), ('radius', 0.15))),
            Event(0.1, 'robot', 0, -0.5, 0.0, 0.0),
            Event(0.2, 'robot', 0, -0.4, 0.1, 0.0),
            Event(0.2, 'halo', 0, 0.5, 0.0, extra=(('ball_x', 1.0), ('ball_y', 0.0), ('radius', 0.65))),
            Event(3.0, 'goal', None, 4.62, 0.3, extra=(('team', 'home'),)),
        )
        context = svg_context(rows)
        self.assertEqual(len(context['robots']), 1)
        self.assertEqual(len(context['goals']), 1)
        marker = context['goals'][0]
        self.assertEqual(marker['x'], 776.0)
        self.assertAlmostEqual(marker['y'], 272.0)
        halo = context['halos'][0]
        self.assertEqual((halo['cx'], halo['cy'], halo['r']), (464.0, 288.0, 52.0))

    def test_obstacle_discs(self):
        context = svg_context(rows_of(Event(0.0, 'obstacle', 100, 1.0, 0.5, extra=(('radius', 0.2),))))
        self.assertEqual(context['obstacles'], [{'cx': 496.0, 'cy': 256.0, 'r': 16.0}])

    def test_malformed_trace_reports_line(self):
        with tempfile.TemporaryDirectory() as tmp:
            trace = Path(tmp) / 'bad.csv'
            trace.write_text(trace_text(Event(0.0, 'robot', 0, 0.0, 0.0, 0.0)) + '0.1,robot,zero,,,,\n')
            with self.assertRaises(TraceParseError) as ctx:
                render_svg(trace)
        self.assertEqual(ctx.exception.line_no, 4)


class ChallengeTests(SimpleTestCase):

    def test_arrival_time(self):
        self.assertAlmostEqual(arrival_time(1.0, 0.5), 2.0)
        self.assertAlmostEqual(arrival_time(1.0, 1.0, 0.5), 2.0)
        self.assertAlmostEqual(arrival_time(0.75, 1.0, 0.5), 1.0)
        self.assertIsNone(arrival_time(1.0, 0.5, 0.5))
        self.assertIsNone(arrival_time(1.0, 0.0))

    def test_zero_noise_trigger_error(self):
        config = load_run_config(CHALLENGE_CONFIG)
        outcomes = []
        with tempfile.TemporaryDirectory() as tmp:
            for seed in (1, 2, 3):
                report = run_one(config, seed, tmp)
                self.assertEqual(report.scenario, MOVING_BALL_CHALLENGE)
                outcomes.append(report.challenge)
        for outcome in outcomes:
            self.assertIsNotNone(outcome.trigger_time)
            self.assertLessEqual(abs(outcome.trigger_error), 0.02 + 1e-9)
            self.assertTrue(outcome.kicked)
        summary = summarize(outcomes)
        self.assertEqual(summary.trials, 3)
        self.assertEqual(summary.kicked, 3)
        self.assertLessEqual(summary.max_abs_error, 0.02 + 1e-9)


class CommandTests(TestCase):

    def test_run_simulation_saves_reports(self):
        out = io.StringIO()
        with tempfile.TemporaryDirectory() as tmp:
            call_command('run_simulation', '--seeds', '1..2', '--out', tmp, '--save',
                         '--set', 'scenario.name=ApproachDrill', '--set', 'scenario.duration=2',
                         stdout=out)
            self.assertEqual(len(list(Path(tmp).glob('ApproachDrill_seed*.csv'))), 2)
        run = SimulationRun.objects.get()
        self.assertEqual(run.status, 'complete')
        self.assertEqual(run.seeds, '1..2')
        self.assertEqual(list(run.reports.values_list('seed', flat=True)), [1, 2])
        self.assertIn('seed 2:', out.getvalue())

    def test_run_simulation_fails_on_obstacle_contact(self):
        out = io.StringIO()
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(CommandError) as ctx:
                call_command('run_simulation', '--seeds', '1', '--out', tmp,
                             '--set', 'scenario.name=AvoidanceDrill', '--set', 'scenario.duration=0.5',
                             '--set', 'scenario.obstacle_radius=1.6',
                             '--set', 'scenario.placement_jitter=0', stdout=out)
        self.assertIn('violated invariants', str(ctx.exception))
        self.assertIn('seed 1:', out.getvalue())

    def test_invalid_config_exits_with_key(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'bad.json'
            path.write_text(json.dumps({'field': {'width': 6.0}}))
            with self.assertRaises(CommandError) as ctx:
                call_command('run_simulation', '--config', str(path), stdout=io.StringIO())
        self.assertIn('field.length', str(ctx.exception))

    def test_verify_and_render(self):
        with tempfile.TemporaryDirectory() as tmp:
            trace = Path(tmp) / 'faulty.csv'
            trace.write_text(trace_text(params_event(), cmd_event(0.2, 0.4, distance=0.5)))
            out = io.StringIO()
            call_command('verify_trace', '--trace', str(trace), stdout=out)
            self.assertIn('line 4: [radial_cap]', out.getvalue())
            with self.assertRaises(CommandError):
                call_command('verify_trace', '--trace', str(trace), '--strict', stdout=io.StringIO())

            svg = Path(tmp) / 'plot.svg'
            call_command('render_trace', '--trace', str(trace), '--out', str(svg), stdout=io.StringIO())
            self.assertTrue(svg.read_text().startswith('<?xml'))

    def test_run_challenge(self):
        out = io.StringIO()
        with tempfile.TemporaryDirectory() as tmp:
            call_command('run_challenge', 'moving-ball', '--d-ramp', '1.0', '--speed', '0.5',
                         '--seeds', '1', '--out', tmp, '--config', str(CHALLENGE_CONFIG), stdout=out)
        self.assertIn('seed 1: trigger', out.getvalue())


@tag('slow')
class AcceptanceTests(SimpleTestCase):
    """Batch runs over the shipped configs; run with --tag slow."""

    def test_avoidance_batch(self):
        config = load_run_config(AVOIDANCE_CONFIG)
        contact_free = 0
        with tempfile.TemporaryDirectory() as tmp:
            for seed in config.seeds:
                report = run_one(config, seed, tmp)
                rows = read_trace(report.trace_path)
                counts = verify_rows(rows).counts()
                self.assertNotIn('radial_cap', counts, f"seed {seed}")
                self.assertNotIn('fsm_edge', counts, f"seed {seed}")
                self.assertNotIn('hysteresis', counts, f"seed {seed}")
                if 'contact' not in counts:
                    contact_free += 1
        self.assertEqual(len(config.seeds), 200)
        self.assertGreaterEqual(contact_free / len(config.seeds), 0.95)

    def test_avoidance_path_stays_off_obstacle(self):
        config = load_run_config(AVOIDANCE_CONFIG)
        with tempfile.TemporaryDirectory() as tmp:
            report = run_one(config, 1, tmp)
            context = svg_context(read_trace(report.trace_path))
            document = render_svg(report.trace_path).read_text()
        self.assertIn('robot-path', document)
        robot = context['robots'][0]
        points = [tuple(float(v) for v in p.split(',')) for p in robot['points'].split()]
        self.assertGreater(len(points), 100)
        for disc in context['obstacles']:
            reach = robot['r'] + disc['r']
            closest = min(math.hypot(x - disc['cx'], y - disc['cy']) for x, y in points)
            # pixel coordinates are rounded to 0.01
            self.assertGreaterEqual(closest, reach - 0.02)

    def test_noisy_challenge_keeps_ball_in_kick_region(self):
        base = replace(load_run_config(CHALLENGE_CONFIG), noise=NoiseModel())
        outcomes = []
        with tempfile.TemporaryDirectory() as tmp:
            for speed in (0.3, 0.5, 0.7, 1.0):
                config = challenge_config(base, 1.0, speed)
                outcomes += [run_one(config, seed, tmp).challenge for seed in range(1, 26)]
        summary = summarize(outcomes)
        self.assertEqual(summary.trials, 100)
        self.assertGreaterEqual(summary.kick_region_rate, 0.95)

    def test_full_match_speed(self):
        config = load_run_config(MATCH_CONFIG, overrides=['scenario.duration=1200'])
        with tempfile.TemporaryDirectory() as tmp:
            started = time.perf_counter()
            report = run_one(config, 1, tmp)
            elapsed = time.perf_counter() - started
        self.assertEqual(report.violations, 0)
        self.assertLessEqual(elapsed, 24.0)

    def test_match_replay_is_byte_identical(self):
        config = load_run_config(MATCH_CONFIG, overrides=['scenario.duration=120'])
        with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
            a = run_one(config, 4, first)
            b = run_one(config, 4, second)
            self.assertEqual(Path(a.trace_path).read_bytes(), Path(b.trace_path).read_bytes())


class ModelTests(TestCase):

    def test_record_from_report(self):
        run = SimulationRunFactory()
        rows = rows_of(
            params_event(seed=4),
            Event(0.0, 'start', 0, -0.6, 0.0, 0.0, (('team', 'home'), ('label', 'SidelineLeft'))),
            Event(2.5, 'lock', 0, extra=(('label', 'SidelineLeft'), ('confirmed', True))),
            Event(4.0, 'goal', extra=(('team', 'home'),)),
            Event(6.0, 'finish', extra=(('own', 1), ('opponent', 0))),
        )
        record = MatchReportRecord.from_report(run, report_from_rows(rows, 'runs/x.csv'))
        record.save()
        record.refresh_from_db()
        self.assertEqual((record.seed, record.goals_for, record.goals_against), (4, 1, 0))
        self.assertEqual(record.lock_time, 2.5)
        self.assertEqual(record.lock_label, 'SidelineLeft')
        self.assertTrue(record.lock_correct)
        self.assertEqual(record.goal_times, [[4.0, 'home']])
        self.assertEqual(run.goals_for, 1)
        self.assertEqual(run.violation_total, 0)
        self.assertEqual(str(record), 'seed 4: 1:0')

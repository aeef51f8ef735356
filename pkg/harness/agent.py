"""
Agents: the per-robot loop that turns simulator readings into commands.

A MatchAgent perceives at ``agent.perception_period``, dead-reckons with
odometry and the integrated gyro, localizes, tracks obstacles, remembers
the ball and steps both behavior FSMs. Every agent works in its own
attacking frame (opponent goal at +x); only egocentric readings cross the
boundary, so the away agent needs no special casing.

A ChallengeAgent stands still and runs the moving-ball kick controller on
every control step.
"""

from collections import deque
from dataclasses import replace
import logging

from behaviors.behaviour_fsm import behaviour_fsm_step, initial_behaviour_state
from behaviors.context import BehaviorContext
from behaviors.game_fsm import game_fsm_step, initial_game_state
from field.geometry import Pose2D, field_to_ego
from field.spec import start_pose_for, start_poses
from kick_timing.controller import KICK_TRIGGERS, KickTimingController
from localization.bank import BankMode, correct, init_bank, pose_estimate, predict, select_best
from localization.gyro import GyroState, integrate_gyro
from perception.observation import observe
from perception.obstacles import detect_obstacles, update_clusters
from perception.signatures import signature_models
from simulation.state import STOP, Event, Foot, TriggerKind

logger = logging.getLogger(__name__)

IDENTITY = Pose2D(0.0, 0.0, 0.0)


def _steps_per_period(period, dt):
    return max(1, int(round(period / dt)))


def observation_events(robot_id, obs):
    """One ``obs`` row per reported item, egocentric."""
    events = []
    if obs.ball is not None:
        events.append(Event(obs.stamp, 'obs', robot_id, obs.ball.r[0], obs.ball.r[1], None,
                            (('item', 'ball'), ('p', obs.ball.p))))
    for sighting in obs.landmarks:
        events.append(Event(obs.stamp, 'obs', robot_id, sighting.position[0], sighting.position[1], None,
                            (('item', sighting.kind.value), ('p', sighting.confidence))))
    for candidate in obs.obstacle_candidates:
        events.append(Event(obs.stamp, 'obs', robot_id, candidate.position[0], candidate.position[1], None,
                            (('item', 'obstacle'), ('size', candidate.apparent_size))))
    return events


class MatchAgent:
    """Full agent stack for one robot."""

    def __init__(self, robot, config, kickoff_label):
        self.robot_id = robot.id
        self.team = robot.team
        self.config = config
        self.field = config.field
        self.kickoff_pose = start_pose_for(self.field, kickoff_label).pose
        self.period_steps = _steps_per_period(config.agent.perception_period, config.sim.dt)
        self.models = signature_models(robot.team)

        self.gyro = GyroState(bias=config.sim.gyro_bias)
        self.bank = init_bank(self.field, start_poses(self.field), 0.0, config.localization.timeout, self.gyro)
        self.history = deque(maxlen=config.localization.history_frames)
        self.motion = IDENTITY
        self.clusters = []
        self.ball_ego = None
        self.ball_seen_at = None
        self.game = initial_game_state(self.field)
        self.behaviour = initial_behaviour_state(config.behavior)

    def sense(self, world):
        """Fold the last step's odometry and gyro reading into the agent state."""
        robot = world.robot(self.robot_id)
        dx, dy, dtheta = robot.odometry
        self.motion = self.motion.moved(dx, dy, dtheta)
        self.gyro = integrate_gyro(self.gyro, robot.gyro_rate, self.config.sim.dt)

    def _localize(self, obs, now):
        motion, self.motion = self.motion, IDENTITY
        params = self.config.localization
        was_locked = self.bank.mode == BankMode.LOCKED
        self.bank = predict(self.bank, (motion.x, motion.y), self.gyro)
        self.history.append(obs)
        self.bank = correct(self.bank, obs, self.field, params)
        self.bank = select_best(self.bank, now, self.history, self.field, params)
        events = []
        if not was_locked and self.bank.mode == BankMode.LOCKED:
            label = self.bank.hypotheses[self.bank.best].start_label
            events.append(Event(now, 'lock', self.robot_id, None, None, None,
                                (('label', label.value), ('confirmed', self.bank.confirmed))))
        return motion, events

    def _track(self, obs, motion, now):
        detections = detect_obstacles(obs.obstacle_candidates, self.models, self.config.obstacles)
        self.clusters = update_clusters(self.clusters, detections, motion, self.config.obstacles, now)
        if obs.ball is not None:
            self.ball_ego, self.ball_seen_at = tuple(obs.ball.r), now
        elif self.ball_ego is not None:
            self.ball_ego = field_to_ego(motion, self.ball_ego)

    def act(self, world, positioning=False):
        """
        Decide on a perception tick.

        Returns:
            (VelocityCommand or None when the previous command is kept,
            list of trace Events)
        """
        if world.step_index % self.period_steps:
            return None, []
        now = world.time
        obs = observe(world, self.robot_id, self.config.noise, world.field)
        events = observation_events(self.robot_id, obs)

        motion, lock_events = self._localize(obs, now)
        events += lock_events
        self._track(obs, motion, now)
        estimate = pose_estimate(self.bank)
        events.append(Event(now, 'loc', self.robot_id, estimate.pose.x, estimate.pose.y, estimate.pose.theta, (
            ('label', estimate.label.value), ('mode', self.bank.mode.value),
            ('confidence', estimate.confidence), ('low', estimate.low_confidence),
        )))
        for cluster in self.clusters:
            events.append(Event(now, 'cluster', self.robot_id, cluster.position[0], cluster.position[1], None,
                                (('label', cluster.label.value), ('certainty', cluster.certainty))))

        ctx = BehaviorContext(
            field=self.field,
            pose=estimate.pose,
            now=now,
            pose_confidence=estimate.confidence,
            low_confidence=estimate.low_confidence,
            ball_ego=self.ball_ego,
            ball_seen_at=self.ball_seen_at,
            obstacles=tuple(self.clusters),
            positioning=positioning,
            assigned_pose=self.kickoff_pose,
        )
        params = self.config.behavior
        previous = self.game.state
        self.game = game_fsm_step(self.game, ctx, params)
        if self.game.state != previous:
            events.append(Event(now, 'fsm', self.robot_id, None, None, None, (
                ('fsm', 'game'), ('from', previous.value), ('to', self.game.state.value),
                ('reason', self.game.reason),
            )))
        self.behaviour, command, diagnostics = behaviour_fsm_step(self.behaviour, self.game, ctx, params)
        events += self._behaviour_events(now, command, diagnostics)
        return command, events

    def _behaviour_events(self, now, command, diagnostics):
        events = []
        transition = diagnostics.transition
        if transition is not None:
            events.append(Event(now, 'fsm', self.robot_id, None, None, None, (
                ('fsm', transition.fsm), ('from', transition.source), ('to', transition.target),
                ('reason', transition.reason),
            )))
        if diagnostics.waypoint is not None:
            events.append(Event(now, 'halo', self.robot_id, diagnostics.waypoint[0], diagnostics.waypoint[1], None, (
                ('ball_x', diagnostics.ball_ego[0]), ('ball_y', diagnostics.ball_ego[1]),
                ('radius', diagnostics.halo_radius),
            )))
        report = diagnostics.avoidance
        events.append(Event(now, 'cmd', self.robot_id, None, None, None, (
            ('state', diagnostics.state.value), ('game', self.game.state.value),
            ('vx', command.vx), ('vy', command.vy), ('omega', command.omega),
            ('trigger', command.trigger.value), ('in_speed', report.in_speed),
            ('obs_d', report.distance), ('obs_b', report.bearing), ('cap', report.cap),
            ('axis', report.axis_only), ('detour', diagnostics.detour is not None),
            ('forced', self.game.forced_dribble), ('rotation', self.game.rotation),
        )))
        if command.trigger in (TriggerKind.KICK_LEFT, TriggerKind.KICK_RIGHT):
            events.append(Event(now, 'trigger', self.robot_id, None, None, None,
                                (('trigger', command.trigger.value),)))
        return events


class ChallengeAgent:
    """Stands at the goal-area line and kicks the rolling ball."""

    def __init__(self, robot, config):
        self.robot_id = robot.id
        self.config = config
        sim = config.sim
        foot = Foot(config.scenario.challenge_foot)
        params = replace(config.kick_timing, foot=foot.value,
                         r_kick=(sim.foot_forward, foot.lateral_sign * sim.foot_lateral))
        params.clean()
        self.controller = KickTimingController(params)
        self.period_steps = _steps_per_period(config.agent.challenge_perception_period, sim.dt)

    def sense(self, world):
        pass

    def act(self, world, positioning=False):
        if world.step_index % self.period_steps:
            return None, []
        now = world.time
        obs = observe(world, self.robot_id, self.config.noise, world.field)
        events = observation_events(self.robot_id, obs)
        seen = len(self.controller.estimates)
        trigger = self.controller.step(obs, now)
        for estimate in self.controller.estimates[seen:]:
            t_arrive = estimate.t_arrive
            events.append(Event(now, 'estimate', self.robot_id, None, None, None, (
                ('t_arrive', t_arrive), ('v_smooth', estimate.v_smooth),
                ('approaching', estimate.approaching), ('phase', self.controller.phase.value),
            )))
        if trigger is None:
            return None, events
        if trigger in KICK_TRIGGERS.values():
            events.append(Event(now, 'trigger', self.robot_id, None, None, None, (('trigger', trigger.value),)))
        return STOP.with_trigger(trigger), events

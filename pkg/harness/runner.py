"""
Runs one seed of a scenario: world, agents and trace, then the report.
"""

import logging
from pathlib import Path

from core.config import section_to_dict
from simulation.engine import finish, resume_play, step
from simulation.scenarios import AWAY_ROBOT_ID, MOVING_BALL_CHALLENGE, spawn_scenario
from simulation.state import Event, WorldStatus, set_command
from simulation.trace import TraceWriter

from .agent import ChallengeAgent, MatchAgent
from .report import report_from_trace

logger = logging.getLogger(__name__)


def trace_filename(config, seed):
    return f"{config.scenario.name}_seed{seed:06d}.csv"


def start_label_of(robot, config):
    scenario = config.scenario
    return scenario.opponent_start_label if robot.id == AWAY_ROBOT_ID else scenario.start_label


def build_agents(world, config):
    if config.scenario.name == MOVING_BALL_CHALLENGE:
        return [ChallengeAgent(robot, config) for robot in world.robots]
    return [MatchAgent(robot, config, start_label_of(robot, config)) for robot in world.robots]


def header_events(world, config, seed):
    """Rows every trace starts with: field, parameters, start poses, obstacles."""
    sim, behavior, noise, scenario = config.sim, config.behavior, config.noise, config.scenario
    perception_period = config.agent.perception_period
    if scenario.name == MOVING_BALL_CHALLENGE:
        perception_period = config.agent.challenge_perception_period
    events = [
        Event(0.0, 'field', None, None, None, None, tuple(section_to_dict(config.field).items())),
        Event(0.0, 'params', None, None, None, None, (
            ('scenario', scenario.name), ('seed', seed), ('dt', sim.dt),
            ('v_cap', behavior.v_cap), ('d_repel', behavior.d_repel),
            ('influence_radius', behavior.influence_radius), ('halo_radius', behavior.halo_radius),
            ('fov', noise.fov), ('max_range', noise.max_range), ('camera_yaw', noise.camera_yaw),
            ('kick_latency', sim.kick_latency), ('believed_latency', config.kick_timing.kick_latency),
            ('ball_friction_decel', sim.ball_friction_decel), ('kick_region_radius', sim.kick_region_radius),
            ('foot_forward', sim.foot_forward), ('foot_lateral', sim.foot_lateral),
            ('d_ramp', scenario.d_ramp), ('release_speed', scenario.release_speed),
            ('challenge_foot', scenario.challenge_foot), ('perception_period', perception_period),
        )),
    ]
    for robot in world.robots:
        pose = robot.pose
        events.append(Event(0.0, 'start', robot.id, pose.x, pose.y, pose.theta, (
            ('team', robot.team), ('label', start_label_of(robot, config)), ('radius', robot.radius),
        )))
    for obstacle in world.obstacles:
        events.append(Event(0.0, 'obstacle', obstacle.id, obstacle.position[0], obstacle.position[1], None,
                            (('radius', obstacle.radius),)))
    return events


def state_events(world):
    """Ground-truth robot and ball rows of the current step."""
    events = []
    for robot in world.robots:
        pose, cmd = robot.pose, robot.command
        events.append(Event(world.time, 'robot', robot.id, pose.x, pose.y, pose.theta,
                            (('vx', cmd.vx), ('vy', cmd.vy), ('omega', cmd.omega))))
    ball = world.ball
    events.append(Event(world.time, 'ball', None, ball.position[0], ball.position[1], None,
                        (('vx', ball.velocity[0]), ('vy', ball.velocity[1]))))
    return events


def run_one(config, seed, out_dir=None):
    """
    Simulate one seed and write its trace.

    Args:
        config: RunConfig
        seed: run seed
        out_dir: directory for the trace; defaults to the config's output path

    Returns:
        MatchReport recomputed from the written trace
    """
    out_dir = Path(out_dir or config.output_path)
    trace_path = out_dir / trace_filename(config, seed)
    scenario = config.scenario
    sim = config.sim
    challenge = scenario.name == MOVING_BALL_CHALLENGE

    world = spawn_scenario(scenario.name, scenario, seed, config.field, sim)
    agents = build_agents(world, config)
    steps = int(round(scenario.run_duration / sim.dt))
    positioning_until = -1.0
    logger.info(f"Running {scenario.name} seed {seed} for {steps} steps")

    with TraceWriter(trace_path) as writer:
        for event in header_events(world, config, seed):
            writer.write_event(event)
        for event in state_events(world):
            writer.write_event(event)

        for _ in range(steps):
            positioning = world.time < positioning_until
            for agent in agents:
                command, events = agent.act(world, positioning)
                for event in events:
                    writer.write_event(event)
                if command is not None:
                    world = set_command(world, agent.robot_id, command)

            world = step(world, sim)
            for event in world.events:
                writer.write_event(event)
            for event in state_events(world):
                writer.write_event(event)
            for agent in agents:
                agent.sense(world)

            if world.status in (WorldStatus.GOAL_SCORED, WorldStatus.BALL_OUT):
                if challenge:
                    break
                scored = world.status == WorldStatus.GOAL_SCORED
                world = resume_play(world, sim)
                writer.write_event(world.events[-1])
                if scored:
                    positioning_until = world.time + scenario.positioning_time

        world = finish(world)
        writer.write_event(world.events[-1])

    report = report_from_trace(trace_path)
    logger.info(f"Finished {scenario.name} seed {seed}: score {report.score[0]}:{report.score[1]}, "
                f"{report.violations} violation(s)")
    return report

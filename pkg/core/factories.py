"""
factory_boy factories for the configuration dataclasses and poses.

The dataclasses are frozen, so every factory builds through the
constructor (``factory.Factory``) and never saves anything.
"""

import factory

from behaviors.params import BehaviorParams
from field.geometry import Pose2D
from field.spec import FieldSpec
from perception.noise import NoiseModel
from perception.obstacles import ObstacleCluster
from perception.signatures import ObstacleLabel
from simulation.state import SimParams


class FieldSpecFactory(factory.Factory):
    class Meta:
        model = FieldSpec

    length = 9.0
    width = 6.0
    goal_width = 2.6
    goal_area_length = 1.0
    goal_area_width = 3.0
    center_circle_radius = 0.75
    penalty_mark_distance = 2.1
    line_width = 0.05


class SmallFieldSpecFactory(FieldSpecFactory):
    """KidSize-like field used to check that nothing depends on the defaults."""
    length = 6.0
    width = 4.0
    goal_width = 1.8
    goal_area_length = 0.6
    goal_area_width = 2.2
    center_circle_radius = 0.5
    penalty_mark_distance = 1.5


class Pose2DFactory(factory.Factory):
    class Meta:
        model = Pose2D

    x = 0.0
    y = 0.0
    theta = 0.0


class SimParamsFactory(factory.Factory):
    class Meta:
        model = SimParams

    rng_seed = factory.Sequence(lambda n: n + 1)


class NoiseModelFactory(factory.Factory):
    class Meta:
        model = NoiseModel


class ZeroNoiseModelFactory(NoiseModelFactory):
    range_noise_coeff = 0.0
    bearing_noise_std = 0.0
    false_negative_prob = 0.0
    obstacle_size_noise = 0.0


class ObstacleClusterFactory(factory.Factory):
    """Egocentric rival cluster, fully certain and just seen."""
    class Meta:
        model = ObstacleCluster

    position = (1.0, 0.0)
    label = ObstacleLabel.RIVAL
    certainty = 1.0
    last_seen = 0.0


class BehaviorParamsFactory(factory.Factory):
    class Meta:
        model = BehaviorParams


class SimulationRunFactory(factory.django.DjangoModelFactory):
    class Meta:
        model = 'harness.SimulationRun'

    scenario = 'ApproachDrill'
    seeds = '1'
    config = factory.LazyFunction(dict)
    output_dir = 'runs'
    status = 'complete'

"""
States and declared transition edges of the Game and Behaviour FSMs.
"""

from enum import Enum
import logging

from core.exceptions import SimulationStateError

logger = logging.getLogger(__name__)


class GameStateKind(str, Enum):
    SCORE_GOAL = 'ScoreGoal'
    AUTO_POSITION = 'AutoPosition'
    DEFEND_GOAL = 'DefendGoal'


class BehaviourStateKind(str, Enum):
    GO_BEHIND_BALL_FAR = 'GoBehindBallFar'
    GO_BEHIND_BALL_NEAR = 'GoBehindBallNear'
    DRIBBLE = 'Dribble'
    KICK = 'Kick'
    WALK_TO_POSE = 'WalkToPose'
    SEARCH_BALL = 'SearchBall'


FAR = BehaviourStateKind.GO_BEHIND_BALL_FAR
NEAR = BehaviourStateKind.GO_BEHIND_BALL_NEAR
DRIBBLE = BehaviourStateKind.DRIBBLE
KICK = BehaviourStateKind.KICK
WALK = BehaviourStateKind.WALK_TO_POSE
SEARCH = BehaviourStateKind.SEARCH_BALL

APPROACH_STATES = (FAR, NEAR)

BEHAVIOUR_EDGES = frozenset({
    (FAR, NEAR), (FAR, SEARCH), (FAR, WALK),
    (NEAR, FAR), (NEAR, KICK), (NEAR, DRIBBLE), (NEAR, SEARCH), (NEAR, WALK),
    (DRIBBLE, FAR), (DRIBBLE, SEARCH), (DRIBBLE, WALK),
    (KICK, FAR), (KICK, SEARCH), (KICK, WALK),
    (WALK, FAR), (WALK, SEARCH),
    (SEARCH, FAR), (SEARCH, WALK),
})

GAME_EDGES = frozenset(
    (a, b) for a in GameStateKind for b in GameStateKind if a != b
)

FSM_GAME = 'game'
FSM_BEHAVIOUR = 'behaviour'

EDGES = {FSM_GAME: GAME_EDGES, FSM_BEHAVIOUR: BEHAVIOUR_EDGES}
STATE_KINDS = {FSM_GAME: GameStateKind, FSM_BEHAVIOUR: BehaviourStateKind}


def is_declared(fsm, source, target):
    """True when source -> target is a declared edge of ``fsm`` (names or enums)."""
    kinds = STATE_KINDS.get(fsm)
    if kinds is None:
        return False
    try:
        return (kinds(source), kinds(target)) in EDGES[fsm]
    except ValueError:
        return False


def check_transition(fsm, source, target):
    if not is_declared(fsm, source, target):
        raise SimulationStateError(f"undeclared {fsm} transition {source} -> {target}")
    logger.debug(f"{fsm} FSM: {source} -> {target}")

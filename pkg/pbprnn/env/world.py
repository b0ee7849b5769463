# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Two-body world: a controlled agent and a dynamic obstacle.

The agent starts below the obstacle and both try to reach the other's start
line. Each step the agent executes one motion primitive (a heading offset
from its goal bearing and a length) while the obstacle follows its own
policy; both move simultaneously.
"""

import collections
import logging

import numpy as np

from pbprnn.exceptions import ContractError
from pbprnn.exceptions import TerminalWorldError


_LOGGER = logging.getLogger(__name__)

AGENT_RADIUS = 0.05
GOAL_TOLERANCE = 0.05
OBSTACLE_SPEED = 0.05
MAX_STEPS = 50

INFLUENCE_RADIUS = 0.2
MAX_DEFLECTION = np.pi / 4.0

TRAIN = 'train'
NOVEL = 'novel'
MODES = (TRAIN, NOVEL)

COLLABORATIVE = 'collaborative'
STRAIGHT_LINE = 'straight-line'
POLICIES = (COLLABORATIVE, STRAIGHT_LINE)

OBSERVATION_FEATURES = 9


def _vector(value, name):
    array = np.array(value, dtype=np.float64).reshape(-1)
    if array.shape != (2,):
        raise ContractError('%s must be a 2-D point, got %r' % (name, value))
    if not np.all(np.isfinite(array)):
        raise ContractError('%s must be finite, got %r' % (name, value))
    array.setflags(write=False)
    return array


_AgentStateTuple = collections.namedtuple(
    'AgentState', ['position', 'velocity', 'goal', 'radius'])


class AgentState(_AgentStateTuple):
    """Position, last displacement and goal of one body."""
    __slots__ = ()

    def __new__(cls, position, velocity=(0.0, 0.0), goal=(0.0, 0.0),
                radius=AGENT_RADIUS):
        radius = float(radius)
        if not radius > 0.0:
            raise ContractError('radius must be positive, got %r' % radius)
        return super(AgentState, cls).__new__(
            cls, _vector(position, 'position'), _vector(velocity, 'velocity'),
            _vector(goal, 'goal'), radius)

    def moved(self, displacement):
        """The state after moving by ``displacement`` in one step."""
        displacement = np.asarray(displacement, dtype=np.float64)
        return AgentState(self.position + displacement, displacement,
                          self.goal, self.radius)

    def goal_distance(self):
        return float(np.hypot(*(self.goal - self.position)))


_WorldConfigTuple = collections.namedtuple(
    'WorldConfig', ['agent_start', 'obstacle_start', 'obstacle_start_y_range',
                    'max_steps', 'obstacle_policy', 'obstacle_speed',
                    'radius', 'goal_tolerance'])


class WorldConfig(_WorldConfigTuple):
    """Geometry and dynamics of an episode.

    Goals follow the start lines: the agent heads to the obstacle's start
    and the obstacle heads to the agent's start, whatever the obstacle's
    drawn start height in novel mode.
    """
    __slots__ = ()

    def __new__(cls, agent_start=(0.0, -0.25), obstacle_start=(0.0, 0.25),
                obstacle_start_y_range=(-0.25, 0.25), max_steps=MAX_STEPS,
                obstacle_policy=COLLABORATIVE, obstacle_speed=OBSTACLE_SPEED,
                radius=AGENT_RADIUS, goal_tolerance=GOAL_TOLERANCE):
        low, high = (float(value) for value in obstacle_start_y_range)
        if low > high:
            raise ContractError('obstacle_start_y_range is empty')
        if int(max_steps) < 1:
            raise ContractError('max_steps must be at least 1')
        if obstacle_policy not in POLICIES:
            raise ContractError('unknown obstacle policy %r' % (
                obstacle_policy,))
        if obstacle_speed < 0.0 or radius <= 0.0 or goal_tolerance <= 0.0:
            raise ContractError(
                'speeds, radii and tolerances must be positive')
        return super(WorldConfig, cls).__new__(
            cls, _vector(agent_start, 'agent_start'),
            _vector(obstacle_start, 'obstacle_start'), (low, high),
            int(max_steps), obstacle_policy, float(obstacle_speed),
            float(radius), float(goal_tolerance))

    @property
    def agent_goal(self):
        return self.obstacle_start

    @property
    def obstacle_goal(self):
        return self.agent_start


_ObservationTuple = collections.namedtuple(
    'Observation', ['a1_pos', 'a1_vel', 'a2_pos', 'a2_vel',
                    'primitive_heading'])


class Observation(_ObservationTuple):
    """State of both bodies when a primitive was chosen, plus its heading.

    The heading is the primitive's offset from the agent's goal bearing.
    """
    __slots__ = ()

    def features(self):
        """The flat 9-feature row."""
        return np.concatenate([self.a1_pos, self.a1_vel, self.a2_pos,
                               self.a2_vel, [self.primitive_heading]])

    @classmethod
    def from_features(cls, row):
        row = np.asarray(row, dtype=np.float64)
        if row.shape != (OBSERVATION_FEATURES,):
            raise ContractError('an observation has %d features, got %s' % (
                OBSERVATION_FEATURES, row.shape))
        return cls(row[0:2], row[2:4], row[4:6], row[6:8], float(row[8]))


_StepEventsTuple = collections.namedtuple(
    'StepEvents', ['collision', 'agent_goal', 'obstacle_goal', 'timeout'])


class StepEvents(_StepEventsTuple):
    """Events raised by one step."""
    __slots__ = ()

    @property
    def terminal(self):
        return self.collision or self.agent_goal or self.timeout


_StepRecordTuple = collections.namedtuple(
    'StepRecord', ['step', 'agent', 'obstacle', 'heading', 'separation',
                   'events'])


class StepRecord(_StepRecordTuple):
    """Post-move state of one step, used for trace export and replay."""
    __slots__ = ()


_EpisodeResultTuple = collections.namedtuple(
    'EpisodeResult', ['observations', 'collided', 'reached_goal',
                      'min_separation', 'steps_taken', 'records'])


class EpisodeResult(_EpisodeResultTuple):
    """Outcome of a finished episode.

    :type observations: tuple of :class:`Observation`
    :param observations: one row per executed step.

    :type records: tuple of :class:`StepRecord`
    :param records: the post-move states, for trace export.
    """
    __slots__ = ()

    @property
    def label(self):
        """Collision label of every window of this episode."""
        return 1 if self.collided else 0

    @property
    def timed_out(self):
        return not (self.collided or self.reached_goal)

    @property
    def cause(self):
        if self.collided:
            return 'collision'
        if self.reached_goal:
            return 'goal'
        return 'timeout'

    def feature_rows(self):
        """Observation stream as a ``(steps, 9)`` array."""
        return np.array([obs.features() for obs in self.observations])


class World(object):
    """Mutable episode state, owned by a single episode loop.

    :type config: :class:`WorldConfig`
    :param config: episode geometry.

    :type agent: :class:`AgentState`
    :param agent: the controlled body.

    :type obstacle: :class:`AgentState`
    :param obstacle: the dynamic obstacle.

    :type policy: str
    :param policy: obstacle policy, one of :data:`POLICIES`.
    """
    def __init__(self, config, agent, obstacle, policy):
        if policy not in POLICIES:
            raise ContractError('unknown obstacle policy %r' % (policy,))
        self.config = config
        self.agent = agent
        self.obstacle = obstacle
        self.policy = policy
        self.steps = 0
        self.collided = False
        self.reached_goal = False
        self.timed_out = False
        self.min_separation = float('inf')
        self.observations = []
        self.records = []

    def __repr__(self):
        return '<World step=%d policy=%s terminal=%s>' % (
            self.steps, self.policy, self.terminal)

    @property
    def terminal(self):
        return self.collided or self.reached_goal or self.timed_out

    def separation(self):
        """Distance between the two body centres."""
        return float(np.hypot(*(self.agent.position - self.obstacle.position)))

    def observation_for(self, heading_offset):
        """The observation row of the current state with a given heading."""
        return Observation(self.agent.position, self.agent.velocity,
                           self.obstacle.position, self.obstacle.velocity,
                           float(heading_offset))

    def result(self):
        """Summarize a finished episode.

        :raises: :class:`~pbprnn.exceptions.ContractError` if the episode
                 is still running.
        """
        if not self.terminal:
            raise ContractError('episode has not finished')
        return EpisodeResult(tuple(self.observations), self.collided,
                             self.reached_goal, self.min_separation,
                             self.steps, tuple(self.records))


def reset(config, mode=TRAIN, rng=None):
    """Start an episode.

    :type config: :class:`WorldConfig`
    :param config: episode geometry.

    :type mode: str
    :param mode: ``'train'`` keeps the fixed starts and the configured
                 obstacle policy; ``'novel'`` draws the obstacle's start
                 height uniformly from ``obstacle_start_y_range`` and makes
                 the obstacle walk a straight line.

    :type rng: :class:`numpy.random.Generator`
    :param rng: required in novel mode.

    :rtype: :class:`World`
    :returns: the fresh world.
    """
    obstacle_start = config.obstacle_start
    policy = config.obstacle_policy
    if mode == NOVEL:
        if rng is None:
            raise ContractError('novel mode needs a random generator')
        low, high = config.obstacle_start_y_range
        obstacle_start = (config.obstacle_start[0], rng.uniform(low, high))
        policy = STRAIGHT_LINE
    elif mode != TRAIN:
        raise ContractError('unknown mode %r, expected one of %s' % (
            mode, MODES))
    agent = AgentState(config.agent_start, goal=config.agent_goal,
                       radius=config.radius)
    obstacle = AgentState(obstacle_start, goal=config.obstacle_goal,
                          radius=config.radius)
    return World(config, agent, obstacle, policy)


def _rotate(vector, angle):
    cos, sin = np.cos(angle), np.sin(angle)
    return np.array([cos * vector[0] - sin * vector[1],
                     sin * vector[0] + cos * vector[1]])


def _goal_seeking(body, speed, tolerance):
    distance = body.goal_distance()
    if distance < tolerance:
        return None, 0.0
    return (body.goal - body.position) / distance, min(speed, distance)


def straight_line_policy_step(world):
    """Obstacle displacement walking straight to its goal.

    Zero once the obstacle is within the goal tolerance; never overshoots.
    """
    direction, length = _goal_seeking(
        world.obstacle, world.config.obstacle_speed,
        world.config.goal_tolerance)
    if direction is None:
        return np.zeros(2)
    return direction * length


def collaborative_policy_step(world):
    """Obstacle displacement under the reciprocal-avoidance rule.

    The obstacle heads to its goal; when the agent is closer than
    :data:`INFLUENCE_RADIUS` and within 90 degrees of that heading, the
    heading turns away from the agent by ``MAX_DEFLECTION * (1 -
    separation / INFLUENCE_RADIUS)``. An agent exactly ahead is passed on
    the obstacle's right.

    :type world: :class:`World`
    :param world: the current state.

    :rtype: :class:`numpy.ndarray`
    :returns: the obstacle displacement for this step.
    """
    direction, length = _goal_seeking(
        world.obstacle, world.config.obstacle_speed,
        world.config.goal_tolerance)
    if direction is None:
        return np.zeros(2)
    to_agent = world.agent.position - world.obstacle.position
    separation = float(np.hypot(*to_agent))
    if 0.0 < separation < INFLUENCE_RADIUS and direction.dot(to_agent) >= 0.0:
        deflection = MAX_DEFLECTION * (1.0 - separation / INFLUENCE_RADIUS)
        side = direction[0] * to_agent[1] - direction[1] * to_agent[0]
        # agent on the left: turn clockwise, otherwise counter-clockwise
        angle = -deflection if side >= 0.0 else deflection
        direction = _rotate(direction, angle)
    return direction * length


_POLICY_STEPS = {
    COLLABORATIVE: collaborative_policy_step,
    STRAIGHT_LINE: straight_line_policy_step,
}


def step(world, primitive):
    """Advance the world by one step.

    :type world: :class:`World`
    :param world: the running episode, updated in place.

    :type primitive: :class:`~pbprnn.agent.primitives.MotionPrimitive`
    :param primitive: the agent's action; its ``heading_offset`` is measured
                      from the current agent-to-goal bearing.

    :rtype: tuple
    :returns: the :class:`Observation` recorded for this step and its
              :class:`StepEvents`.

    :raises: :class:`~pbprnn.exceptions.TerminalWorldError` if the episode
             has already ended.
    """
    if world.terminal:
        raise TerminalWorldError('cannot step a finished episode')
    agent_move = primitive.displacement(world.agent.position,
                                        world.agent.goal)
    obstacle_move = _POLICY_STEPS[world.policy](world)
    observation = world.observation_for(primitive.heading_offset)

    world.agent = world.agent.moved(agent_move)
    world.obstacle = world.obstacle.moved(obstacle_move)
    world.steps += 1
    world.observations.append(observation)

    separation = world.separation()
    world.min_separation = min(world.min_separation, separation)
    tolerance = world.config.goal_tolerance
    collision = separation < world.agent.radius + world.obstacle.radius
    agent_goal = (not collision) and world.agent.goal_distance() < tolerance
    obstacle_goal = world.obstacle.goal_distance() < tolerance
    timeout = (not (collision or agent_goal) and
               world.steps >= world.config.max_steps)
    events = StepEvents(collision, agent_goal, obstacle_goal, timeout)
    world.collided = collision
    world.reached_goal = agent_goal
    world.timed_out = timeout
    world.records.append(StepRecord(world.steps - 1, world.agent,
                                    world.obstacle, primitive.heading_offset,
                                    separation, events))
    if events.terminal:
        _LOGGER.debug('Episode ended after %d steps: collision=%s goal=%s',
                      world.steps, collision, agent_goal)
    return observation, events

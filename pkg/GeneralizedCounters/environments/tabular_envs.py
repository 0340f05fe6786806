from GeneralizedCounters.TabularMdp import TabularMdp
from GeneralizedCounters.exceptions import ConfigurationError

# bridge actions
EAST, WEST = 0, 1

# cliff actions
UP, RIGHT, DOWN, LEFT = 0, 1, 2, 3

BRIDGE_GOAL_REWARD = 10.0
BRIDGE_RETREAT_REWARD = 1.0
CLIFF_STEP_REWARD = -1.0
CLIFF_FALL_REWARD = -100.0


def make_bridge(k: int, normalized: bool = False, discount: float = 0.9) -> TabularMdp:
    '''
    Line of k bridge cells between a start state and a distant goal.

    States: start=0, bridge cells 1..k, GOAL=k+1 and TRAP=k+2 (both terminal).
    Going west from the start falls into the trap with a small reward,
    going east from cell k reaches the goal with a large one.
    normalized=True divides all rewards by the maximum reward.
    '''

    if k < 1:
        raise ConfigurationError(f"bridge: k must be >= 1, got {k}")

    goal, trap = k + 1, k + 2
    scale = BRIDGE_GOAL_REWARD if normalized else 1.0

    transition, reward = {}, {}
    for s in range(k + 1):

        east = goal if s == k else s + 1
        west = trap if s == 0 else s - 1

        transition[(s, EAST)] = [(east, 1.0)]
        transition[(s, WEST)] = [(west, 1.0)]
        reward[(s, EAST)] = [((BRIDGE_GOAL_REWARD if s == k else 0.0) / scale, 1.0)]
        reward[(s, WEST)] = [((BRIDGE_RETREAT_REWARD if s == 0 else 0.0) / scale, 1.0)]

    return TabularMdp(num_states=k + 3, num_actions=2, transition=transition, reward=reward,
                      initial_state=0, terminal_states=frozenset({goal, trap}), discount=discount,
                      name=f"bridge(k={k}{', normalized' if normalized else ''})",
                      action_names=("east", "west"))


def make_tree(k: int, discount: float = 0.9) -> TabularMdp:
    '''
    Depth-2 tree with zero rewards: the root has a single "start" action
    leading to a chooser node, whose k actions lead to k terminal leaves.
    '''

    if k < 1:
        raise ConfigurationError(f"tree: k must be >= 1, got {k}")

    root, chooser = 0, 1
    leaves = [2 + i for i in range(k)]

    transition = {(root, 0): [(chooser, 1.0)]}
    for i, leaf in enumerate(leaves):
        transition[(chooser, i)] = [(leaf, 1.0)]
    reward = {pair: [(0.0, 1.0)] for pair in transition}

    return TabularMdp(num_states=k + 2, num_actions=k, transition=transition, reward=reward,
                      initial_state=root, terminal_states=frozenset(leaves), discount=discount,
                      name=f"tree(k={k})")


def make_cliff(height: int = 4, width: int = 12, discount: float = 0.9) -> TabularMdp:
    '''
    Cliff-walking grid, cell index = row * width + col with row 0 on top.
    Start bottom-left, goal bottom-right; the bottom-row cells in between
    are the cliff: entering one costs -100 and sends the agent back to the
    start. Every other move costs -1; moves off the grid keep the position.
    '''

    if height < 2 or width < 2:
        raise ConfigurationError(f"cliff: dimensions must be >= 2, got {height}x{width}")

    def cell(row, col):
        return row * width + col

    start, goal = cell(height - 1, 0), cell(height - 1, width - 1)
    cliff = {cell(height - 1, col) for col in range(1, width - 1)}
    moves = {UP: (-1, 0), RIGHT: (0, 1), DOWN: (1, 0), LEFT: (0, -1)}

    transition, reward = {}, {}
    for row in range(height):
        for col in range(width):

            s = cell(row, col)
            if s == goal:
                continue

            for a, (d_row, d_col) in moves.items():

                new_row = min(max(row + d_row, 0), height - 1)
                new_col = min(max(col + d_col, 0), width - 1)
                s_next = cell(new_row, new_col)

                if s_next in cliff:
                    transition[(s, a)] = [(start, 1.0)]
                    reward[(s, a)] = [(CLIFF_FALL_REWARD, 1.0)]
                else:
                    transition[(s, a)] = [(s_next, 1.0)]
                    reward[(s, a)] = [(CLIFF_STEP_REWARD, 1.0)]

    return TabularMdp(num_states=height * width, num_actions=4, transition=transition, reward=reward,
                      initial_state=start, terminal_states=frozenset({goal}), discount=discount,
                      name=f"cliff({height}x{width})", action_names=("up", "right", "down", "left"))

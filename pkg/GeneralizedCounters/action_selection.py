from dataclasses import dataclass
import math
import numpy as np

from GeneralizedCounters.SeededRng import SeededRng
from GeneralizedCounters.exceptions import ConfigurationError, ContractViolation

RULE_KINDS = ("epsilon_greedy", "softmax")
BONUS_KINDS = ("inverse_gc", "inverse_sqrt_neglog")
DEFAULT_BETA = {"inverse_gc": 1.0, "inverse_sqrt_neglog": 0.05}


@dataclass(frozen=True)
class StochasticRule:
    kind: str
    epsilon: float = 0.1
    temperature: float = 0.25

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise ConfigurationError(f"Unknown stochastic rule '{self.kind}', valid: {', '.join(RULE_KINDS)}")
        if self.kind == "epsilon_greedy" and not 0 <= self.epsilon <= 1:
            raise ConfigurationError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.kind == "softmax" and not self.temperature > 0:
            raise ConfigurationError(f"softmax temperature must be > 0, got {self.temperature}")


@dataclass(frozen=True)
class BonusForm:
    kind: str = "inverse_gc"
    beta: float = None

    def __post_init__(self):
        if self.kind not in BONUS_KINDS:
            raise ConfigurationError(f"Unknown bonus form '{self.kind}', valid: {', '.join(BONUS_KINDS)}")
        if self.beta is None:
            object.__setattr__(self, "beta", DEFAULT_BETA[self.kind])


def _valid(num_actions: int, actions) -> np.ndarray:
    mask = np.zeros(num_actions, dtype=bool)
    if actions is None:
        mask[:] = True
    else:
        mask[np.asarray(actions, dtype=int)] = True
    return mask


def action_distribution(rule: StochasticRule, q_values, actions=None) -> np.ndarray:
    '''f(a) for one state's action values; invalid actions get probability 0'''

    q_values = np.asarray(q_values, dtype=float)
    valid = _valid(len(q_values), actions)
    n_valid = valid.sum()
    dist = np.zeros(len(q_values))

    if rule.kind == "epsilon_greedy":
        best = q_values[valid].max()
        greedy = valid & (q_values == best)
        dist[valid] = rule.epsilon / n_valid
        dist[greedy] += (1 - rule.epsilon) / greedy.sum()

    else:
        # max-subtraction keeps exp() in range
        logits = q_values[valid] / rule.temperature
        weights = np.exp(logits - logits.max())
        dist[valid] = weights / weights.sum()

    return dist


def policy_distribution(rule: StochasticRule, Q, s: int, actions=None) -> np.ndarray:
    return action_distribution(rule, Q.q[s], actions)


def sample_action(dist, rng: SeededRng) -> int:
    return rng.categorical(dist)


def _first_argmax(scores: np.ndarray) -> int:
    # np.argmax returns the first maximum: lowest-index tie-breaking
    return int(np.argmax(scores))


def lll_scores(f, gc) -> np.ndarray:
    '''log f(a) - log gc(a), with log 0 = -inf for f and +inf priority for unvisited pairs'''

    f = np.asarray(f, dtype=float)
    gc = np.asarray(gc, dtype=float)
    scores = np.full(len(f), -np.inf)

    possible = f > 0
    unvisited = possible & (gc <= 0)
    visited = possible & ~unvisited

    scores[unvisited] = np.inf
    scores[visited] = np.log(f[visited]) - np.log(gc[visited])
    return scores


def lll_select(f, gc) -> int:
    '''argmax_a log f(a) - log gc(a)'''

    scores = lll_scores(f, gc)
    if np.all(scores == -np.inf):
        raise ContractViolation("lll_select: every action has zero probability")

    return _first_argmax(scores)


def mindiff_select(f, c, total: int) -> int:
    '''argmin_a C(a)/C - f(a) over actions with f(a) > 0'''

    f = np.asarray(f, dtype=float)
    possible = f > 0
    if not possible.any():
        raise ContractViolation("mindiff_select: every action has zero probability")

    ratios = np.asarray(c, dtype=float) / total if total > 0 else np.zeros(len(f))
    differences = np.where(possible, ratios - f, np.inf)
    return int(np.argmin(differences))


def ucb_select(Q, counts, s: int, t: int, actions=None) -> int:
    '''argmax_a Q(s,a) + sqrt(ln t / counts(a)); counts may be visit or generalized counters'''

    q_values = Q.q[s]
    counts = np.asarray(counts, dtype=float)
    valid = _valid(len(q_values), actions)

    scores = np.full(len(q_values), -np.inf)
    unvisited = valid & (counts <= 0)
    visited = valid & ~unvisited

    scores[unvisited] = np.inf
    scores[visited] = q_values[visited] + np.sqrt(math.log(max(t, 1)) / counts[visited])
    return _first_argmax(scores)


def greedy_select(q_values, actions=None) -> int:
    q_values = np.asarray(q_values, dtype=float)
    valid = _valid(len(q_values), actions)
    return _first_argmax(np.where(valid, q_values, -np.inf))


def reward_bonus(r: float, gc_post: float, form: BonusForm, alpha: float) -> float:
    '''
    Adds the exploration bonus of the visited pair to the reward. gc_post is
    the pair's generalized counter after this step's E-update, so it is > 0.
    '''

    if not gc_post > 0:
        raise ContractViolation(f"reward_bonus: generalized counter {gc_post} <= 0, E must be updated first")

    if form.kind == "inverse_gc":
        return r + form.beta / gc_post

    # beta / sqrt(-ln E), with -ln E = gc * (-ln(1 - alpha))
    return r + form.beta / math.sqrt(gc_post * -math.log(1 - alpha))

import math
import torch
import torch.nn as nn

from GeneralizedCounters.SeededRng import SeededRng
from GeneralizedCounters.TileCoder import SparseFeatures
from GeneralizedCounters.exceptions import DivergenceError


class LinearQHead(nn.Module):
    '''Linear Q-values over sparse binary features, no non-linearity'''

    def __init__(self, num_features: int, rng: SeededRng, init_scale: float = 0.01):

        super().__init__()

        # random init drawn through the simulation rng for reproducibility
        init = rng.uniform(-init_scale, init_scale, size=num_features)
        self.weights = nn.Parameter(torch.from_numpy(init).to(torch.float64), requires_grad=False)

    def forward(self, active_indices: torch.Tensor) -> torch.Tensor:
        return self.weights[active_indices].sum(dim=-1)


class LogisticEHead(nn.Module):
    '''E-values as the logistic of a linear output; zero weights give E = 0.5 everywhere'''

    def __init__(self, num_features: int):

        super().__init__()
        self.weights = nn.Parameter(torch.zeros(num_features, dtype=torch.float64), requires_grad=False)

    def forward(self, active_indices: torch.Tensor) -> torch.Tensor:
        return torch.sigmoid(self.weights[active_indices].sum(dim=-1))


def _indices(phi: SparseFeatures) -> torch.Tensor:
    return torch.as_tensor(phi.active_indices, dtype=torch.long)


def q_predict(head: LinearQHead, phi: SparseFeatures) -> float:
    return head(_indices(phi)).item()


def e_predict(head: LogisticEHead, phi: SparseFeatures) -> float:
    return head(_indices(phi)).item()


def q_update_direction(head: LinearQHead, phi: SparseFeatures, target: float) -> torch.Tensor:
    '''
    Dense semi-gradient direction delta * d q / d w for a frozen target,
    i.e. minus the gradient of 0.5 * (target - q)^2.
    '''

    index = _indices(phi)
    delta = target - head(index).item()
    direction = torch.zeros_like(head.weights)
    direction[index] = delta
    return direction


def e_update_direction(head: LogisticEHead, phi: SparseFeatures, target: float) -> torch.Tensor:
    '''delta * e * (1 - e) on the active weights: minus the gradient of 0.5 * (target - e)^2'''

    index = _indices(phi)
    e = head(index).item()
    direction = torch.zeros_like(head.weights)
    direction[index] = (target - e) * e * (1 - e)
    return direction


def linear_q_step(head: LinearQHead, phi: SparseFeatures, r: float, phi_next: SparseFeatures,
                  gamma: float, alpha: float, done: bool) -> LinearQHead:
    '''semi-gradient Q-learning step; phi_next are the features of (s', argmax_a' Q)'''

    index = _indices(phi)
    bootstrap = 0.0 if done else q_predict(head, phi_next)
    delta = r + gamma * bootstrap - head(index).item()

    if not math.isfinite(delta):
        raise DivergenceError(f"linear Q head diverged, TD error {delta}")

    with torch.no_grad():
        head.weights[index] += alpha / len(index) * delta
    return head


def logistic_e_step(head: LogisticEHead, phi: SparseFeatures, phi_next: SparseFeatures,
                    gamma_e: float, alpha_e: float, done: bool) -> LogisticEHead:
    '''on-policy SARSA step of the E-head with zero reward; phi_next from the realized (s', a')'''

    index = _indices(phi)
    target = 0.0 if done else gamma_e * e_predict(head, phi_next)
    e = head(index).item()

    with torch.no_grad():
        head.weights[index] += alpha_e / len(index) * (target - e) * e * (1 - e)
    return head
